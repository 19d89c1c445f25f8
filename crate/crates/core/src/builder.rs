//! Ergonomic construction of causal models and SCMs.
//!
//! The builders collect declarations and defer all validation to
//! [`CausalModel::new`] / [`Scm::new`], so a malformed build fails with the
//! same errors a hand-assembled model would.

use std::collections::BTreeMap;

use crate::assign::Assignment;
use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::model::{CausalModel, CpdTable};
use crate::prob::ExactProb;
use crate::scm::{EquationTable, Scm};
use crate::signature::Signature;
use crate::space::Space;

type MassList = Vec<(String, ExactProb)>;

#[derive(Debug, Default, Clone)]
pub struct ModelBuilder {
    exogenous: Vec<(String, Vec<String>)>,
    endogenous: Vec<(String, Vec<String>)>,
    edges: Vec<(String, String)>,
    priors: BTreeMap<String, MassList>,
    rows: Vec<(String, Assignment, MassList)>,
    error: Option<Error>,
}

fn ratio(p: (i64, i64)) -> Result<ExactProb> {
    ExactProb::new(p.0, p.1)
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn exogenous(mut self, name: &str, range: &[&str]) -> Self {
        self.exogenous
            .push((name.into(), range.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn endogenous(mut self, name: &str, range: &[&str]) -> Self {
        self.endogenous
            .push((name.into(), range.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn edge(mut self, from: &str, to: &str) -> Self {
        self.edges.push((from.into(), to.into()));
        self
    }

    pub fn prior(mut self, var: &str, masses: &[(&str, (i64, i64))]) -> Self {
        let mut row = Vec::new();
        for (val, p) in masses {
            match ratio(*p) {
                Ok(p) => row.push((val.to_string(), p)),
                Err(e) => {
                    self.error.get_or_insert(e);
                }
            }
        }
        self.priors.insert(var.into(), row);
        self
    }

    pub fn uniform_prior(mut self, var: &str) -> Self {
        let range = self
            .exogenous
            .iter()
            .find(|(n, _)| n == var)
            .map(|(_, r)| r.clone());
        match range {
            Some(range) => {
                let n = range.len() as i64;
                let masses: Vec<(String, ExactProb)> = range
                    .into_iter()
                    .map(|v| (v, ExactProb::new(1, n).unwrap()))
                    .collect();
                self.priors.insert(var.into(), masses);
            }
            None => {
                self.error.get_or_insert(Error::UnknownVariable(var.into()));
            }
        }
        self
    }

    pub fn cpd_row(
        mut self,
        var: &str,
        pa: &[(&str, &str)],
        masses: &[(&str, (i64, i64))],
    ) -> Self {
        let mut row = Vec::new();
        for (val, p) in masses {
            match ratio(*p) {
                Ok(p) => row.push((val.to_string(), p)),
                Err(e) => {
                    self.error.get_or_insert(e);
                }
            }
        }
        self.rows.push((var.into(), Assignment::of(pa), row));
        self
    }

    pub fn prior_exact(mut self, var: &str, masses: &[(&str, ExactProb)]) -> Self {
        self.priors.insert(
            var.into(),
            masses
                .iter()
                .map(|(v, p)| (v.to_string(), p.clone()))
                .collect(),
        );
        self
    }

    pub fn cpd_row_exact(
        mut self,
        var: &str,
        pa: &[(&str, &str)],
        masses: &[(&str, ExactProb)],
    ) -> Self {
        let row = masses
            .iter()
            .map(|(v, p)| (v.to_string(), p.clone()))
            .collect();
        self.rows.push((var.into(), Assignment::of(pa), row));
        self
    }

    pub fn build(self) -> Result<CausalModel> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let signature = Signature::new(self.exogenous.clone(), self.endogenous.clone())?;
        let nodes: Vec<String> = signature.all_vars().map(str::to_string).collect();
        let dag = Dag::new(nodes, &self.edges)?;

        let mut priors = BTreeMap::new();
        for (var, masses) in &self.priors {
            let range = signature.range(var)?;
            let mut dense = vec![ExactProb::zero(); range.len()];
            for (val, p) in masses {
                dense[signature.value_index(var, val)?] = p.clone();
            }
            priors.insert(var.clone(), dense);
        }

        let mut cpds: BTreeMap<String, CpdTable> = BTreeMap::new();
        for x in signature.endogenous() {
            let parents = dag.parents(x)?.to_vec();
            let pa_space = Space::new(
                parents
                    .iter()
                    .map(|p| (p.clone(), signature.range(p).unwrap().to_vec()))
                    .collect(),
                u128::MAX,
            )?;
            let arity = signature.range(x)?.len();
            let mut rows: Vec<Option<Vec<ExactProb>>> = vec![None; pa_space.size()];
            for (var, pa, masses) in &self.rows {
                if var != x {
                    continue;
                }
                let idx = pa_space.encode(pa).map_err(|_| {
                    Error::InvalidModel(format!(
                        "cpd row for `{}` keyed by `{}` does not assign exactly its parents",
                        x, pa
                    ))
                })?;
                let mut dense = vec![ExactProb::zero(); arity];
                for (val, p) in masses {
                    dense[signature.value_index(x, val)?] = p.clone();
                }
                rows[pa_space.index_of(&idx)] = Some(dense);
            }
            let rows: Vec<Vec<ExactProb>> = rows
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    r.ok_or_else(|| {
                        Error::InvalidModel(format!(
                            "cpd for `{}` misses the row {}",
                            x,
                            pa_space.decode(&pa_space.indices_at(i))
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            cpds.insert(x.clone(), CpdTable::from_parts(parents, pa_space, rows)?);
        }
        CausalModel::new(signature, dag, priors, cpds)
    }
}

#[derive(Debug, Default, Clone)]
pub struct ScmBuilder {
    exogenous: Vec<(String, Vec<String>)>,
    endogenous: Vec<(String, Vec<String>)>,
    edges: Vec<(String, String)>,
    priors: BTreeMap<String, MassList>,
    equations: Vec<(String, Assignment, String)>,
    error: Option<Error>,
}

impl ScmBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn exogenous(mut self, name: &str, range: &[&str]) -> Self {
        self.exogenous
            .push((name.into(), range.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn endogenous(mut self, name: &str, range: &[&str]) -> Self {
        self.endogenous
            .push((name.into(), range.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn edge(mut self, from: &str, to: &str) -> Self {
        self.edges.push((from.into(), to.into()));
        self
    }

    pub fn prior(mut self, var: &str, masses: &[(&str, (i64, i64))]) -> Self {
        let mut row = Vec::new();
        for (val, p) in masses {
            match ratio(*p) {
                Ok(p) => row.push((val.to_string(), p)),
                Err(e) => {
                    self.error.get_or_insert(e);
                }
            }
        }
        self.priors.insert(var.into(), row);
        self
    }

    pub fn uniform_prior(mut self, var: &str) -> Self {
        let range = self
            .exogenous
            .iter()
            .find(|(n, _)| n == var)
            .map(|(_, r)| r.clone());
        match range {
            Some(range) => {
                let n = range.len() as i64;
                let masses: Vec<(String, ExactProb)> = range
                    .into_iter()
                    .map(|v| (v, ExactProb::new(1, n).unwrap()))
                    .collect();
                self.priors.insert(var.into(), masses);
            }
            None => {
                self.error.get_or_insert(Error::UnknownVariable(var.into()));
            }
        }
        self
    }

    /// Adds one (value, mass) entry to a prior.
    pub fn prior_value(mut self, var: &str, value: &str, p: ExactProb) -> Self {
        self.priors
            .entry(var.into())
            .or_default()
            .push((value.into(), p));
        self
    }

    /// One equation-table entry: the value of `var` at a parent assignment.
    pub fn equation(mut self, var: &str, pa: &[(&str, &str)], value: &str) -> Self {
        self.equations
            .push((var.into(), Assignment::of(pa), value.into()));
        self
    }

    /// Fills `var`'s whole table by evaluating a function of the parent
    /// assignment.
    pub fn equation_fn(mut self, var: &str, f: impl Fn(&Assignment) -> String) -> Self {
        let signature = match Signature::new(self.exogenous.clone(), self.endogenous.clone()) {
            Ok(s) => s,
            Err(e) => {
                self.error.get_or_insert(e);
                return self;
            }
        };
        let parents: Vec<String> = self
            .edges
            .iter()
            .filter(|(_, to)| to == var)
            .map(|(from, _)| from.clone())
            .collect();
        // Parent order must match the dag's normalized (declaration) order.
        let mut order: Vec<String> = Vec::new();
        for v in signature.all_vars() {
            if parents.iter().any(|p| p == v) {
                order.push(v.to_string());
            }
        }
        let pa_space = match Space::new(
            order
                .iter()
                .map(|p| (p.clone(), signature.range(p).unwrap().to_vec()))
                .collect(),
            u128::MAX,
        ) {
            Ok(s) => s,
            Err(e) => {
                self.error.get_or_insert(e);
                return self;
            }
        };
        for idx in pa_space.iter_indices() {
            let pa = pa_space.decode(&idx);
            let value = f(&pa);
            self.equations.push((var.into(), pa, value));
        }
        self
    }

    pub fn build(self) -> Result<Scm> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let signature = Signature::new(self.exogenous.clone(), self.endogenous.clone())?;
        let nodes: Vec<String> = signature.all_vars().map(str::to_string).collect();
        let dag = Dag::new(nodes, &self.edges)?;

        let mut priors = BTreeMap::new();
        for (var, masses) in &self.priors {
            let range = signature.range(var)?;
            let mut dense = vec![ExactProb::zero(); range.len()];
            for (val, p) in masses {
                dense[signature.value_index(var, val)?] = p.clone();
            }
            priors.insert(var.clone(), dense);
        }

        let mut equations: BTreeMap<String, EquationTable> = BTreeMap::new();
        for x in signature.endogenous() {
            let parents = dag.parents(x)?.to_vec();
            let pa_space = Space::new(
                parents
                    .iter()
                    .map(|p| (p.clone(), signature.range(p).unwrap().to_vec()))
                    .collect(),
                u128::MAX,
            )?;
            let mut table: Vec<Option<usize>> = vec![None; pa_space.size()];
            for (var, pa, value) in &self.equations {
                if var != x {
                    continue;
                }
                let idx = pa_space.encode(pa).map_err(|_| {
                    Error::InvalidModel(format!(
                        "equation row for `{}` keyed by `{}` does not assign exactly its parents",
                        x, pa
                    ))
                })?;
                table[pa_space.index_of(&idx)] = Some(signature.value_index(x, value)?);
            }
            let table: Vec<usize> = table
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    r.ok_or_else(|| {
                        Error::InvalidModel(format!(
                            "equation for `{}` misses the row {}",
                            x,
                            pa_space.decode(&pa_space.indices_at(i))
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            equations.insert(
                x.clone(),
                EquationTable::from_parts(parents, pa_space, table)?,
            );
        }
        Scm::new(signature, dag, equations, priors)
    }
}
