//! Constructive coarsenings of exogenous variables and the structures they
//! induce.
//!
//! Coarsening a fine-grained model can produce a higher-level object that is
//! no longer a valid causal model: conditionals can become nondeterministic
//! and the Markov condition can fail outright. `coarsen` therefore returns
//! an [`InducedStructure`] carrying the exact pushforward joint together
//! with diagnostics, and promotion back to a causal model is a separate,
//! validated step.

use std::collections::{BTreeMap, BTreeSet};

use crate::assign::Assignment;
use crate::dag::Dag;
use crate::dist::Distribution;
use crate::error::{Caps, Error, Result};
use crate::model::{check_markov, CausalModel, CpdTable, MarkovReport};
use crate::prob::ExactProb;
use crate::scm::Scm;
use crate::signature::Signature;
use crate::space::Space;

/// One block of a coarsening: a set of low-level exogenous variables mapped
/// jointly onto one new variable through a surjective value map.
#[derive(Debug, Clone)]
pub struct CoarseBlock {
    new_var: String,
    new_range: Vec<String>,
    old_vars: Vec<String>,
    old_space: Space,
    /// New-value index per linear index of the old block space.
    map: Vec<usize>,
}

impl CoarseBlock {
    /// Builds a block from a value map given as a function of the old
    /// variables' joint assignment.
    pub fn new(
        new_var: &str,
        new_range: &[&str],
        old_vars: &[(&str, &[&str])],
        value_map: impl Fn(&Assignment) -> String,
    ) -> Result<Self> {
        let old_space = Space::new(
            old_vars
                .iter()
                .map(|(n, r)| (n.to_string(), r.iter().map(|s| s.to_string()).collect()))
                .collect(),
            u128::MAX,
        )?;
        let new_range: Vec<String> = new_range.iter().map(|s| s.to_string()).collect();
        let mut map = Vec::with_capacity(old_space.size());
        for idx in old_space.iter_indices() {
            let assignment = old_space.decode(&idx);
            let value = value_map(&assignment);
            let pos =
                new_range
                    .iter()
                    .position(|v| *v == value)
                    .ok_or_else(|| Error::OutOfRange {
                        variable: new_var.to_string(),
                        value,
                    })?;
            map.push(pos);
        }
        Ok(CoarseBlock {
            new_var: new_var.to_string(),
            new_range,
            old_vars: old_vars.iter().map(|(n, _)| n.to_string()).collect(),
            old_space,
            map,
        })
    }

    pub fn new_var(&self) -> &str {
        &self.new_var
    }

    pub fn old_vars(&self) -> &[String] {
        &self.old_vars
    }

    fn is_surjective(&self) -> bool {
        let hit: BTreeSet<usize> = self.map.iter().copied().collect();
        hit.len() == self.new_range.len()
    }
}

/// A constructive coarsening: disjoint blocks over low-level exogenous
/// variables. Variables not covered by any block are carried over
/// unchanged.
#[derive(Debug, Clone, Default)]
pub struct Coarsening {
    blocks: Vec<CoarseBlock>,
}

impl Coarsening {
    pub fn new(blocks: Vec<CoarseBlock>) -> Result<Self> {
        let mut seen_new: BTreeSet<&str> = BTreeSet::new();
        let mut seen_old: BTreeSet<&str> = BTreeSet::new();
        for block in &blocks {
            if !seen_new.insert(&block.new_var) {
                return Err(Error::InvalidSignature(format!(
                    "duplicate coarse variable `{}`",
                    block.new_var
                )));
            }
            for old in &block.old_vars {
                if !seen_old.insert(old) {
                    return Err(Error::InvalidSignature(format!(
                        "variable `{}` appears in two blocks",
                        old
                    )));
                }
            }
        }
        Ok(Coarsening { blocks })
    }

    pub fn blocks(&self) -> &[CoarseBlock] {
        &self.blocks
    }
}

/// A conditional table derived from a joint distribution: one row per
/// parent assignment, `None` where the parent assignment has zero mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedTable {
    pub variable: String,
    pub parents: Vec<String>,
    pub rows: Vec<(Assignment, Option<Vec<ExactProb>>)>,
}

impl DerivedTable {
    /// Whether every defined row is extremal (all masses 0 or 1).
    pub fn is_deterministic(&self) -> bool {
        self.rows.iter().all(|(_, row)| {
            row.as_ref()
                .is_none_or(|r| r.iter().all(|p| p.is_extremal()))
        })
    }

    pub fn row(&self, pa: &Assignment) -> Option<&Option<Vec<ExactProb>>> {
        self.rows.iter().find(|(a, _)| a == pa).map(|(_, r)| r)
    }
}

/// The structure induced by coarsening: the new signature and candidate
/// graph, the exact pushforward joint, per-node conditional tables, the
/// Markov verdict, and per-variable determinism flags.
#[derive(Debug, Clone)]
pub struct InducedStructure {
    pub signature: Signature,
    pub dag: Dag,
    pub joint: Distribution,
    pub tables: BTreeMap<String, DerivedTable>,
    pub markov: MarkovReport,
    pub deterministic: BTreeMap<String, bool>,
}

impl InducedStructure {
    /// The conditional probability `P(var = value | pa)` read from the
    /// derived tables.
    pub fn conditional(&self, var: &str, value: &str, pa: &Assignment) -> Result<ExactProb> {
        let table = self
            .tables
            .get(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        let row = table
            .row(pa)
            .ok_or_else(|| Error::InvalidModel(format!("no row for {}", pa)))?
            .as_ref()
            .ok_or(Error::UndefinedConditional)?;
        Ok(row[self.signature.value_index(var, value)?].clone())
    }

    /// Promotes the induced structure to a causal model. Only structures
    /// whose pushforward satisfies the Markov condition qualify; rows at
    /// zero-mass parent assignments are completed uniformly.
    pub fn promote(&self) -> Result<CausalModel> {
        if !self.markov.holds {
            return Err(Error::InvalidModel(
                "induced joint is not Markov relative to the candidate dag".into(),
            ));
        }
        let mut priors = BTreeMap::new();
        for u in self.signature.exogenous() {
            let marginal = self.joint.marginal(&[u])?;
            priors.insert(u.clone(), marginal.masses().to_vec());
        }
        let mut cpds = BTreeMap::new();
        for x in self.signature.endogenous() {
            let table = &self.tables[x];
            let parents = table.parents.clone();
            let pa_space = Space::new(
                parents
                    .iter()
                    .map(|p| (p.clone(), self.signature.range(p).unwrap().to_vec()))
                    .collect(),
                u128::MAX,
            )?;
            let arity = self.signature.range(x)?.len();
            let uniform = vec![ExactProb::new(1, arity as i64)?; arity];
            let rows: Vec<Vec<ExactProb>> = table
                .rows
                .iter()
                .map(|(_, row)| row.clone().unwrap_or_else(|| uniform.clone()))
                .collect();
            cpds.insert(x.clone(), CpdTable::from_parts(parents, pa_space, rows)?);
        }
        CausalModel::new(self.signature.clone(), self.dag.clone(), priors, cpds)
    }
}

/// Applies a coarsening to a low-level model and computes the induced
/// structure against a candidate graph. Only exogenous variables may be
/// coarsened; endogenous variables are carried over unchanged.
pub fn coarsen(
    low: &CausalModel,
    tau: &Coarsening,
    candidate_dag: &Dag,
) -> Result<InducedStructure> {
    coarsen_with(low, tau, candidate_dag, &Caps::default())
}

pub fn coarsen_with(
    low: &CausalModel,
    tau: &Coarsening,
    candidate_dag: &Dag,
    caps: &Caps,
) -> Result<InducedStructure> {
    let sig = low.signature();
    for block in &tau.blocks {
        for old in &block.old_vars {
            if !sig.is_exogenous(old) {
                return Err(Error::InvalidModel(format!(
                    "only exogenous variables may be coarsened, `{}` is not",
                    old
                )));
            }
            if block.old_space.range(old)? != sig.range(old)? {
                return Err(Error::InvalidModel(format!(
                    "block range for `{}` does not match the model",
                    old
                )));
            }
        }
        if !block.is_surjective() {
            return Err(Error::InvalidModel(format!(
                "value map for `{}` is not surjective",
                block.new_var
            )));
        }
    }

    // New signature: coarse variables in block order, untouched exogenous
    // variables after them, endogenous variables unchanged.
    let covered: BTreeSet<&str> = tau
        .blocks
        .iter()
        .flat_map(|b| b.old_vars.iter().map(String::as_str))
        .collect();
    let mut exo: Vec<(String, Vec<String>)> = tau
        .blocks
        .iter()
        .map(|b| (b.new_var.clone(), b.new_range.clone()))
        .collect();
    for u in sig.exogenous() {
        if !covered.contains(u.as_str()) {
            exo.push((u.clone(), sig.range(u)?.to_vec()));
        }
    }
    let endo: Vec<(String, Vec<String>)> = sig
        .endogenous()
        .iter()
        .map(|x| (x.clone(), sig.range(x).unwrap().to_vec()))
        .collect();
    let new_sig = Signature::new(exo, endo)?;
    candidate_dag.check_compatible(&new_sig)?;

    // Exact pushforward of the low joint.
    let low_joint = low.joint_with(caps)?;
    let new_space = Space::new(
        new_sig
            .all_vars()
            .map(|v| (v.to_string(), new_sig.range(v).unwrap().to_vec()))
            .collect(),
        caps.max_states,
    )?;
    let mut mass = vec![ExactProb::zero(); new_space.size()];
    for (low_assignment, m) in low_joint.support() {
        let mut new_assignment = Assignment::new();
        for block in &tau.blocks {
            let restricted = low_assignment.restrict(block.old_vars.iter().map(String::as_str));
            let idx = block.old_space.encode(&restricted)?;
            let value = &block.new_range[block.map[block.old_space.index_of(&idx)]];
            new_assignment.set(&block.new_var, value);
        }
        for var in new_sig.all_vars() {
            if !new_assignment.contains(var) {
                new_assignment.set(var, low_assignment.get(var).unwrap());
            }
        }
        let idx = new_space.encode(&new_assignment)?;
        mass[new_space.index_of(&idx)] += m;
    }
    let joint = Distribution::new(new_space, mass)?;

    // A coarse value no low-level state realizes makes every conditional
    // involving it undefined.
    for block in &tau.blocks {
        let marginal = joint.marginal(&[&block.new_var])?;
        for value in &block.new_range {
            let mut event = Assignment::new();
            event.set(&block.new_var, value);
            if marginal.prob(&event)?.is_zero() {
                return Err(Error::InvalidModel(format!(
                    "coarse value `{}={}` has zero mass",
                    block.new_var, value
                )));
            }
        }
    }

    let mut tables = BTreeMap::new();
    let mut deterministic = BTreeMap::new();
    for var in new_sig.all_vars() {
        let parents = candidate_dag.parents(var)?.to_vec();
        let table = derived_table(&joint, var, &parents)?;
        if new_sig.is_endogenous(var) {
            deterministic.insert(var.to_string(), table.is_deterministic());
        }
        tables.insert(var.to_string(), table);
    }
    let markov = check_markov(&new_sig, candidate_dag, &joint)?;
    Ok(InducedStructure {
        signature: new_sig,
        dag: candidate_dag.clone(),
        joint,
        tables,
        markov,
        deterministic,
    })
}

/// Coarsens a structural model by first passing to the causal model it
/// induces.
pub fn coarsen_scm(low: &Scm, tau: &Coarsening, candidate_dag: &Dag) -> Result<InducedStructure> {
    coarsen(&low.induced_model()?, tau, candidate_dag)
}

fn derived_table(joint: &Distribution, var: &str, parents: &[String]) -> Result<DerivedTable> {
    let space = joint.space();
    let pa_space = Space::new(
        parents
            .iter()
            .map(|p| (p.clone(), space.range(p).unwrap().to_vec()))
            .collect(),
        u128::MAX,
    )?;
    let arity = space.range(var)?.len();
    let var_pos = space.position(var)?;
    let parent_positions: Vec<usize> = parents.iter().map(|p| space.position(p).unwrap()).collect();
    let mut numer = vec![vec![ExactProb::zero(); arity]; pa_space.size()];
    let mut denom = vec![ExactProb::zero(); pa_space.size()];
    let mut scratch = Vec::new();
    for (i, m) in joint.masses().iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let idx = space.indices_at(i);
        scratch.clear();
        scratch.extend(parent_positions.iter().map(|&p| idx[p]));
        let pa = pa_space.index_of(&scratch);
        numer[pa][idx[var_pos]] += m;
        denom[pa] += m;
    }
    let rows = (0..pa_space.size())
        .map(|pa| {
            let assignment = pa_space.decode(&pa_space.indices_at(pa));
            let row = if denom[pa].is_zero() {
                None
            } else {
                Some(
                    numer[pa]
                        .iter()
                        .map(|n| n.checked_div(&denom[pa]).unwrap())
                        .collect(),
                )
            };
            (assignment, row)
        })
        .collect();
    Ok(DerivedTable {
        variable: var.to_string(),
        parents: parents.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::ScmBuilder;

    fn pr(n: i64, d: i64) -> ExactProb {
        ExactProb::new(n, d).unwrap()
    }

    /// Uniform three-valued source copied into Y, then coarsened by
    /// "is the source equal to 1".
    fn emergent_nondeterminism() -> InducedStructure {
        let low = ScmBuilder::new()
            .exogenous("U", &["1", "2", "3"])
            .endogenous("Y", &["1", "2", "3"])
            .edge("U", "Y")
            .uniform_prior("U")
            .equation_fn("Y", |pa| pa.get("U").unwrap().to_string())
            .build()
            .unwrap();
        let block = CoarseBlock::new("Z", &["0", "1"], &[("U", &["1", "2", "3"])], |a| {
            if a.get("U") == Some("1") {
                "1".into()
            } else {
                "0".into()
            }
        })
        .unwrap();
        let tau = Coarsening::new(vec![block]).unwrap();
        let dag = Dag::new(vec!["Z".into(), "Y".into()], &[("Z".into(), "Y".into())]).unwrap();
        coarsen_scm(&low, &tau, &dag).unwrap()
    }

    #[test]
    fn coarsening_creates_nondeterminism() {
        let induced = emergent_nondeterminism();
        // P(Y=2 | Z=0) = 1/2: strictly between 0 and 1.
        assert_eq!(
            induced
                .conditional("Y", "2", &Assignment::of(&[("Z", "0")]))
                .unwrap(),
            pr(1, 2)
        );
        assert!(!induced.deterministic["Y"]);
        // The two-node chain still satisfies the Markov condition.
        assert!(induced.markov.holds);
        // Pushforward masses are conserved.
        let total: ExactProb = induced.joint.masses().iter().cloned().sum();
        assert!(total.is_one());
    }

    fn copy_pair(n: usize) -> Scm {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        ScmBuilder::new()
            .exogenous("X", &refs)
            .endogenous("Y", &refs)
            .endogenous("A", &refs)
            .edge("X", "Y")
            .edge("X", "A")
            .uniform_prior("X")
            .equation_fn("Y", |pa| pa.get("X").unwrap().to_string())
            .equation_fn("A", |pa| pa.get("X").unwrap().to_string())
            .build()
            .unwrap()
    }

    #[test]
    fn coarsening_breaks_the_markov_condition() {
        let low = copy_pair(100);
        let labels: Vec<String> = (1..=100).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let block = CoarseBlock::new("Z", &["0", "1"], &[("X", &refs)], |a| {
            let x: u32 = a.get("X").unwrap().parse().unwrap();
            if x <= 40 {
                "0".into()
            } else {
                "1".into()
            }
        })
        .unwrap();
        let tau = Coarsening::new(vec![block]).unwrap();
        let dag = Dag::new(
            vec!["Z".into(), "Y".into(), "A".into()],
            &[("Z".into(), "Y".into()), ("Z".into(), "A".into())],
        )
        .unwrap();
        let induced = coarsen_scm(&low, &tau, &dag).unwrap();
        assert!(!induced.markov.holds);
        // The stated witness: P(Y!=10 | Z=0, A=10) = 0 while
        // P(Y!=10 | Z=0) = 39/40.
        let witness = induced
            .markov
            .violations
            .iter()
            .find(|v| {
                v.variable == "Y"
                    && v.value == "10"
                    && v.parent_assignment == Assignment::of(&[("Z", "0")])
                    && v.context == Assignment::of(&[("A", "10")])
            })
            .expect("expected witness is enumerated");
        let (neq_ctx, neq_pa) = witness.complement_witness();
        assert!(neq_ctx.is_zero());
        assert_eq!(neq_pa, pr(39, 40));
        // Nondeterminism emerges as well.
        assert!(!induced.deterministic["Y"]);
    }

    #[test]
    fn identity_coarsening_is_a_no_op() {
        let low = copy_pair(5).induced_model().unwrap();
        let labels: Vec<String> = (1..=5).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let block = CoarseBlock::new("X", &refs, &[("X", &refs)], |a| {
            a.get("X").unwrap().to_string()
        })
        .unwrap();
        let tau = Coarsening::new(vec![block]).unwrap();
        let induced = coarsen(&low, &tau, low.dag()).unwrap();
        assert_eq!(induced.joint, low.joint().unwrap());
        assert!(induced.markov.holds);
        // And it promotes back to a model with the same joint.
        let promoted = induced.promote().unwrap();
        assert_eq!(promoted.joint().unwrap(), low.joint().unwrap());
    }

    #[test]
    fn non_surjective_maps_are_rejected() {
        let low = copy_pair(3).induced_model().unwrap();
        let labels: Vec<String> = (1..=3).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let block = CoarseBlock::new("Z", &["0", "1"], &[("X", &refs)], |_| "0".into()).unwrap();
        let tau = Coarsening::new(vec![block]).unwrap();
        let dag = Dag::new(
            vec!["Z".into(), "Y".into(), "A".into()],
            &[("Z".into(), "Y".into()), ("Z".into(), "A".into())],
        )
        .unwrap();
        assert!(matches!(
            coarsen(&low, &tau, &dag),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn promotion_requires_the_markov_condition() {
        let low = copy_pair(100);
        let labels: Vec<String> = (1..=100).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let block = CoarseBlock::new("Z", &["0", "1"], &[("X", &refs)], |a| {
            let x: u32 = a.get("X").unwrap().parse().unwrap();
            if x <= 40 {
                "0".into()
            } else {
                "1".into()
            }
        })
        .unwrap();
        let tau = Coarsening::new(vec![block]).unwrap();
        let dag = Dag::new(
            vec!["Z".into(), "Y".into(), "A".into()],
            &[("Z".into(), "Y".into()), ("Z".into(), "A".into())],
        )
        .unwrap();
        let induced = coarsen_scm(&low, &tau, &dag).unwrap();
        assert!(induced.promote().is_err());
    }
}
