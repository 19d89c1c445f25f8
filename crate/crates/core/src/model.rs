//! Causal models: DAG-factored exact joint distributions with truncated-product
//! interventions and Markov-condition diagnostics.

use std::collections::BTreeMap;

use crate::assign::{Assignment, World};
use crate::dag::Dag;
use crate::dist::Distribution;
use crate::error::{Caps, Error, Result};
use crate::prob::ExactProb;
use crate::signature::Signature;
use crate::space::Space;

/// A conditional probability table for one endogenous variable: one exact
/// row per full assignment of its DAG parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpdTable {
    parents: Vec<String>,
    pa_space: Space,
    rows: Vec<Vec<ExactProb>>,
}

impl CpdTable {
    pub fn from_parts(
        parents: Vec<String>,
        pa_space: Space,
        rows: Vec<Vec<ExactProb>>,
    ) -> Result<Self> {
        if pa_space.vars() != parents.as_slice() {
            return Err(Error::InvalidModel(
                "cpd parent space does not match its parents".into(),
            ));
        }
        Ok(CpdTable {
            parents,
            pa_space,
            rows,
        })
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn pa_space(&self) -> &Space {
        &self.pa_space
    }

    pub fn rows(&self) -> &[Vec<ExactProb>] {
        &self.rows
    }

    pub fn row_at(&self, pa_index: usize) -> &[ExactProb] {
        &self.rows[pa_index]
    }

    /// The row for a parent assignment given by name.
    pub fn row(&self, pa: &Assignment) -> Result<&[ExactProb]> {
        let idx = self
            .pa_space
            .encode(&pa.restrict(self.parents.iter().map(String::as_str)))?;
        Ok(&self.rows[self.pa_space.index_of(&idx)])
    }

    /// Linear index of the parent assignment realized inside `full`, which
    /// must assign every parent.
    pub fn pa_index_in(&self, full: &Assignment) -> Result<usize> {
        let mut idx = Vec::with_capacity(self.parents.len());
        for p in &self.parents {
            let val = full
                .get(p)
                .ok_or_else(|| Error::InvalidModel(format!("assignment misses parent `{}`", p)))?;
            idx.push(self.pa_space.value_index(p, val)?);
        }
        Ok(self.pa_space.index_of(&idx))
    }
}

/// A causal model: signature, compatible DAG, exogenous priors, and one
/// conditional table per endogenous variable. The joint it denotes is the
/// product of all priors and table rows, so it is Markov by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalModel {
    signature: Signature,
    dag: Dag,
    priors: BTreeMap<String, Vec<ExactProb>>,
    cpds: BTreeMap<String, CpdTable>,
}

impl CausalModel {
    pub fn new(
        signature: Signature,
        dag: Dag,
        priors: BTreeMap<String, Vec<ExactProb>>,
        cpds: BTreeMap<String, CpdTable>,
    ) -> Result<Self> {
        dag.check_compatible(&signature)?;
        for u in signature.exogenous() {
            let prior = priors
                .get(u)
                .ok_or_else(|| Error::InvalidModel(format!("missing prior for `{}`", u)))?;
            if prior.len() != signature.range(u)?.len() {
                return Err(Error::InvalidModel(format!(
                    "prior for `{}` has the wrong arity",
                    u
                )));
            }
            let total: ExactProb = prior.iter().cloned().sum();
            if !total.is_one() {
                return Err(Error::InvalidModel(format!(
                    "prior for `{}` sums to {}, not 1",
                    u, total
                )));
            }
        }
        if priors.len() != signature.exogenous().len() {
            return Err(Error::InvalidModel(
                "prior for a non-exogenous variable".into(),
            ));
        }
        for x in signature.endogenous() {
            let table = cpds
                .get(x)
                .ok_or_else(|| Error::InvalidModel(format!("missing cpd for `{}`", x)))?;
            if table.parents != dag.parents(x)? {
                return Err(Error::InvalidModel(format!(
                    "cpd parents for `{}` do not match the dag",
                    x
                )));
            }
            if table.rows.len() != table.pa_space.size() {
                return Err(Error::InvalidModel(format!(
                    "cpd for `{}` misses parent rows",
                    x
                )));
            }
            let arity = signature.range(x)?.len();
            for (i, row) in table.rows.iter().enumerate() {
                if row.len() != arity {
                    return Err(Error::InvalidModel(format!(
                        "cpd row for `{}` has the wrong arity",
                        x
                    )));
                }
                let total: ExactProb = row.iter().cloned().sum();
                if !total.is_one() {
                    return Err(Error::InvalidModel(format!(
                        "cpd row {} for `{}` sums to {}, not 1",
                        table.pa_space.decode(&table.pa_space.indices_at(i)),
                        x,
                        total
                    )));
                }
            }
        }
        if cpds.len() != signature.endogenous().len() {
            return Err(Error::InvalidModel(
                "cpd for a non-endogenous variable".into(),
            ));
        }
        Ok(CausalModel {
            signature,
            dag,
            priors,
            cpds,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn prior(&self, var: &str) -> Result<&[ExactProb]> {
        self.priors
            .get(var)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn cpd(&self, var: &str) -> Result<&CpdTable> {
        self.cpds
            .get(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    /// P(var = value) for an exogenous variable.
    pub fn prior_prob(&self, var: &str, value: &str) -> Result<ExactProb> {
        Ok(self.prior(var)?[self.signature.value_index(var, value)?].clone())
    }

    /// P(var = value | pa) read from the conditional table. `pa` must cover
    /// the variable's parents; extra variables are ignored.
    pub fn cpd_prob(&self, var: &str, value: &str, pa: &Assignment) -> Result<ExactProb> {
        let table = self.cpd(var)?;
        let row = &table.rows[table.pa_index_in(pa)?];
        Ok(row[self.signature.value_index(var, value)?].clone())
    }

    /// The full space over exogenous then endogenous variables.
    pub fn full_space(&self, caps: &Caps) -> Result<Space> {
        let vars = self
            .signature
            .all_vars()
            .map(|v| (v.to_string(), self.signature.range(v).unwrap().to_vec()))
            .collect();
        Space::new(vars, caps.max_states)
    }

    /// The exact probability of a full world under the Markov factorization.
    pub fn world_prob(&self, world: &World) -> Result<ExactProb> {
        self.check_world_shape(world)?;
        let full = world.full();
        let mut p = ExactProb::one();
        for u in self.signature.exogenous() {
            p = p * self.prior_prob(u, world.u.get(u).unwrap())?;
            if p.is_zero() {
                return Ok(p);
            }
        }
        for x in self.signature.endogenous() {
            p = p * self.cpd_prob(x, world.v.get(x).unwrap(), &full)?;
            if p.is_zero() {
                return Ok(p);
            }
        }
        Ok(p)
    }

    /// Checks that a world assigns every exogenous and endogenous variable
    /// an in-range value, without touching probabilities.
    pub fn check_world_shape(&self, world: &World) -> Result<()> {
        for u in self.signature.exogenous() {
            let val = world
                .u
                .get(u)
                .ok_or_else(|| Error::InvalidModel(format!("world misses exogenous `{}`", u)))?;
            self.signature.value_index(u, val)?;
        }
        for x in self.signature.endogenous() {
            let val = world
                .v
                .get(x)
                .ok_or_else(|| Error::InvalidModel(format!("world misses endogenous `{}`", x)))?;
            self.signature.value_index(x, val)?;
        }
        if world.u.len() != self.signature.exogenous().len()
            || world.v.len() != self.signature.endogenous().len()
        {
            return Err(Error::InvalidModel(
                "world assigns a foreign variable".into(),
            ));
        }
        Ok(())
    }

    /// Enumerates every world with positive probability, with its mass.
    pub fn positive_worlds(&self, caps: &Caps) -> Result<Vec<(World, ExactProb)>> {
        let joint = self.joint_with(caps)?;
        let exo: Vec<&str> = self
            .signature
            .exogenous()
            .iter()
            .map(String::as_str)
            .collect();
        let mut out = Vec::new();
        for (full, mass) in joint.support() {
            let u = full.restrict(exo.iter().copied());
            let v = full.restrict(self.signature.endogenous().iter().map(String::as_str));
            out.push((World::new(u, v), mass.clone()));
        }
        Ok(out)
    }

    /// The joint distribution over all variables: the product of every
    /// prior and every conditional row.
    pub fn joint(&self) -> Result<Distribution> {
        self.joint_with(&Caps::default())
    }

    pub fn joint_with(&self, caps: &Caps) -> Result<Distribution> {
        self.truncated_joint(&Assignment::new(), caps)
    }

    /// The interventional distribution `P_do(X = x)` over all variables:
    /// zero where the assignment disagrees with `x`, otherwise the product
    /// of the surviving factors. Only endogenous variables may be clamped.
    pub fn intervene(&self, do_: &Assignment) -> Result<Distribution> {
        self.intervene_with(do_, &Caps::default())
    }

    pub fn intervene_with(&self, do_: &Assignment, caps: &Caps) -> Result<Distribution> {
        self.signature.check_endogenous_assignment(do_)?;
        self.truncated_joint(do_, caps)
    }

    fn truncated_joint(&self, do_: &Assignment, caps: &Caps) -> Result<Distribution> {
        let space = self.full_space(caps)?;
        let n_exo = self.signature.exogenous().len();
        // Precompute per-variable metadata keyed by position in the space.
        struct Factor {
            clamp: Option<usize>,
            prior: Option<Vec<ExactProb>>,
            parent_positions: Vec<usize>,
            table_index: Option<usize>,
        }
        let mut factors = Vec::with_capacity(space.arity());
        let mut tables: Vec<&CpdTable> = Vec::new();
        for (pos, var) in space.vars().iter().enumerate() {
            if pos < n_exo {
                factors.push(Factor {
                    clamp: None,
                    prior: Some(self.priors[var].clone()),
                    parent_positions: vec![],
                    table_index: None,
                });
            } else {
                let table = &self.cpds[var];
                let clamp = match do_.get(var) {
                    Some(val) => Some(space.value_index(var, val)?),
                    None => None,
                };
                let parent_positions = table
                    .parents
                    .iter()
                    .map(|p| space.position(p).unwrap())
                    .collect();
                factors.push(Factor {
                    clamp,
                    prior: None,
                    parent_positions,
                    table_index: Some(tables.len()),
                });
                tables.push(table);
            }
        }
        let mut mass = Vec::with_capacity(space.size());
        let mut pa_scratch: Vec<usize> = Vec::new();
        for idx in space.iter_indices() {
            let mut m = ExactProb::one();
            for (pos, factor) in factors.iter().enumerate() {
                if let Some(clamped) = factor.clamp {
                    if idx[pos] != clamped {
                        m = ExactProb::zero();
                        break;
                    }
                    continue; // clamped variable contributes no factor
                }
                if let Some(prior) = &factor.prior {
                    m = m * &prior[idx[pos]];
                } else {
                    let table = tables[factor.table_index.unwrap()];
                    pa_scratch.clear();
                    pa_scratch.extend(factor.parent_positions.iter().map(|&p| idx[p]));
                    let row = table.row_at(table.pa_space.index_of(&pa_scratch));
                    m = m * &row[idx[pos]];
                }
                if m.is_zero() {
                    break;
                }
            }
            mass.push(m);
        }
        Distribution::new(space, mass)
    }
}

/// One concrete conditional-independence failure: conditioning on some
/// non-descendants beyond the parents moves the distribution of `variable`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovViolation {
    pub variable: String,
    pub parent_assignment: Assignment,
    /// The extra conditioned non-descendant assignment that shifts the
    /// conditional.
    pub context: Assignment,
    pub value: String,
    /// P(variable = value | parents, context).
    pub p_given_context: ExactProb,
    /// P(variable = value | parents).
    pub p_given_parents: ExactProb,
}

impl MarkovViolation {
    /// The witness pair stated for the complementary event: probabilities
    /// that `variable` differs from `value`, with and without the context.
    pub fn complement_witness(&self) -> (ExactProb, ExactProb) {
        (
            self.p_given_context.complement(),
            self.p_given_parents.complement(),
        )
    }
}

impl std::fmt::Display for MarkovViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (neq_ctx, neq_pa) = self.complement_witness();
        write!(
            f,
            "P({v}!={val} | {pa}, {ctx}) = {a} vs P({v}!={val} | {pa}) = {b}",
            v = self.variable,
            val = self.value,
            pa = self.parent_assignment,
            ctx = self.context,
            a = neq_ctx,
            b = neq_pa,
        )
    }
}

/// The outcome of a Markov-condition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovReport {
    pub holds: bool,
    pub violations: Vec<MarkovViolation>,
}

/// Checks whether `full_joint` is Markov relative to `dag`: whether it
/// equals its own factorization into per-variable conditionals. Violations
/// are enumerated exhaustively as concrete conditional-independence
/// failures, one per (variable, parent row, context, value) combination.
pub fn check_markov(
    signature: &Signature,
    dag: &Dag,
    full_joint: &Distribution,
) -> Result<MarkovReport> {
    dag.check_compatible(signature)?;
    let space = full_joint.space();
    for var in signature.all_vars() {
        space.position(var)?;
    }
    if space.arity() != signature.exogenous().len() + signature.endogenous().len() {
        return Err(Error::InvalidModel(
            "joint ranges over variables outside the signature".into(),
        ));
    }

    let holds = factorization_matches(signature, dag, full_joint)?;
    let mut violations = Vec::new();
    for var in dag.topological_order()? {
        violations.extend(variable_violations(dag, full_joint, &var)?);
    }
    Ok(MarkovReport { holds, violations })
}

fn factorization_matches(signature: &Signature, dag: &Dag, joint: &Distribution) -> Result<bool> {
    let space = joint.space();
    // Derive each variable's conditional rows from the joint itself.
    struct Derived {
        pos: usize,
        parent_positions: Vec<usize>,
        pa_space: Space,
        numer: Vec<Vec<ExactProb>>, // [pa][value] = P(value, pa)
        denom: Vec<ExactProb>,      // [pa] = P(pa)
    }
    let mut derived = Vec::new();
    for var in signature.all_vars() {
        let pos = space.position(var)?;
        let parents = dag.parents(var)?;
        let parent_positions: Vec<usize> = parents
            .iter()
            .map(|p| space.position(p))
            .collect::<Result<_>>()?;
        let pa_space = Space::new(
            parents
                .iter()
                .map(|p| (p.clone(), space.range(p).unwrap().to_vec()))
                .collect(),
            u128::MAX,
        )?;
        derived.push(Derived {
            pos,
            parent_positions,
            numer: vec![vec![ExactProb::zero(); space.range(var)?.len()]; pa_space.size()],
            denom: vec![ExactProb::zero(); pa_space.size()],
            pa_space,
        });
    }
    let mut scratch = Vec::new();
    for (i, m) in joint.masses().iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let idx = space.indices_at(i);
        for d in derived.iter_mut() {
            scratch.clear();
            scratch.extend(d.parent_positions.iter().map(|&p| idx[p]));
            let pa = d.pa_space.index_of(&scratch);
            d.numer[pa][idx[d.pos]] += m;
            d.denom[pa] += m;
        }
    }
    // Compare the joint against the product of derived conditionals.
    for (i, m) in joint.masses().iter().enumerate() {
        let idx = space.indices_at(i);
        let mut product = ExactProb::one();
        for d in &derived {
            scratch.clear();
            scratch.extend(d.parent_positions.iter().map(|&p| idx[p]));
            let pa = d.pa_space.index_of(&scratch);
            if d.denom[pa].is_zero() {
                // Conditional undefined; the factorization puts no mass here.
                product = ExactProb::zero();
                break;
            }
            product = product * d.numer[pa][idx[d.pos]].checked_div(&d.denom[pa]).unwrap();
            if product.is_zero() {
                break;
            }
        }
        if product != *m {
            return Ok(false);
        }
    }
    Ok(true)
}

fn variable_violations(dag: &Dag, joint: &Distribution, var: &str) -> Result<Vec<MarkovViolation>> {
    let space = joint.space();
    let pos = space.position(var)?;
    let parents = dag.parents(var)?;
    let descendants = dag.descendants(var)?;
    let context_vars: Vec<&str> = dag
        .nodes()
        .iter()
        .map(String::as_str)
        .filter(|n| *n != var && !descendants.contains(*n) && !parents.iter().any(|p| p == n))
        .collect();
    if context_vars.is_empty() {
        return Ok(Vec::new());
    }
    let pa_space = Space::new(
        parents
            .iter()
            .map(|p| (p.clone(), space.range(p).unwrap().to_vec()))
            .collect(),
        u128::MAX,
    )?;
    let ctx_space = Space::new(
        context_vars
            .iter()
            .map(|c| (c.to_string(), space.range(c).unwrap().to_vec()))
            .collect(),
        u128::MAX,
    )?;
    let parent_positions: Vec<usize> = parents.iter().map(|p| space.position(p).unwrap()).collect();
    let context_positions: Vec<usize> = context_vars
        .iter()
        .map(|c| space.position(c).unwrap())
        .collect();
    let arity = space.range(var)?.len();

    let mut numer_ctx = vec![ExactProb::zero(); pa_space.size() * ctx_space.size() * arity];
    let mut denom_ctx = vec![ExactProb::zero(); pa_space.size() * ctx_space.size()];
    let mut numer_pa = vec![vec![ExactProb::zero(); arity]; pa_space.size()];
    let mut denom_pa = vec![ExactProb::zero(); pa_space.size()];
    let mut scratch = Vec::new();
    for (i, m) in joint.masses().iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let idx = space.indices_at(i);
        scratch.clear();
        scratch.extend(parent_positions.iter().map(|&p| idx[p]));
        let pa = pa_space.index_of(&scratch);
        scratch.clear();
        scratch.extend(context_positions.iter().map(|&p| idx[p]));
        let ctx = ctx_space.index_of(&scratch);
        let y = idx[pos];
        numer_ctx[(pa * ctx_space.size() + ctx) * arity + y] += m;
        denom_ctx[pa * ctx_space.size() + ctx] += m;
        numer_pa[pa][y] += m;
        denom_pa[pa] += m;
    }

    let mut out = Vec::new();
    for pa in 0..pa_space.size() {
        if denom_pa[pa].is_zero() {
            continue;
        }
        let pa_assignment = pa_space.decode(&pa_space.indices_at(pa));
        for ctx in 0..ctx_space.size() {
            let d = &denom_ctx[pa * ctx_space.size() + ctx];
            if d.is_zero() {
                continue;
            }
            for y in 0..arity {
                let with_ctx = numer_ctx[(pa * ctx_space.size() + ctx) * arity + y]
                    .checked_div(d)
                    .unwrap();
                let without = numer_pa[pa][y].checked_div(&denom_pa[pa]).unwrap();
                if with_ctx != without {
                    out.push(MarkovViolation {
                        variable: var.to_string(),
                        parent_assignment: pa_assignment.clone(),
                        context: ctx_space.decode(&ctx_space.indices_at(ctx)),
                        value: space.range(var)?[y].clone(),
                        p_given_context: with_ctx,
                        p_given_parents: without,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::ModelBuilder;

    /// Binary treatment/outcome model: U_X -> X -> Y with
    /// P(Y=1|X=1) = p and P(Y=1|X=0) = q.
    pub fn xy_model(p: (i64, i64), q: (i64, i64)) -> CausalModel {
        ModelBuilder::new()
            .exogenous("U_X", &["0", "1"])
            .endogenous("X", &["0", "1"])
            .endogenous("Y", &["0", "1"])
            .edge("U_X", "X")
            .edge("X", "Y")
            .uniform_prior("U_X")
            .cpd_row("X", &[("U_X", "0")], &[("0", (1, 1)), ("1", (0, 1))])
            .cpd_row("X", &[("U_X", "1")], &[("0", (0, 1)), ("1", (1, 1))])
            .cpd_row("Y", &[("X", "1")], &[("0", (p.1 - p.0, p.1)), ("1", p)])
            .cpd_row("Y", &[("X", "0")], &[("0", (q.1 - q.0, q.1)), ("1", q)])
            .build()
            .unwrap()
    }

    #[test]
    fn joint_is_the_factor_product() {
        let m = xy_model((1, 3), (2, 3));
        let joint = m.joint().unwrap();
        let xy = joint.marginal(&["X", "Y"]).unwrap();
        assert_eq!(
            xy.mass_of(&Assignment::of(&[("X", "1"), ("Y", "1")]))
                .unwrap(),
            ExactProb::new(1, 6).unwrap()
        );
    }

    #[test]
    fn degenerate_cpd_collapses_to_prior() {
        // Single endogenous Y copying one exogenous U.
        let m = ModelBuilder::new()
            .exogenous("U", &["a", "b"])
            .endogenous("Y", &["a", "b"])
            .edge("U", "Y")
            .prior("U", &[("a", (1, 4)), ("b", (3, 4))])
            .cpd_row("Y", &[("U", "a")], &[("a", (1, 1)), ("b", (0, 1))])
            .cpd_row("Y", &[("U", "b")], &[("a", (0, 1)), ("b", (1, 1))])
            .build()
            .unwrap();
        let joint = m.joint().unwrap();
        assert_eq!(
            joint
                .mass_of(&Assignment::of(&[("U", "b"), ("Y", "b")]))
                .unwrap(),
            ExactProb::new(3, 4).unwrap()
        );
        assert_eq!(
            joint
                .mass_of(&Assignment::of(&[("U", "b"), ("Y", "a")]))
                .unwrap(),
            ExactProb::zero()
        );
    }

    #[test]
    fn empty_intervention_is_the_joint() {
        let m = xy_model((1, 3), (2, 3));
        assert_eq!(m.intervene(&Assignment::new()).unwrap(), m.joint().unwrap());
    }

    #[test]
    fn intervention_clamps_and_keeps_other_factors() {
        let m = xy_model((1, 3), (2, 3));
        let d = m.intervene(&Assignment::of(&[("X", "0")])).unwrap();
        // P_do(X=0)(Y=1) = q.
        assert_eq!(
            d.prob(&Assignment::of(&[("Y", "1")])).unwrap(),
            ExactProb::new(2, 3).unwrap()
        );
        assert!(d.prob(&Assignment::of(&[("X", "0")])).unwrap().is_one());
    }

    #[test]
    fn intervention_rejects_exogenous_and_out_of_range() {
        let m = xy_model((1, 3), (2, 3));
        assert!(m.intervene(&Assignment::of(&[("U_X", "1")])).is_err());
        assert!(m.intervene(&Assignment::of(&[("X", "7")])).is_err());
    }

    #[test]
    fn intervention_matches_truncated_product_oracle() {
        // Chain U -> X -> Y with non-degenerate rational tables; brute-force
        // the truncated factorization by hand over all 8 assignments.
        let m = ModelBuilder::new()
            .exogenous("U", &["0", "1"])
            .endogenous("X", &["0", "1"])
            .endogenous("Y", &["0", "1"])
            .edge("U", "X")
            .edge("X", "Y")
            .prior("U", &[("0", (2, 7)), ("1", (5, 7))])
            .cpd_row("X", &[("U", "0")], &[("0", (1, 5)), ("1", (4, 5))])
            .cpd_row("X", &[("U", "1")], &[("0", (2, 3)), ("1", (1, 3))])
            .cpd_row("Y", &[("X", "0")], &[("0", (3, 11)), ("1", (8, 11))])
            .cpd_row("Y", &[("X", "1")], &[("0", (9, 13)), ("1", (4, 13))])
            .build()
            .unwrap();
        let do_ = Assignment::of(&[("X", "1")]);
        let d = m.intervene(&do_).unwrap();
        for (full, mass) in d.space().clone().iter_indices().map(|idx| {
            let a = d.space().decode(&idx);
            let m_ = d.mass_of(&a).unwrap();
            (a, m_)
        }) {
            let expected = if full.get("X") != Some("1") {
                ExactProb::zero()
            } else {
                let pu = m.prior_prob("U", full.get("U").unwrap()).unwrap();
                let py = m.cpd_prob("Y", full.get("Y").unwrap(), &full).unwrap();
                pu * py
            };
            assert_eq!(mass, expected, "mismatch at {}", full);
        }
    }

    #[test]
    fn world_prob_multiplies_the_factors() {
        let m = xy_model((1, 3), (2, 3));
        let w = World::new(
            Assignment::of(&[("U_X", "1")]),
            Assignment::of(&[("X", "1"), ("Y", "1")]),
        );
        assert_eq!(m.world_prob(&w).unwrap(), ExactProb::new(1, 6).unwrap());
        let impossible = World::new(
            Assignment::of(&[("U_X", "0")]),
            Assignment::of(&[("X", "1"), ("Y", "1")]),
        );
        assert!(m.world_prob(&impossible).unwrap().is_zero());
    }

    #[test]
    fn markov_holds_for_model_joints() {
        let m = xy_model((1, 3), (2, 3));
        let report = check_markov(m.signature(), m.dag(), &m.joint().unwrap()).unwrap();
        assert!(report.holds);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn markov_holds_for_independent_roots() {
        use crate::signature::{binary_range, Signature};
        let sig = Signature::new(
            vec![("A".into(), binary_range()), ("B".into(), binary_range())],
            vec![],
        )
        .unwrap();
        let dag = Dag::new(vec!["A".into(), "B".into()], &[]).unwrap();
        let space = Space::new(
            vec![("A".into(), binary_range()), ("B".into(), binary_range())],
            1000,
        )
        .unwrap();
        let q = ExactProb::new(1, 4).unwrap();
        let joint = Distribution::new(space, vec![q.clone(), q.clone(), q.clone(), q]).unwrap();
        let report = check_markov(&sig, &dag, &joint).unwrap();
        assert!(report.holds);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn markov_detects_correlated_roots() {
        use crate::signature::{binary_range, Signature};
        let sig = Signature::new(
            vec![("A".into(), binary_range()), ("B".into(), binary_range())],
            vec![],
        )
        .unwrap();
        let dag = Dag::new(vec!["A".into(), "B".into()], &[]).unwrap();
        let space = Space::new(
            vec![("A".into(), binary_range()), ("B".into(), binary_range())],
            1000,
        )
        .unwrap();
        let h = ExactProb::new(1, 2).unwrap();
        let joint = Distribution::new(
            space,
            vec![h.clone(), ExactProb::zero(), ExactProb::zero(), h],
        )
        .unwrap();
        let report = check_markov(&sig, &dag, &joint).unwrap();
        assert!(!report.holds);
        assert!(!report.violations.is_empty());
    }
}
