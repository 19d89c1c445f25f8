//! Deterministic structural causal models: equation solving under
//! interventions and the extremal basic/complex counterfactual semantics.

use std::collections::BTreeMap;

use crate::assign::{Assignment, Atom, World};
use crate::dag::Dag;
use crate::error::{Caps, Error, Result};
use crate::model::{CausalModel, CpdTable};
use crate::prob::ExactProb;
use crate::signature::Signature;
use crate::space::Space;

/// A total function table for one endogenous variable: the child's value
/// index at every full assignment of its parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationTable {
    parents: Vec<String>,
    pa_space: Space,
    table: Vec<usize>,
}

impl EquationTable {
    pub fn from_parts(parents: Vec<String>, pa_space: Space, table: Vec<usize>) -> Result<Self> {
        if pa_space.vars() != parents.as_slice() {
            return Err(Error::InvalidModel(
                "equation parent space does not match its parents".into(),
            ));
        }
        if table.len() != pa_space.size() {
            return Err(Error::InvalidModel(
                "equation table does not cover every parent row".into(),
            ));
        }
        Ok(EquationTable {
            parents,
            pa_space,
            table,
        })
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn pa_space(&self) -> &Space {
        &self.pa_space
    }

    pub fn value_at(&self, pa_index: usize) -> usize {
        self.table[pa_index]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

/// A structural causal model: a deterministic equation per endogenous
/// variable plus mutually independent exogenous priors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scm {
    signature: Signature,
    dag: Dag,
    equations: BTreeMap<String, EquationTable>,
    priors: BTreeMap<String, Vec<ExactProb>>,
    topo_endo: Vec<String>,
}

impl Scm {
    pub fn new(
        signature: Signature,
        dag: Dag,
        equations: BTreeMap<String, EquationTable>,
        priors: BTreeMap<String, Vec<ExactProb>>,
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
        for x in signature.endogenous() {
            let eq = equations
                .get(x)
                .ok_or_else(|| Error::InvalidModel(format!("missing equation for `{}`", x)))?;
            if eq.parents != dag.parents(x)? {
                return Err(Error::InvalidModel(format!(
                    "equation parents for `{}` do not match the dag",
                    x
                )));
            }
            let arity = signature.range(x)?.len();
            if eq.table.iter().any(|&v| v >= arity) {
                return Err(Error::InvalidModel(format!(
                    "equation for `{}` maps outside its range",
                    x
                )));
            }
        }
        if equations.len() != signature.endogenous().len() {
            return Err(Error::InvalidModel(
                "equation for a non-endogenous variable".into(),
            ));
        }
        if priors.len() != signature.exogenous().len() {
            return Err(Error::InvalidModel(
                "prior for a non-exogenous variable".into(),
            ));
        }
        let topo_endo = dag
            .topological_order()?
            .into_iter()
            .filter(|n| signature.is_endogenous(n))
            .collect();
        Ok(Scm {
            signature,
            dag,
            equations,
            priors,
            topo_endo,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn equation(&self, var: &str) -> Result<&EquationTable> {
        self.equations
            .get(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn prior(&self, var: &str) -> Result<&[ExactProb]> {
        self.priors
            .get(var)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn prior_prob(&self, var: &str, value: &str) -> Result<ExactProb> {
        Ok(self.prior(var)?[self.signature.value_index(var, value)?].clone())
    }

    /// P(U = u) for a full exogenous assignment.
    pub fn exo_prob(&self, u: &Assignment) -> Result<ExactProb> {
        self.check_exogenous(u)?;
        let mut p = ExactProb::one();
        for var in self.signature.exogenous() {
            p = p * self.prior_prob(var, u.get(var).unwrap())?;
            if p.is_zero() {
                break;
            }
        }
        Ok(p)
    }

    fn check_exogenous(&self, u: &Assignment) -> Result<()> {
        for var in self.signature.exogenous() {
            let val = u.get(var).ok_or_else(|| {
                Error::InvalidModel(format!("assignment misses exogenous `{}`", var))
            })?;
            self.signature.value_index(var, val)?;
        }
        if u.len() != self.signature.exogenous().len() {
            return Err(Error::InvalidModel(
                "assignment covers a foreign variable".into(),
            ));
        }
        Ok(())
    }

    /// Solves the equations at `u` in topological order and returns the
    /// unique full endogenous assignment.
    pub fn solve(&self, u: &Assignment) -> Result<Assignment> {
        self.solve_under(u, &Assignment::new())
    }

    /// Solves the mutilated system: the equations for the intervened
    /// variables are removed and replaced by the clamped values.
    pub fn solve_under(&self, u: &Assignment, do_: &Assignment) -> Result<Assignment> {
        self.check_exogenous(u)?;
        self.signature.check_endogenous_assignment(do_)?;
        let mut state = u.clone();
        for x in &self.topo_endo {
            let value = match do_.get(x) {
                Some(val) => val.to_string(),
                None => {
                    let eq = &self.equations[x];
                    let pa_index = {
                        let mut idx = Vec::with_capacity(eq.parents.len());
                        for p in &eq.parents {
                            let val = state
                                .get(p)
                                .expect("parents precede children in topo order");
                            idx.push(eq.pa_space.value_index(p, val)?);
                        }
                        eq.pa_space.index_of(&idx)
                    };
                    self.signature.range(x)?[eq.table[pa_index]].clone()
                }
            };
            state.set(x, &value);
        }
        Ok(state.restrict(self.signature.endogenous().iter().map(String::as_str)))
    }

    /// The probability of a world: `P(u)` when `v` is the solution at `u`,
    /// rejected otherwise.
    pub fn world_prob(&self, world: &World) -> Result<ExactProb> {
        if self.solve(&world.u)? != world.v {
            return Err(Error::ZeroProbabilityWorld);
        }
        self.exo_prob(&world.u)
    }

    /// The probability of a basic counterfactual: 1 if the mutilated system
    /// at the world's exogenous state solves to exactly `v_star`, else 0.
    /// The world must have positive probability.
    pub fn basic_cf(
        &self,
        v_star: &Assignment,
        do_: &Assignment,
        world: &World,
    ) -> Result<ExactProb> {
        if v_star.len() != self.signature.endogenous().len() {
            return Err(Error::InvalidModel(
                "target must assign every endogenous variable".into(),
            ));
        }
        self.signature.check_endogenous_assignment(v_star)?;
        if self.world_prob(world)?.is_zero() {
            return Err(Error::ZeroProbabilityWorld);
        }
        let solved = self.solve_under(&world.u, do_)?;
        Ok(if solved == *v_star {
            ExactProb::one()
        } else {
            ExactProb::zero()
        })
    }

    /// The probability of a complex counterfactual: the conjunction of the
    /// atoms, summed over all worlds with the per-world factors independent.
    /// Inside an SCM every factor is extremal, so this is the total prior
    /// mass of the exogenous states whose mutilated solutions satisfy every
    /// atom.
    pub fn complex_cf(&self, atoms: &[Atom]) -> Result<ExactProb> {
        self.complex_cf_with(atoms, &Caps::default())
    }

    pub fn complex_cf_with(&self, atoms: &[Atom], caps: &Caps) -> Result<ExactProb> {
        self.conditional_cf_with(atoms, &Assignment::new(), caps)
    }

    /// `P(atoms | given)` where `given` is an observational event over the
    /// model's own exogenous and endogenous variables.
    pub fn conditional_cf(&self, atoms: &[Atom], given: &Assignment) -> Result<ExactProb> {
        self.conditional_cf_with(atoms, given, &Caps::default())
    }

    pub fn conditional_cf_with(
        &self,
        atoms: &[Atom],
        given: &Assignment,
        caps: &Caps,
    ) -> Result<ExactProb> {
        for atom in atoms {
            self.signature.check_endogenous_assignment(&atom.target)?;
            self.signature
                .check_endogenous_assignment(&atom.intervention)?;
        }
        self.signature.check_assignment(given)?;
        let run = self.compiled(caps)?;
        let mut numer = ExactProb::zero();
        let mut denom = ExactProb::zero();
        let compiled_atoms: Vec<AtomPins> = atoms
            .iter()
            .map(|a| {
                Ok((
                    run.encode_endo(&a.intervention)?,
                    run.encode_endo(&a.target)?,
                ))
            })
            .collect::<Result<_>>()?;
        let given_pins = run.encode_any(given)?;
        let mut state = vec![0usize; run.n_vars];
        for u_idx in run.exo_space.iter_indices() {
            let p = run.exo_mass(&u_idx);
            if p.is_zero() {
                continue;
            }
            run.solve_into(&mut state, &u_idx, &[]);
            if !given_pins.iter().all(|&(pos, val)| state[pos] == val) {
                continue;
            }
            denom += &p;
            let mut all = true;
            for (do_pins, target_pins) in &compiled_atoms {
                run.solve_into(&mut state, &u_idx, do_pins);
                if !target_pins.iter().all(|&(pos, val)| state[pos] == val) {
                    all = false;
                    break;
                }
            }
            if all {
                numer += &p;
            }
        }
        if given.is_empty() {
            return Ok(numer);
        }
        numer.checked_div(&denom).ok_or(Error::UndefinedConditional)
    }

    /// The causal model this SCM induces: identical signature and graph,
    /// with each equation becoming a degenerate conditional row and the
    /// priors carried over.
    pub fn induced_model(&self) -> Result<CausalModel> {
        let mut cpds = BTreeMap::new();
        for x in self.signature.endogenous() {
            let eq = &self.equations[x];
            let arity = self.signature.range(x)?.len();
            let rows: Vec<Vec<ExactProb>> = eq
                .table
                .iter()
                .map(|&v| {
                    let mut row = vec![ExactProb::zero(); arity];
                    row[v] = ExactProb::one();
                    row
                })
                .collect();
            cpds.insert(
                x.clone(),
                CpdTable::from_parts(eq.parents.clone(), eq.pa_space.clone(), rows)?,
            );
        }
        CausalModel::new(
            self.signature.clone(),
            self.dag.clone(),
            self.priors.clone(),
            cpds,
        )
    }

    fn compiled(&self, caps: &Caps) -> Result<CompiledScm<'_>> {
        CompiledScm::new(self, caps)
    }
}

type SolveStep<'a> = (usize, Vec<usize>, &'a [usize], &'a Space);
/// (position, value-index) pins for an atom's intervention and target.
type AtomPins = (Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Index-compiled form of an SCM for dense enumeration. Variables occupy
/// slots `[exogenous..., endogenous...]` in signature order; solving mutates
/// a slot vector in place.
struct CompiledScm<'a> {
    n_vars: usize,
    n_exo: usize,
    exo_space: Space,
    positions: BTreeMap<&'a str, usize>,
    priors: Vec<&'a [ExactProb]>,
    // Endogenous in topological order: (slot, parent slots, table, pa_space).
    steps: Vec<SolveStep<'a>>,
    value_indexer: Vec<&'a [String]>,
}

impl<'a> CompiledScm<'a> {
    fn new(scm: &'a Scm, caps: &Caps) -> Result<Self> {
        let sig = &scm.signature;
        let mut positions = BTreeMap::new();
        let mut value_indexer = Vec::new();
        for (i, var) in sig.all_vars().enumerate() {
            positions.insert(var, i);
            value_indexer.push(sig.range(var)?);
        }
        let n_exo = sig.exogenous().len();
        let exo_space = Space::new(
            sig.exogenous()
                .iter()
                .map(|u| (u.clone(), sig.range(u).unwrap().to_vec()))
                .collect(),
            caps.max_states,
        )?;
        let priors: Vec<&[ExactProb]> = sig
            .exogenous()
            .iter()
            .map(|u| scm.priors[u].as_slice())
            .collect();
        let mut steps = Vec::new();
        for x in &scm.topo_endo {
            let eq = &scm.equations[x];
            let slot = positions[x.as_str()];
            let parent_slots = eq.parents.iter().map(|p| positions[p.as_str()]).collect();
            steps.push((slot, parent_slots, eq.table.as_slice(), &eq.pa_space));
        }
        Ok(CompiledScm {
            n_vars: sig.exogenous().len() + sig.endogenous().len(),
            n_exo,
            exo_space,
            positions,
            priors,
            steps,
            value_indexer,
        })
    }

    fn exo_mass(&self, u_idx: &[usize]) -> ExactProb {
        let mut p = ExactProb::one();
        for (i, &v) in u_idx.iter().enumerate() {
            p = p * &self.priors[i][v];
            if p.is_zero() {
                break;
            }
        }
        p
    }

    fn solve_into(&self, state: &mut [usize], u_idx: &[usize], do_pins: &[(usize, usize)]) {
        state[..self.n_exo].copy_from_slice(u_idx);
        for &(slot, ref parent_slots, table, pa_space) in &self.steps {
            if let Some(&(_, val)) = do_pins.iter().find(|&&(pos, _)| pos == slot) {
                state[slot] = val;
                continue;
            }
            let mut idx = 0usize;
            for (k, &p) in parent_slots.iter().enumerate() {
                idx = idx * pa_space.range_at(k).len() + state[p];
            }
            state[slot] = table[idx];
        }
    }

    fn encode_endo(&self, a: &Assignment) -> Result<Vec<(usize, usize)>> {
        self.encode_any(a)
    }

    fn encode_any(&self, a: &Assignment) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::with_capacity(a.len());
        for (var, val) in a.iter() {
            let pos = *self
                .positions
                .get(var)
                .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
            let idx = self.value_indexer[pos]
                .iter()
                .position(|v| v == val)
                .ok_or_else(|| Error::OutOfRange {
                    variable: var.into(),
                    value: val.into(),
                })?;
            out.push((pos, idx));
        }
        Ok(out)
    }
}
