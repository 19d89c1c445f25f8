//! The potential-outcome semantics (the `N` semantics): a unique SCM whose
//! exogenous variables are mutually independent potential-outcome variables,
//! one per (endogenous variable, parent assignment) pair, plus the base
//! exogenous variables. Probabilities of counterfactuals over a causal model
//! are the corresponding probabilities over this SCM, and they are always
//! point-identified.
//!
//! Two evaluation routes exist. [`build_po_scm`] materializes the SCM
//! explicitly so the generic engine in [`crate::scm`] can enumerate its
//! exogenous space; the `po_*` evaluators here never materialize that space
//! and instead branch lazily on the potential-outcome variables an
//! evaluation actually reads. The equivalence of the two routes is part of
//! the test suite.

use std::collections::{BTreeMap, BTreeSet};

use crate::assign::{Assignment, Atom, World};
use crate::canonical::{canonical_frame, canonical_scm, CanonicalFrame};
use crate::error::{Caps, Error, Result};
use crate::model::CausalModel;
use crate::prob::ExactProb;
use crate::scm::{EquationTable, Scm};
use crate::signature::Signature;
use crate::space::Space;

/// The explicit potential-outcome SCM of a causal model, with the bookkeeping
/// needed to address individual potential-outcome variables.
#[derive(Debug, Clone)]
pub struct PoScm {
    base: CausalModel,
    scm: Scm,
    /// (endogenous variable, parent-space index) -> exogenous variable name.
    po_names: BTreeMap<(String, usize), String>,
}

impl PoScm {
    pub fn base(&self) -> &CausalModel {
        &self.base
    }

    pub fn scm(&self) -> &Scm {
        &self.scm
    }

    /// The potential-outcome variable for `endogenous` at the parent
    /// assignment `pa` (which must assign exactly its base parents).
    pub fn po_var(&self, endogenous: &str, pa: &Assignment) -> Result<&str> {
        let table = self.base.cpd(endogenous)?;
        let idx = table.pa_index_in(pa)?;
        Ok(self.po_names[&(endogenous.to_string(), idx)].as_str())
    }

    pub fn po_vars(&self) -> impl Iterator<Item = (&(String, usize), &String)> {
        self.po_names.iter()
    }
}

/// Builds the potential-outcome SCM: one exogenous variable per
/// (endogenous variable, parent assignment), ranging over the child's
/// range, with prior equal to the base conditional row, all mutually
/// independent; each endogenous equation dispatches on the realized parent
/// assignment and copies the matching potential outcome.
pub fn build_po_scm(model: &CausalModel, caps: &Caps) -> Result<PoScm> {
    let sig = model.signature();
    let mut taken: BTreeSet<String> = sig.all_vars().map(str::to_string).collect();
    let mut exo: Vec<(String, Vec<String>)> = sig
        .exogenous()
        .iter()
        .map(|u| (u.clone(), sig.range(u).unwrap().to_vec()))
        .collect();
    let mut priors: BTreeMap<String, Vec<ExactProb>> = BTreeMap::new();
    for u in sig.exogenous() {
        priors.insert(u.clone(), model.prior(u)?.to_vec());
    }
    let mut edges: Vec<(String, String)> = Vec::new();
    for x in sig.endogenous() {
        for p in model.dag().parents(x)? {
            edges.push((p.clone(), x.clone()));
        }
    }
    let mut po_names = BTreeMap::new();
    for x in sig.endogenous() {
        let table = model.cpd(x)?;
        let pa_space = table.pa_space();
        for pa_idx in 0..pa_space.size() {
            let pa = pa_space.decode(&pa_space.indices_at(pa_idx));
            let mut name = format!("{}[{}]", x, pa);
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            exo.push((name.clone(), sig.range(x)?.to_vec()));
            priors.insert(name.clone(), table.row_at(pa_idx).to_vec());
            edges.push((name.clone(), x.clone()));
            po_names.insert((x.clone(), pa_idx), name);
        }
    }
    let endo: Vec<(String, Vec<String>)> = sig
        .endogenous()
        .iter()
        .map(|x| (x.clone(), sig.range(x).unwrap().to_vec()))
        .collect();
    let signature = Signature::new(exo, endo)?;
    let nodes: Vec<String> = signature.all_vars().map(str::to_string).collect();
    let dag = crate::dag::Dag::new(nodes, &edges)?;

    let mut equations: BTreeMap<String, EquationTable> = BTreeMap::new();
    for x in sig.endogenous() {
        let parents = dag.parents(x)?.to_vec();
        let pa_space = Space::new(
            parents
                .iter()
                .map(|p| (p.clone(), signature.range(p).unwrap().to_vec()))
                .collect(),
            caps.max_states,
        )?;
        let base_table = model.cpd(x)?;
        let base_positions: Vec<usize> = base_table
            .parents()
            .iter()
            .map(|p| parents.iter().position(|q| q == p).unwrap())
            .collect();
        let po_positions: Vec<usize> = (0..base_table.pa_space().size())
            .map(|pa_idx| {
                let name = &po_names[&(x.clone(), pa_idx)];
                parents.iter().position(|q| q == name).unwrap()
            })
            .collect();
        let mut table = Vec::with_capacity(pa_space.size());
        let mut scratch = Vec::with_capacity(base_positions.len());
        for idx in pa_space.iter_indices() {
            scratch.clear();
            scratch.extend(base_positions.iter().map(|&p| idx[p]));
            let realized_pa = base_table.pa_space().index_of(&scratch);
            table.push(idx[po_positions[realized_pa]]);
        }
        equations.insert(
            x.clone(),
            EquationTable::from_parts(parents, pa_space, table)?,
        );
    }
    let scm = Scm::new(signature, dag, equations, priors)?;
    Ok(PoScm {
        base: model.clone(),
        scm,
        po_names,
    })
}

/// The canonical SCM with the product-form response distribution: the mass
/// of a response function is the product, over parent assignments, of the
/// potential-outcome prior of the value it picks there. Built on the
/// canonical frame so it shares that module's validation.
pub fn build_gh_scm(model: &CausalModel, caps: &Caps) -> Result<Scm> {
    let frame = canonical_frame(model, caps)?;
    let dists = gh_response_dists(model, &frame, caps)?;
    canonical_scm(&frame, &dists)
}

/// The product-form response distributions, read off the explicit
/// potential-outcome SCM's priors.
pub fn gh_response_dists(
    model: &CausalModel,
    frame: &CanonicalFrame,
    caps: &Caps,
) -> Result<BTreeMap<String, Vec<ExactProb>>> {
    let po = build_po_scm(model, caps)?;
    let mut out = BTreeMap::new();
    for x in model.signature().endogenous() {
        let pa_space = model.cpd(x)?.pa_space().clone();
        let mut masses = Vec::new();
        for f in frame.response_functions(x)? {
            let mut p = ExactProb::one();
            for pa_idx in 0..pa_space.size() {
                let po_var = po.po_names[&(x.to_string(), pa_idx)].as_str();
                let value_label = model.signature().range(x)?[f.value_at(pa_idx)].clone();
                p = p * po.scm.prior_prob(po_var, &value_label)?;
                if p.is_zero() {
                    break;
                }
            }
            masses.push(p);
        }
        out.insert(x.clone(), masses);
    }
    Ok(out)
}

/// Index-compiled lazy evaluator over the potential-outcome factorization.
struct PoEvaluator<'m> {
    model: &'m CausalModel,
    exo: Vec<String>,
    endo: Vec<String>,
    /// Per endogenous variable (topological order): its parents as slot
    /// references and its conditional table.
    parents: Vec<Vec<SlotRef>>,
    endo_slot: BTreeMap<String, usize>,
}

#[derive(Clone, Copy)]
enum SlotRef {
    Exo(usize),
    Endo(usize),
}

#[derive(Clone)]
struct CompiledAtom {
    /// Per endogenous slot: the clamped value, if intervened.
    do_: Vec<Option<usize>>,
    /// Per endogenous slot: the required value, if in the target.
    target: Vec<Option<usize>>,
}

impl<'m> PoEvaluator<'m> {
    fn new(model: &'m CausalModel) -> Result<Self> {
        let sig = model.signature();
        let exo: Vec<String> = sig.exogenous().to_vec();
        let endo: Vec<String> = model
            .dag()
            .topological_order()?
            .into_iter()
            .filter(|n| sig.is_endogenous(n))
            .collect();
        let endo_slot: BTreeMap<String, usize> = endo
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), i))
            .collect();
        let exo_slot: BTreeMap<&str, usize> = exo
            .iter()
            .enumerate()
            .map(|(i, u)| (u.as_str(), i))
            .collect();
        let mut parents = Vec::with_capacity(endo.len());
        for x in &endo {
            let refs = model
                .cpd(x)?
                .parents()
                .iter()
                .map(|p| match exo_slot.get(p.as_str()) {
                    Some(&i) => SlotRef::Exo(i),
                    None => SlotRef::Endo(endo_slot[p]),
                })
                .collect();
            parents.push(refs);
        }
        Ok(PoEvaluator {
            model,
            exo,
            endo,
            parents,
            endo_slot,
        })
    }

    fn compile_atom(&self, atom: &Atom) -> Result<CompiledAtom> {
        let sig = self.model.signature();
        sig.check_endogenous_assignment(&atom.target)?;
        sig.check_endogenous_assignment(&atom.intervention)?;
        let mut do_ = vec![None; self.endo.len()];
        let mut target = vec![None; self.endo.len()];
        for (var, val) in atom.intervention.iter() {
            do_[self.endo_slot[var]] = Some(sig.value_index(var, val)?);
        }
        for (var, val) in atom.target.iter() {
            target[self.endo_slot[var]] = Some(sig.value_index(var, val)?);
        }
        Ok(CompiledAtom { do_, target })
    }

    fn encode_exo(&self, u: &Assignment) -> Result<Vec<usize>> {
        let sig = self.model.signature();
        let mut out = Vec::with_capacity(self.exo.len());
        for var in &self.exo {
            let val = u.get(var).ok_or_else(|| {
                Error::InvalidModel(format!("assignment misses exogenous `{}`", var))
            })?;
            out.push(sig.value_index(var, val)?);
        }
        Ok(out)
    }

    /// The potential-outcome pins implied by conditioning on a full world:
    /// for each endogenous variable, the variable attached to the actually
    /// realized parent assignment is fixed to the actual value.
    fn world_pins(&self, world: &World) -> Result<BTreeMap<(usize, usize), usize>> {
        let sig = self.model.signature();
        let full = world.full();
        let mut pins = BTreeMap::new();
        for (slot, x) in self.endo.iter().enumerate() {
            let table = self.model.cpd(x)?;
            let pa_idx = table.pa_index_in(&full)?;
            let value = sig.value_index(x, world.v.get(x).unwrap())?;
            pins.insert((slot, pa_idx), value);
        }
        Ok(pins)
    }

    /// The conditional probability that every atom holds, given the base
    /// exogenous state and the pinned potential outcomes. Branches only on
    /// potential-outcome variables an atom's solution actually reads, and
    /// shares choices across atoms.
    fn joint_prob(
        &self,
        base_u: &[usize],
        atoms: &[CompiledAtom],
        pins: &BTreeMap<(usize, usize), usize>,
    ) -> ExactProb {
        let mut chosen = pins.clone();
        let mut worlds = vec![vec![None; self.endo.len()]; atoms.len()];
        self.recurse(0, base_u, atoms, &mut chosen, &mut worlds)
    }

    fn recurse(
        &self,
        step: usize,
        base_u: &[usize],
        atoms: &[CompiledAtom],
        chosen: &mut BTreeMap<(usize, usize), usize>,
        worlds: &mut Vec<Vec<Option<usize>>>,
    ) -> ExactProb {
        if step == atoms.len() * self.endo.len() {
            return ExactProb::one();
        }
        let atom_i = step / self.endo.len();
        let slot = step % self.endo.len();
        let atom = &atoms[atom_i];
        let check = |val: usize| atom.target[slot].is_none_or(|t| t == val);

        if let Some(val) = atom.do_[slot] {
            if !check(val) {
                return ExactProb::zero();
            }
            worlds[atom_i][slot] = Some(val);
            return self.recurse(step + 1, base_u, atoms, chosen, worlds);
        }

        let table = self.model.cpd(&self.endo[slot]).unwrap();
        let mut pa = Vec::with_capacity(self.parents[slot].len());
        for r in &self.parents[slot] {
            pa.push(match *r {
                SlotRef::Exo(i) => base_u[i],
                SlotRef::Endo(s) => worlds[atom_i][s].expect("topological order"),
            });
        }
        let pa_idx = table.pa_space().index_of(&pa);

        if let Some(&val) = chosen.get(&(slot, pa_idx)) {
            if !check(val) {
                return ExactProb::zero();
            }
            worlds[atom_i][slot] = Some(val);
            return self.recurse(step + 1, base_u, atoms, chosen, worlds);
        }

        let row = table.row_at(pa_idx);
        let mut total = ExactProb::zero();
        for (val, mass) in row.iter().enumerate() {
            if mass.is_zero() || !check(val) {
                continue;
            }
            chosen.insert((slot, pa_idx), val);
            worlds[atom_i][slot] = Some(val);
            let tail = self.recurse(step + 1, base_u, atoms, chosen, worlds);
            chosen.remove(&(slot, pa_idx));
            if !tail.is_zero() {
                total += mass * &tail;
            }
        }
        total
    }
}

/// `P(atoms | world)` under the potential-outcome semantics: the exogenous
/// space is conditioned on the world, pinning each actually realized
/// potential outcome, and the conjunction of the mutilated solutions is
/// evaluated. The world must have positive probability in the base model.
///
/// Conditioning here is on a base-model world `(u, v)`, which leaves the
/// counterfactual outcome variables free, so the result is usually not
/// extremal. Conditioning on a full exogenous state of the explicit
/// potential-outcome SCM (through [`PoScm::scm`] and
/// [`crate::scm::Scm::basic_cf`]) is the finer granularity and always
/// returns 0 or 1.
pub fn po_given_world(model: &CausalModel, atoms: &[Atom], world: &World) -> Result<ExactProb> {
    if model.world_prob(world)?.is_zero() {
        return Err(Error::ZeroProbabilityWorld);
    }
    let eval = PoEvaluator::new(model)?;
    let compiled: Vec<CompiledAtom> = atoms
        .iter()
        .map(|a| eval.compile_atom(a))
        .collect::<Result<_>>()?;
    let base_u = eval.encode_exo(&world.u)?;
    let pins = eval.world_pins(world)?;
    Ok(eval.joint_prob(&base_u, &compiled, &pins))
}

/// The basic counterfactual `P((target)_{do} | world)`.
pub fn po_basic(
    model: &CausalModel,
    do_: &Assignment,
    target: &Assignment,
    world: &World,
) -> Result<ExactProb> {
    po_given_world(
        model,
        &[Atom::counterfactual(target.clone(), do_.clone())],
        world,
    )
}

/// The unconditional probability of a conjunction of counterfactual atoms.
pub fn po_complex(model: &CausalModel, atoms: &[Atom]) -> Result<ExactProb> {
    po_complex_with(model, atoms, &Caps::default())
}

pub fn po_complex_with(model: &CausalModel, atoms: &[Atom], caps: &Caps) -> Result<ExactProb> {
    let eval = PoEvaluator::new(model)?;
    let compiled: Vec<CompiledAtom> = atoms
        .iter()
        .map(|a| eval.compile_atom(a))
        .collect::<Result<_>>()?;
    let sig = model.signature();
    let exo_space = Space::new(
        sig.exogenous()
            .iter()
            .map(|u| (u.clone(), sig.range(u).unwrap().to_vec()))
            .collect(),
        caps.max_states,
    )?;
    let empty = BTreeMap::new();
    let mut total = ExactProb::zero();
    for u_idx in exo_space.iter_indices() {
        let mut p = ExactProb::one();
        for (i, u) in sig.exogenous().iter().enumerate() {
            p = p * &model.prior(u)?[u_idx[i]];
            if p.is_zero() {
                break;
            }
        }
        if p.is_zero() {
            continue;
        }
        let inner = eval.joint_prob(&u_idx, &compiled, &empty);
        if !inner.is_zero() {
            total += p * inner;
        }
    }
    Ok(total)
}

/// `P(atoms | given)` where `given` is an event over the base model's
/// exogenous and endogenous variables: the world-conditional values are
/// averaged over the worlds consistent with the evidence.
pub fn po_conditional(
    model: &CausalModel,
    atoms: &[Atom],
    given: &Assignment,
) -> Result<ExactProb> {
    po_conditional_with(model, atoms, given, &Caps::default())
}

pub fn po_conditional_with(
    model: &CausalModel,
    atoms: &[Atom],
    given: &Assignment,
    caps: &Caps,
) -> Result<ExactProb> {
    model.signature().check_assignment(given)?;
    let eval = PoEvaluator::new(model)?;
    let compiled: Vec<CompiledAtom> = atoms
        .iter()
        .map(|a| eval.compile_atom(a))
        .collect::<Result<_>>()?;
    let mut numer = ExactProb::zero();
    let mut denom = ExactProb::zero();
    for (world, mass) in model.positive_worlds(caps)? {
        if !given.satisfied_by(&world.full()) {
            continue;
        }
        denom += &mass;
        let base_u = eval.encode_exo(&world.u)?;
        let pins = eval.world_pins(&world)?;
        let inner = eval.joint_prob(&base_u, &compiled, &pins);
        if !inner.is_zero() {
            numer += mass * inner;
        }
    }
    numer.checked_div(&denom).ok_or(Error::UndefinedConditional)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::ModelBuilder;
    use crate::canonical::{independent_canonical, ResponsePolytope};

    fn pr(n: i64, d: i64) -> ExactProb {
        ExactProb::new(n, d).unwrap()
    }

    fn xy_model(p: (i64, i64), q: (i64, i64)) -> CausalModel {
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

    fn actual_world() -> World {
        World::new(
            Assignment::of(&[("U_X", "1")]),
            Assignment::of(&[("X", "1"), ("Y", "1")]),
        )
    }

    #[test]
    fn po_scm_has_per_row_outcome_variables() {
        let m = xy_model((1, 3), (2, 3));
        let po = build_po_scm(&m, &Caps::default()).unwrap();
        let y1 = po.po_var("Y", &Assignment::of(&[("X", "1")])).unwrap();
        let y0 = po.po_var("Y", &Assignment::of(&[("X", "0")])).unwrap();
        assert_eq!(y1, "Y[X=1]");
        assert_eq!(y0, "Y[X=0]");
        assert_eq!(po.scm().prior_prob(y1, "1").unwrap(), pr(1, 3));
        assert_eq!(po.scm().prior_prob(y0, "1").unwrap(), pr(2, 3));
        // X is deterministic so its outcome variables are degenerate.
        let x1 = po.po_var("X", &Assignment::of(&[("U_X", "1")])).unwrap();
        assert!(po.scm().prior_prob(x1, "1").unwrap().is_one());
    }

    #[test]
    fn po_scm_solves_by_dispatch() {
        let m = xy_model((1, 3), (2, 3));
        let po = build_po_scm(&m, &Caps::default()).unwrap();
        // Exogenous state: U_X = 1, X copies U_X, Y[X=1] = 0, Y[X=0] = 1.
        let u = Assignment::of(&[
            ("U_X", "1"),
            ("X[U_X=0]", "0"),
            ("X[U_X=1]", "1"),
            ("Y[X=1]", "0"),
            ("Y[X=0]", "1"),
        ]);
        let v = po.scm().solve(&u).unwrap();
        assert_eq!(v, Assignment::of(&[("X", "1"), ("Y", "0")]));
        // Clamping X to 0 reads the other outcome variable.
        let v0 = po
            .scm()
            .solve_under(&u, &Assignment::of(&[("X", "0")]))
            .unwrap();
        assert_eq!(v0.get("Y"), Some("1"));
        let u_y00 = Assignment::of(&[
            ("U_X", "1"),
            ("X[U_X=0]", "0"),
            ("X[U_X=1]", "1"),
            ("Y[X=1]", "0"),
            ("Y[X=0]", "0"),
        ]);
        let v00 = po
            .scm()
            .solve_under(&u_y00, &Assignment::of(&[("X", "0")]))
            .unwrap();
        assert_eq!(v00.get("Y"), Some("0"));
    }

    #[test]
    fn induced_model_of_po_scm_reproduces_the_base() {
        let m = xy_model((1, 3), (2, 3));
        let po = build_po_scm(&m, &Caps::default()).unwrap();
        let induced = po.scm().induced_model().unwrap().joint().unwrap();
        let base_vars: Vec<&str> = m.signature().all_vars().collect();
        assert_eq!(induced.marginal(&base_vars).unwrap(), m.joint().unwrap());
    }

    #[test]
    fn outcome_variables_are_mutually_independent_in_the_computed_joint() {
        let m = xy_model((1, 3), (2, 3));
        let po = build_po_scm(&m, &Caps::default()).unwrap();
        let joint = po.scm().induced_model().unwrap().joint().unwrap();
        let exo: Vec<&String> = po.scm().signature().exogenous().iter().collect();
        for i in 0..exo.len() {
            for j in i + 1..exo.len() {
                let pair = joint.marginal(&[exo[i], exo[j]]).unwrap();
                let a = joint.marginal(&[exo[i]]).unwrap();
                let b = joint.marginal(&[exo[j]]).unwrap();
                for (assignment, mass) in pair.support() {
                    let pa = a.prob(&assignment.restrict([exo[i].as_str()])).unwrap();
                    let pb = b.prob(&assignment.restrict([exo[j].as_str()])).unwrap();
                    assert_eq!(*mass, pa * pb, "{} x {}", exo[i], exo[j]);
                }
            }
        }
    }

    #[test]
    fn basic_counterfactual_reads_the_untouched_row() {
        let m = xy_model((1, 3), (2, 3));
        let value = po_basic(
            &m,
            &Assignment::of(&[("X", "0")]),
            &Assignment::of(&[("Y", "0")]),
            &actual_world(),
        )
        .unwrap();
        // 1 - q with q = 2/3.
        assert_eq!(value, pr(1, 3));
    }

    #[test]
    fn consistent_intervention_returns_certainty() {
        let m = xy_model((1, 3), (2, 3));
        let value = po_basic(
            &m,
            &Assignment::of(&[("X", "1")]),
            &Assignment::of(&[("X", "1"), ("Y", "1")]),
            &actual_world(),
        )
        .unwrap();
        assert!(value.is_one());
    }

    #[test]
    fn zero_probability_worlds_are_rejected() {
        let m = xy_model((1, 3), (2, 3));
        let impossible = World::new(
            Assignment::of(&[("U_X", "0")]),
            Assignment::of(&[("X", "1"), ("Y", "1")]),
        );
        assert_eq!(
            po_basic(
                &m,
                &Assignment::of(&[("X", "0")]),
                &Assignment::of(&[("Y", "0")]),
                &impossible
            ),
            Err(Error::ZeroProbabilityWorld)
        );
    }

    #[test]
    fn basic_matches_explicit_scm_enumeration() {
        // Oracle route: enumerate the explicit potential-outcome SCM's
        // exogenous space, condition on the world, and count mutilated
        // solutions satisfying the target.
        let m = ModelBuilder::new()
            .exogenous("U", &["0", "1"])
            .endogenous("X", &["0", "1"])
            .endogenous("Y", &["0", "1"])
            .endogenous("Z", &["0", "1"])
            .edge("U", "X")
            .edge("X", "Y")
            .edge("Y", "Z")
            .prior("U", &[("0", (2, 5)), ("1", (3, 5))])
            .cpd_row("X", &[("U", "0")], &[("0", (1, 3)), ("1", (2, 3))])
            .cpd_row("X", &[("U", "1")], &[("0", (3, 4)), ("1", (1, 4))])
            .cpd_row("Y", &[("X", "0")], &[("0", (1, 7)), ("1", (6, 7))])
            .cpd_row("Y", &[("X", "1")], &[("0", (5, 9)), ("1", (4, 9))])
            .cpd_row("Z", &[("Y", "0")], &[("0", (1, 2)), ("1", (1, 2))])
            .cpd_row("Z", &[("Y", "1")], &[("0", (2, 11)), ("1", (9, 11))])
            .build()
            .unwrap();
        let world = World::new(
            Assignment::of(&[("U", "1")]),
            Assignment::of(&[("X", "0"), ("Y", "1"), ("Z", "1")]),
        );
        let do_ = Assignment::of(&[("X", "1")]);
        let target = Assignment::of(&[("Z", "0")]);

        let po = build_po_scm(&m, &Caps::default()).unwrap();
        let scm = po.scm();
        let sig = scm.signature().clone();
        let exo_space = Space::new(
            sig.exogenous()
                .iter()
                .map(|u| (u.clone(), sig.range(u).unwrap().to_vec()))
                .collect(),
            1 << 20,
        )
        .unwrap();
        let mut numer = ExactProb::zero();
        let mut denom = ExactProb::zero();
        for idx in exo_space.iter_indices() {
            let u = exo_space.decode(&idx);
            let p = scm.exo_prob(&u).unwrap();
            if p.is_zero() {
                continue;
            }
            if !world.u.satisfied_by(&u) {
                continue;
            }
            if scm.solve(&u).unwrap() != world.v {
                continue;
            }
            denom += &p;
            let sol = scm.solve_under(&u, &do_).unwrap();
            if target.satisfied_by(&sol) {
                numer += p;
            }
        }
        let oracle = numer.checked_div(&denom).unwrap();
        assert_eq!(po_basic(&m, &do_, &target, &world).unwrap(), oracle);
    }

    #[test]
    fn shared_outcome_variables_make_the_conjunction_impossible() {
        let m = xy_model((1, 3), (2, 3));
        let atoms = vec![
            Atom::counterfactual(Assignment::of(&[("Y", "1")]), Assignment::of(&[("X", "1")])),
            Atom::counterfactual(Assignment::of(&[("Y", "0")]), Assignment::of(&[("X", "1")])),
        ];
        let given = Assignment::of(&[("X", "0"), ("Y", "0")]);
        assert!(po_conditional(&m, &atoms, &given).unwrap().is_zero());
        assert!(po_complex(&m, &atoms).unwrap().is_zero());
    }

    #[test]
    fn pns_is_the_product_of_independent_rows() {
        let m = xy_model((1, 3), (2, 3));
        let atoms = vec![
            Atom::counterfactual(Assignment::of(&[("Y", "1")]), Assignment::of(&[("X", "1")])),
            Atom::counterfactual(Assignment::of(&[("Y", "0")]), Assignment::of(&[("X", "0")])),
        ];
        // p * (1 - q) = 1/3 * 1/3.
        assert_eq!(po_complex(&m, &atoms).unwrap(), pr(1, 9));
    }

    #[test]
    fn single_observational_atom_is_the_base_probability() {
        let m = xy_model((1, 3), (2, 3));
        let atoms = vec![Atom::observational(Assignment::of(&[("Y", "1")]))];
        let joint = m.joint().unwrap();
        assert_eq!(
            po_complex(&m, &atoms).unwrap(),
            joint.prob(&Assignment::of(&[("Y", "1")])).unwrap()
        );
    }

    #[test]
    fn conditioning_on_a_certain_event_is_unconditional() {
        let m = xy_model((1, 3), (2, 3));
        let atoms = vec![Atom::counterfactual(
            Assignment::of(&[("Y", "0")]),
            Assignment::of(&[("X", "0")]),
        )];
        assert_eq!(
            po_conditional(&m, &atoms, &Assignment::new()).unwrap(),
            po_complex(&m, &atoms).unwrap()
        );
    }

    #[test]
    fn point_identified_conditional_counterfactual() {
        let m = xy_model((1, 3), (2, 3));
        let atoms = vec![Atom::counterfactual(
            Assignment::of(&[("Y", "0")]),
            Assignment::of(&[("X", "0")]),
        )];
        let given = Assignment::of(&[("X", "1"), ("Y", "1")]);
        assert_eq!(po_conditional(&m, &atoms, &given).unwrap(), pr(1, 3));
    }

    #[test]
    fn lazy_route_matches_dense_scm_route() {
        let m = xy_model((1, 3), (2, 3));
        let po = build_po_scm(&m, &Caps::default()).unwrap();
        let queries: Vec<Vec<Atom>> = vec![
            vec![Atom::counterfactual(
                Assignment::of(&[("Y", "0")]),
                Assignment::of(&[("X", "0")]),
            )],
            vec![
                Atom::counterfactual(Assignment::of(&[("Y", "1")]), Assignment::of(&[("X", "1")])),
                Atom::counterfactual(Assignment::of(&[("Y", "0")]), Assignment::of(&[("X", "0")])),
            ],
            vec![Atom::observational(Assignment::of(&[("X", "0")]))],
        ];
        for atoms in queries {
            assert_eq!(
                po_complex(&m, &atoms).unwrap(),
                po.scm().complex_cf(&atoms).unwrap(),
                "query {:?}",
                atoms
            );
        }
    }

    #[test]
    fn product_form_canonical_matches_hand_products() {
        let m = xy_model((1, 3), (2, 3));
        let frame = canonical_frame(&m, &Caps::default()).unwrap();
        let dists = gh_response_dists(&m, &frame, &Caps::default()).unwrap();
        // Function order (const-0, identity, negation, const-1); with
        // p = 1/3, q = 2/3: (1-p)(1-q), p(1-q), (1-p)q, pq.
        assert_eq!(dists["Y"], vec![pr(2, 9), pr(1, 9), pr(4, 9), pr(2, 9)]);
        let polytope = ResponsePolytope::for_variable(&frame, "Y").unwrap();
        assert!(polytope.contains(&dists["Y"]));
        // Deterministic base variable: point mass on its own function.
        assert!(dists["X"][1].is_one());
        // The product-form canonical SCM and the independent canonical SCM
        // are the same object, built through different constructions.
        let gh = build_gh_scm(&m, &Caps::default()).unwrap();
        let ic = independent_canonical(&m, &Caps::default()).unwrap();
        assert_eq!(gh, ic);
    }
}
