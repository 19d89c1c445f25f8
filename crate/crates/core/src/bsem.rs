//! The actualized-refinement semantics (the `B` semantics).
//!
//! Conditioning on an actual world teaches us what each realized causal
//! mechanism produced: the conditional row for the actually realized parent
//! assignment of every variable collapses to a point mass on the actual
//! outcome, while all counterfactual rows keep their prior shape. A basic
//! counterfactual is then an ordinary intervention on the refined model.
//!
//! Two implementations are kept side by side: [`b_basic_def`] computes the
//! refined-then-intervened distribution literally, and [`b_basic_closed`]
//! evaluates an equivalent four-case product without materializing any
//! distribution. Their agreement is enforced by tests.

use std::collections::BTreeMap;

use crate::assign::{Assignment, Atom, World};
use crate::error::{Caps, Error, Result};
use crate::model::{CausalModel, CpdTable};
use crate::prob::ExactProb;
use crate::space::Space;

/// A causal model refined by an actual world: each actually realized
/// conditional row is a point mass on the actual outcome, all other rows
/// are untouched.
#[derive(Debug, Clone)]
pub struct RefinedModel {
    base: CausalModel,
    world: World,
    refined: CausalModel,
}

impl RefinedModel {
    pub fn base(&self) -> &CausalModel {
        &self.base
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    /// The refined model itself; a valid causal model in its own right.
    pub fn model(&self) -> &CausalModel {
        &self.refined
    }
}

/// Builds the actualized refinement of `model` at `world`. The world must
/// have positive probability.
pub fn actualize(model: &CausalModel, world: &World) -> Result<RefinedModel> {
    if model.world_prob(world)?.is_zero() {
        return Err(Error::ZeroProbabilityWorld);
    }
    let sig = model.signature();
    let full = world.full();
    let mut cpds: BTreeMap<String, CpdTable> = BTreeMap::new();
    for x in sig.endogenous() {
        let table = model.cpd(x)?;
        let actual_pa = table.pa_index_in(&full)?;
        let actual_value = sig.value_index(x, world.v.get(x).unwrap())?;
        let mut rows = table.rows().to_vec();
        let mut point = vec![ExactProb::zero(); rows[actual_pa].len()];
        point[actual_value] = ExactProb::one();
        rows[actual_pa] = point;
        cpds.insert(
            x.clone(),
            CpdTable::from_parts(table.parents().to_vec(), table.pa_space().clone(), rows)?,
        );
    }
    let mut priors = BTreeMap::new();
    for u in sig.exogenous() {
        priors.insert(u.clone(), model.prior(u)?.to_vec());
    }
    let refined = CausalModel::new(sig.clone(), model.dag().clone(), priors, cpds)?;
    Ok(RefinedModel {
        base: model.clone(),
        world: world.clone(),
        refined,
    })
}

/// The definitional route for a basic counterfactual: intervene on the
/// refined model, condition on the world's exogenous state, and read off
/// the mass of the full target assignment.
pub fn b_basic_def(
    model: &CausalModel,
    do_: &Assignment,
    v_star: &Assignment,
    world: &World,
) -> Result<ExactProb> {
    check_full_endogenous(model, v_star)?;
    let dist = refined_intervened(model, do_, world, &Caps::default())?;
    dist.prob(v_star)
}

/// The event-probability generalization of the definitional route: the
/// probability of a partial endogenous target under the refined,
/// intervened, world-conditioned distribution.
pub fn b_atom_def(model: &CausalModel, atom: &Atom, world: &World) -> Result<ExactProb> {
    model
        .signature()
        .check_endogenous_assignment(&atom.target)?;
    let dist = refined_intervened(model, &atom.intervention, world, &Caps::default())?;
    dist.prob(&atom.target)
}

fn refined_intervened(
    model: &CausalModel,
    do_: &Assignment,
    world: &World,
    caps: &Caps,
) -> Result<crate::dist::Distribution> {
    let refined = actualize(model, world)?;
    let intervened = refined.model().intervene_with(do_, caps)?;
    intervened.condition(&world.u)
}

/// The closed form for a basic counterfactual, split into four exhaustive
/// cases over the full target `v_star`:
///
/// 1. zero when the target conflicts with the intervention;
/// 2. zero when some untouched variable keeps its endogenous parents but
///    changes its value;
/// 3. one when no untouched variable changes its endogenous parents;
/// 4. otherwise the product, over variables with changed endogenous
///    parents, of the base conditional of the target value at the new
///    parent assignment.
pub fn b_basic_closed(
    model: &CausalModel,
    do_: &Assignment,
    v_star: &Assignment,
    world: &World,
) -> Result<ExactProb> {
    let sig = model.signature();
    check_full_endogenous(model, v_star)?;
    sig.check_endogenous_assignment(do_)?;
    if model.world_prob(world)?.is_zero() {
        return Err(Error::ZeroProbabilityWorld);
    }
    // Case 1: effectiveness.
    for (var, val) in do_.iter() {
        if v_star.get(var) != Some(val) {
            return Ok(ExactProb::zero());
        }
    }
    let star_full = world
        .u
        .merged(v_star)
        .ok_or_else(|| Error::InvalidModel("target assigns an exogenous variable".into()))?;
    let mut changed: Vec<&String> = Vec::new();
    for y in sig.endogenous() {
        if do_.contains(y) {
            continue;
        }
        let endo_parents: Vec<&str> = model
            .cpd(y)?
            .parents()
            .iter()
            .filter(|p| sig.is_endogenous(p))
            .map(String::as_str)
            .collect();
        let same_parents = endo_parents.iter().all(|p| world.v.get(p) == v_star.get(p));
        if same_parents {
            // Case 2: an unchanged mechanism must reproduce the actual value.
            if v_star.get(y) != world.v.get(y) {
                return Ok(ExactProb::zero());
            }
        } else {
            changed.push(y);
        }
    }
    // Case 3: nothing changed upstream of any untouched variable.
    if changed.is_empty() {
        return Ok(ExactProb::one());
    }
    // Case 4: the product of the re-routed rows.
    let mut p = ExactProb::one();
    for y in changed {
        p = p * model.cpd_prob(y, v_star.get(y).unwrap(), &star_full)?;
        if p.is_zero() {
            break;
        }
    }
    Ok(p)
}

/// The closed-form probability of one atom given a world: the sum of
/// [`b_basic_closed`] over every full extension of the atom's target.
pub fn b_atom_closed(model: &CausalModel, atom: &Atom, world: &World) -> Result<ExactProb> {
    let sig = model.signature();
    sig.check_endogenous_assignment(&atom.target)?;
    sig.check_endogenous_assignment(&atom.intervention)?;
    let free: Vec<(String, Vec<String>)> = sig
        .endogenous()
        .iter()
        .filter(|x| !atom.target.contains(x))
        .map(|x| (x.clone(), sig.range(x).unwrap().to_vec()))
        .collect();
    let free_space = Space::new(free, u128::MAX)?;
    let mut total = ExactProb::zero();
    for idx in free_space.iter_indices() {
        let v_star = free_space
            .decode(&idx)
            .merged(&atom.target)
            .expect("free variables are disjoint from the target");
        total += b_basic_closed(model, &atom.intervention, &v_star, world)?;
    }
    Ok(total)
}

/// `P(atoms | world)`: the product of the per-atom probabilities. Under
/// this semantics atoms are independent given the actual world by
/// definition.
pub fn b_given_world(model: &CausalModel, atoms: &[Atom], world: &World) -> Result<ExactProb> {
    let mut p = ExactProb::one();
    for atom in atoms {
        p = p * b_atom_closed(model, atom, world)?;
        if p.is_zero() {
            break;
        }
    }
    Ok(p)
}

/// The unconditional probability of a conjunction of atoms: the law of
/// total probability over all positive-probability worlds.
pub fn b_complex(model: &CausalModel, atoms: &[Atom]) -> Result<ExactProb> {
    b_complex_with(model, atoms, &Caps::default())
}

pub fn b_complex_with(model: &CausalModel, atoms: &[Atom], caps: &Caps) -> Result<ExactProb> {
    let mut total = ExactProb::zero();
    for (world, mass) in model.positive_worlds(caps)? {
        let inner = b_given_world(model, atoms, &world)?;
        if !inner.is_zero() {
            total += mass * inner;
        }
    }
    Ok(total)
}

/// `P(atoms | given)` as the exact ratio `P(atoms, given) / P(given)`,
/// with the numerator restricted to worlds consistent with the evidence.
/// The evidence may mention exogenous and endogenous variables.
pub fn b_conditional(model: &CausalModel, atoms: &[Atom], given: &Assignment) -> Result<ExactProb> {
    b_conditional_with(model, atoms, given, &Caps::default())
}

pub fn b_conditional_with(
    model: &CausalModel,
    atoms: &[Atom],
    given: &Assignment,
    caps: &Caps,
) -> Result<ExactProb> {
    model.signature().check_assignment(given)?;
    let mut numer = ExactProb::zero();
    let mut denom = ExactProb::zero();
    for (world, mass) in model.positive_worlds(caps)? {
        if !given.satisfied_by(&world.full()) {
            continue;
        }
        denom += &mass;
        let inner = b_given_world(model, atoms, &world)?;
        if !inner.is_zero() {
            numer += mass * inner;
        }
    }
    numer.checked_div(&denom).ok_or(Error::UndefinedConditional)
}

fn check_full_endogenous(model: &CausalModel, v_star: &Assignment) -> Result<()> {
    let sig = model.signature();
    sig.check_endogenous_assignment(v_star)?;
    if v_star.len() != sig.endogenous().len() {
        return Err(Error::InvalidModel(
            "target must assign every endogenous variable".into(),
        ));
    }
    Ok(())
}
