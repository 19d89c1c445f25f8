//! Seeded random models, worlds, and queries for the equivalence suites.
//!
//! Everything here is deterministic given the seed, so suite failures are
//! reproducible from the reported seed alone.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::assign::{Assignment, Atom, World};
use crate::builder::ModelBuilder;
use crate::error::Result;
use crate::model::CausalModel;
use crate::prob::ExactProb;

/// Shape limits for random model generation.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_endogenous: usize,
    pub max_exogenous: usize,
    pub max_values: usize,
    pub max_parents: usize,
    /// Cap on the number of parent assignments per conditional table.
    pub max_parent_states: usize,
    /// Upper bound on the canonical response-state product
    /// (for suites that build canonical SCMs densely).
    pub max_canonical_states: Option<u128>,
    /// Upper bound on the potential-outcome state product
    /// (for suites that enumerate the explicit potential-outcome SCM).
    pub max_po_states: Option<u128>,
    pub binary_only: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_endogenous: 4,
            max_exogenous: 2,
            max_values: 3,
            max_parents: 2,
            max_parent_states: 4,
            max_canonical_states: None,
            max_po_states: None,
            binary_only: false,
        }
    }
}

impl GenConfig {
    pub fn binary() -> Self {
        GenConfig {
            binary_only: true,
            ..GenConfig::default()
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_range(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Vec<String> {
    let n = if cfg.binary_only {
        2
    } else {
        rng.gen_range(2..=cfg.max_values)
    };
    (0..n).map(|i| i.to_string()).collect()
}

/// A random strictly positive probability row over `arity` values.
fn random_row(rng: &mut ChaCha8Rng, arity: usize) -> Vec<ExactProb> {
    let weights: Vec<i64> = (0..arity).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = weights.iter().sum();
    weights
        .into_iter()
        .map(|w| ExactProb::new(w, total).unwrap())
        .collect()
}

/// Generates a random causal model within the configured shape, retrying
/// until the canonical / potential-outcome size caps are met.
pub fn random_model(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Result<CausalModel> {
    loop {
        let model = random_model_once(rng, cfg)?;
        if let Some(cap) = cfg.max_canonical_states {
            if canonical_states(&model) > cap || max_response_functions(&model) > 64 {
                continue;
            }
        }
        if let Some(cap) = cfg.max_po_states {
            if po_states(&model) > cap {
                continue;
            }
        }
        return Ok(model);
    }
}

fn random_model_once(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Result<CausalModel> {
    let n_endo = rng.gen_range(2..=cfg.max_endogenous);
    let n_exo = rng.gen_range(1..=cfg.max_exogenous);
    let exo_names: Vec<String> = (0..n_exo).map(|i| format!("U{}", i + 1)).collect();
    let endo_names: Vec<String> = (0..n_endo).map(|i| format!("V{}", i + 1)).collect();
    let mut ranges: Vec<(String, Vec<String>)> = Vec::new();
    let mut b = ModelBuilder::new();
    for u in &exo_names {
        let range = random_range(rng, cfg);
        let refs: Vec<&str> = range.iter().map(String::as_str).collect();
        b = b.exogenous(u, &refs);
        ranges.push((u.clone(), range));
    }
    for x in &endo_names {
        let range = random_range(rng, cfg);
        let refs: Vec<&str> = range.iter().map(String::as_str).collect();
        b = b.endogenous(x, &refs);
        ranges.push((x.clone(), range));
    }
    let arity_of = |name: &str, ranges: &[(String, Vec<String>)]| {
        ranges
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r.len())
            .unwrap()
    };

    // Parents: sampled from exogenous variables and earlier endogenous
    // variables, greedily bounded by the parent-state cap.
    let mut parent_sets: Vec<Vec<String>> = Vec::new();
    for (i, x) in endo_names.iter().enumerate() {
        let mut candidates: Vec<String> = exo_names.clone();
        candidates.extend(endo_names[..i].iter().cloned());
        candidates.shuffle(rng);
        let want = rng.gen_range(1..=cfg.max_parents.min(candidates.len()));
        let mut chosen: Vec<String> = Vec::new();
        let mut states = 1usize;
        for cand in candidates {
            if chosen.len() == want {
                break;
            }
            let next = states * arity_of(&cand, &ranges);
            if next <= cfg.max_parent_states || chosen.is_empty() {
                states = next;
                chosen.push(cand);
            }
        }
        for p in &chosen {
            b = b.edge(p, x);
        }
        parent_sets.push(chosen);
    }

    for u in &exo_names {
        let arity = arity_of(u, &ranges);
        let row = random_row(rng, arity);
        let range: Vec<String> = (0..arity).map(|i| i.to_string()).collect();
        let masses: Vec<(&str, ExactProb)> = range
            .iter()
            .zip(&row)
            .map(|(v, p)| (v.as_str(), p.clone()))
            .collect();
        b = b.prior_exact(u, &masses);
    }
    for (i, x) in endo_names.iter().enumerate() {
        let arity = arity_of(x, &ranges);
        let range: Vec<String> = (0..arity).map(|v| v.to_string()).collect();
        // Enumerate all parent assignments.
        let parents = &parent_sets[i];
        let parent_ranges: Vec<Vec<String>> = parents
            .iter()
            .map(|p| (0..arity_of(p, &ranges)).map(|v| v.to_string()).collect())
            .collect();
        let mut index = vec![0usize; parents.len()];
        loop {
            let pa: Vec<(&str, &str)> = parents
                .iter()
                .zip(&index)
                .map(|(p, &v)| {
                    (
                        p.as_str(),
                        parent_ranges[parents.iter().position(|q| q == p).unwrap()][v].as_str(),
                    )
                })
                .collect();
            let row = random_row(rng, arity);
            let masses: Vec<(&str, ExactProb)> = range
                .iter()
                .zip(&row)
                .map(|(v, p)| (v.as_str(), p.clone()))
                .collect();
            b = b.cpd_row_exact(x, &pa, &masses);
            // Advance the mixed-radix counter.
            let mut pos = parents.len();
            let mut done = parents.is_empty();
            while pos > 0 {
                pos -= 1;
                index[pos] += 1;
                if index[pos] < parent_ranges[pos].len() {
                    break;
                }
                index[pos] = 0;
                if pos == 0 {
                    done = true;
                }
            }
            if done || parents.is_empty() {
                break;
            }
        }
    }
    b.build()
}

/// The canonical response-state product of a model: base exogenous states
/// times the number of response functions of every endogenous variable.
pub fn canonical_states(model: &CausalModel) -> u128 {
    let sig = model.signature();
    let mut total: u128 = 1;
    for u in sig.exogenous() {
        total = total.saturating_mul(sig.range(u).unwrap().len() as u128);
    }
    for x in sig.endogenous() {
        let pa_states = model.cpd(x).unwrap().pa_space().size() as u32;
        let arity = sig.range(x).unwrap().len() as u128;
        total = total.saturating_mul(arity.saturating_pow(pa_states));
    }
    total
}

/// The largest per-variable response-function count in the model's
/// canonical frame.
pub fn max_response_functions(model: &CausalModel) -> u128 {
    let sig = model.signature();
    sig.endogenous()
        .iter()
        .map(|x| {
            let pa_states = model.cpd(x).unwrap().pa_space().size() as u32;
            (sig.range(x).unwrap().len() as u128).saturating_pow(pa_states)
        })
        .max()
        .unwrap_or(1)
}

/// The potential-outcome state product: base exogenous states times
/// `|R(X)|` per (variable, parent assignment) pair.
pub fn po_states(model: &CausalModel) -> u128 {
    let sig = model.signature();
    let mut total: u128 = 1;
    for u in sig.exogenous() {
        total = total.saturating_mul(sig.range(u).unwrap().len() as u128);
    }
    for x in sig.endogenous() {
        let pa_states = model.cpd(x).unwrap().pa_space().size() as u32;
        let arity = sig.range(x).unwrap().len() as u128;
        total = total.saturating_mul(arity.saturating_pow(pa_states));
    }
    total
}

/// Samples a positive-probability world by forward sampling. The generator
/// only produces strictly positive rows, so any forward sample qualifies.
pub fn random_world(rng: &mut ChaCha8Rng, model: &CausalModel) -> Result<World> {
    let sig = model.signature();
    let mut u = Assignment::new();
    for var in sig.exogenous() {
        let prior = model.prior(var)?;
        let range = sig.range(var)?;
        u.set(var, &range[sample_index(rng, prior)]);
    }
    let mut full = u.clone();
    let mut v = Assignment::new();
    for var in model.dag().topological_order()? {
        if !sig.is_endogenous(&var) {
            continue;
        }
        let table = model.cpd(&var)?;
        let row = table.row_at(table.pa_index_in(&full)?);
        let range = sig.range(&var)?;
        let value = &range[sample_index(rng, row)];
        v.set(&var, value);
        full.set(&var, value);
    }
    Ok(World::new(u, v))
}

fn sample_index(rng: &mut ChaCha8Rng, masses: &[ExactProb]) -> usize {
    // Weighted choice by f64 approximation; correctness never depends on
    // the sampling distribution, only on landing in the support.
    let weights: Vec<f64> = masses.iter().map(|p| p.to_f64()).collect();
    let positive: Vec<usize> = masses
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(i, _)| i)
        .collect();
    let total: f64 = weights.iter().sum();
    let mut draw = rng.gen_range(0.0..total.max(f64::MIN_POSITIVE));
    for (i, w) in weights.iter().enumerate() {
        if masses[i].is_zero() {
            continue;
        }
        if draw < *w {
            return i;
        }
        draw -= w;
    }
    *positive
        .last()
        .expect("a probability row has positive mass somewhere")
}

/// A random partial endogenous assignment with `1..=max_vars` variables.
pub fn random_endo_assignment(
    rng: &mut ChaCha8Rng,
    model: &CausalModel,
    max_vars: usize,
) -> Assignment {
    let sig = model.signature();
    let mut vars: Vec<&String> = sig.endogenous().iter().collect();
    vars.shuffle(rng);
    let n = rng.gen_range(1..=max_vars.min(vars.len()));
    let mut out = Assignment::new();
    for var in vars.into_iter().take(n) {
        let range = sig.range(var).unwrap();
        out.set(var, &range[rng.gen_range(0..range.len())]);
    }
    out
}

/// A random counterfactual atom; with probability ~1/4 the intervention is
/// empty (an observational atom).
pub fn random_atom(rng: &mut ChaCha8Rng, model: &CausalModel) -> Atom {
    let target = random_endo_assignment(rng, model, 2);
    if rng.gen_ratio(1, 4) {
        Atom::observational(target)
    } else {
        Atom::counterfactual(target, random_endo_assignment(rng, model, 2))
    }
}

pub fn random_atoms(rng: &mut ChaCha8Rng, model: &CausalModel, max_atoms: usize) -> Vec<Atom> {
    let n = rng.gen_range(1..=max_atoms);
    (0..n).map(|_| random_atom(rng, model)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_models_validate_and_stay_in_shape() {
        let mut r = rng(42);
        let cfg = GenConfig::default();
        for _ in 0..40 {
            let m = random_model(&mut r, &cfg).unwrap();
            let sig = m.signature();
            assert!(sig.endogenous().len() <= cfg.max_endogenous);
            for v in sig.all_vars() {
                assert!(sig.range(v).unwrap().len() <= cfg.max_values);
            }
            // Strictly positive rows make every forward sample a positive
            // world.
            let w = random_world(&mut r, &m).unwrap();
            assert!(!m.world_prob(&w).unwrap().is_zero());
        }
    }

    #[test]
    fn caps_filter_the_population() {
        let mut r = rng(7);
        let cfg = GenConfig {
            max_canonical_states: Some(5_000),
            ..GenConfig::binary()
        };
        for _ in 0..20 {
            let m = random_model(&mut r, &cfg).unwrap();
            assert!(canonical_states(&m) <= 5_000);
        }
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let cfg = GenConfig::default();
        let a = random_model(&mut rng(99), &cfg).unwrap();
        let b = random_model(&mut rng(99), &cfg).unwrap();
        assert_eq!(a, b);
    }
}
