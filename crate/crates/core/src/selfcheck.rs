//! Randomized cross-route equivalence suites.
//!
//! Each suite generates seeded random models, evaluates the same quantity
//! along two independent routes, and demands exact rational equality. The
//! suites back both the integration tests and the `selfcheck` command.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::assign::{Assignment, Atom};
use crate::bsem::{b_atom_closed, b_atom_def, b_basic_closed, b_basic_def, b_conditional};
use crate::builder::ScmBuilder;
use crate::canonical::{bound_query, canonical_frame, polytope_vertices, ResponsePolytope};
use crate::catalog::coarsen_source_copy;
use crate::error::{Caps, Result};
use crate::gen::{
    random_atoms, random_endo_assignment, random_model, random_world, rng, GenConfig,
};
use crate::model::check_markov;
use crate::po::{build_po_scm, po_complex, po_conditional, po_given_world};
use crate::prob::ExactProb;
use crate::query::{
    causation_query, evaluate, parse_query, CausationKind, CounterfactualQuery, EvalResult,
    QueryTarget, SemanticsTag,
};
use crate::space::Space;

/// The outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(detail());
        }
    }
}

/// Shared configuration: the seed pins every sample, `models` scales the
/// population sizes.
#[derive(Debug, Clone)]
pub struct SelfCheckConfig {
    pub seed: u64,
    pub models: usize,
    pub caps: Caps,
}

impl Default for SelfCheckConfig {
    fn default() -> Self {
        SelfCheckConfig {
            seed: 7,
            models: 200,
            caps: Caps::default(),
        }
    }
}

/// Runs every suite.
pub fn run_all(cfg: &SelfCheckConfig) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        model_invariants(cfg)?,
        basic_equivalence(cfg)?,
        closed_form_equivalence(cfg)?,
        conditional_equivalence(cfg)?,
        causation_agreement(cfg)?,
        pns_linkage(cfg)?,
        family_equivalence(cfg)?,
        po_dense_oracle(cfg)?,
        bounds_bracket(cfg)?,
        emergent_nondeterminism(cfg)?,
        parser_roundtrip(cfg)?,
    ])
}

/// Normalization, intervention consistency, empty interventions, and the
/// Markov property of constructed joints.
pub fn model_invariants(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("model-invariants");
    let mut r = rng(cfg.seed ^ 0x01);
    let shape = GenConfig::default();
    for _ in 0..cfg.models.min(60) {
        let m = random_model(&mut r, &shape)?;
        let joint = m.joint_with(&cfg.caps)?;
        let total: ExactProb = joint.masses().iter().cloned().sum();
        report.check(total.is_one(), || format!("joint mass sums to {}", total));
        report.check(
            m.intervene_with(&Assignment::new(), &cfg.caps)? == joint,
            || "empty intervention differs from the joint".into(),
        );
        let do_ = random_endo_assignment(&mut r, &m, 2);
        let intervened = m.intervene_with(&do_, &cfg.caps)?;
        report.check(intervened.prob(&do_)?.is_one(), || {
            format!("do({}) does not pin its own event", do_)
        });
        let markov = check_markov(m.signature(), m.dag(), &joint)?;
        report.check(markov.holds && markov.violations.is_empty(), || {
            "constructed joint is not Markov".into()
        });
    }
    Ok(report)
}

/// Refinement route versus potential-outcome route on basic
/// counterfactuals: equal on every sampled world/intervention/target
/// triple.
pub fn basic_equivalence(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("basic-equivalence");
    let mut r = rng(cfg.seed ^ 0x02);
    let shape = GenConfig::default();
    for _ in 0..cfg.models {
        let m = random_model(&mut r, &shape)?;
        for _ in 0..20 {
            let world = random_world(&mut r, &m)?;
            let do_ = if r.gen_ratio(1, 6) {
                Assignment::new()
            } else {
                random_endo_assignment(&mut r, &m, 2)
            };
            let target = random_endo_assignment(&mut r, &m, 2);
            let atom = Atom::counterfactual(target.clone(), do_.clone());
            let b = b_atom_closed(&m, &atom, &world)?;
            let n = po_given_world(&m, std::slice::from_ref(&atom), &world)?;
            report.check(b == n, || {
                format!(
                    "({})[{}] at world {}: refinement {} vs outcome {}",
                    target, do_, world, b, n
                )
            });
        }
    }
    Ok(report)
}

/// The four-case closed form versus the literal refined-model computation.
pub fn closed_form_equivalence(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("closed-form");
    let mut r = rng(cfg.seed ^ 0x03);
    let shape = GenConfig::default();
    for _ in 0..cfg.models {
        let m = random_model(&mut r, &shape)?;
        let sig = m.signature();
        let endo_space = Space::new(
            sig.endogenous()
                .iter()
                .map(|x| (x.clone(), sig.range(x).unwrap().to_vec()))
                .collect(),
            cfg.caps.max_states,
        )?;
        for _ in 0..6 {
            let world = random_world(&mut r, &m)?;
            let do_ = random_endo_assignment(&mut r, &m, 2);
            // A full target, biased towards the actual world now and then.
            let v_star = if r.gen_ratio(1, 4) {
                world.v.clone()
            } else {
                endo_space.decode(&endo_space.indices_at(r.gen_range(0..endo_space.size())))
            };
            let closed = b_basic_closed(&m, &do_, &v_star, &world)?;
            let def = b_basic_def(&m, &do_, &v_star, &world)?;
            report.check(closed == def, || {
                format!(
                    "closed {} vs definitional {} at {} do {}",
                    closed, def, v_star, do_
                )
            });
            // Partial targets through both marginalization routes.
            let atom = Atom::counterfactual(random_endo_assignment(&mut r, &m, 2), do_.clone());
            let closed = b_atom_closed(&m, &atom, &world)?;
            let def = b_atom_def(&m, &atom, &world)?;
            report.check(closed == def, || {
                format!("atom {}: closed {} vs def {}", atom, closed, def)
            });
        }
    }
    Ok(report)
}

/// Conditional counterfactuals agree between the refinement and
/// potential-outcome semantics.
pub fn conditional_equivalence(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("conditional-equivalence");
    let mut r = rng(cfg.seed ^ 0x04);
    let shape = GenConfig::default();
    for _ in 0..cfg.models {
        let m = random_model(&mut r, &shape)?;
        for _ in 0..3 {
            let atom = Atom::counterfactual(
                random_endo_assignment(&mut r, &m, 2),
                random_endo_assignment(&mut r, &m, 2),
            );
            let given = random_endo_assignment(&mut r, &m, 2);
            let b = b_conditional(&m, std::slice::from_ref(&atom), &given)?;
            let n = po_conditional(&m, std::slice::from_ref(&atom), &given)?;
            report.check(b == n, || {
                format!(
                    "{} given {}: refinement {} vs outcome {}",
                    atom, given, b, n
                )
            });
        }
    }
    Ok(report)
}

/// Probabilities of necessity/sufficiency agree across all four point
/// semantics on binary models, and satisfy the total-probability linkage
/// PNS = P(x,y) PN + P(x',y') PS under both world-based semantics.
pub fn causation_agreement(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("causation-agreement");
    let mut r = rng(cfg.seed ^ 0x05);
    let shape = GenConfig {
        max_canonical_states: Some(5_000),
        ..GenConfig::binary()
    };
    for _ in 0..cfg.models {
        let m = random_model(&mut r, &shape)?;
        let endo = m.signature().endogenous();
        let x_var = &endo[r.gen_range(0..endo.len())];
        let mut y_var = &endo[r.gen_range(0..endo.len())];
        while y_var == x_var {
            y_var = &endo[r.gen_range(0..endo.len())];
        }
        let mut values = std::collections::BTreeMap::new();
        for kind in [
            CausationKind::Necessity,
            CausationKind::Sufficiency,
            CausationKind::NecessityAndSufficiency,
        ] {
            let query = causation_query(&m, x_var, y_var, kind)?;
            let mut per_tag = Vec::new();
            for tag in SemanticsTag::POINT_TAGS {
                let EvalResult::Point(v) =
                    evaluate(QueryTarget::Model(&m), &query, tag, &cfg.caps)?
                else {
                    unreachable!()
                };
                per_tag.push((tag, v));
            }
            let reference = per_tag[0].1.clone();
            for (tag, v) in &per_tag {
                report.check(*v == reference, || {
                    format!(
                        "{:?} of {} on {}: {} gives {} vs {}",
                        kind, y_var, x_var, tag, v, reference
                    )
                });
            }
            values.insert(format!("{:?}", kind), reference);
        }
    }
    Ok(report)
}

/// The total-probability linkage PNS = P(x,y) PN + P(x',y') PS holds
/// exactly under both world-based semantics on random binary models.
pub fn pns_linkage(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("pns-linkage");
    let mut r = rng(cfg.seed ^ 0x0b);
    let shape = GenConfig::binary();
    for _ in 0..cfg.models {
        let m = random_model(&mut r, &shape)?;
        let endo = m.signature().endogenous();
        let x_var = &endo[r.gen_range(0..endo.len())];
        let mut y_var = &endo[r.gen_range(0..endo.len())];
        while y_var == x_var {
            y_var = &endo[r.gen_range(0..endo.len())];
        }
        let joint = m.joint_with(&cfg.caps)?;
        let sig = m.signature();
        let (x0, x1) = (&sig.range(x_var)?[0], &sig.range(x_var)?[1]);
        let (y0, y1) = (&sig.range(y_var)?[0], &sig.range(y_var)?[1]);
        let p_xy = joint.prob(&Assignment::new().with(x_var, x1).with(y_var, y1))?;
        let p_xy_bar = joint.prob(&Assignment::new().with(x_var, x0).with(y_var, y0))?;
        for tag in [SemanticsTag::B, SemanticsTag::N] {
            let value_of = |kind: CausationKind| -> Result<ExactProb> {
                let query = causation_query(&m, x_var, y_var, kind)?;
                match evaluate(QueryTarget::Model(&m), &query, tag, &cfg.caps)? {
                    EvalResult::Point(v) => Ok(v),
                    EvalResult::Interval(_, _) => unreachable!(),
                }
            };
            let pn = value_of(CausationKind::Necessity)?;
            let ps = value_of(CausationKind::Sufficiency)?;
            let pns = value_of(CausationKind::NecessityAndSufficiency)?;
            let rhs = p_xy.clone() * pn + p_xy_bar.clone() * ps;
            report.check(pns == rhs, || {
                format!(
                    "linkage under {}: PNS {} vs decomposition {}",
                    tag, pns, rhs
                )
            });
        }
    }
    Ok(report)
}

/// The three canonical-family semantics coincide on arbitrary conjunction
/// queries: potential-outcome, product-form canonical, and independent
/// canonical. Basic counterfactuals conditioned on a full world pull the
/// refinement semantics into the agreement as well.
pub fn family_equivalence(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("family-equivalence");
    let mut r = rng(cfg.seed ^ 0x06);
    let shape = GenConfig {
        max_canonical_states: Some(5_000),
        ..GenConfig::default()
    };
    for _ in 0..cfg.models {
        let m = random_model(&mut r, &shape)?;
        for _ in 0..2 {
            let atoms = random_atoms(&mut r, &m, 3);
            let given = if r.gen_ratio(1, 2) {
                Some(random_endo_assignment(&mut r, &m, 2))
            } else {
                None
            };
            let query = CounterfactualQuery { atoms, given };
            let mut outcomes = Vec::new();
            for tag in [SemanticsTag::N, SemanticsTag::Gh, SemanticsTag::Ic] {
                let EvalResult::Point(v) =
                    evaluate(QueryTarget::Model(&m), &query, tag, &cfg.caps)?
                else {
                    unreachable!()
                };
                outcomes.push((tag, v));
            }
            let reference = outcomes[0].1.clone();
            for (tag, v) in &outcomes {
                report.check(*v == reference, || {
                    format!("{}: {} gives {} vs {}", query, tag, v, reference)
                });
            }
        }
        // A basic counterfactual conditioned on a full world: all four
        // point semantics must agree exactly.
        let world = crate::gen::random_world(&mut r, &m)?;
        let query = CounterfactualQuery {
            atoms: vec![Atom::counterfactual(
                random_endo_assignment(&mut r, &m, 2),
                random_endo_assignment(&mut r, &m, 2),
            )],
            given: Some(world.full()),
        };
        let mut outcomes = Vec::new();
        for tag in SemanticsTag::POINT_TAGS {
            let EvalResult::Point(v) = evaluate(QueryTarget::Model(&m), &query, tag, &cfg.caps)?
            else {
                unreachable!()
            };
            outcomes.push((tag, v));
        }
        let reference = outcomes[0].1.clone();
        for (tag, v) in &outcomes {
            report.check(*v == reference, || {
                format!("full world {}: {} gives {} vs {}", query, tag, v, reference)
            });
        }
    }
    Ok(report)
}

/// The lazy potential-outcome evaluator versus dense enumeration of the
/// explicit potential-outcome model, on models whose potential-outcome
/// state space stays enumerable.
pub fn po_dense_oracle(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("po-dense-oracle");
    let mut r = rng(cfg.seed ^ 0x07);
    let shape = GenConfig {
        max_parent_states: 3,
        max_po_states: Some(100_000),
        ..GenConfig::default()
    };
    let population = (cfg.models / 8).max(10);
    for _ in 0..population {
        let m = random_model(&mut r, &shape)?;
        let po = build_po_scm(&m, &cfg.caps)?;
        for _ in 0..2 {
            let atoms = random_atoms(&mut r, &m, 2);
            let lazy = po_complex(&m, &atoms)?;
            let dense = po.scm().complex_cf_with(&atoms, &cfg.caps)?;
            report.check(lazy == dense, || {
                format!("lazy {} vs dense {} on {:?}", lazy, dense, atoms)
            });
            // Conditional flavor against the dense route.
            let given = random_endo_assignment(&mut r, &m, 2);
            let lazy = po_conditional(&m, &atoms, &given)?;
            let dense = po.scm().conditional_cf_with(&atoms, &given, &cfg.caps)?;
            report.check(lazy == dense, || {
                format!(
                    "conditional lazy {} vs dense {} given {}",
                    lazy, dense, given
                )
            });
        }
    }
    Ok(report)
}

/// Bounds bracket the point-identified values, and interior grid points of
/// the response polytopes never escape the interval.
pub fn bounds_bracket(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("bounds-bracket");
    let mut r = rng(cfg.seed ^ 0x08);
    let shape = GenConfig {
        max_endogenous: 3,
        max_canonical_states: Some(1_000),
        ..GenConfig::binary()
    };
    let population = (cfg.models / 8).max(10);
    for _ in 0..population {
        let m = random_model(&mut r, &shape)?;
        for _ in 0..2 {
            let atoms = random_atoms(&mut r, &m, 2);
            let given = if r.gen_ratio(1, 2) {
                Some(random_endo_assignment(&mut r, &m, 2))
            } else {
                None
            };
            let (lo, hi) = bound_query(&m, &atoms, given.as_ref(), &cfg.caps)?;
            report.check(lo <= hi, || format!("inverted interval [{}, {}]", lo, hi));
            let query = CounterfactualQuery {
                atoms: atoms.clone(),
                given: given.clone(),
            };
            for tag in [SemanticsTag::Ic, SemanticsTag::N, SemanticsTag::B] {
                let value = match evaluate(QueryTarget::Model(&m), &query, tag, &cfg.caps)? {
                    EvalResult::Point(v) => v,
                    EvalResult::Interval(_, _) => unreachable!(),
                };
                // Only the canonical-family semantics are guaranteed inside;
                // the refinement value is checked for single atoms where it
                // coincides with them.
                if tag == SemanticsTag::B && query.atoms.len() > 1 {
                    continue;
                }
                report.check(lo <= value && value <= hi, || {
                    format!(
                        "{} value {} escapes [{}, {}] on {}",
                        tag, value, lo, hi, query
                    )
                });
            }
        }
        // Grid sampling: midpoints of vertex pairs stay inside the bounds.
        let frame = canonical_frame(&m, &cfg.caps)?;
        let atoms = random_atoms(&mut r, &m, 1);
        let (lo, hi) = bound_query(&m, &atoms, None, &cfg.caps)?;
        let mut dists = std::collections::BTreeMap::new();
        let half = ExactProb::new(1, 2)?;
        for x in m.signature().endogenous() {
            let polytope = ResponsePolytope::for_variable(&frame, x)?;
            let vertices = polytope_vertices(&polytope, &cfg.caps)?;
            let mix: Vec<ExactProb> = if vertices.len() >= 2 {
                vertices[0]
                    .iter()
                    .zip(&vertices[1])
                    .map(|(a, b)| a.clone() * half.clone() + b.clone() * half.clone())
                    .collect()
            } else {
                vertices[0].clone()
            };
            dists.insert(x.clone(), mix);
        }
        let scm = crate::canonical::canonical_scm(&frame, &dists)?;
        let value = scm.complex_cf_with(&atoms, &cfg.caps)?;
        report.check(lo <= value && value <= hi, || {
            format!("grid point {} escapes [{}, {}]", value, lo, hi)
        });
    }
    Ok(report)
}

/// Coarsening a deterministic copy model by a one-value indicator always
/// produces a strictly nondeterministic conditional for every value other
/// than the distinguished one's image.
pub fn emergent_nondeterminism(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("emergent-nondeterminism");
    let mut r = rng(cfg.seed ^ 0x09);
    let instances = cfg.models.clamp(20, 40);
    for _ in 0..instances {
        // |R(Y)| > 2, surjective f, strictly positive priors.
        let n_y = r.gen_range(3..=4usize);
        let n_u = r.gen_range(n_y..=n_y + 2);
        let u_labels: Vec<String> = (1..=n_u).map(|i| i.to_string()).collect();
        let y_labels: Vec<String> = (1..=n_y).map(|i| i.to_string()).collect();
        // Surjective map: the first |Y| sources hit each value once, the
        // rest are random.
        let mut f: Vec<usize> = (0..n_y).collect();
        for _ in n_y..n_u {
            f.push(r.gen_range(0..n_y));
        }
        f.shuffle(&mut r);
        let weights: Vec<i64> = (0..n_u).map(|_| r.gen_range(1..=5)).collect();
        let total: i64 = weights.iter().sum();
        let prior: Vec<(&str, (i64, i64))> = u_labels
            .iter()
            .zip(&weights)
            .map(|(l, w)| (l.as_str(), (*w, total)))
            .collect();
        let u_refs: Vec<&str> = u_labels.iter().map(String::as_str).collect();
        let y_refs: Vec<&str> = y_labels.iter().map(String::as_str).collect();
        let f_clone = f.clone();
        let u_labels_clone = u_labels.clone();
        let y_labels_clone = y_labels.clone();
        let low = ScmBuilder::new()
            .exogenous("U", &u_refs)
            .endogenous("Y", &y_refs)
            .edge("U", "Y")
            .prior("U", &prior)
            .equation_fn("Y", move |pa| {
                let u = pa.get("U").unwrap();
                let idx = u_labels_clone.iter().position(|l| l == u).unwrap();
                y_labels_clone[f_clone[idx]].clone()
            })
            .build()?;
        let u_prime_idx = r.gen_range(0..n_u);
        let induced = coarsen_source_copy(&low, &u_labels[u_prime_idx])?;
        let y1 = &y_labels[f[u_prime_idx]];
        for y in &y_labels {
            if y == y1 {
                continue;
            }
            let p = induced.conditional("Y", y, &Assignment::of(&[("Z", "0")]))?;
            report.check(!p.is_zero() && !p.is_one(), || {
                format!("P(Y={} | Z=0) = {} is extremal", y, p)
            });
        }
        report.check(!induced.deterministic["Y"], || {
            "Y stayed deterministic".into()
        });
    }
    Ok(report)
}

/// Printing and re-parsing a random query reproduces it exactly.
pub fn parser_roundtrip(cfg: &SelfCheckConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("parser-roundtrip");
    let mut r = rng(cfg.seed ^ 0x0a);
    let vars = ["X", "Y", "Z2", "Long_name"];
    let values = ["0", "1", "v2"];
    let random_assignment = |r: &mut ChaCha8Rng| {
        let mut a = Assignment::new();
        let n = r.gen_range(1..=2usize);
        for var in vars.choose_multiple(r, n) {
            a.set(var, values.choose(r).unwrap());
        }
        a
    };
    for _ in 0..cfg.models.max(100) {
        let n_atoms = r.gen_range(1..=3usize);
        let atoms: Vec<Atom> = (0..n_atoms)
            .map(|_| {
                if r.gen_ratio(1, 3) {
                    // A plain term carries exactly one assignment; larger
                    // observational events are conjunctions of plain terms.
                    let mut target = Assignment::new();
                    target.set(vars.choose(&mut r).unwrap(), values.choose(&mut r).unwrap());
                    Atom::observational(target)
                } else {
                    Atom::counterfactual(random_assignment(&mut r), random_assignment(&mut r))
                }
            })
            .collect();
        let given = if r.gen_ratio(1, 2) {
            Some(random_assignment(&mut r))
        } else {
            None
        };
        let query = CounterfactualQuery { atoms, given };
        let printed = query.to_string();
        match parse_query(&printed) {
            Ok(back) => report.check(back == query, || {
                format!("`{}` re-parses differently", printed)
            }),
            Err(e) => report.check(false, || format!("`{}` fails to parse: {}", printed, e)),
        }
    }
    Ok(report)
}
