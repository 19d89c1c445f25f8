//! An exact-arithmetic engine for probabilities of counterfactuals in
//! discrete causal models.
//!
//! The engine evaluates counterfactual queries under several semantics:
//! extremal bounds over canonical structural models, the point-identified
//! potential-outcome semantics, its canonical and product-form equivalents,
//! and the actualized-refinement semantics. The equivalences between them
//! are cross-checked with zero-tolerance rational arithmetic.

pub mod abstraction;
pub mod assign;
pub mod bsem;
pub mod builder;
pub mod canonical;
pub mod catalog;
pub mod dag;
pub mod dist;
pub mod error;
pub mod files;
pub mod gen;
pub mod model;
pub mod po;
pub mod prob;
pub mod query;
pub mod scm;
pub mod selfcheck;
pub mod signature;
pub mod space;

pub use assign::{Assignment, Atom, World};
pub use dag::Dag;
pub use dist::Distribution;
pub use error::{Caps, Error, Result};
pub use model::{check_markov, CausalModel, CpdTable, MarkovReport, MarkovViolation};
pub use prob::ExactProb;
pub use scm::{EquationTable, Scm};
pub use signature::Signature;
