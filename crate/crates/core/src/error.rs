//! Error type shared across the engine.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid dag: {0}")]
    InvalidDag(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("value `{value}` is out of range for variable `{variable}`")]
    OutOfRange { variable: String, value: String },

    #[error("undefined conditional: the conditioning event has probability zero")]
    UndefinedConditional,

    #[error("undefined refinement: the world has probability zero")]
    ZeroProbabilityWorld,

    #[error("model too large: {states} states exceed the cap of {cap}")]
    ModelTooLarge { states: u128, cap: u128 },

    #[error("vertex enumeration cap exceeded: {detail}")]
    VertexCapExceeded { detail: String },

    #[error("response distribution for `{variable}` violates the row P({value} | {parents}): expected {expected}, got {got}")]
    ResponseConstraintViolated {
        variable: String,
        value: String,
        parents: String,
        expected: String,
        got: String,
    },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Enumeration caps. Every cap failure is a loud [`enum@Error`] rather than a
/// silent truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of assignments in any materialized joint table.
    pub max_states: u128,
    /// Maximum number of response functions per endogenous variable when
    /// building a canonical frame.
    pub max_response_functions: usize,
    /// Maximum number of per-variable vertex combinations examined by a
    /// single bound computation.
    pub max_vertex_products: u128,
    /// Maximum number of candidate column bases examined while enumerating
    /// the vertices of one response polytope.
    pub max_basis_candidates: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_states: 10_000_000,
            max_response_functions: 64,
            max_vertex_products: 100_000,
            max_basis_candidates: 1_000_000,
        }
    }
}

impl Caps {
    pub fn with_max_states(max_states: u128) -> Self {
        Caps {
            max_states,
            ..Caps::default()
        }
    }
}
