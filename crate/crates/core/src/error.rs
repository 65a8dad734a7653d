use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("index {index} already belongs to the {side} set")]
    Collision { index: usize, side: &'static str },

    #[error("space not available: {0}")]
    ExcludedSpace(String),

    #[error("boundary index sets do not satisfy property (N_a)")]
    NaFailed,

    #[error("state magnitude exceeded 1e300 at t = {t}")]
    Overflow { t: f64 },

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("no eigenvalue found for lambda in {lo} .. {hi}")]
    NotFound { lo: f64, hi: f64 },

    #[error("boundary value problem is singular (characteristic determinant {det:e})")]
    Singular { det: f64 },

    #[error("lambda is not an eigenvalue (smallest relative singular value {ratio:e})")]
    NotEigenvalue { ratio: f64 },

    #[error("Wronskian W{k} is not positive at t = {t}")]
    Disconjugacy { k: usize, t: f64 },

    #[error("operator is not of the reduced form required: {0}")]
    TildeForm(String),

    #[error("invalid boundary subset: {0}")]
    Subset(String),

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
