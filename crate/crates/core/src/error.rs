use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("mixed weights {0} and {1}")]
    MixedWeights(String, String),

    #[error("weight mismatch: {0}")]
    WeightMismatch(String),

    #[error("invalid weight {0}: {1}")]
    InvalidWeight(i64, &'static str),

    #[error("step incompatibility: refining {0} and {1} exceeds denominator bound {2}")]
    StepIncompatible(String, String, u64),

    #[error("zero Pochhammer symbol: {0}")]
    PochhammerZero(String),

    #[error("operator is not modular: first failing check at r = {r}, j = {j}")]
    NotModular { r: usize, j: usize },

    #[error("depth {actual} exceeds declared bound {bound}")]
    DepthBound { actual: u32, bound: u32 },

    #[error("{0} is not a root of the indicial polynomial")]
    NotARoot(String),

    #[error("resonance: roots {0} and {1} differ by a positive integer")]
    Resonance(String, String),

    #[error("indicial polynomial has non-rational roots (remaining factor {0})")]
    IrrationalRoots(String),

    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation point too close to the real axis: |q| = {0} exceeds {1}")]
    EvalThreshold(f64, f64),
}
