use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative probability {value} at y1={y1}, y2={y2}, x1={x1}, x2={x2}")]
    NegativeProbability {
        x1: usize,
        x2: usize,
        y1: usize,
        y2: usize,
        value: f64,
    },
    #[error("transition row for x1={x1}, x2={x2} sums to 1 - {residual}")]
    RowSumMismatch { x1: usize, x2: usize, residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("factorization does not cover the variable set: {0}")]
    SpecCoverage(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("unknown random variable `{0}`")]
    UnknownVariable(String),
    #[error("malformed expression `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error("unknown region schema `{0}`")]
    UnknownSchema(String),
    #[error("distribution violates the factorization: {condition} = {value:.3e}")]
    FactorizationViolation { condition: String, value: f64 },
    #[error("operation is not applicable to schema {0}")]
    NotApplicable(String),
    #[error("rate region is empty (worst violation {violation:.3e})")]
    Infeasible { violation: f64 },
    #[error("projected region is unbounded; a decoding constraint is missing")]
    Unbounded,
    #[error("identity {check} violated by {value:.3e} at seed {seed}")]
    IdentityViolation {
        check: String,
        seed: u64,
        value: f64,
    },
    #[error("containment violated at seed {seed}: vertex ({r1}, {r2}) outside by {margin:.3e}")]
    ContainmentViolation {
        seed: u64,
        r1: f64,
        r2: f64,
        margin: f64,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
