use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("precision exhausted: a sign test could not be decided at the working precision")]
    PrecisionExhausted,
    #[error("estimate not yet converged: {0}")]
    NotConverged(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("invalid root specification: {0}")]
    InvalidRoot(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("decomposition violated at {point}: contained in {regions} regions")]
    DecompositionViolation { point: String, regions: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
