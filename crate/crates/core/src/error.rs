use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{field}[{index}] = {value} must be strictly positive")]
    NonPositiveWeight {
        field: &'static str,
        index: usize,
        value: f64,
    },

    #[error("{field} sums to {sum}, expected 1 (tolerance {tol:e})")]
    MassMismatch { field: &'static str, sum: f64, tol: f64 },

    #[error("non-finite value in {field} at ({row}, {col})")]
    NonFinite {
        field: &'static str,
        row: usize,
        col: usize,
    },

    #[error("coupling table has negative entry {value} at ({row}, {col})")]
    NegativeMass { row: usize, col: usize, value: f64 },

    #[error("coupling {side} marginal {index} is {found}, expected {expected}")]
    Marginal {
        side: &'static str,
        index: usize,
        expected: f64,
        found: f64,
    },

    #[error("assignment entry {index} -> {target} is out of range (target size {len})")]
    AssignmentRange { index: usize, target: usize, len: usize },

    #[error("map is not measure-preserving: fiber over {target} has mass {found}, expected {expected}")]
    NotMeasurePreserving { target: usize, expected: f64, found: f64 },

    #[error("network is not a metric (largest axiom violation {violation:e})")]
    NotMetric { violation: f64 },

    #[error("network function is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("weights must be uniform for this solver")]
    NonUniform,

    #[error("exponent must satisfy p >= 1, got {0}")]
    Exponent(f64),

    #[error("{0} is only supported for p = {1}")]
    UnsupportedExponent(&'static str, &'static str),

    #[error("{count} measure-preserving maps exceed the enumeration cap of {cap}: too large for exact enumeration")]
    TooLarge { count: u64, cap: u64 },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("transport problem did not converge after {0} pivots")]
    Transport(usize),
}
