//! Numerical thresholds shared by every module.

/// Marginal and total-mass checks.
pub const TOL_MASS: f64 = 1e-9;

/// Metric-axiom checks.
pub const TOL_METRIC: f64 = 1e-9;

/// Coupling entries above this value are treated as support.
pub const EPS_SUPP: f64 = 1e-12;

/// Smallest Cholesky pivot accepted without a near-singular warning.
pub const SPD_PIVOT: f64 = 1e-10;

/// Minimum objective gain for a vertex-ascent move.
pub const ASCENT_GAIN: f64 = 1e-12;
