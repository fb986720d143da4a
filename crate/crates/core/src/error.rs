use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rate `{name}` must be strictly positive, got {value}")]
    NonPositiveRate { name: &'static str, value: f64 },

    #[error("pump amplitude must be non-negative, got {0}")]
    NegativePump(f64),

    #[error("parameter `{name}` is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },

    #[error("Fock truncation must keep at least 2 states, got n_max = {0}")]
    TruncationTooSmall(i64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index ({row}, {col}) out of range for n_max = {n_max}")]
    IndexOutOfRange { row: usize, col: usize, n_max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no eigenvalue within {tol:e} of zero (closest |lambda| = {closest:e}, residual {residual:e})")]
    NoZeroEigenvalue { tol: f64, closest: f64, residual: f64 },

    #[error("{count} independent unit-trace null vectors found; steady state is not unique")]
    DegenerateSteadyState { count: usize },

    #[error("tail mass {tail:e} in the outer {band} Fock rows/columns exceeds {eps:e}")]
    TailMassExceeded { tail: f64, band: usize, eps: f64 },

    #[error("time propagation did not converge: residual {residual:e} after t = {time}")]
    NotConverged { residual: f64, time: f64 },

    #[error("integration became unstable at t = {time} (|value| = {magnitude:e})")]
    UnstableStep { time: f64, magnitude: f64 },

    #[error("root finding failed: {0}")]
    RootFindingFailed(String),

    #[error("covariance violates the uncertainty bound: det = {det}")]
    UnphysicalCovariance { det: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}
