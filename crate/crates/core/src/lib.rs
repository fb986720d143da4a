//! Numerical toolkit for the single-mode quantum parametric oscillator.
//!
//! The oscillator is described by a Lindblad master equation with two-photon
//! gain, one- and two-photon loss and an optional coherent one-photon drive.
//! The crate projects the master equation onto a truncated Fock basis,
//! computes the exact steady state as the null vector of the Liouvillian,
//! evaluates Wigner functions, fits the closest Gaussian (displaced squeezed
//! thermal) state and measures the distance to it with three
//! non-Gaussianity metrics.
//!
//! Module map:
//!
//! - [`model`]: parameters and Fock-space operator matrices
//! - [`liouvillian`]: sparse vectorized superoperator
//! - [`steady`]: null-vector steady state, RK4 propagation, truncation checks
//! - [`classical`]: mean-field fixed points and bifurcations
//! - [`gaussian`]: moments, Gaussian fit, reference-state matrix
//! - [`wigner`]: Wigner function evaluation and lobe detection
//! - [`metrics`]: Hilbert-Schmidt, relative-entropy and photon-distribution metrics

pub mod banded;
pub mod classical;
mod error;
pub mod gaussian;
pub mod liouvillian;
pub mod metrics;
pub mod model;
mod special;
pub mod steady;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use classical::{ClassicalFixedPoint, Stability};
pub use gaussian::{GaussianRef, MomentData};
pub use liouvillian::LiouvillianMatrix;
pub use metrics::MetricsRecord;
pub use model::{FockMatrix, ModelParams};
pub use steady::{DensityMatrix, SolverMethod, SolverOptions, SteadyState};
pub use wigner::WignerGrid;
