//! Non-Gaussianity of a state relative to its Gaussian reference.
//!
//! - `delta`: normalized Hilbert-Schmidt distance
//!   `(Tr rho^2 + Tr tau^2 - 2 Tr rho tau) / (2 Tr rho^2)`
//! - `s`: relative entropy `S(tau) - S(rho)`, natural logarithm
//! - `Q`: squared Euclidean distance between photon-number distributions

use num_complex::Complex64 as C64;

use crate::gaussian::{self, GaussianRef, MomentData};
use crate::model::FockMatrix;
use crate::steady::DensityMatrix;
use crate::{Error, Result};

/// Eigenvalues below this are dropped from the entropy sum.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

/// `Tr rho^2 = sum |rho_mn|^2`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    frobenius_sq(rho.matrix())
}

fn frobenius_sq(m: &FockMatrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc
}

fn check_dims(rho: &DensityMatrix, tau: &FockMatrix) -> Result<()> {
    if tau.nrows() != rho.n_max() || tau.ncols() != rho.n_max() {
        return Err(Error::DimensionMismatch { expected: rho.n_max(), found: tau.nrows() });
    }
    Ok(())
}

/// `Tr(rho tau^dag) = sum rho_mn tau_mn^*`, real part.
pub fn overlap(rho: &DensityMatrix, tau: &FockMatrix) -> Result<f64> {
    check_dims(rho, tau)?;
    let n = rho.n_max();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            acc += rho.get(i, j) * tau[(i, j)].conj();
        }
    }
    Ok(acc.re)
}

/// Hilbert-Schmidt non-Gaussianity with a supplied `Tr tau^2`.
pub fn hs_nongaussianity_with_purity(rho: &DensityMatrix, tau: &FockMatrix, tau_purity: f64) -> Result<f64> {
    let p = purity(rho);
    let ov = overlap(rho, tau)?;
    Ok((p + tau_purity - 2.0 * ov) / (2.0 * p))
}

/// Hilbert-Schmidt non-Gaussianity using the analytic `Tr tau^2 = 1/(2 nbar + 1)`.
pub fn hs_nongaussianity(rho: &DensityMatrix, tau: &FockMatrix, reference: &GaussianRef) -> Result<f64> {
    hs_nongaussianity_with_purity(rho, tau, reference.purity())
}

/// `-sum lambda ln lambda` over eigenvalues above [`ENTROPY_CUTOFF`].
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eigs = rho.eigenvalues()?;
    if let Some(&min) = eigs.first() {
        if min < -1e-9 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
    }
    Ok(eigs
        .into_iter()
        .filter(|&l| l >= ENTROPY_CUTOFF)
        .map(|l| -l * l.ln())
        .sum())
}

/// `S(tau) - S(rho)` with the analytic thermal entropy for `S(tau)`.
pub fn relative_entropy_ng(rho: &DensityMatrix, reference: &GaussianRef) -> Result<f64> {
    Ok(reference.entropy() - von_neumann_entropy(rho)?)
}

/// `sum_n (rho_nn - tau_nn)^2` over real diagonals.
pub fn photon_distance(rho: &DensityMatrix, tau: &FockMatrix) -> Result<f64> {
    check_dims(rho, tau)?;
    Ok((0..rho.n_max()).map(|n| (rho.get(n, n).re - tau[(n, n)].re).powi(2)).sum())
}

/// Every quantity derived from one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsRecord {
    pub delta_hs: f64,
    pub s_entropy: f64,
    pub q_photon: f64,
    pub purity_rho: f64,
    /// Analytic `1/(2 nbar + 1)`.
    pub purity_tau: f64,
    /// `sum |tau_mn|^2` over the retained levels.
    pub purity_tau_fock: f64,
    pub overlap: f64,
    pub mean_photon: f64,
    pub entropy_rho: f64,
    pub moments: MomentData,
    pub reference: GaussianRef,
    /// `1 - Tr tau` before renormalization.
    pub tau_trace_deficit: f64,
}

impl MetricsRecord {
    /// Analytic minus Fock-sum reference purity.
    pub fn purity_tau_gap(&self) -> f64 {
        self.purity_tau - self.purity_tau_fock
    }
}

/// Moments, Gaussian fit, reference matrix and the three metrics of `rho`.
///
/// `delta` and `Q` are evaluated against the exact matrix elements of
/// `tau` on the retained levels rather than the trace-renormalized block:
/// `rho` itself has no weight outside the basis, so the overlap sums are
/// complete, while renormalizing `tau` would shift every metric by its
/// truncated tail.
pub fn analyze(rho: &DensityMatrix) -> Result<MetricsRecord> {
    let moments = gaussian::moments(rho);
    let reference = gaussian::fit_gaussian(&moments)?;
    let built = gaussian::reference_state_matrix(&reference, rho.n_max());
    let tau = &built.tau_exact;
    let purity_rho = purity(rho);
    let purity_tau = reference.purity();
    let ov = overlap(rho, tau)?;
    let entropy_rho = von_neumann_entropy(rho)?;
    Ok(MetricsRecord {
        delta_hs: (purity_rho + purity_tau - 2.0 * ov) / (2.0 * purity_rho),
        s_entropy: reference.entropy() - entropy_rho,
        q_photon: photon_distance(rho, tau)?,
        purity_rho,
        purity_tau,
        purity_tau_fock: frobenius_sq(tau),
        overlap: ov,
        mean_photon: moments.mean_photon,
        entropy_rho,
        moments,
        reference,
        tau_trace_deficit: built.trace_deficit,
    })
}
