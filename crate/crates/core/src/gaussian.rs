//! Quadrature moments and the Gaussian reference state.
//!
//! Quadratures are `X = (a + a^dag)/sqrt 2` and `P = (a - a^dag)/(i sqrt 2)`,
//! so the vacuum covariance is `diag(1/2, 1/2)`. The reference state is the
//! displaced squeezed thermal state `D(alpha) S(xi) tau_th S(xi)^dag D(alpha)^dag`
//! with the same first and second moments as the input.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::model::{displacement_matrix, squeezing_block, FockMatrix};
use crate::steady::DensityMatrix;
use crate::{Error, Result};

/// Slack on the uncertainty bound `det Sigma >= 1/4`.
pub const UNCERTAINTY_SLACK: f64 = 1e-9;

/// First and second quadrature moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentData {
    pub mean_x: f64,
    pub mean_p: f64,
    /// Symmetric covariance `[[s11, s12], [s12, s22]]`.
    pub sigma: [[f64; 2]; 2],
    /// Symplectic eigenvalue `sqrt(det Sigma)`.
    pub nu: f64,
    /// `<a^dag a>`.
    pub mean_photon: f64,
}

impl MomentData {
    pub fn from_parts(mean_x: f64, mean_p: f64, s11: f64, s22: f64, s12: f64) -> Self {
        let det = s11 * s22 - s12 * s12;
        let mean_photon = 0.5 * (s11 + s22 + mean_x * mean_x + mean_p * mean_p) - 0.5;
        Self {
            mean_x,
            mean_p,
            sigma: [[s11, s12], [s12, s22]],
            nu: det.max(0.0).sqrt(),
            mean_photon,
        }
    }

    pub fn det(&self) -> f64 {
        self.sigma[0][0] * self.sigma[1][1] - self.sigma[0][1] * self.sigma[1][0]
    }
}

/// Expectation values `(<a>, <a^2>, <a^dag a>)` in the truncated basis.
pub fn ladder_expectations(rho: &FockMatrix) -> (C64, C64, f64) {
    let n = rho.nrows();
    let mut a1 = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    let mut num = 0.0;
    for k in 0..n {
        num += k as f64 * rho[(k, k)].re;
        if k + 1 < n {
            a1 += rho[(k + 1, k)] * ((k + 1) as f64).sqrt();
        }
        if k + 2 < n {
            a2 += rho[(k + 2, k)] * (((k + 1) * (k + 2)) as f64).sqrt();
        }
    }
    (a1, a2, num)
}

/// Quadrature means and covariance of `rho`.
///
/// Second moments use `<X^2> = Re<a^2> + <a^dag a> + 1/2` and its analogues,
/// i.e. the canonical commutator rather than the truncated `[a, a^dag]`,
/// whose last diagonal entry is `1 - n_max`.
pub fn moments(rho: &DensityMatrix) -> MomentData {
    moments_of_matrix(rho.matrix())
}

/// [`moments`] for a raw matrix assumed to have unit trace.
pub fn moments_of_matrix(rho: &FockMatrix) -> MomentData {
    let (a1, a2, num) = ladder_expectations(rho);
    let mean_x = 2f64.sqrt() * a1.re;
    let mean_p = 2f64.sqrt() * a1.im;
    let x2 = a2.re + num + 0.5;
    let p2 = -a2.re + num + 0.5;
    let xp = a2.im;
    let s11 = x2 - mean_x * mean_x;
    let s22 = p2 - mean_p * mean_p;
    let s12 = xp - mean_x * mean_p;
    let mut m = MomentData::from_parts(mean_x, mean_p, s11, s22, s12);
    m.mean_photon = num;
    m
}

/// Covariance `(2 nbar + 1) R(phi/2) diag(e^{-2r}, e^{2r}) R(phi/2)^T / 2`
/// of a squeezed thermal state. The squeezed axis points along
/// `(cos(phi/2), sin(phi/2))`.
pub fn squeezed_thermal_covariance(nbar: f64, r: f64, phi: f64) -> [[f64; 2]; 2] {
    let scale = nbar + 0.5;
    let (s, c) = (0.5 * phi).sin_cos();
    let small = (-2.0 * r).exp();
    let large = (2.0 * r).exp();
    [
        [scale * (small * c * c + large * s * s), scale * (small - large) * c * s],
        [scale * (small - large) * c * s, scale * (small * s * s + large * c * c)],
    ]
}

/// Displaced squeezed thermal state parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianRef {
    pub alpha: C64,
    /// Squeezing magnitude, `r >= 0`.
    pub xi_r: f64,
    /// Squeezing phase in `(-pi, pi]`.
    pub xi_phi: f64,
    pub nbar: f64,
}

impl GaussianRef {
    pub fn new(alpha: C64, xi_r: f64, xi_phi: f64, nbar: f64) -> Result<Self> {
        for (name, v) in [("xi_r", xi_r), ("xi_phi", xi_phi), ("nbar", nbar), ("alpha", alpha.norm())] {
            if !v.is_finite() {
                return Err(Error::NonFinite { name, value: v });
            }
        }
        if xi_r < 0.0 {
            return Err(Error::InvalidArgument(format!("squeezing magnitude {xi_r} < 0")));
        }
        if nbar < -1e-12 {
            return Err(Error::InvalidArgument(format!("thermal occupation {nbar} < 0")));
        }
        Ok(Self { alpha, xi_r, xi_phi: wrap_phase(xi_phi), nbar: nbar.max(0.0) })
    }

    /// Complex squeezing parameter `r e^{i phi}`.
    pub fn xi(&self) -> C64 {
        C64::from_polar(self.xi_r, self.xi_phi)
    }

    pub fn covariance(&self) -> [[f64; 2]; 2] {
        squeezed_thermal_covariance(self.nbar, self.xi_r, self.xi_phi)
    }

    /// `Tr tau^2 = 1 / (2 nbar + 1)`.
    pub fn purity(&self) -> f64 {
        1.0 / (2.0 * self.nbar + 1.0)
    }

    /// `S(tau) = (nbar + 1) ln(nbar + 1) - nbar ln nbar`.
    pub fn entropy(&self) -> f64 {
        thermal_entropy(self.nbar)
    }
}

pub fn thermal_entropy(nbar: f64) -> f64 {
    if nbar <= 0.0 {
        0.0
    } else {
        (nbar + 1.0) * (nbar + 1.0).ln() - nbar * nbar.ln()
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Gaussian state with the given moments.
///
/// With `s1 >= s2` the covariance eigenvalues, `nbar = sqrt(det) - 1/2` and
/// `r = ln(s1/s2) / 4`. The phase is twice the angle of the low-variance
/// eigenvector, so a diagonal covariance with `s11 > s22` gives `phi = pi`
/// (a negative real `xi`). Equal eigenvalues give `r = phi = 0`.
pub fn fit_gaussian(m: &MomentData) -> Result<GaussianRef> {
    let det = m.det();
    if !(det >= 0.25 - UNCERTAINTY_SLACK) {
        return Err(Error::UnphysicalCovariance { det });
    }
    let (s11, s22, s12) = (m.sigma[0][0], m.sigma[1][1], m.sigma[0][1]);
    let half_diff = 0.5 * (s11 - s22);
    let radius = half_diff.hypot(s12);
    let mean = 0.5 * (s11 + s22);
    let (r, phi) = if radius == 0.0 {
        (0.0, 0.0)
    } else {
        let (s1, s2) = (mean + radius, mean - radius);
        // major axis at atan2(2 s12, s11 - s22) / 2, minor axis a quarter turn later
        (0.25 * (s1 / s2).ln(), wrap_phase(s12.atan2(half_diff) + PI))
    };
    let alpha = C64::new(m.mean_x, m.mean_p) / 2f64.sqrt();
    GaussianRef::new(alpha, r, phi, det.max(0.25).sqrt() - 0.5)
}

/// Thermal occupations `f_n = nbar^n / (nbar + 1)^{n+1}` for `n < n_max`
/// and the missing mass `1 - sum f_n`.
pub fn thermal_weights(nbar: f64, n_max: usize) -> (Vec<f64>, f64) {
    let nbar = nbar.max(0.0);
    let ratio = nbar / (nbar + 1.0);
    let mut f = Vec::with_capacity(n_max);
    let mut w = 1.0 / (nbar + 1.0);
    for _ in 0..n_max {
        f.push(w);
        w *= ratio;
    }
    (f, ratio.powi(n_max as i32))
}

/// Fock matrix of the reference state, with diagnostics.
#[derive(Clone, Debug)]
pub struct ReferenceMatrix {
    /// Hermitized, trace-normalized `tau`.
    pub tau: FockMatrix,
    /// Hermitized exact matrix elements `tau_mn`, `m, n < n_max`, before
    /// normalization.
    pub tau_exact: FockMatrix,
    /// `1 - Tr tau` before normalization.
    pub trace_deficit: f64,
    /// Basis size of the undisplaced state used in the displacement product.
    pub displacement_dim: usize,
    /// Number of thermal levels summed.
    pub thermal_levels: usize,
}

/// Levels needed before `f_n` drops below `1e-20`.
fn thermal_levels(nbar: f64) -> usize {
    if nbar <= 0.0 {
        return 1;
    }
    let ratio = nbar / (nbar + 1.0);
    ((1e-20f64).ln() / ratio.ln()).ceil().min(1e5) as usize + 1
}

/// Levels `c` for which `<m|D(alpha)|c>` is negligible for all `m < n_max`.
fn displacement_levels(alpha: C64, n_max: usize) -> usize {
    if alpha == C64::new(0.0, 0.0) {
        return n_max;
    }
    ((n_max as f64).sqrt() + alpha.norm() + 7.0).powi(2).ceil() as usize
}

/// `tau = D(alpha) S(xi) diag(f) S(xi)^dag D(alpha)^dag` on `n_max` levels.
///
/// The intermediate sums over Fock states run over as many levels as the
/// thermal weights and the displacement need, so the retained block holds
/// the exact matrix elements of `tau`; only the final trace renormalization
/// reflects the truncation.
pub fn reference_state_matrix(reference: &GaussianRef, n_max: usize) -> ReferenceMatrix {
    let inner = displacement_levels(reference.alpha, n_max);
    let levels = inner + thermal_levels(reference.nbar);
    let (f, _) = thermal_weights(reference.nbar, levels);
    let s = squeezing_block(reference.xi_r, reference.xi_phi, inner, levels);
    let sf = Mat::from_fn(inner, levels, |i, j| s[(i, j)] * f[j]);
    let core = &sf * s.adjoint();
    let tau = if reference.alpha == C64::new(0.0, 0.0) {
        core
    } else {
        let d = displacement_matrix(reference.alpha, inner);
        let rows = Mat::from_fn(n_max, inner, |i, j| d[(i, j)]);
        &rows * &core * rows.adjoint()
    };
    let block = Mat::from_fn(n_max, n_max, |i, j| 0.5 * (tau[(i, j)] + tau[(j, i)].conj()));
    let trace: f64 = (0..n_max).map(|i| block[(i, i)].re).sum();
    let scale = 1.0 / trace;
    ReferenceMatrix {
        tau: Mat::from_fn(n_max, n_max, |i, j| block[(i, j)] * scale),
        tau_exact: block,
        trace_deficit: 1.0 - trace,
        displacement_dim: inner,
        thermal_levels: levels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn vacuum_moments() {
        let m = moments(&DensityMatrix::vacuum(6));
        assert_eq!((m.mean_x, m.mean_p), (0.0, 0.0));
        assert_eq!(m.sigma, [[0.5, 0.0], [0.0, 0.5]]);
        assert_eq!(m.nu, 0.5);
    }

    #[test]
    fn thermal_moments() {
        let (f, _) = thermal_weights(1.0, 80);
        let m = moments(&DensityMatrix::from_populations(&f));
        assert!(close(m.sigma[0][0], 1.5, 1e-10));
        assert!(close(m.sigma[1][1], 1.5, 1e-10));
        assert_eq!(m.sigma[0][1], 0.0);
    }

    #[test]
    fn thermal_weight_examples() {
        let (f, tail) = thermal_weights(0.0, 5);
        assert_eq!(f, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(tail, 0.0);
        let (f, tail) = thermal_weights(1.0, 10);
        assert_eq!(&f[..3], &[0.5, 0.25, 0.125]);
        assert!(close(f.iter().sum::<f64>() + tail, 1.0, 1e-15));
        assert!(close(tail, 0.5f64.powi(10), 1e-18));
    }

    #[test]
    fn fit_examples() {
        let vac = fit_gaussian(&MomentData::from_parts(0.0, 0.0, 0.5, 0.5, 0.0)).unwrap();
        assert_eq!((vac.alpha, vac.xi_r, vac.xi_phi, vac.nbar), (C64::new(0.0, 0.0), 0.0, 0.0, 0.0));

        let r0: f64 = 0.7;
        let sq = fit_gaussian(&MomentData::from_parts(
            0.0,
            0.0,
            (2.0 * r0).exp() / 2.0,
            (-2.0 * r0).exp() / 2.0,
            0.0,
        ))
        .unwrap();
        assert!(close(sq.nbar, 0.0, 1e-12));
        assert!(close(sq.xi().re, -r0, 1e-12));
        assert!(close(sq.xi().im, 0.0, 1e-12));

        let th = fit_gaussian(&MomentData::from_parts(0.0, 0.0, 1.5, 1.5, 0.0)).unwrap();
        assert!(close(th.nbar, 1.0, 1e-15));
        assert_eq!(th.xi_r, 0.0);

        assert!(matches!(
            fit_gaussian(&MomentData::from_parts(0.0, 0.0, 0.4, 0.4, 0.0)),
            Err(Error::UnphysicalCovariance { .. })
        ));
    }

    #[test]
    fn reference_matrix_examples() {
        let th = GaussianRef::new(C64::new(0.0, 0.0), 0.0, 0.0, 1.0).unwrap();
        let out = reference_state_matrix(&th, 30);
        let (f, tail) = thermal_weights(1.0, 30);
        assert!(close(out.trace_deficit, tail, 1e-15));
        for i in 0..30 {
            for j in 0..30 {
                let expect = if i == j { f[i] / (1.0 - tail) } else { 0.0 };
                assert!((out.tau[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }

        let sq = GaussianRef::new(C64::new(0.0, 0.0), 0.6, PI, 0.3).unwrap();
        let tau = reference_state_matrix(&sq, 80).tau;
        for i in 0..80 {
            for j in 0..80 {
                assert!(tau[(i, j)].im.abs() < 1e-14);
                assert!((tau[(i, j)] - tau[(j, i)]).norm() < 1e-14);
            }
        }
        let purity: f64 = tau.col_iter().flat_map(|c| c.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()).sum();
        assert!(close(purity, sq.purity(), 1e-10));
    }

    #[test]
    fn covariance_orientation() {
        // phi = 0 squeezes X
        let s = squeezed_thermal_covariance(0.0, 0.5, 0.0);
        assert!(close(s[0][0], (-1.0f64).exp() / 2.0, 1e-15));
        assert!(close(s[1][1], 1.0f64.exp() / 2.0, 1e-15));
        let tau = reference_state_matrix(&GaussianRef::new(C64::new(0.0, 0.0), 0.5, 0.0, 0.0).unwrap(), 40).tau;
        let m = moments_of_matrix(&tau);
        assert!(close(m.sigma[0][0], s[0][0], 1e-10));
        assert!(close(m.sigma[1][1], s[1][1], 1e-10));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fit_inverts_covariance(nbar in 0.0f64..5.0, r in 0.0f64..1.2, phi in -3.1f64..3.1, x in -4.0f64..4.0, p in -4.0f64..4.0) {
            let s = squeezed_thermal_covariance(nbar, r, phi);
            let m = MomentData::from_parts(x, p, s[0][0], s[1][1], s[0][1]);
            let fit = fit_gaussian(&m).unwrap();
            let back = fit.covariance();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((back[i][j] - s[i][j]).abs() <= 1e-9 * (1.0 + s[i][j].abs()));
                }
            }
            prop_assert!((fit.nbar - nbar).abs() < 1e-9);
            prop_assert!((fit.xi_r - r).abs() < 1e-9);
            prop_assert!((fit.alpha - C64::new(x, p) / 2f64.sqrt()).norm() < 1e-15);
        }

        #[test]
        fn reference_state_is_physical(nbar in 0.0f64..2.0, r in 0.0f64..0.8, phi in -3.1f64..3.1, re in -1.5f64..1.5, im in -1.5f64..1.5) {
            let g = GaussianRef::new(C64::new(re, im), r, phi, nbar).unwrap();
            let out = reference_state_matrix(&g, 30);
            let rho = DensityMatrix::from_matrix_unchecked(out.tau);
            prop_assert!(rho.hermiticity_residual() <= 1e-10);
            prop_assert!((rho.trace().re - 1.0).abs() <= 1e-10);
            prop_assert!(rho.eigenvalues().unwrap()[0] >= -1e-9);
        }
    }
}
