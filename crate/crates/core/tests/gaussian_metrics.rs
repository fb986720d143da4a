use std::f64::consts::PI;

use opo_core::gaussian::{fit_gaussian, moments, moments_of_matrix, reference_state_matrix, thermal_entropy};
use opo_core::metrics::analyze;
use opo_core::{DensityMatrix, GaussianRef, C64};
use proptest::prelude::*;

/// `(|a><a| + |-a><-a|)/2` for real `a`.
fn cat_mixture(a: f64, n_max: usize) -> DensityMatrix {
    let mut c = vec![(-a * a / 2.0).exp()];
    for n in 1..n_max {
        c.push(c[n - 1] * a / (n as f64).sqrt());
    }
    let m = faer::Mat::from_fn(n_max, n_max, |i, j| {
        C64::new(if (i + j) % 2 == 0 { c[i] * c[j] } else { 0.0 }, 0.0)
    });
    DensityMatrix::new(m).unwrap()
}

#[test]
fn cat_mixture_reference_and_metrics() {
    let a: f64 = 2.0;
    let rho = cat_mixture(a, 40);
    let m = moments(&rho);
    // <a> = 0, <a^2> = a^2, <n> = a^2
    assert!(m.mean_x.abs() < 1e-14 && m.mean_p.abs() < 1e-14);
    assert!((m.sigma[0][0] - 8.5).abs() < 1e-12);
    assert!((m.sigma[1][1] - 0.5).abs() < 1e-12);
    assert!(m.sigma[0][1].abs() < 1e-14);

    let rec = analyze(&rho).unwrap();
    let nbar = 4.25f64.sqrt() - 0.5;
    assert!((rec.reference.nbar - nbar).abs() < 1e-12);
    assert!((rec.reference.xi_r - 17f64.ln() / 4.0).abs() < 1e-12);
    assert!((rec.reference.xi_phi.abs() - PI).abs() < 1e-12);

    // <a|tau|a> from the Husimi function of a Gaussian with covariance
    // diag(8.5, 0.5): exp(-v^T (S + 1/2)^-1 v / 2) / sqrt(det(S + 1/2)),
    // v = (2 sqrt 2, 0)
    let husimi = (-4.0f64 / 9.0).exp() / 3.0;
    let purity = 0.5 * (1.0 + (-4.0 * a * a).exp());
    let delta = (purity + 1.0 / 17f64.sqrt() - 2.0 * husimi) / (2.0 * purity);
    assert!((rec.delta_hs - delta).abs() < 1e-10, "{} vs {delta}", rec.delta_hs);
    assert!((rec.purity_rho - purity).abs() < 1e-12);

    let overlap = (-2.0 * a * a).exp();
    let lam = [(1.0 + overlap) / 2.0, (1.0 - overlap) / 2.0];
    let s_rho: f64 = lam.iter().map(|l| -l * l.ln()).sum();
    assert!((rec.s_entropy - (thermal_entropy(nbar) - s_rho)).abs() < 1e-10);
    assert!(rec.q_photon > 1e-3);
}

#[test]
fn round_trip_fails_outside_the_basis() {
    // at n_max = 40 a strongly squeezed thermal state leaks out of the basis,
    // which biases the refit
    let g = GaussianRef::new(C64::new(0.0, 0.0), 1.2, 0.0, 5.0).unwrap();
    let tau = reference_state_matrix(&g, 40).tau;
    let back = fit_gaussian(&moments_of_matrix(&tau)).unwrap();
    assert!((back.nbar - 5.0).abs() > 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_in_the_well_resolved_box(
        nbar in 0.0f64..0.2,
        r in 0.0f64..0.3,
        phi in -3.1f64..3.1,
        amp in 0.0f64..2.0,
        arg in -3.1f64..3.1,
    ) {
        let g = GaussianRef::new(C64::from_polar(amp, arg), r, phi, nbar).unwrap();
        let tau = reference_state_matrix(&g, 40).tau;
        let back = fit_gaussian(&moments_of_matrix(&tau)).unwrap();
        prop_assert!((back.alpha - g.alpha).norm() < 1e-6);
        prop_assert!((back.xi_r - r).abs() < 1e-6);
        prop_assert!((back.nbar - nbar).abs() < 1e-6);
        if r > 1e-3 {
            let dphi = (back.xi_phi - phi + PI).rem_euclid(2.0 * PI) - PI;
            prop_assert!(dphi.abs() < 1e-4);
        }
    }

    #[test]
    fn injected_gaussian_has_zero_metrics(
        nbar in 0.0f64..0.2,
        r in 0.0f64..0.3,
        phi in -3.1f64..3.1,
        amp in 0.0f64..1.5,
    ) {
        let g = GaussianRef::new(C64::from_polar(amp, 0.3), r, phi, nbar).unwrap();
        let rho = DensityMatrix::new(reference_state_matrix(&g, 40).tau).unwrap();
        let rec = analyze(&rho).unwrap();
        prop_assert!(rec.delta_hs.abs() < 1e-8);
        prop_assert!(rec.q_photon < 1e-8);
        prop_assert!(rec.s_entropy.abs() < 1e-8);
    }
}
