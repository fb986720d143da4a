//! Mean-field limit of the oscillator.
//!
//! The coherent amplitude `A` obeys
//! `dA/dt = (h/4) A* - (g + beta |A|^2) A / 2 + F`.
//! For real `F` the real axis is invariant, and fixed points on it are the
//! roots of the cubic `(beta/2) x^3 + (g/2 - h/4) x - F = 0`.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::model::ModelParams;
use crate::{Error, Result};

/// Real parts within this distance of zero are reported as marginal.
pub const MARGINAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Saddle,
    Unstable,
    /// A Jacobian eigenvalue has real part within [`MARGINAL_TOL`] of zero.
    Marginal,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Saddle => "saddle",
            Stability::Unstable => "unstable",
            Stability::Marginal => "unstable (marginal)",
        }
    }

    pub fn from_eigenvalues(eigs: [C64; 2]) -> Self {
        if eigs.iter().any(|e| e.re.abs() <= MARGINAL_TOL) {
            return Stability::Marginal;
        }
        match eigs.iter().filter(|e| e.re > 0.0).count() {
            0 => Stability::Stable,
            1 => Stability::Saddle,
            _ => Stability::Unstable,
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalFixedPoint {
    pub amplitude: C64,
    pub stability: Stability,
    pub jacobian_eigs: [C64; 2],
}

impl ClassicalFixedPoint {
    fn classify(amplitude: C64, params: &ModelParams) -> Self {
        let jacobian_eigs = jacobian_eigenvalues(amplitude, params);
        Self { amplitude, stability: Stability::from_eigenvalues(jacobian_eigs), jacobian_eigs }
    }
}

/// Right-hand side of the mean-field flow.
pub fn meanfield_rhs(amplitude: C64, params: &ModelParams) -> C64 {
    let damping = 0.5 * (params.g() + params.beta() * amplitude.norm_sqr());
    amplitude.conj() * (params.h() / 4.0) - amplitude * damping + C64::new(params.field(), 0.0)
}

/// Jacobian of the flow written in real coordinates `(Re A, Im A)`.
pub fn jacobian(amplitude: C64, params: &ModelParams) -> [[f64; 2]; 2] {
    let (x, y) = (amplitude.re, amplitude.im);
    let (h, g, b) = (params.h(), params.g(), params.beta());
    let r2 = x * x + y * y;
    [
        [h / 4.0 - 0.5 * (g + b * r2) - b * x * x, -b * x * y],
        [-b * x * y, -h / 4.0 - 0.5 * (g + b * r2) - b * y * y],
    ]
}

pub fn jacobian_eigenvalues(amplitude: C64, params: &ModelParams) -> [C64; 2] {
    let j = jacobian(amplitude, params);
    let half_trace = 0.5 * (j[0][0] + j[1][1]);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = C64::new(half_trace * half_trace - det, 0.0).sqrt();
    let mut eigs = [C64::new(half_trace, 0.0) + disc, C64::new(half_trace, 0.0) - disc];
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re));
    eigs
}

fn cubic(x: f64, params: &ModelParams) -> f64 {
    0.5 * params.beta() * x * x * x + (0.5 * params.g() - 0.25 * params.h()) * x - params.field()
}

fn cubic_slope(x: f64, params: &ModelParams) -> f64 {
    1.5 * params.beta() * x * x + 0.5 * params.g() - 0.25 * params.h()
}

/// Fixed points of the flow, sorted by real part.
///
/// At `F = 0` the closed-form set is returned. Otherwise the real-axis cubic
/// is bracketed between its critical points and each root is refined by
/// bisection followed by Newton polishing.
pub fn fixed_points(params: &ModelParams) -> Result<Vec<ClassicalFixedPoint>> {
    let roots = if params.field() == 0.0 {
        let mut r = vec![0.0];
        let a = params.classical_amplitude();
        if a > 0.0 {
            r.insert(0, -a);
            r.push(a);
        }
        r
    } else {
        real_axis_roots(params)?
    };
    Ok(roots
        .into_iter()
        .map(|x| ClassicalFixedPoint::classify(C64::new(x, 0.0), params))
        .collect())
}

fn real_axis_roots(params: &ModelParams) -> Result<Vec<f64>> {
    let (b, f) = (params.beta(), params.field());
    let linear = 0.5 * params.g() - 0.25 * params.h();
    // |x| bound from the cubic: |x|^3 beta/2 <= |linear| |x| + |F|
    let bound = 1.0 + (2.0 * (linear.abs() + f.abs()) / b).sqrt() + (2.0 * f.abs() / b).cbrt();
    let mut knots = vec![-bound];
    if linear < 0.0 {
        let xc = (-linear / (1.5 * b)).sqrt();
        knots.extend([-xc, xc]);
    }
    knots.push(bound);

    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (cubic(lo, params), cubic(hi, params));
        if flo == 0.0 {
            push_unique(&mut roots, lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        push_unique(&mut roots, bisect_newton(lo, hi, params)?);
    }
    if let Some(&last) = knots.last() {
        if cubic(last, params) == 0.0 {
            push_unique(&mut roots, last);
        }
    }
    if roots.is_empty() {
        return Err(Error::RootFindingFailed(format!(
            "no real root bracketed for h = {}, F = {f}",
            params.h()
        )));
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn push_unique(roots: &mut Vec<f64>, x: f64) {
    if !roots.iter().any(|r| (r - x).abs() <= 1e-12 * (1.0 + x.abs())) {
        roots.push(x);
    }
}

fn bisect_newton(mut lo: f64, mut hi: f64, params: &ModelParams) -> Result<f64> {
    let rising = cubic(hi, params) > cubic(lo, params);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (cubic(mid, params) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..5 {
        let slope = cubic_slope(x, params);
        if slope == 0.0 {
            break;
        }
        let next = x - cubic(x, params) / slope;
        if !next.is_finite() || next < lo - 1e-9 || next > hi + 1e-9 {
            break;
        }
        x = next;
    }
    if !x.is_finite() {
        return Err(Error::RootFindingFailed(format!("bracket [{lo}, {hi}] collapsed")));
    }
    Ok(x)
}

/// Field at which the two outer fixed points of one sign merge.
///
/// Returns `None` below threshold, where a single fixed point exists for
/// every `F`.
pub fn saddle_node_field(params: &ModelParams) -> Option<f64> {
    let excess = 0.25 * params.h() - 0.5 * params.g();
    if excess <= 0.0 {
        return None;
    }
    let xc = (excess / (1.5 * params.beta())).sqrt();
    Some(2.0 / 3.0 * excess * xc)
}

/// Two-dimensional Newton search from `start`, independent of the
/// real-axis reduction.
pub fn newton_fixed_point(start: C64, params: &ModelParams) -> Result<ClassicalFixedPoint> {
    let mut a = start;
    for _ in 0..100 {
        let f = meanfield_rhs(a, params);
        if f.norm() <= 1e-14 {
            break;
        }
        let j = jacobian(a, params);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::RootFindingFailed(format!("singular Jacobian at {a}")));
        }
        let dx = (j[1][1] * f.re - j[0][1] * f.im) / det;
        let dy = (-j[1][0] * f.re + j[0][0] * f.im) / det;
        a -= C64::new(dx, dy);
    }
    if meanfield_rhs(a, params).norm() > 1e-10 {
        return Err(Error::RootFindingFailed(format!("Newton did not converge from {start}")));
    }
    Ok(ClassicalFixedPoint::classify(a, params))
}

/// RK4 trajectory `(t, A)` of the mean-field flow, including `t = 0`.
pub fn integrate_meanfield(
    start: C64,
    params: &ModelParams,
    t_final: f64,
    dt: f64,
) -> Result<Vec<(f64, C64)>> {
    if !(t_final > 0.0) || !(dt > 0.0) || !t_final.is_finite() || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t_final and dt must be positive (t_final = {t_final}, dt = {dt})"
        )));
    }
    let steps = (t_final / dt).ceil() as usize;
    let step = t_final / steps as f64;
    let mut a = start;
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, a));
    for i in 0..steps {
        let k1 = meanfield_rhs(a, params);
        let k2 = meanfield_rhs(a + k1 * (0.5 * step), params);
        let k3 = meanfield_rhs(a + k2 * (0.5 * step), params);
        let k4 = meanfield_rhs(a + k3 * step, params);
        a += (k1 + (k2 + k3) * 2.0 + k4) * (step / 6.0);
        let t = (i + 1) as f64 * step;
        if !(a.norm() <= 1e6) {
            return Err(Error::UnstableStep { time: t, magnitude: a.norm() });
        }
        out.push((t, a));
    }
    Ok(out)
}
