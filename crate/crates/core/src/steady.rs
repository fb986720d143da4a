//! Steady state of the Liouvillian and its validation.
//!
//! The steady state is the eigenvector of the vectorized Liouvillian with
//! eigenvalue zero. Three routes are available:
//!
//! - full dense eigendecomposition (robust oracle, `O(dim^3)`)
//! - inverse iteration at shift zero on a banded LU factorization
//! - long-time RK4 propagation from the vacuum
//!
//! Every eigenvector of a trace-preserving generator whose eigenvalue is
//! nonzero is traceless, so the physical null vector is the candidate with
//! nonzero trace.

use std::fmt;
use std::str::FromStr;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::banded::BandLu;
use crate::liouvillian::{devectorize, vectorize, LiouvillianMatrix};
use crate::model::FockMatrix;
use crate::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Eigenvalues closer than this to zero count toward the uniqueness check.
pub const NEAR_ZERO_WINDOW: f64 = 1e-8;

/// Minimum `|trace| / ||v||` for a null vector to be a steady-state candidate.
const CANDIDATE_TRACE_MIN: f64 = 1e-6;

/// Largest `n_max` for which [`SolverMethod::Auto`] uses the dense route.
pub const DENSE_AUTO_LIMIT: usize = 20;

/// Density matrix in the Fock basis.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: FockMatrix,
}

/// Numbers behind the density-matrix invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateReport {
    pub hermiticity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateReport {
    pub fn is_valid(&self) -> bool {
        self.hermiticity <= HERMITICITY_TOL
            && self.trace_error <= TRACE_TOL
            && self.min_eigenvalue >= -PSD_TOL
    }
}

impl DensityMatrix {
    /// Wraps `matrix` after checking Hermiticity, unit trace and positivity.
    pub fn new(matrix: FockMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let rho = Self { matrix };
        let report = rho.report();
        if !report.is_valid() {
            return Err(Error::InvalidState(format!(
                "hermiticity {:e}, trace error {:e}, min eigenvalue {:e}",
                report.hermiticity, report.trace_error, report.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    /// Wraps without validation.
    pub fn from_matrix_unchecked(matrix: FockMatrix) -> Self {
        Self { matrix }
    }

    /// Hermitizes `matrix` and divides by its trace.
    pub fn normalized(matrix: &FockMatrix) -> Result<(Self, C64)> {
        let herm = hermitize(matrix);
        let trace = trace(&herm);
        if trace.norm() == 0.0 || !trace.re.is_finite() {
            return Err(Error::InvalidState("trace is zero".into()));
        }
        let scale = C64::new(1.0 / trace.re, 0.0);
        Ok((Self { matrix: Mat::from_fn(herm.nrows(), herm.ncols(), |i, j| herm[(i, j)] * scale) }, trace))
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::fock(0, n_max)
    }

    /// Projector onto `|k><k|`.
    pub fn fock(k: usize, n_max: usize) -> Self {
        assert!(k < n_max);
        let mut m = Mat::<C64>::zeros(n_max, n_max);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// Diagonal state with the given populations (not renormalized).
    pub fn from_populations(p: &[f64]) -> Self {
        let n = p.len();
        Self {
            matrix: Mat::from_fn(n, n, |i, j| if i == j { C64::new(p[i], 0.0) } else { C64::new(0.0, 0.0) }),
        }
    }

    pub fn n_max(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &FockMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> FockMatrix {
        self.matrix
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.matrix[(m, n)]
    }

    pub fn trace(&self) -> C64 {
        trace(&self.matrix)
    }

    /// `max |rho - rho^dag|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.n_max();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitize(&self.matrix)
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
    }

    pub fn report(&self) -> StateReport {
        let min_eigenvalue = self
            .eigenvalues()
            .ok()
            .and_then(|v| v.first().copied())
            .unwrap_or(f64::NAN);
        StateReport {
            hermiticity: self.hermiticity_residual(),
            trace_error: (self.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue,
        }
    }

    /// Largest `|Im rho_mn|`.
    pub fn max_imag(&self) -> f64 {
        let n = self.n_max();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(self.matrix[(i, j)].im.abs());
            }
        }
        worst
    }

    /// Largest `|rho_mn|` over elements with `m + n` odd.
    pub fn max_odd_parity(&self) -> f64 {
        let n = self.n_max();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if (i + j) % 2 == 1 {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Max-norm distance to another state of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if other.n_max() != self.n_max() {
            return Err(Error::DimensionMismatch { expected: self.n_max(), found: other.n_max() });
        }
        let n = self.n_max();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - other.matrix[(i, j)]).norm());
            }
        }
        Ok(worst)
    }
}

fn trace(m: &FockMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

fn hermitize(m: &FockMatrix) -> FockMatrix {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Largest `|rho_mn|` with `m` or `n` in the outer `band` Fock levels.
pub fn tail_mass(rho: &DensityMatrix, band: usize) -> Result<f64> {
    let n = rho.n_max();
    if band == 0 || band >= n {
        return Err(Error::IndexOutOfRange { row: band, col: band, n_max: n });
    }
    let edge = n - band;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i >= edge || j >= edge {
                worst = worst.max(rho.get(i, j).norm());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SolverMethod {
    /// Dense eigendecomposition up to [`DENSE_AUTO_LIMIT`], shift-invert above.
    #[default]
    Auto,
    DenseEigen,
    ShiftInvert,
    TimeEvolution,
}

impl SolverMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverMethod::Auto => "auto",
            SolverMethod::DenseEigen => "dense-eigendecomposition",
            SolverMethod::ShiftInvert => "shift-invert-iteration",
            SolverMethod::TimeEvolution => "time-evolution",
        }
    }

    /// Concrete method used for a given truncation.
    pub fn resolve(self, n_max: usize) -> SolverMethod {
        match self {
            SolverMethod::Auto if n_max <= DENSE_AUTO_LIMIT => SolverMethod::DenseEigen,
            SolverMethod::Auto => SolverMethod::ShiftInvert,
            other => other,
        }
    }
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverMethod::Auto),
            "dense-eigendecomposition" => Ok(SolverMethod::DenseEigen),
            "shift-invert-iteration" => Ok(SolverMethod::ShiftInvert),
            "time-evolution" => Ok(SolverMethod::TimeEvolution),
            other => Err(Error::InvalidArgument(format!("unknown solver method `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Bound on `||L vec(rho)||_inf` and on `|lambda|` of the null eigenvalue.
    pub eigen_tol: f64,
    /// Truncation threshold for [`tail_mass`].
    pub tail_eps: f64,
    /// Number of outer Fock rows/columns inspected by [`tail_mass`].
    pub tail_band: usize,
    /// Propagation horizon for [`SolverMethod::TimeEvolution`].
    pub max_time: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::Auto,
            eigen_tol: 1e-10,
            tail_eps: 1e-10,
            tail_band: 4,
            max_time: 1e4,
        }
    }
}

impl SolverOptions {
    pub fn with_method(self, method: SolverMethod) -> Self {
        Self { method, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eigen_tol", self.eigen_tol), ("tail_eps", self.tail_eps), ("max_time", self.max_time)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.tail_band == 0 {
            return Err(Error::InvalidArgument("tail_band must be at least 1".into()));
        }
        Ok(())
    }
}

/// Diagnostics attached to every solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveDiagnostics {
    pub method: SolverMethod,
    /// `||L vec(rho)||_inf` of the returned state.
    pub residual: f64,
    /// Eigenvalue assigned to the steady state (zero for time evolution).
    pub eigenvalue: C64,
    /// Smallest `|lambda|` among the remaining eigenvalues, when computed.
    pub gap: Option<f64>,
    /// Number of eigenvalues within [`NEAR_ZERO_WINDOW`] of zero.
    pub near_zero_count: usize,
    /// Trace of the raw null vector before normalization (unit 2-norm scale).
    pub raw_trace: C64,
    pub tail_mass: f64,
    pub tail_band: usize,
    pub tail_eps: f64,
    /// Propagated time for the time-evolution route.
    pub evolved_time: Option<f64>,
}

impl SolveDiagnostics {
    pub fn tail_ok(&self) -> bool {
        self.tail_mass <= self.tail_eps
    }

    /// More than one eigenvalue within the near-zero window.
    pub fn uniqueness_flagged(&self) -> bool {
        self.near_zero_count > 1
    }
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub diagnostics: SolveDiagnostics,
}

impl SteadyState {
    /// Turns a tail-mass warning into [`Error::TailMassExceeded`].
    pub fn check_tail(&self) -> Result<()> {
        let d = &self.diagnostics;
        if d.tail_ok() {
            Ok(())
        } else {
            Err(Error::TailMassExceeded { tail: d.tail_mass, band: d.tail_band, eps: d.tail_eps })
        }
    }
}

struct NullVector {
    vector: Vec<C64>,
    eigenvalue: C64,
    gap: Option<f64>,
    near_zero_count: usize,
    evolved_time: Option<f64>,
}

/// Steady state of `l`.
///
/// The null vector is devectorized, Hermitized and normalized to unit trace.
/// A large tail mass is reported in the diagnostics, not as an error; use
/// [`SteadyState::check_tail`] to enforce it.
pub fn steady_state(l: &LiouvillianMatrix, opts: &SolverOptions) -> Result<SteadyState> {
    opts.validate()?;
    let n_max = l.n_max();
    let method = opts.method.resolve(n_max);
    let null = match method {
        SolverMethod::DenseEigen => dense_null_vector(l, opts)?,
        SolverMethod::ShiftInvert => shift_invert_null_vector(l, opts)?,
        SolverMethod::TimeEvolution => time_evolution_null_vector(l, opts)?,
        SolverMethod::Auto => unreachable!("resolved above"),
    };
    let norm = l2(&null.vector);
    let raw = devectorize(&null.vector, n_max);
    let raw_trace = trace(&raw) / norm;
    let (rho, _) = DensityMatrix::normalized(&raw)?;
    let residual = l.residual(rho.matrix());
    if residual > opts.eigen_tol {
        return Err(Error::NoZeroEigenvalue {
            tol: opts.eigen_tol,
            closest: null.eigenvalue.norm(),
            residual,
        });
    }
    let band = opts.tail_band.min(n_max - 1);
    let tail = tail_mass(&rho, band)?;
    Ok(SteadyState {
        rho,
        diagnostics: SolveDiagnostics {
            method,
            residual,
            eigenvalue: null.eigenvalue,
            gap: null.gap,
            near_zero_count: null.near_zero_count,
            raw_trace,
            tail_mass: tail,
            tail_band: band,
            tail_eps: opts.tail_eps,
            evolved_time: null.evolved_time,
        },
    })
}

fn l2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn vec_trace(v: &[C64], n_max: usize) -> C64 {
    (0..n_max).map(|m| v[m + n_max * m]).sum()
}

fn dense_null_vector(l: &LiouvillianMatrix, opts: &SolverOptions) -> Result<NullVector> {
    let n_max = l.n_max();
    let dim = l.dim();
    let evd = l
        .to_dense()
        .eigen()
        .map_err(|e| Error::LinearAlgebra(format!("eigendecomposition failed: {e:?}")))?;
    let values: Vec<C64> = (0..dim).map(|i| evd.S().column_vector()[i]).collect();
    let u = evd.U();

    let mut candidates = Vec::new();
    for (i, lambda) in values.iter().enumerate() {
        if lambda.norm() > opts.eigen_tol {
            continue;
        }
        let col: Vec<C64> = (0..dim).map(|r| u[(r, i)]).collect();
        let rel_trace = vec_trace(&col, n_max).norm() / l2(&col);
        if rel_trace > CANDIDATE_TRACE_MIN {
            candidates.push((i, col));
        }
    }
    let closest = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    match candidates.len() {
        0 => {
            return Err(Error::NoZeroEigenvalue { tol: opts.eigen_tol, closest, residual: f64::NAN })
        }
        1 => {}
        count => return Err(Error::DegenerateSteadyState { count }),
    }
    let (index, vector) = candidates.pop().expect("one candidate");
    let gap = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != index)
        .map(|(_, v)| v.norm())
        .fold(f64::INFINITY, f64::min);
    let near_zero_count = values.iter().filter(|v| v.norm() <= NEAR_ZERO_WINDOW).count();
    Ok(NullVector {
        vector,
        eigenvalue: values[index],
        gap: gap.is_finite().then_some(gap),
        near_zero_count,
        evolved_time: None,
    })
}

const INVERSE_ITERATIONS: usize = 8;
const SUBSPACE_SIZE: usize = 6;
const SUBSPACE_ITERATIONS: usize = 25;
/// Positive shift for the deflated iteration, relative to `max |L_pq|`.
const RITZ_SHIFT: f64 = 1e-4;

fn shift_invert_null_vector(l: &LiouvillianMatrix, opts: &SolverOptions) -> Result<NullVector> {
    let n_max = l.n_max();
    let dim = l.dim();
    let lu = l.to_band(C64::new(0.0, 0.0)).factorize()?;

    // vec(1) overlaps the steady state with weight Tr(1 rho_ss) = 1
    let mut x = vec![C64::new(0.0, 0.0); dim];
    for m in 0..n_max {
        x[m + n_max * m] = C64::new(1.0 / n_max as f64, 0.0);
    }
    let mut lx = vec![C64::new(0.0, 0.0); dim];
    let mut best: Option<(f64, Vec<C64>)> = None;
    for _ in 0..INVERSE_ITERATIONS {
        lu.solve_in_place(&mut x);
        let tr = vec_trace(&x, n_max);
        if tr.norm() == 0.0 || !tr.re.is_finite() {
            break;
        }
        for v in x.iter_mut() {
            *v /= tr;
        }
        l.matvec(&x, &mut lx);
        let res = max_norm(&lx);
        let improved = best.as_ref().map_or(true, |(r, _)| res < *r);
        if improved {
            best = Some((res, x.clone()));
        }
        if res <= 1e-3 * opts.eigen_tol || !improved {
            break;
        }
    }
    let (_, vector) = best.ok_or(Error::NoZeroEigenvalue {
        tol: opts.eigen_tol,
        closest: f64::NAN,
        residual: f64::NAN,
    })?;
    l.matvec(&vector, &mut lx);
    let eigenvalue = dot(&vector, &lx) / dot(&vector, &vector);

    // the exactly singular factorization would amplify rounding along the
    // null direction without bound, so the spectrum is probed at a small
    // positive shift where no eigenvalue can sit
    let shift = RITZ_SHIFT * l.max_abs();
    let shifted = l.to_band(C64::new(shift, 0.0)).factorize()?;
    let (ritz, vectors) = deflated_ritz(l, &shifted, &vector)?;
    let mut near_zero_count = usize::from(eigenvalue.norm() <= NEAR_ZERO_WINDOW);
    let mut extra_null = 0;
    for (lambda, v) in ritz.iter().zip(&vectors) {
        if lambda.norm() <= NEAR_ZERO_WINDOW {
            near_zero_count += 1;
        }
        // a second null direction that is not confined to the odd-parity
        // coherence sector is a second steady state
        if lambda.norm() <= opts.eigen_tol && odd_parity_fraction(v, n_max) < 1.0 - 1e-6 {
            extra_null += 1;
        }
    }
    if extra_null > 0 {
        return Err(Error::DegenerateSteadyState { count: extra_null + 1 });
    }
    let gap = ritz.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    Ok(NullVector {
        vector,
        eigenvalue,
        gap: gap.is_finite().then_some(gap),
        near_zero_count,
        evolved_time: None,
    })
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn odd_parity_fraction(v: &[C64], n_max: usize) -> f64 {
    let total: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    let odd: f64 = v
        .iter()
        .enumerate()
        .filter(|(p, _)| (p % n_max + p / n_max) % 2 == 1)
        .map(|(_, x)| x.norm_sqr())
        .sum();
    if total == 0.0 {
        0.0
    } else {
        odd / total
    }
}

/// Ritz pairs of `L` closest to the shift of `lu` on the complement of the
/// steady state.
///
/// Block inverse iteration with the spectral projector
/// `P = 1 - rho_ss vec(1)^T` (with `Tr rho_ss = 1`) keeps the iterates
/// traceless so the nearly singular solve does not swamp them.
fn deflated_ritz(
    l: &LiouvillianMatrix,
    lu: &BandLu,
    steady: &[C64],
) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
    let n_max = l.n_max();
    let dim = l.dim();
    let k = SUBSPACE_SIZE.min(dim.saturating_sub(1));
    if k == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let project = |v: &mut [C64]| {
        let tr = vec_trace(v, n_max);
        for (x, s) in v.iter_mut().zip(steady) {
            *x -= tr * s;
        }
    };
    let mut seed = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let mut block = Mat::<C64>::from_fn(dim, k, |_, _| C64::new(next(), next()));
    let mut col = vec![C64::new(0.0, 0.0); dim];
    for iter in 0..=SUBSPACE_ITERATIONS {
        for j in 0..k {
            for r in 0..dim {
                col[r] = block[(r, j)];
            }
            if iter > 0 {
                lu.solve_in_place(&mut col);
            }
            project(&mut col);
            for r in 0..dim {
                block[(r, j)] = col[r];
            }
        }
        block = block.qr().compute_thin_Q();
    }
    let mut lq = Mat::<C64>::zeros(dim, k);
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for j in 0..k {
        for r in 0..dim {
            col[r] = block[(r, j)];
        }
        l.matvec(&col, &mut out);
        project(&mut out);
        for r in 0..dim {
            lq[(r, j)] = out[r];
        }
    }
    let small = block.adjoint() * &lq;
    let evd = small
        .eigen()
        .map_err(|e| Error::LinearAlgebra(format!("Ritz eigendecomposition failed: {e:?}")))?;
    let values: Vec<C64> = (0..k).map(|i| evd.S().column_vector()[i]).collect();
    let ritz_vectors = &block * evd.U();
    let vectors = (0..k).map(|j| (0..dim).map(|r| ritz_vectors[(r, j)]).collect()).collect();
    Ok((values, vectors))
}

fn time_evolution_null_vector(l: &LiouvillianMatrix, opts: &SolverOptions) -> Result<NullVector> {
    let n_max = l.n_max();
    let dt = stable_time_step(l);
    let chunk: f64 = 50.0;
    let mut rho = DensityMatrix::vacuum(n_max);
    let mut t = 0.0;
    loop {
        let span = chunk.min(opts.max_time - t);
        let evo = evolve_rk4(l, &rho, dt, span)?;
        t += span;
        rho = evo.rho;
        let res = l.residual(rho.matrix());
        if res <= 0.5 * opts.eigen_tol {
            break;
        }
        if t >= opts.max_time {
            return Err(Error::NotConverged { residual: res, time: t });
        }
    }
    Ok(NullVector {
        vector: vectorize(rho.matrix()),
        eigenvalue: C64::new(0.0, 0.0),
        gap: None,
        near_zero_count: 1,
        evolved_time: Some(t),
    })
}

/// Power-iteration estimate of the spectral radius of `L`.
pub fn spectral_radius_estimate(l: &LiouvillianMatrix) -> f64 {
    let dim = l.dim();
    let mut x: Vec<C64> = (0..dim)
        .map(|p| C64::new(1.0 + (p % 7) as f64 * 0.1, (p % 3) as f64 * 0.05))
        .collect();
    let mut y = vec![C64::new(0.0, 0.0); dim];
    let mut estimate = 0.0;
    for _ in 0..200 {
        let nx = l2(&x);
        l.matvec(&x, &mut y);
        let ny = l2(&y);
        if ny == 0.0 {
            return 0.0;
        }
        estimate = ny / nx;
        for (a, b) in x.iter_mut().zip(&y) {
            *a = b / ny;
        }
    }
    estimate
}

/// RK4 step bound `0.5 / rho_spec(L)`.
pub fn stable_time_step(l: &LiouvillianMatrix) -> f64 {
    let radius = spectral_radius_estimate(l);
    if radius == 0.0 {
        1.0
    } else {
        0.5 / radius
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    /// Final state, trace-renormalized.
    pub rho: DensityMatrix,
    /// `Tr rho(t_final) - 1` before renormalization.
    pub trace_drift: f64,
    pub steps: usize,
}

/// Fixed-step classical RK4 integration of `d rho/dt = L rho`.
///
/// The step is `t_final / ceil(t_final / dt)`, never larger than `dt`.
pub fn evolve_rk4(
    l: &LiouvillianMatrix,
    rho0: &DensityMatrix,
    dt: f64,
    t_final: f64,
) -> Result<Evolution> {
    if !(dt > 0.0) || !(t_final > 0.0) || !dt.is_finite() || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "dt and t_final must be positive (dt = {dt}, t_final = {t_final})"
        )));
    }
    if rho0.n_max() != l.n_max() {
        return Err(Error::DimensionMismatch { expected: l.n_max(), found: rho0.n_max() });
    }
    let n_max = l.n_max();
    let dim = l.dim();
    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let mut x = vectorize(rho0.matrix());
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]);
    for step in 0..steps {
        l.matvec(&x, &mut k1);
        for i in 0..dim {
            tmp[i] = x[i] + k1[i] * (0.5 * h);
        }
        l.matvec(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = x[i] + k2[i] * (0.5 * h);
        }
        l.matvec(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = x[i] + k3[i] * h;
        }
        l.matvec(&tmp, &mut k4);
        let mut biggest: f64 = 0.0;
        for i in 0..dim {
            x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            biggest = biggest.max(x[i].norm());
        }
        if !(biggest <= 1e6) {
            return Err(Error::UnstableStep { time: (step + 1) as f64 * h, magnitude: biggest });
        }
    }
    let tr = vec_trace(&x, n_max);
    let matrix = devectorize(&x, n_max);
    let scale = C64::new(1.0, 0.0) / tr;
    let rho = DensityMatrix::from_matrix_unchecked(Mat::from_fn(n_max, n_max, |i, j| matrix[(i, j)] * scale));
    Ok(Evolution { rho, trace_drift: tr.re - 1.0, steps })
}
