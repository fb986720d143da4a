//! Physical parameters and Fock-basis operator matrices.
//!
//! Matrices are indexed by photon number: entry `(n, m)` is `<n|O|m>` for
//! `0 <= n, m < n_max`. The displacement and squeezing builders return the
//! exact matrix elements of the infinite-dimensional operators restricted to
//! the retained block, so products of truncated matrices are only
//! approximately unitary (see [`displacement_unitarity_residual`]).

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::special::{laguerre_sequence, ln_factorials, tridiagonal_eigen};
use crate::{Error, Result};

/// Dense complex matrix in the photon-number basis.
pub type FockMatrix = Mat<C64>;

/// Unvalidated parameter record, e.g. as read from a configuration file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawParams {
    pub h: f64,
    pub g: f64,
    pub beta: f64,
    pub f: f64,
    pub n_max: i64,
}

/// Validated model parameters.
///
/// `h` is the two-photon pump amplitude, `g` the one-photon loss rate,
/// `beta` the two-photon loss rate, `field` the real additive one-photon
/// drive and `n_max` the number of retained Fock states `|0>..|n_max-1>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    h: f64,
    g: f64,
    beta: f64,
    field: f64,
    n_max: usize,
}

/// Checks a raw parameter record. Never clamps.
pub fn validate_params(raw: &RawParams) -> Result<ModelParams> {
    for (name, value) in [("h", raw.h), ("g", raw.g), ("beta", raw.beta), ("F", raw.f)] {
        if !value.is_finite() {
            return Err(Error::NonFinite { name, value });
        }
    }
    if raw.g <= 0.0 {
        return Err(Error::NonPositiveRate { name: "g", value: raw.g });
    }
    if raw.beta <= 0.0 {
        return Err(Error::NonPositiveRate { name: "beta", value: raw.beta });
    }
    if raw.n_max < 2 {
        return Err(Error::TruncationTooSmall(raw.n_max));
    }
    if raw.h < 0.0 {
        return Err(Error::NegativePump(raw.h));
    }
    Ok(ModelParams {
        h: raw.h,
        g: raw.g,
        beta: raw.beta,
        field: raw.f,
        n_max: raw.n_max as usize,
    })
}

impl ModelParams {
    pub fn new(h: f64, g: f64, beta: f64, field: f64, n_max: usize) -> Result<Self> {
        validate_params(&RawParams {
            h,
            g,
            beta,
            f: field,
            n_max: i64::try_from(n_max).unwrap_or(i64::MAX),
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Additive one-photon field amplitude `F`.
    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Classical oscillation threshold `h_th = 2g`.
    pub fn threshold(&self) -> f64 {
        2.0 * self.g
    }

    /// Mean-field amplitude `sqrt((h/2 - g)/beta)` of the symmetric fixed
    /// points at `F = 0`, or zero below threshold.
    pub fn classical_amplitude(&self) -> f64 {
        ((self.h / 2.0 - self.g).max(0.0) / self.beta).sqrt()
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams {
            h: self.h,
            g: self.g,
            beta: self.beta,
            f: self.field,
            n_max: self.n_max as i64,
        }
    }

    pub fn with_pump(&self, h: f64) -> Result<Self> {
        validate_params(&RawParams { h, ..self.to_raw() })
    }

    pub fn with_field(&self, field: f64) -> Result<Self> {
        validate_params(&RawParams { f: field, ..self.to_raw() })
    }

    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        Self::new(self.h, self.g, self.beta, self.field, n_max)
    }
}

fn check_truncation(n_max: usize) -> Result<()> {
    if n_max < 2 {
        return Err(Error::TruncationTooSmall(n_max as i64));
    }
    Ok(())
}

/// Annihilation operator: `(n-1, n) = sqrt(n)`.
pub fn annihilation_matrix(n_max: usize) -> Result<FockMatrix> {
    check_truncation(n_max)?;
    Ok(Mat::from_fn(n_max, n_max, |row, col| {
        if col >= 1 && row + 1 == col {
            C64::new((col as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Creation operator, the conjugate transpose of [`annihilation_matrix`].
pub fn creation_matrix(n_max: usize) -> Result<FockMatrix> {
    Ok(annihilation_matrix(n_max)?.adjoint().to_owned())
}

/// Photon-number operator `diag(0, 1, ..., n_max - 1)`.
pub fn number_matrix(n_max: usize) -> Result<FockMatrix> {
    check_truncation(n_max)?;
    Ok(Mat::from_fn(n_max, n_max, |row, col| {
        if row == col {
            C64::new(row as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Matrix elements `<n|D(z)|m>` of the displacement operator
/// `D(z) = exp(z a^dag - z^* a)`.
///
/// For `m >= n`:
/// `sqrt(n!/m!) e^{-|z|^2/2} (-z^*)^{m-n} L_n^{(m-n)}(|z|^2)`,
/// and for `m < n`:
/// `sqrt(m!/n!) e^{-|z|^2/2} z^{n-m} L_m^{(n-m)}(|z|^2)`.
///
/// Magnitudes are combined in log space; each band `|m - n| = k` shares one
/// Laguerre recurrence.
pub fn displacement_matrix(z: C64, n_max: usize) -> FockMatrix {
    let mut out = Mat::<C64>::zeros(n_max, n_max);
    if z == C64::new(0.0, 0.0) {
        for i in 0..n_max {
            out[(i, i)] = C64::new(1.0, 0.0);
        }
        return out;
    }
    let x = z.norm_sqr();
    let ln_abs = z.norm().ln();
    let lnf = ln_factorials(n_max);
    // unit phases of -z^* (upper band) and z (lower band)
    let theta_up = (-z.conj()).arg();
    let theta_down = z.arg();
    for k in 0..n_max {
        let lag = laguerre_sequence(k as f64, x, n_max - k);
        let up = C64::from_polar(1.0, k as f64 * theta_up);
        let down = C64::from_polar(1.0, k as f64 * theta_down);
        for (j, &poly) in lag.iter().enumerate() {
            if poly == 0.0 {
                continue;
            }
            let ln_mag = 0.5 * (lnf[j] - lnf[j + k]) - 0.5 * x + k as f64 * ln_abs;
            let val = poly * ln_mag.exp();
            out[(j, j + k)] = up * val;
            if k > 0 {
                out[(j + k, j)] = down * val;
            }
        }
    }
    out
}

/// Max-norm of `D D^dag - 1` restricted to the leading `n_max / 2` block.
///
/// The truncated displacement is not unitary; this is the diagnostic for how
/// far the retained block is from it.
pub fn displacement_unitarity_residual(z: C64, n_max: usize) -> f64 {
    let d = displacement_matrix(z, n_max);
    let prod = &d * d.adjoint();
    let half = n_max / 2;
    let mut worst: f64 = 0.0;
    for i in 0..half {
        for j in 0..half {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Matrix elements `<m|S(xi)|n>` of the squeezing operator
/// `S(xi) = exp((xi^* a^2 - xi a^dag^2) / 2)` with `xi = r e^{i phi}`.
///
/// Elements between states of opposite parity vanish, and
/// `<m|S(r e^{i phi})|n> = e^{i phi (m - n)/2} <m|S(r)|n>`.
///
/// The closed-form sum for `<m|S(r)|n>` alternates in sign and loses all
/// precision for large indices, so the real generator
/// `r (a^2 - a^dag^2) / 2` is exponentiated instead. In each parity sector it
/// is an antisymmetric tridiagonal matrix `K`; with `G = diag(i^k)`,
/// `G K G^-1 = -i B` for a real symmetric tridiagonal `B`, and
/// `exp(K) = G^-1 Q e^{-i Lambda} Q^T G` from the eigendecomposition of `B`.
/// The sector is padded far enough past `n_max` that the retained block is
/// unaffected by the padding edge. A negative `r` is read as `(|r|, phi + pi)`.
pub fn squeezing_matrix(r: f64, phi: f64, n_max: usize) -> FockMatrix {
    squeezing_block(r, phi, n_max, n_max)
}

/// Rectangular block `<m|S(xi)|n>`, `m < rows`, `n < cols`.
pub fn squeezing_block(r: f64, phi: f64, rows: usize, cols: usize) -> FockMatrix {
    let work = squeezing_work_dim(r.abs(), rows.min(cols)).max(rows.max(cols) + 16);
    squeezing_block_padded(r, phi, rows, cols, work)
}

/// Padded basis size used by [`squeezing_matrix`].
///
/// A squeezed number state `S|n>` has mean photon number
/// `n cosh 2r + sinh^2 r` and amplitudes decaying like `tanh(r)^{k/2}` in
/// the Fock index `k` beyond that.
pub fn squeezing_work_dim(r: f64, n_max: usize) -> usize {
    if r == 0.0 {
        return n_max;
    }
    let spread = n_max as f64 * (2.0 * r).exp();
    let decay = -2.0 * (1e-20f64).ln() / -(r.tanh().ln());
    let pad = (spread + decay.min(1e5)).ceil() as usize;
    (n_max + 16).max(pad)
}

/// [`squeezing_block`] with an explicit padded basis size.
pub fn squeezing_block_padded(
    r: f64,
    phi: f64,
    rows: usize,
    cols: usize,
    work_dim: usize,
) -> FockMatrix {
    let (r, phi) = if r < 0.0 { (-r, phi + std::f64::consts::PI) } else { (r, phi) };
    let mut out = Mat::<C64>::zeros(rows, cols);
    if r == 0.0 {
        for i in 0..rows.min(cols) {
            out[(i, i)] = C64::new(1.0, 0.0);
        }
        return out;
    }
    let needed = rows.max(cols);
    let work = work_dim.max(needed);
    for parity in 0..2 {
        // sector index i <-> Fock state 2i + parity
        let size = (work - parity).div_ceil(2);
        let keep_rows = rows.saturating_sub(parity).div_ceil(2);
        let keep_cols = cols.saturating_sub(parity).div_ceil(2);
        let kept = keep_rows.max(keep_cols);
        if keep_rows == 0 || keep_cols == 0 {
            continue;
        }
        let diag = vec![0.0; size];
        let off: Vec<f64> = (0..size.saturating_sub(1))
            .map(|i| {
                let k = (2 * i + parity) as f64;
                0.5 * r * ((k + 1.0) * (k + 2.0)).sqrt()
            })
            .collect();
        let (lambda, q) =
            tridiagonal_eigen(&diag, &off, kept).expect("tridiagonal QL converges for a zero diagonal");
        let phases: Vec<C64> = lambda.iter().map(|&l| C64::from_polar(1.0, -l)).collect();
        let left = Mat::<C64>::from_fn(keep_rows, size, |i, k| phases[k] * q[i][k]);
        let right = Mat::<C64>::from_fn(size, keep_cols, |k, j| C64::new(q[j][k], 0.0));
        let block = &left * &right;
        for i in 0..keep_rows {
            for j in 0..keep_cols {
                // i^{j - i} from the diagonal similarity; S(r) itself is real
                let v = block[(i, j)] * C64::new(0.0, 1.0).powi((j as i32 - i as i32).rem_euclid(4));
                let phase = C64::from_polar(1.0, phi * (i as f64 - j as f64));
                out[(2 * i + parity, 2 * j + parity)] = phase * v.re;
            }
        }
    }
    out
}
