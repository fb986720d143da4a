//! Vectorized Liouvillian of the parametric oscillator in the Fock basis.
//!
//! Element `rho_{mn}` is stored at `p = m + n_max * n`. Row `p` of the
//! matrix holds the coefficients of `d rho_{mn} / dt`:
//!
//! - two-photon gain, `(h/8)[sqrt(m(m-1)) rho_{m-2,n} - sqrt((m+1)(m+2)) rho_{m+2,n}
//!   + sqrt(n(n-1)) rho_{m,n-2} - sqrt((n+1)(n+2)) rho_{m,n+2}]`
//! - one-photon loss, `g[sqrt((m+1)(n+1)) rho_{m+1,n+1} - (m+n)/2 rho_{mn}]`
//! - two-photon loss, `(beta/2) sqrt((m+1)(m+2)(n+1)(n+2)) rho_{m+2,n+2}
//!   - beta[m(m-1) + n(n-1)]/4 rho_{mn}`
//! - additive field, `F[sqrt(m) rho_{m-1,n} - sqrt(m+1) rho_{m+1,n}
//!   + sqrt(n) rho_{m,n-1} - sqrt(n+1) rho_{m,n+1}]`
//!
//! Couplings to Fock indices `>= n_max` are dropped. With this hard
//! truncation the generator is exactly the Lindblad generator of the
//! projected operators, so it stays trace preserving.

use std::io::Write;

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::banded::BandMatrix;
use crate::model::{FockMatrix, ModelParams};
use crate::{Error, Result};

/// Vectorized index `m + n_max * n` of density-matrix element `(m, n)`.
pub fn vec_index(m: usize, n: usize, n_max: usize) -> Result<usize> {
    if m >= n_max || n >= n_max {
        return Err(Error::IndexOutOfRange { row: m, col: n, n_max });
    }
    Ok(m + n_max * n)
}

/// Sparse `n_max^2 x n_max^2` Liouvillian in compressed-row form.
#[derive(Clone, Debug)]
pub struct LiouvillianMatrix {
    n_max: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

/// Coupling terms for row `(m, n)`: `(r, s, coefficient)` with `r, s`
/// possibly outside the truncation (as signed offsets).
fn row_terms(params: &ModelParams, m: usize, n: usize, out: &mut Vec<(i64, i64, f64)>) {
    out.clear();
    let (h, g, beta, field) = (params.h(), params.g(), params.beta(), params.field());
    let (mi, ni) = (m as i64, n as i64);
    let (mf, nf) = (m as f64, n as f64);

    if h != 0.0 {
        let c = h / 8.0;
        out.push((mi - 2, ni, c * (mf * (mf - 1.0)).sqrt()));
        out.push((mi + 2, ni, -c * ((mf + 1.0) * (mf + 2.0)).sqrt()));
        out.push((mi, ni - 2, c * (nf * (nf - 1.0)).sqrt()));
        out.push((mi, ni + 2, -c * ((nf + 1.0) * (nf + 2.0)).sqrt()));
    }

    out.push((mi + 1, ni + 1, g * ((mf + 1.0) * (nf + 1.0)).sqrt()));
    out.push((mi, ni, -g * (mf + nf) / 2.0));

    out.push((
        mi + 2,
        ni + 2,
        beta / 2.0 * ((mf + 1.0) * (mf + 2.0) * (nf + 1.0) * (nf + 2.0)).sqrt(),
    ));
    out.push((mi, ni, -beta * (mf * (mf - 1.0) + nf * (nf - 1.0)) / 4.0));

    if field != 0.0 {
        out.push((mi - 1, ni, field * mf.sqrt()));
        out.push((mi + 1, ni, -field * (mf + 1.0).sqrt()));
        out.push((mi, ni - 1, field * nf.sqrt()));
        out.push((mi, ni + 1, -field * (nf + 1.0).sqrt()));
    }
}

/// Assembles the Liouvillian for `params`.
///
/// Entries are collected per row in coordinate form, merged, and stored in
/// compressed rows. Exact zeros are not stored.
pub fn build_liouvillian(params: &ModelParams) -> LiouvillianMatrix {
    let n_max = params.n_max();
    let dim = n_max * n_max;
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::with_capacity(9 * dim);
    let mut vals = Vec::with_capacity(9 * dim);
    let mut terms = Vec::with_capacity(12);
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(12);
    row_ptr.push(0);
    let lim = n_max as i64;
    for n in 0..n_max {
        for m in 0..n_max {
            row_terms(params, m, n, &mut terms);
            row.clear();
            for &(r, s, coef) in &terms {
                if r < 0 || s < 0 || r >= lim || s >= lim {
                    continue;
                }
                row.push((r as usize + n_max * s as usize, coef));
            }
            row.sort_by_key(|&(q, _)| q);
            let mut i = 0;
            while i < row.len() {
                let q = row[i].0;
                let mut acc = 0.0;
                while i < row.len() && row[i].0 == q {
                    acc += row[i].1;
                    i += 1;
                }
                if acc != 0.0 {
                    cols.push(q);
                    vals.push(C64::new(acc, 0.0));
                }
            }
            row_ptr.push(cols.len());
        }
    }
    LiouvillianMatrix { n_max, row_ptr, cols, vals }
}

impl LiouvillianMatrix {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Vectorized dimension `n_max^2`.
    pub fn dim(&self) -> usize {
        self.n_max * self.n_max
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Fraction of stored entries, `nnz / dim^2`.
    pub fn density(&self) -> f64 {
        self.nnz() as f64 / (self.dim() as f64).powi(2)
    }

    /// Stored entries of row `p` as `(column, value)` pairs.
    pub fn row(&self, p: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.row_ptr[p]..self.row_ptr[p + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    /// Entry `(p, q)`, zero if not stored.
    pub fn get(&self, p: usize, q: usize) -> C64 {
        self.row(p)
            .find(|&(c, _)| c == q)
            .map(|(_, v)| v)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// All stored entries as `(p, q, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim()).flat_map(move |p| self.row(p).map(move |(q, v)| (p, q, v)))
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `y = L x` on vectorized density matrices.
    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (p, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[p]..self.row_ptr[p + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// Row vector `vec(1)^T L`, the trace of `L rho` as a functional of `rho`.
    /// Vanishes for a trace-preserving generator.
    pub fn trace_functional(&self) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); self.dim()];
        for m in 0..self.n_max {
            let p = m + self.n_max * m;
            for (q, v) in self.row(p) {
                acc[q] += v;
            }
        }
        acc
    }

    /// Max-norm of `L x`, with `x` the vectorization of `rho`.
    pub fn residual(&self, rho: &FockMatrix) -> f64 {
        let x = vectorize(rho);
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.matvec(&x, &mut y);
        y.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `d rho / dt` as an `n_max x n_max` matrix.
    pub fn apply(&self, rho: &FockMatrix) -> Result<FockMatrix> {
        if rho.nrows() != self.n_max || rho.ncols() != self.n_max {
            return Err(Error::DimensionMismatch { expected: self.n_max, found: rho.nrows() });
        }
        let x = vectorize(rho);
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.matvec(&x, &mut y);
        Ok(devectorize(&y, self.n_max))
    }

    /// Lower and upper bandwidth of the stored pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for (p, q, _) in self.triplets() {
            if p > q {
                kl = kl.max(p - q);
            } else {
                ku = ku.max(q - p);
            }
        }
        (kl, ku)
    }

    /// Copy into band storage, optionally shifted: `L - shift * 1`.
    pub fn to_band(&self, shift: C64) -> BandMatrix {
        let (kl, ku) = self.bandwidths();
        let mut band = BandMatrix::zeros(self.dim(), kl, ku);
        for (p, q, v) in self.triplets() {
            band.add(p, q, v);
        }
        if shift != C64::new(0.0, 0.0) {
            for p in 0..self.dim() {
                band.add(p, p, -shift);
            }
        }
        band
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut out = Mat::<C64>::zeros(self.dim(), self.dim());
        for (p, q, v) in self.triplets() {
            out[(p, q)] = v;
        }
        out
    }

    /// Writes one `p q re im` line per stored entry.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (p, q, v) in self.triplets() {
            writeln!(w, "{p} {q} {:.17e} {:.17e}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// Column-stacking vectorization matching [`vec_index`].
pub fn vectorize(rho: &FockMatrix) -> Vec<C64> {
    let n = rho.nrows();
    let mut out = Vec::with_capacity(n * n);
    for col in 0..n {
        for row in 0..n {
            out.push(rho[(row, col)]);
        }
    }
    out
}

pub fn devectorize(x: &[C64], n_max: usize) -> FockMatrix {
    Mat::from_fn(n_max, n_max, |m, n| x[m + n_max * n])
}
