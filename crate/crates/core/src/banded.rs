//! Complex banded LU factorization with partial pivoting.
//!
//! The vectorized Liouvillian couples `p = m + n_max n` only to indices
//! within `2 n_max + 2` of `p`, so a band factorization costs
//! `O(dim * kl * (kl + ku))` instead of `O(dim^3)`.
//!
//! Storage follows the LAPACK `gbtrf` layout: column-major with
//! `2 kl + ku + 1` rows per column, the extra `kl` rows holding the fill-in
//! created by row interchanges.

use num_complex::Complex64 as C64;

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    /// Empty `n x n` band matrix with `kl` sub- and `ku` super-diagonals.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self { n, kl, ku, ldab, data: vec![C64::new(0.0, 0.0); ldab * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn idx(&self, row: usize, col: usize) -> usize {
        col * self.ldab + (self.kl + self.ku + row - col)
    }

    #[inline]
    fn in_factor_band(&self, row: usize, col: usize) -> bool {
        row + self.kl + self.ku >= col && row <= col + self.kl
    }

    /// Adds `value` at `(row, col)`. Panics outside the declared band.
    pub fn add(&mut self, row: usize, col: usize, value: C64) {
        assert!(
            row + self.ku >= col && row <= col + self.kl,
            "({row}, {col}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let i = self.idx(row, col);
        self.data[i] += value;
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        if row >= self.n || col >= self.n || !self.in_factor_band(row, col) {
            return C64::new(0.0, 0.0);
        }
        self.data[self.idx(row, col)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Factorizes in place. Exactly singular pivots (as for a matrix with a
    /// true null vector) are replaced by `eps * max|A|`, which turns the
    /// factorization into a valid inverse-iteration operator.
    pub fn factorize(mut self) -> Result<BandLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let floor = f64::EPSILON * self.max_abs().max(f64::MIN_POSITIVE);
        if !floor.is_finite() {
            return Err(Error::LinearAlgebra("non-finite band matrix".into()));
        }
        let mut pivots = vec![0usize; n];
        let mut perturbed = 0usize;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);

            let mut piv = k;
            let mut best = self.data[self.idx(k, k)].norm();
            for r in k + 1..=last_row {
                let v = self.data[self.idx(r, k)].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            pivots[k] = piv;
            if piv != k {
                for c in k..=last_col {
                    let a = self.idx(k, c);
                    let b = self.idx(piv, c);
                    self.data.swap(a, b);
                }
            }
            let dkk = self.idx(k, k);
            if self.data[dkk].norm() <= floor {
                self.data[dkk] = C64::new(floor, 0.0);
                perturbed += 1;
            }
            let inv = self.data[dkk].inv();
            for r in k + 1..=last_row {
                let ir = self.idx(r, k);
                if self.data[ir] == C64::new(0.0, 0.0) {
                    continue;
                }
                let mult = self.data[ir] * inv;
                self.data[ir] = mult;
                for c in k + 1..=last_col {
                    let u = self.data[self.idx(k, c)];
                    if u != C64::new(0.0, 0.0) {
                        let t = self.idx(r, c);
                        self.data[t] -= mult * u;
                    }
                }
            }
        }
        Ok(BandLu { band: self, pivots, perturbed_pivots: perturbed })
    }
}

/// Result of [`BandMatrix::factorize`].
#[derive(Clone, Debug)]
pub struct BandLu {
    band: BandMatrix,
    pivots: Vec<usize>,
    perturbed_pivots: usize,
}

impl BandLu {
    pub fn dim(&self) -> usize {
        self.band.n
    }

    /// Number of pivots that had to be replaced because they were
    /// numerically zero.
    pub fn perturbed_pivots(&self) -> usize {
        self.perturbed_pivots
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let a = &self.band;
        let n = a.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk == C64::new(0.0, 0.0) {
                continue;
            }
            for r in k + 1..=(k + a.kl).min(n - 1) {
                b[r] -= a.data[a.idx(r, k)] * bk;
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for c in i + 1..=(i + a.kl + a.ku).min(n - 1) {
                acc -= a.data[a.idx(i, c)] * b[c];
            }
            b[i] = acc / a.data[a.idx(i, i)];
        }
    }
}
