//! Wigner function of a Fock-basis density matrix.
//!
//! `W(z) = (2/pi) sum_{m,n} (-1)^m <n|D(2z)|m> rho_mn`, normalized so that
//! `integral W d(Re z) d(Im z) = 1`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::model::{displacement_matrix, ModelParams};
use crate::steady::DensityMatrix;
use crate::{Error, Result};

/// Lobes below this fraction of the global maximum are ignored.
pub const LOBE_THRESHOLD: f64 = 0.05;

pub const DEFAULT_POINTS: usize = 161;

/// Wigner value at `z` and the imaginary part of the sum, which vanishes
/// for a Hermitian `rho`.
pub fn wigner_point_complex(rho: &DensityMatrix, z: C64) -> C64 {
    let n_max = rho.n_max();
    let d = displacement_matrix(z * 2.0, n_max);
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..n_max {
        let mut col = C64::new(0.0, 0.0);
        for n in 0..n_max {
            col += d[(n, m)] * rho.get(m, n);
        }
        if m % 2 == 0 {
            acc += col;
        } else {
            acc -= col;
        }
    }
    acc * (2.0 / PI)
}

pub fn wigner_point(rho: &DensityMatrix, z: C64) -> f64 {
    wigner_point_complex(rho, z).re
}

/// Wigner function sampled on a square grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    /// `Re z` samples.
    pub x_axis: Vec<f64>,
    /// `Im z` samples.
    pub p_axis: Vec<f64>,
    /// `values[i][j] = W(x_axis[j] + i p_axis[i])`.
    pub values: Vec<Vec<f64>>,
    pub dx: f64,
    pub dp: f64,
    /// Largest imaginary residual met on the grid.
    pub max_imag: f64,
}

impl WignerGrid {
    /// Riemann sum of `W dx dp`.
    pub fn normalization(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.dx * self.dp
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Rows `(x, p, W)` in row-major order (`p` outer).
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.p_axis.iter().enumerate().flat_map(move |(i, &p)| {
            self.x_axis.iter().enumerate().map(move |(j, &x)| (x, p, self.values[i][j]))
        })
    }
}

fn axis(extent: f64, n_points: usize) -> (Vec<f64>, f64) {
    let step = 2.0 * extent / (n_points - 1) as f64;
    let mut v: Vec<f64> = (0..n_points).map(|k| -extent + k as f64 * step).collect();
    // exact symmetry about the origin
    for k in 0..n_points / 2 {
        v[n_points - 1 - k] = -v[k];
    }
    if n_points % 2 == 1 {
        v[n_points / 2] = 0.0;
    }
    (v, step)
}

/// Samples `W` on `[-extent, extent]^2` with `n_points` per axis; rows are
/// evaluated in parallel.
pub fn wigner_grid(rho: &DensityMatrix, extent: f64, n_points: usize) -> Result<WignerGrid> {
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::InvalidArgument(format!("extent must be positive, got {extent}")));
    }
    if n_points < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 points per axis, got {n_points}")));
    }
    let (x_axis, dx) = axis(extent, n_points);
    let p_axis = x_axis.clone();
    let rows: Vec<(Vec<f64>, f64)> = p_axis
        .par_iter()
        .map(|&p| {
            let mut imag: f64 = 0.0;
            let row = x_axis
                .iter()
                .map(|&x| {
                    let w = wigner_point_complex(rho, C64::new(x, p));
                    imag = imag.max(w.im.abs());
                    w.re
                })
                .collect();
            (row, imag)
        })
        .collect();
    let max_imag = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(WignerGrid {
        x_axis,
        p_axis,
        values: rows.into_iter().map(|r| r.0).collect(),
        dx,
        dp: dx,
        max_imag,
    })
}

/// Half-width covering the mean-field lobes plus four vacuum widths.
pub fn default_extent(params: &ModelParams) -> f64 {
    params.classical_amplitude() + 4.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lobe {
    pub z: C64,
    pub value: f64,
}

/// Strict local maxima (against all existing 8 neighbours) above
/// [`LOBE_THRESHOLD`] of the global maximum, largest first.
pub fn find_lobes(grid: &WignerGrid) -> Vec<Lobe> {
    let rows = grid.values.len();
    let global = grid.max_value();
    let mut lobes = Vec::new();
    if !(global > 0.0) {
        return lobes;
    }
    for i in 0..rows {
        let cols = grid.values[i].len();
        for j in 0..cols {
            let w = grid.values[i][j];
            if w < LOBE_THRESHOLD * global {
                continue;
            }
            let mut is_peak = true;
            'outer: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= rows as i64 || nj >= cols as i64 {
                        continue;
                    }
                    if grid.values[ni as usize][nj as usize] >= w {
                        is_peak = false;
                        break 'outer;
                    }
                }
            }
            if is_peak {
                lobes.push(Lobe { z: C64::new(grid.x_axis[j], grid.p_axis[i]), value: w });
            }
        }
    }
    lobes.sort_by(|a, b| b.value.total_cmp(&a.value));
    lobes
}
