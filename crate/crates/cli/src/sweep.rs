//! Steady-state sweeps over the `(h, F)` grid.

use std::time::Instant;

use opo_core::liouvillian::build_liouvillian;
use opo_core::metrics::analyze;
use opo_core::steady::steady_state;
use opo_core::wigner::{default_extent, wigner_grid};
use opo_core::{DensityMatrix, MetricsRecord, ModelParams, SolverOptions, SteadyState, WignerGrid};
use rayon::prelude::*;

use crate::error::CliError;
use crate::table::num;

pub const SWEEP_COLUMNS: [&str; 25] = [
    "h",
    "F",
    "g",
    "beta",
    "n_max",
    "h_over_hth",
    "purity_rho",
    "mean_photon",
    "mean_X",
    "mean_P",
    "sigma11",
    "sigma22",
    "sigma12",
    "nbar",
    "xi_r",
    "xi_phi",
    "alpha_re",
    "alpha_im",
    "delta_hs",
    "s_entropy",
    "q_photon",
    "eigen_residual",
    "tail_mass",
    "wall_time_seconds",
    "error",
];

/// Solver and metric output for one sweep point.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub residual: f64,
    pub tail_mass: f64,
    pub metrics: MetricsRecord,
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub params: ModelParams,
    pub outcome: Result<PointResult, String>,
    pub wall_time_seconds: f64,
}

impl SweepRow {
    pub fn h_over_hth(&self) -> f64 {
        self.params.h() / self.params.threshold()
    }

    pub fn record(&self) -> Vec<String> {
        let p = &self.params;
        let mut out = vec![
            num(p.h()),
            num(p.field()),
            num(p.g()),
            num(p.beta()),
            p.n_max().to_string(),
            num(self.h_over_hth()),
        ];
        match &self.outcome {
            Ok(r) => {
                let m = &r.metrics;
                out.extend(
                    [
                        m.purity_rho,
                        m.mean_photon,
                        m.moments.mean_x,
                        m.moments.mean_p,
                        m.moments.sigma[0][0],
                        m.moments.sigma[1][1],
                        m.moments.sigma[0][1],
                        m.reference.nbar,
                        m.reference.xi_r,
                        m.reference.xi_phi,
                        m.reference.alpha.re,
                        m.reference.alpha.im,
                        m.delta_hs,
                        m.s_entropy,
                        m.q_photon,
                        r.residual,
                        r.tail_mass,
                    ]
                    .map(num),
                );
                out.push(num(self.wall_time_seconds));
                out.push(String::new());
            }
            Err(msg) => {
                out.extend(std::iter::repeat_n(num(f64::NAN), 17));
                out.push(num(self.wall_time_seconds));
                out.push(msg.clone());
            }
        }
        out
    }
}

pub fn solve_point(params: &ModelParams, opts: &SolverOptions) -> opo_core::Result<SteadyState> {
    steady_state(&build_liouvillian(params), opts)
}

fn evaluate(params: &ModelParams, opts: &SolverOptions) -> opo_core::Result<(PointResult, DensityMatrix)> {
    let ss = solve_point(params, opts)?;
    let metrics = analyze(&ss.rho)?;
    let result = PointResult { residual: ss.diagnostics.residual, tail_mass: ss.diagnostics.tail_mass, metrics };
    Ok((result, ss.rho))
}

/// Wigner grid request attached to each sweep point.
#[derive(Clone, Copy, Debug)]
pub struct WignerRequest {
    pub extent: Option<f64>,
    pub points: usize,
}

pub fn grid_for(rho: &DensityMatrix, params: &ModelParams, req: WignerRequest) -> opo_core::Result<WignerGrid> {
    wigner_grid(rho, req.extent.unwrap_or_else(|| default_extent(params)), req.points)
}

/// Solves every point on a pool of `workers` threads (0 = all cores).
///
/// Results come back in input order whatever the completion order; a failed
/// point yields a row carrying the error message.
pub fn run_sweep(
    points: &[ModelParams],
    opts: &SolverOptions,
    wigner: Option<WignerRequest>,
    workers: usize,
) -> Result<Vec<(SweepRow, Option<WignerGrid>)>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::WorkerPool(e.to_string()))?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|params| {
                let start = Instant::now();
                let evaluated = evaluate(params, opts);
                let mut grid = None;
                let outcome = match evaluated {
                    Ok((result, rho)) => match wigner.map(|req| grid_for(&rho, params, req)) {
                        Some(Err(e)) => Err(format!("wigner: {e}")),
                        Some(Ok(g)) => {
                            grid = Some(g);
                            Ok(result)
                        }
                        None => Ok(result),
                    },
                    Err(e) => Err(e.to_string()),
                };
                let row = SweepRow { params: *params, outcome, wall_time_seconds: start.elapsed().as_secs_f64() };
                (row, grid)
            })
            .collect()
    }))
}
