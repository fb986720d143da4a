//! The `steady`, `wigner`, `classical` and `validate` subcommands.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use opo_core::classical::{fixed_points, saddle_node_field};
use opo_core::liouvillian::build_liouvillian;
use opo_core::metrics::analyze;
use opo_core::wigner::{find_lobes, wigner_point};
use opo_core::{ClassicalFixedPoint, DensityMatrix, ModelParams, SolverMethod, SolverOptions, WignerGrid, C64};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::plots::{self, Panel};
use crate::sweep::{grid_for, run_sweep, solve_point, SweepRow, WignerRequest, SWEEP_COLUMNS};
use crate::table::{num, write_csv};

fn output_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.outputs.directory.clone();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::output(&dir, e))?;
    Ok(dir)
}

fn write_wigner_csv(path: &Path, grid: &WignerGrid) -> Result<(), CliError> {
    write_csv(path, &["x", "p", "W"], grid.samples().map(|(x, p, w)| vec![num(x), num(p), num(w)]))
}

fn point_title(p: &ModelParams) -> String {
    format!("h = {}, F = {}, g = {}, beta = {}, n_max = {}", p.h(), p.field(), p.g(), p.beta(), p.n_max())
}

fn unique(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn metric_panels(rows: &[&SweepRow], x: impl Fn(&SweepRow) -> f64) -> Vec<Panel<'static>> {
    let pick = |f: fn(&opo_core::MetricsRecord) -> f64| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (x(r), r.outcome.as_ref().map(|o| f(&o.metrics)).unwrap_or(f64::NAN))).collect()
    };
    vec![
        Panel { label: "delta", curves: vec![pick(|m| m.delta_hs)] },
        Panel { label: "s", curves: vec![pick(|m| m.s_entropy)] },
        Panel { label: "Q", curves: vec![pick(|m| m.q_photon)] },
    ]
}

fn sweep_plots(dir: &Path, rows: &[SweepRow]) -> Result<Vec<PathBuf>, CliError> {
    let hs = unique(rows.iter().map(|r| r.params.h()));
    let fs = unique(rows.iter().map(|r| r.params.field()));
    let mut written = Vec::new();
    let refs: Vec<&SweepRow> = rows.iter().collect();
    if hs.len() > 1 && fs.len() == 1 {
        let path = dir.join("metrics_vs_pump.svg");
        plots::stacked_panels(&path, "h / h_th", &metric_panels(&refs, |r| r.h_over_hth()), Some(1.0))?;
        written.push(path);
    } else if hs.len() == 1 && fs.len() > 1 {
        let path = dir.join("metrics_vs_field.svg");
        plots::stacked_panels(&path, "F", &metric_panels(&refs, |r| r.params.field()), None)?;
        written.push(path);
    } else if hs.len() > 1 && fs.len() > 1 {
        let ratio: Vec<f64> = hs.iter().map(|h| h / rows[0].params.threshold()).collect();
        // rows are h-major
        let values: Vec<Vec<f64>> = hs
            .iter()
            .enumerate()
            .map(|(i, _)| {
                (0..fs.len())
                    .map(|j| rows[i * fs.len() + j].outcome.as_ref().map(|o| o.metrics.s_entropy).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        // transpose so F runs along y
        let by_field: Vec<Vec<f64>> = (0..fs.len()).map(|j| values.iter().map(|row| row[j]).collect()).collect();
        let path = dir.join("entropy_map.svg");
        plots::log_heatmap(&path, "h / h_th", "F", "s (log10 color scale)", &ratio, &fs, &by_field)?;
        written.push(path);
    }
    Ok(written)
}

/// Solves the sweep and writes `sweep.csv`, plots and optional Wigner grids.
pub fn run_steady(cfg: &RunConfig) -> Result<(), CliError> {
    let points = cfg.points()?;
    let opts = cfg.solver.options()?;
    cfg.check_wigner()?;
    let dir = output_dir(cfg)?;
    let request = cfg.wigner.enabled.then_some(WignerRequest { extent: cfg.wigner.extent, points: cfg.wigner.points });
    let results = run_sweep(&points, &opts, request, cfg.parallelism.workers)?;
    let rows: Vec<SweepRow> = results.iter().map(|r| r.0.clone()).collect();

    if cfg.outputs.emit_csv {
        let path = dir.join("sweep.csv");
        write_csv(&path, &SWEEP_COLUMNS, rows.iter().map(SweepRow::record))?;
        println!("wrote {} ({} rows)", path.display(), rows.len());
    }
    if cfg.outputs.emit_plots {
        for path in sweep_plots(&dir, &rows)? {
            println!("wrote {}", path.display());
        }
    }
    let single = results.len() == 1;
    for (k, (row, grid)) in results.iter().enumerate() {
        let Some(grid) = grid else { continue };
        let stem = if single { "wigner".to_string() } else { format!("wigner_{k:04}") };
        if cfg.outputs.emit_csv {
            write_wigner_csv(&dir.join(format!("{stem}.csv")), grid)?;
        }
        if cfg.outputs.emit_plots {
            let fixed = fixed_points(&row.params)?;
            plots::wigner_map(&dir.join(format!("{stem}.svg")), grid, &fixed, &point_title(&row.params))?;
        }
    }
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    for r in rows.iter().filter(|r| r.outcome.is_err()) {
        eprintln!("h = {}, F = {}: {}", r.params.h(), r.params.field(), r.outcome.as_ref().unwrap_err());
    }
    if failed > 0 {
        return Err(CliError::SweepPointsFailed { failed, total: rows.len() });
    }
    Ok(())
}

/// Wigner map of a single `(h, F)` point with the mean-field fixed points.
pub fn run_wigner(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.single_point()?;
    let opts = cfg.solver.options()?;
    cfg.check_wigner()?;
    let dir = output_dir(cfg)?;
    let ss = solve_point(&params, &opts)?;
    let request = WignerRequest { extent: cfg.wigner.extent, points: cfg.wigner.points };
    let grid = grid_for(&ss.rho, &params, request)?;
    let fixed = fixed_points(&params)?;
    if cfg.outputs.emit_csv {
        let path = dir.join("wigner.csv");
        write_wigner_csv(&path, &grid)?;
        println!("wrote {}", path.display());
    }
    if cfg.outputs.emit_plots {
        let path = dir.join("wigner.svg");
        plots::wigner_map(&path, &grid, &fixed, &point_title(&params))?;
        println!("wrote {}", path.display());
    }
    println!("normalization {:.6}", grid.normalization());
    for lobe in find_lobes(&grid) {
        println!("lobe at {:+.4} {:+.4}i, W = {:.6}", lobe.z.re, lobe.z.im, lobe.value);
    }
    for fp in &fixed {
        println!("fixed point {:+.6} {:+.6}i ({})", fp.amplitude.re, fp.amplitude.im, fp.stability);
    }
    Ok(())
}

pub const CLASSICAL_COLUMNS: [&str; 13] = [
    "h",
    "F",
    "g",
    "beta",
    "fixed_point_count",
    "index",
    "amplitude_re",
    "amplitude_im",
    "stability",
    "eig1_re",
    "eig1_im",
    "eig2_re",
    "eig2_im",
];

fn classical_records(p: &ModelParams, fixed: &[ClassicalFixedPoint]) -> Vec<Vec<String>> {
    fixed
        .iter()
        .enumerate()
        .map(|(k, fp)| {
            vec![
                num(p.h()),
                num(p.field()),
                num(p.g()),
                num(p.beta()),
                fixed.len().to_string(),
                k.to_string(),
                num(fp.amplitude.re),
                num(fp.amplitude.im),
                fp.stability.to_string(),
                num(fp.jacobian_eigs[0].re),
                num(fp.jacobian_eigs[0].im),
                num(fp.jacobian_eigs[1].re),
                num(fp.jacobian_eigs[1].im),
            ]
        })
        .collect()
}

/// Mean-field fixed points at every configured point.
pub fn run_classical(cfg: &RunConfig) -> Result<(), CliError> {
    let points = cfg.points()?;
    let dir = output_dir(cfg)?;
    let mut scan = Vec::with_capacity(points.len());
    for p in &points {
        scan.push((*p, fixed_points(p)?));
    }
    if cfg.outputs.emit_csv {
        let path = dir.join("classical.csv");
        write_csv(&path, &CLASSICAL_COLUMNS, scan.iter().flat_map(|(p, f)| classical_records(p, f)))?;
        println!("wrote {}", path.display());
    }
    let hs = unique(points.iter().map(|p| p.h()));
    if cfg.outputs.emit_plots && hs.len() == 1 && points.len() > 1 {
        let path = dir.join("classical.svg");
        let rows: Vec<(f64, Vec<ClassicalFixedPoint>)> = scan.iter().map(|(p, f)| (p.field(), f.clone())).collect();
        plots::fixed_point_scan(&path, &rows)?;
        println!("wrote {}", path.display());
    }
    for h in hs {
        let p = points.iter().find(|p| p.h() == h).expect("point with this pump");
        match saddle_node_field(p) {
            Some(f) => println!("h = {h}: three fixed points for |F| < {f:.6}"),
            None => println!("h = {h}: a single fixed point for every F"),
        }
    }
    Ok(())
}

/// Outcome of one validation check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Check {
    check(name, false, err.to_string())
}

/// Size of the solver cross-check problem.
pub const CROSS_CHECK_N_MAX: usize = 12;

fn trace_preservation(p: &ModelParams) -> Check {
    let l = build_liouvillian(p);
    let worst = l.trace_functional().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let bound = 1e-12 * l.max_abs();
    check("trace preservation", worst <= bound, format!("max |1^T L| = {worst:.1e} (bound {bound:.1e})"))
}

fn solver_cross_check(p: &ModelParams, opts: &SolverOptions) -> Check {
    let name = format!("solver cross-check at n_max = {CROSS_CHECK_N_MAX}");
    let small = match p.with_n_max(CROSS_CHECK_N_MAX) {
        Ok(s) => s,
        Err(e) => return failed(name, e),
    };
    let l = build_liouvillian(&small);
    let mut states = Vec::new();
    for method in [SolverMethod::DenseEigen, SolverMethod::ShiftInvert, SolverMethod::TimeEvolution] {
        match opo_core::steady::steady_state(&l, &opts.with_method(method)) {
            Ok(ss) => states.push(ss.rho),
            Err(e) => return failed(name, format!("{}: {e}", method.as_str())),
        }
    }
    let d1 = states[0].max_abs_diff(&states[1]).unwrap_or(f64::INFINITY);
    let d2 = states[0].max_abs_diff(&states[2]).unwrap_or(f64::INFINITY);
    check(name, d1 <= 1e-8 && d2 <= 1e-7, format!("dense vs shift-invert {d1:.1e}, dense vs time evolution {d2:.1e}"))
}

fn vacuum_closed_forms(p: &ModelParams, opts: &SolverOptions) -> Check {
    let name = "vacuum closed forms";
    let vac = match ModelParams::new(0.0, p.g(), p.beta(), 0.0, CROSS_CHECK_N_MAX) {
        Ok(v) => v,
        Err(e) => return failed(name, e),
    };
    let rho = match solve_point(&vac, opts) {
        Ok(ss) => ss.rho,
        Err(e) => return failed(name, e),
    };
    let err = rho.max_abs_diff(&DensityMatrix::vacuum(CROSS_CHECK_N_MAX)).unwrap_or(f64::INFINITY);
    let w0 = wigner_point(&rho, C64::new(0.0, 0.0)) - 2.0 / PI;
    let metric = match analyze(&rho) {
        Ok(m) => m.delta_hs.abs().max(m.s_entropy.abs()).max(m.q_photon.abs()),
        Err(e) => return failed(name, e),
    };
    check(
        name,
        err <= 1e-10 && w0.abs() <= 1e-10 && metric <= 1e-10,
        format!("max|rho - |0><0|| = {err:.1e}, W(0) - 2/pi = {w0:.1e}, max metric = {metric:.1e}"),
    )
}

/// The mean-field photon number `|A|^2` has to sit below the levels
/// inspected by the tail check.
///
/// Needed on top of the tail mass: with very few levels the two-photon
/// pump drops out of the truncated generator and the state stays at vacuum
/// with no tail at all.
fn truncation_headroom(p: &ModelParams, opts: &SolverOptions, label: &str) -> Check {
    let photons = p.classical_amplitude().powi(2);
    let band = opts.tail_band.min(p.n_max() - 1);
    let room = (p.n_max() - band) as f64;
    check(
        format!("truncation headroom at {label}"),
        photons < room,
        format!("mean-field photon number {photons:.3} against {room} levels below the tail band"),
    )
}

fn configured_point(p: &ModelParams, opts: &SolverOptions) -> Vec<Check> {
    let label = format!("h = {}, F = {}, n_max = {}", p.h(), p.field(), p.n_max());
    let headroom = truncation_headroom(p, opts, &label);
    let ss = match solve_point(p, opts) {
        Ok(ss) => ss,
        Err(e) => return vec![headroom, failed(format!("steady state at {label}"), e)],
    };
    let rep = ss.rho.report();
    let d = &ss.diagnostics;
    vec![
        headroom,
        check(
            format!("state validity at {label}"),
            rep.is_valid(),
            format!(
                "hermiticity {:.1e}, trace error {:.1e}, min eigenvalue {:.1e}",
                rep.hermiticity, rep.trace_error, rep.min_eigenvalue
            ),
        ),
        check(
            format!("tail mass at {label}"),
            d.tail_ok(),
            format!("{:.2e} in the top {} levels (bound {:.1e})", d.tail_mass, d.tail_band, d.tail_eps),
        ),
    ]
}

/// Runs the invariant suite on the first and last configured points.
pub fn validate_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let points = cfg.points()?;
    let opts = cfg.solver.options()?;
    cfg.check_wigner()?;
    let mut ends = vec![points[0]];
    if points.len() > 1 {
        ends.push(points[points.len() - 1]);
    }
    let mut checks = vec![vacuum_closed_forms(&points[0], &opts)];
    for p in &ends {
        checks.push(trace_preservation(p));
        checks.push(solver_cross_check(p, &opts));
        checks.extend(configured_point(p, &opts));
    }
    Ok(checks)
}

pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let checks = validate_checks(cfg)?;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        n => Err(CliError::ValidationFailed(n)),
    }
}
