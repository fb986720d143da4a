//! Static SVG figures.

use std::error::Error;
use std::path::Path;

use opo_core::{ClassicalFixedPoint, Stability, WignerGrid};
use plotters::prelude::*;

use crate::error::CliError;

type DrawResult = Result<(), Box<dyn Error>>;

fn finish(path: &Path, r: DrawResult) -> Result<(), CliError> {
    r.map_err(|e| CliError::Plot { path: path.to_path_buf(), message: e.to_string() })
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1e-12) };
    (lo - pad, hi + pad)
}

/// One line per curve on each panel.
pub struct Panel<'a> {
    pub label: &'a str,
    pub curves: Vec<Vec<(f64, f64)>>,
}

const CURVE_COLORS: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

/// Vertically stacked panels sharing the x axis, with an optional dashed
/// vertical marker.
pub fn stacked_panels(path: &Path, x_label: &str, panels: &[Panel], marker: Option<f64>) -> Result<(), CliError> {
    finish(path, draw_panels(path, x_label, panels, marker))
}

fn draw_panels(path: &Path, x_label: &str, panels: &[Panel], marker: Option<f64>) -> DrawResult {
    let root = SVGBackend::new(path, (720, 300 * panels.len() as u32)).into_drawing_area();
    root.fill(&WHITE)?;
    let areas = root.split_evenly((panels.len(), 1));
    for (area, panel) in areas.iter().zip(panels) {
        let xs = padded_range(panel.curves.iter().flatten().map(|p| p.0));
        let ys = padded_range(panel.curves.iter().flatten().map(|p| p.1));
        let mut chart = ChartBuilder::on(area)
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(80)
            .build_cartesian_2d(xs.0..xs.1, ys.0..ys.1)?;
        chart.configure_mesh().x_desc(x_label).y_desc(panel.label).draw()?;
        for (k, curve) in panel.curves.iter().enumerate() {
            let color = CURVE_COLORS[k % CURVE_COLORS.len()];
            let pts: Vec<(f64, f64)> = curve.iter().copied().filter(|p| p.1.is_finite()).collect();
            chart.draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))?;
            chart.draw_series(pts.into_iter().map(|p| Circle::new(p, 2, color.filled())))?;
        }
        if let Some(x) = marker {
            if x >= xs.0 && x <= xs.1 {
                chart.draw_series(DashedLineSeries::new(vec![(x, ys.0), (x, ys.1)], 6, 4, BLACK.into()))?;
            }
        }
    }
    root.present()?;
    Ok(())
}

/// Heat map of `values[i][j]` over `x[j]`, `y[i]` with a log10 color scale.
pub fn log_heatmap(path: &Path, x_label: &str, y_label: &str, title: &str, x: &[f64], y: &[f64], values: &[Vec<f64>]) -> Result<(), CliError> {
    finish(path, draw_log_heatmap(path, x_label, y_label, title, x, y, values))
}

fn cell_edges(axis: &[f64]) -> Vec<f64> {
    if axis.len() == 1 {
        return vec![axis[0] - 0.5, axis[0] + 0.5];
    }
    let mut edges = vec![axis[0] - 0.5 * (axis[1] - axis[0])];
    for w in axis.windows(2) {
        edges.push(0.5 * (w[0] + w[1]));
    }
    let n = axis.len();
    edges.push(axis[n - 1] + 0.5 * (axis[n - 1] - axis[n - 2]));
    edges
}

fn draw_log_heatmap(path: &Path, x_label: &str, y_label: &str, title: &str, x: &[f64], y: &[f64], values: &[Vec<f64>]) -> DrawResult {
    let logs: Vec<Vec<f64>> = values
        .iter()
        .map(|row| row.iter().map(|&v| if v > 0.0 { v.log10() } else { f64::NAN }).collect())
        .collect();
    let (lo, hi) = padded_range(logs.iter().flatten().copied());
    let (xe, ye) = (cell_edges(x), cell_edges(y));
    let root = SVGBackend::new(path, (820, 640)).into_drawing_area();
    root.fill(&WHITE)?;
    let (main, bar) = root.split_horizontally(700);
    let mut chart = ChartBuilder::on(&main)
        .caption(title, ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(xe[0]..xe[xe.len() - 1], ye[0]..ye[ye.len() - 1])?;
    chart.configure_mesh().disable_mesh().x_desc(x_label).y_desc(y_label).draw()?;
    chart.draw_series(logs.iter().enumerate().flat_map(|(i, row)| {
        let (xe, ye) = (&xe, &ye);
        row.iter().enumerate().map(move |(j, &v)| {
            let color = if v.is_finite() { ViridisRGB.get_color_normalized(v, lo, hi) } else { RGBColor(200, 200, 200) };
            Rectangle::new([(xe[j], ye[i]), (xe[j + 1], ye[i + 1])], color.filled())
        })
    }))?;
    let mut scale = ChartBuilder::on(&bar)
        .margin(12)
        .margin_top(40)
        .y_label_area_size(50)
        .x_label_area_size(40)
        .build_cartesian_2d(0.0..1.0, lo..hi)?;
    scale.configure_mesh().disable_mesh().disable_x_axis().y_desc("log10").draw()?;
    let steps = 100;
    scale.draw_series((0..steps).map(|k| {
        let a = lo + (hi - lo) * k as f64 / steps as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / steps as f64;
        Rectangle::new([(0.0, a), (1.0, b)], ViridisRGB.get_color_normalized(a, lo, hi).filled())
    }))?;
    root.present()?;
    Ok(())
}

/// Blue for negative, white at zero, red for positive values.
fn diverging(v: f64, bound: f64) -> RGBColor {
    let t = (v / bound).clamp(-1.0, 1.0);
    let mix = |a: u8, b: u8, s: f64| (a as f64 + (b as f64 - a as f64) * s).round() as u8;
    if t >= 0.0 {
        RGBColor(mix(255, 178, t), mix(255, 24, t), mix(255, 43, t))
    } else {
        RGBColor(mix(255, 33, -t), mix(255, 102, -t), mix(255, 172, -t))
    }
}

/// Wigner colormap with mean-field fixed points overlaid: filled circles
/// for stable points, crosses for saddles, open circles otherwise.
pub fn wigner_map(path: &Path, grid: &WignerGrid, fixed: &[ClassicalFixedPoint], title: &str) -> Result<(), CliError> {
    finish(path, draw_wigner(path, grid, fixed, title))
}

fn draw_wigner(path: &Path, grid: &WignerGrid, fixed: &[ClassicalFixedPoint], title: &str) -> DrawResult {
    let bound = grid.max_value().abs().max(grid.min_value().abs()).max(1e-300);
    let (xe, pe) = (cell_edges(&grid.x_axis), cell_edges(&grid.p_axis));
    let root = SVGBackend::new(path, (700, 700)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(xe[0]..xe[xe.len() - 1], pe[0]..pe[pe.len() - 1])?;
    chart.configure_mesh().disable_mesh().x_desc("Re z").y_desc("Im z").draw()?;
    chart.draw_series(grid.values.iter().enumerate().flat_map(|(i, row)| {
        let (xe, pe) = (&xe, &pe);
        row.iter().enumerate().map(move |(j, &w)| {
            Rectangle::new([(xe[j], pe[i]), (xe[j + 1], pe[i + 1])], diverging(w, bound).filled())
        })
    }))?;
    // mean-field amplitude A relates to the quadrature plane as z = A
    for fp in fixed {
        let at = (fp.amplitude.re, fp.amplitude.im);
        match fp.stability {
            Stability::Stable => {
                chart.draw_series(std::iter::once(Circle::new(at, 7, BLACK.filled())))?;
            }
            Stability::Saddle => {
                chart.draw_series(std::iter::once(Cross::new(at, 7, BLACK.stroke_width(3))))?;
            }
            Stability::Unstable | Stability::Marginal => {
                chart.draw_series(std::iter::once(Circle::new(at, 7, BLACK.stroke_width(2))))?;
            }
        }
    }
    root.present()?;
    Ok(())
}

/// Real parts of the fixed points against `F`, marked by stability.
pub fn fixed_point_scan(path: &Path, rows: &[(f64, Vec<ClassicalFixedPoint>)]) -> Result<(), CliError> {
    finish(path, draw_fixed_points(path, rows))
}

fn draw_fixed_points(path: &Path, rows: &[(f64, Vec<ClassicalFixedPoint>)]) -> DrawResult {
    let xs = padded_range(rows.iter().map(|r| r.0));
    let ys = padded_range(rows.iter().flat_map(|r| r.1.iter().map(|p| p.amplitude.re)));
    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(xs.0..xs.1, ys.0..ys.1)?;
    chart.configure_mesh().x_desc("F").y_desc("Re A").draw()?;
    for (f, points) in rows {
        for p in points {
            let at = (*f, p.amplitude.re);
            match p.stability {
                Stability::Stable => chart.draw_series(std::iter::once(Circle::new(at, 3, CURVE_COLORS[0].filled())))?,
                Stability::Saddle => chart.draw_series(std::iter::once(Cross::new(at, 3, CURVE_COLORS[1].stroke_width(1))))?,
                _ => chart.draw_series(std::iter::once(Circle::new(at, 3, CURVE_COLORS[2].stroke_width(1))))?,
            };
        }
    }
    root.present()?;
    Ok(())
}
