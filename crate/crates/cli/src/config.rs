//! TOML run configuration.
//!
//! ```toml
//! [model]
//! h = { start = 0.0, stop = 2.0, count = 41 }
//! F = 0.0
//! g = 0.5
//! beta = 0.1
//! n_max = 40
//!
//! [solver]
//! method = "auto"
//!
//! [wigner]
//! enabled = true
//! points = 161
//!
//! [outputs]
//! directory = "out"
//!
//! [parallelism]
//! workers = 0
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use opo_core::{ModelParams, SolverMethod, SolverOptions};
use serde::Deserialize;

use crate::error::ConfigError;

/// Upper bound on the number of sweep points.
pub const MAX_SWEEP_POINTS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

/// A scalar or an evenly spaced closed range.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamSpec {
    Value(f64),
    Range(RangeSpec),
}

impl ParamSpec {
    pub fn count(&self) -> usize {
        match self {
            ParamSpec::Value(_) => 1,
            ParamSpec::Range(r) => r.count,
        }
    }

    /// Grid values; the endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        match *self {
            ParamSpec::Value(v) => vec![v],
            ParamSpec::Range(RangeSpec { start, count: 1, .. }) => vec![start],
            ParamSpec::Range(RangeSpec { start, stop, count }) => (0..count)
                .map(|i| {
                    let t = i as f64 / (count - 1) as f64;
                    let v = start * (1.0 - t) + stop * t;
                    // keep a grid through zero free of -0.0 and rounding dust
                    if v.abs() < 1e-14 * start.abs().max(stop.abs()) {
                        0.0
                    } else {
                        v
                    }
                })
                .collect(),
        }
    }

    fn check(&self, name: &str) -> Result<(), ConfigError> {
        match *self {
            ParamSpec::Value(v) if !v.is_finite() => Err(ConfigError::invalid(format!("{name} must be finite"))),
            ParamSpec::Value(_) => Ok(()),
            ParamSpec::Range(RangeSpec { start, stop, count }) => {
                if !start.is_finite() || !stop.is_finite() {
                    return Err(ConfigError::invalid(format!("{name} range must be finite")));
                }
                if count == 0 {
                    return Err(ConfigError::invalid(format!("{name} range needs count >= 1")));
                }
                if start > stop {
                    return Err(ConfigError::invalid(format!("{name} range has start {start} > stop {stop}")));
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub h: ParamSpec,
    #[serde(rename = "F", default = "zero_field")]
    pub field: ParamSpec,
    pub g: f64,
    pub beta: f64,
    pub n_max: usize,
}

fn zero_field() -> ParamSpec {
    ParamSpec::Value(0.0)
}

impl Default for ModelBlock {
    fn default() -> Self {
        Self { h: ParamSpec::Value(1.0), field: zero_field(), g: 0.5, beta: 0.1, n_max: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub method: String,
    pub eigen_tol: f64,
    pub tail_eps: f64,
    pub tail_band: usize,
    pub max_time: f64,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            method: d.method.as_str().to_string(),
            eigen_tol: d.eigen_tol,
            tail_eps: d.tail_eps,
            tail_band: d.tail_band,
            max_time: d.max_time,
        }
    }
}

impl SolverBlock {
    pub fn options(&self) -> Result<SolverOptions, ConfigError> {
        let method: SolverMethod = self.method.parse().map_err(|e| ConfigError::invalid(format!("solver.method: {e}")))?;
        let opts = SolverOptions {
            method,
            eigen_tol: self.eigen_tol,
            tail_eps: self.tail_eps,
            tail_band: self.tail_band,
            max_time: self.max_time,
        };
        opts.validate().map_err(|e| ConfigError::invalid(format!("solver: {e}")))?;
        Ok(opts)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerBlock {
    pub enabled: bool,
    /// Half-width of the square grid; derived from the mean-field amplitude
    /// when absent.
    pub extent: Option<f64>,
    pub points: usize,
}

impl Default for WignerBlock {
    fn default() -> Self {
        Self { enabled: false, extent: None, points: opo_core::wigner::DEFAULT_POINTS }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsBlock {
    pub directory: PathBuf,
    pub emit_csv: bool,
    pub emit_plots: bool,
}

impl Default for OutputsBlock {
    fn default() -> Self {
        Self { directory: PathBuf::from("opo-out"), emit_csv: true, emit_plots: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParallelismBlock {
    /// Worker threads; 0 picks the number of cores.
    pub workers: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub wigner: WignerBlock,
    #[serde(default)]
    pub outputs: OutputsBlock,
    #[serde(default)]
    pub parallelism: ParallelismBlock,
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub n_max: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.outputs.directory = out.clone();
        }
        if let Some(w) = o.workers {
            self.parallelism.workers = w;
        }
        if let Some(n) = o.n_max {
            self.model.n_max = n;
        }
    }

    pub fn point_count(&self) -> usize {
        self.model.h.count().saturating_mul(self.model.field.count())
    }

    /// Model parameters of every sweep point, `h`-major.
    pub fn points(&self) -> Result<Vec<ModelParams>, ConfigError> {
        self.model.h.check("h")?;
        self.model.field.check("F")?;
        let total = self.point_count();
        if total > MAX_SWEEP_POINTS {
            return Err(ConfigError::invalid(format!("{total} sweep points exceed the limit of {MAX_SWEEP_POINTS}")));
        }
        let fields = self.model.field.values();
        let mut out = Vec::with_capacity(total);
        for h in self.model.h.values() {
            for &f in &fields {
                let p = ModelParams::new(h, self.model.g, self.model.beta, f, self.model.n_max)
                    .map_err(|e| ConfigError::invalid(format!("model: {e}")))?;
                out.push(p);
            }
        }
        Ok(out)
    }

    /// The single point of a `wigner` run.
    pub fn single_point(&self) -> Result<ModelParams, ConfigError> {
        let points = self.points()?;
        match points.as_slice() {
            [p] => Ok(*p),
            _ => Err(ConfigError::invalid(format!("expected a single (h, F) point, found {}", points.len()))),
        }
    }

    pub fn check_wigner(&self) -> Result<(), ConfigError> {
        if self.wigner.points < 16 {
            return Err(ConfigError::invalid(format!("wigner.points must be at least 16, got {}", self.wigner.points)));
        }
        if let Some(e) = self.wigner.extent {
            if !(e > 0.0) || !e.is_finite() {
                return Err(ConfigError::invalid(format!("wigner.extent must be positive, got {e}")));
            }
        }
        Ok(())
    }

    /// Checks every block without running anything.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.points()?;
        self.solver.options()?;
        self.check_wigner()
    }
}
