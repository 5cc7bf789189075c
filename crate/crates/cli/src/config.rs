//! Run configuration: strict TOML with named range errors, explicit
//! defaults, and an echo form that reparses to the identical run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use nlts_core::field::PhysicalField;
use nlts_core::grid::Grid;
use nlts_core::initial;
use nlts_core::solver::{ModelParams, RunControls, VelocityType};
use nlts_core::TransformPlan;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("io error reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// spatial dimension (1, 2 or 3)
    pub n: usize,
    /// samples per axis
    #[serde(rename = "N")]
    pub points: usize,
    /// box side length
    #[serde(rename = "L")]
    pub length: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum VelocityKind {
    Gradient,
    Perp,
}

impl From<VelocityKind> for VelocityType {
    fn from(v: VelocityKind) -> Self {
        match v {
            VelocityKind::Gradient => VelocityType::Gradient,
            VelocityKind::Perp => VelocityType::Perp,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_velocity")]
    pub velocity_type: VelocityKind,
}

fn default_gamma() -> f64 {
    1.0
}
fn default_velocity() -> VelocityKind {
    VelocityKind::Gradient
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_c_cfl")]
    pub c_cfl: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
}

fn default_t_end() -> f64 {
    1.0
}
fn default_c_cfl() -> f64 {
    0.4
}
fn default_dt_max() -> f64 {
    0.01
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection { t_end: default_t_end(), c_cfl: default_c_cfl(), dt_max: default_dt_max() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StopsSection {
    /// stop when |grad theta|_inf exceeds this multiple of its initial value
    #[serde(default = "default_grad_factor")]
    pub grad_factor: f64,
    /// stop when the pre-dealias product tail share exceeds this
    #[serde(default = "default_tail_threshold")]
    pub tail_threshold: f64,
}

fn default_grad_factor() -> f64 {
    1e3
}
fn default_tail_threshold() -> f64 {
    1e-4
}

impl Default for StopsSection {
    fn default() -> Self {
        StopsSection {
            grad_factor: default_grad_factor(),
            tail_threshold: default_tail_threshold(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_series_path")]
    pub series_path: String,
    #[serde(default = "default_snapshot_dir")]
    pub snapshot_dir: String,
    /// diagnostics cadence in time units
    #[serde(default = "default_series_interval")]
    pub series_interval: f64,
    /// explicit snapshot times; merged with the cadence when both are given
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// uniform snapshot cadence over [0, t_end]
    #[serde(default)]
    pub snapshot_cadence: Option<f64>,
}

fn default_series_path() -> String {
    "series.csv".into()
}
fn default_snapshot_dir() -> String {
    "snapshots".into()
}
fn default_series_interval() -> f64 {
    0.01
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            series_path: default_series_path(),
            snapshot_dir: default_snapshot_dir(),
            series_interval: default_series_interval(),
            snapshot_times: Vec::new(),
            snapshot_cadence: None,
        }
    }
}

/// Initial-data catalog.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    Gaussian { amplitude: f64, sigma: f64, center: Vec<f64> },
    SmoothBump { amplitude: f64, radius: f64, center: Vec<f64> },
    Dipole { amplitude: f64, sigma: f64, center_pos: Vec<f64>, center_neg: Vec<f64> },
    RandomBandlimited { k_cut: usize, amplitude: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    /// post-hoc diagnostic checks to run after the simulation
    #[serde(default)]
    pub run: Vec<String>,
}

impl Default for ChecksSection {
    fn default() -> Self {
        ChecksSection { run: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub model: ModelSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub stops: StopsSection,
    #[serde(default)]
    pub output: OutputSection,
    pub initial: InitialData,
    #[serde(default)]
    pub checks: ChecksSection,
    /// seed for randomized initial data
    #[serde(default)]
    pub seed: u64,
    /// tracer seed positions
    #[serde(default)]
    pub tracers: Vec<Vec<f64>>,
}

impl RunConfig {
    /// Parse strict TOML and validate every range, naming the offending
    /// field in the error.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        Grid::new(self.grid.n, self.grid.points, self.grid.length)
            .map_err(|e| invalid(format!("grid: {e}")))?;
        if !(self.model.alpha > 0.0 && self.model.alpha < 1.0) {
            return Err(invalid(format!("alpha out of (0,1): {}", self.model.alpha)));
        }
        if !(self.model.kappa >= 0.0 && self.model.kappa.is_finite()) {
            return Err(invalid(format!("kappa must be nonnegative: {}", self.model.kappa)));
        }
        if self.model.kappa > 0.0 && !(self.model.gamma > 0.0 && self.model.gamma < 2.0) {
            return Err(invalid(format!("gamma out of (0,2): {}", self.model.gamma)));
        }
        if self.model.velocity_type == VelocityKind::Perp && self.grid.n != 2 {
            return Err(invalid(format!(
                "velocity_type = perp requires n = 2, got n = {}",
                self.grid.n
            )));
        }
        if !(self.time.t_end > 0.0) {
            return Err(invalid(format!("t_end must be positive: {}", self.time.t_end)));
        }
        if !(self.time.c_cfl > 0.0 && self.time.c_cfl <= 1.0) {
            return Err(invalid(format!("c_cfl out of (0,1]: {}", self.time.c_cfl)));
        }
        if !(self.time.dt_max > 0.0) {
            return Err(invalid(format!("dt_max must be positive: {}", self.time.dt_max)));
        }
        if !(self.stops.grad_factor > 0.0) {
            return Err(invalid(format!(
                "grad_factor must be positive: {}",
                self.stops.grad_factor
            )));
        }
        if !(self.stops.tail_threshold > 0.0) {
            return Err(invalid(format!(
                "tail_threshold must be positive: {}",
                self.stops.tail_threshold
            )));
        }
        if !(self.output.series_interval > 0.0) {
            return Err(invalid(format!(
                "series_interval must be positive: {}",
                self.output.series_interval
            )));
        }
        if let Some(c) = self.output.snapshot_cadence {
            if !(c > 0.0) {
                return Err(invalid(format!("snapshot_cadence must be positive: {c}")));
            }
        }
        let expect_center = |name: &str, c: &[f64]| -> Result<(), ConfigError> {
            if c.len() != self.grid.n {
                Err(invalid(format!(
                    "{name} must have {} coordinates, got {}",
                    self.grid.n,
                    c.len()
                )))
            } else {
                Ok(())
            }
        };
        match &self.initial {
            InitialData::Zero => {}
            InitialData::Gaussian { amplitude, sigma, center } => {
                if !(*sigma > 0.0) {
                    return Err(invalid(format!("initial.sigma must be positive: {sigma}")));
                }
                if !amplitude.is_finite() {
                    return Err(invalid("initial.amplitude must be finite"));
                }
                expect_center("initial.center", center)?;
            }
            InitialData::SmoothBump { amplitude, radius, center } => {
                if !(*radius > 0.0) {
                    return Err(invalid(format!("initial.radius must be positive: {radius}")));
                }
                if !amplitude.is_finite() {
                    return Err(invalid("initial.amplitude must be finite"));
                }
                expect_center("initial.center", center)?;
            }
            InitialData::Dipole { sigma, center_pos, center_neg, .. } => {
                if !(*sigma > 0.0) {
                    return Err(invalid(format!("initial.sigma must be positive: {sigma}")));
                }
                expect_center("initial.center_pos", center_pos)?;
                expect_center("initial.center_neg", center_neg)?;
            }
            InitialData::RandomBandlimited { k_cut, .. } => {
                if *k_cut == 0 || *k_cut >= self.grid.points / 2 {
                    return Err(invalid(format!(
                        "initial.k_cut out of [1, N/2): {k_cut}"
                    )));
                }
            }
        }
        for (i, seed) in self.tracers.iter().enumerate() {
            expect_center(&format!("tracers[{i}]"), seed)?;
        }
        Ok(())
    }

    /// The fully-populated echo form; parsing it reproduces this config.
    pub fn echo(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn grid_object(&self) -> Grid {
        Grid::new(self.grid.n, self.grid.points, self.grid.length).expect("validated")
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            alpha: self.model.alpha,
            kappa: self.model.kappa,
            gamma: self.model.gamma,
            velocity: self.model.velocity_type.into(),
        }
    }

    /// Snapshot times: explicit list merged with the cadence lattice.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let mut times = self.output.snapshot_times.clone();
        if let Some(c) = self.output.snapshot_cadence {
            let mut t = 0.0;
            while t <= self.time.t_end + 1e-12 {
                times.push(t);
                t += c;
            }
        }
        times.sort_by(|a, b| a.total_cmp(b));
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        times
    }

    pub fn run_controls(&self) -> RunControls {
        RunControls {
            t_end: self.time.t_end,
            c_cfl: self.time.c_cfl,
            dt_max: self.time.dt_max,
            grad_factor: self.stops.grad_factor,
            tail_threshold: self.stops.tail_threshold,
            series_interval: self.output.series_interval,
            snapshot_times: self.snapshot_times(),
            tracer_seeds: self.tracers.clone(),
            max_steps: 10_000_000,
        }
    }

    /// Build the initial field on the configured grid.
    pub fn initial_field(&self, plan: &TransformPlan) -> PhysicalField {
        let grid = self.grid_object();
        match &self.initial {
            InitialData::Zero => PhysicalField::zeros(grid),
            InitialData::Gaussian { amplitude, sigma, center } => {
                initial::gaussian(grid, *amplitude, *sigma, center)
            }
            InitialData::SmoothBump { amplitude, radius, center } => {
                initial::smooth_bump(grid, *amplitude, *radius, center)
            }
            InitialData::Dipole { amplitude, sigma, center_pos, center_neg } => {
                initial::dipole(grid, *amplitude, *sigma, center_pos, center_neg)
            }
            InitialData::RandomBandlimited { k_cut, amplitude } => {
                initial::random_bandlimited(grid, *k_cut, *amplitude, self.seed, plan)
            }
        }
    }
}
