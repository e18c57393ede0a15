//! Run configuration, read from TOML.
//!
//! ```toml
//! rng_seed = 42
//! formulation = "eulerian_theta"
//!
//! [grid]
//! n = 128
//! length = 6.283185307179586
//!
//! [solver]
//! dt = 0.0078125
//! t_end = 0.25
//!
//! [initial]
//! preset = "random_seeded"
//! kmax = 4
//! amplitude = 1.0
//!
//! [output]
//! directory = "out"
//! ```
//!
//! Every section is optional and falls back to the values above. An
//! `[experiment]` table is needed only by the non-uniform dependence run.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::ScalarField;
use crate::grid::Grid;
use crate::initial::{random_smooth, shear};
use crate::nonuniform::{sum_bumps, BumpSpec, ExperimentConfig, HumpSpec, StepMatching};
use crate::stepper::TimeStepConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{}{field}: {message}", .line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        field: String,
        line: Option<usize>,
        message: String,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    #[default]
    EulerianTheta,
    EulerianU,
    Lagrangian,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::EulerianTheta => "eulerian_theta",
            Formulation::EulerianU => "eulerian_u",
            Formulation::Lagrangian => "lagrangian",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 128, length: 2.0 * std::f64::consts::PI }
    }
}

/// Named initial data for `theta_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    Shear { amplitude: f64 },
    /// Seeded by the top-level `rng_seed`.
    RandomSeeded { kmax: u32, amplitude: f64 },
    BumpSum { bumps: Vec<BumpSpec> },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::RandomSeeded { kmax: 4, amplitude: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Sqgf1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Keep a snapshot every this many steps; 0 keeps only the first and last.
    pub snapshot_stride: usize,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("out"),
            snapshot_stride: 0,
            formats: vec![OutputFormat::Csv, OutputFormat::Sqgf1],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    /// Final time `T` of the scaling identity.
    pub t: f64,
    pub matching: StepMatching,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig { t: 0.5, matching: StepMatching::Size }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub rng_seed: u64,
    pub formulation: Formulation,
    pub grid: GridConfig,
    pub solver: TimeStepConfig,
    pub initial: InitialData,
    pub scaling: ScalingConfig,
    pub output: OutputConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rng_seed: 42,
            formulation: Formulation::default(),
            grid: GridConfig::default(),
            solver: TimeStepConfig { dt: 1.0 / 128.0, t_end: 0.25, ..TimeStepConfig::default() },
            initial: InitialData::default(),
            scaling: ScalingConfig::default(),
            output: OutputConfig::default(),
            experiment: None,
        }
    }
}

/// Line of `key` inside `[section]` (top level when empty), 1-based.
fn locate(source: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if key.is_empty() && current == section {
                return Some(i + 1);
            }
            continue;
        }
        if current == section && !key.is_empty() {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

impl RunConfig {
    pub fn from_toml(source: &str) -> Result<RunConfig, ConfigError> {
        let cfg: RunConfig = toml::from_str(source).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate_with_source(Some(source))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::from_toml(&source).map_err(|e| match e {
            ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with_source(None)
    }

    fn validate_with_source(&self, source: Option<&str>) -> Result<(), ConfigError> {
        let bad = |section: &str, key: &str, message: String| {
            let field = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            ConfigError::Invalid {
                line: source.and_then(|s| locate(s, section, key)),
                field,
                message,
            }
        };
        let grid = self.grid().map_err(|e| bad("grid", "n", e.to_string()))?;
        let s = &self.solver;
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            return Err(bad("solver", "dt", format!("must be positive and finite, got {}", s.dt)));
        }
        if !(s.t_end > 0.0 && s.t_end.is_finite()) {
            return Err(bad("solver", "t_end", format!("must be positive and finite, got {}", s.t_end)));
        }
        if !(s.cfl_safety > 0.0 && s.cfl_safety <= 1.0) {
            return Err(bad("solver", "cfl_safety", format!("must lie in (0, 1], got {}", s.cfl_safety)));
        }
        if !s.diag_sobolev.is_finite() {
            return Err(bad("solver", "diag_sobolev", "must be finite".into()));
        }
        match &self.initial {
            InitialData::Zero => {}
            InitialData::Shear { amplitude } => {
                if !amplitude.is_finite() {
                    return Err(bad("initial", "amplitude", format!("must be finite, got {amplitude}")));
                }
            }
            InitialData::RandomSeeded { kmax, amplitude } => {
                if !amplitude.is_finite() {
                    return Err(bad("initial", "amplitude", format!("must be finite, got {amplitude}")));
                }
                if *kmax == 0 || 2 * (*kmax as usize) >= grid.n() / 2 {
                    return Err(bad(
                        "initial",
                        "kmax",
                        format!("must lie in 1..{} for {} points, got {kmax}", grid.n().div_ceil(4), grid.n()),
                    ));
                }
            }
            InitialData::BumpSum { bumps } => {
                sum_bumps(&grid, bumps, false).map_err(|e| bad("initial", "bumps", e.to_string()))?;
            }
        }
        if !(self.scaling.t > 0.0 && self.scaling.t.is_finite()) {
            return Err(bad("scaling", "t", format!("must be positive and finite, got {}", self.scaling.t)));
        }
        if self.output.directory.as_os_str().is_empty() {
            return Err(bad("output", "directory", "must not be empty".into()));
        }
        if let Some(exp) = &self.experiment {
            HumpSpec::build(&grid, exp).map_err(|e| ConfigError::Invalid {
                field: "experiment".into(),
                line: source.and_then(|s| locate(s, "experiment", "")),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, crate::error::FieldError> {
        Grid::new(self.grid.n, self.grid.length)
    }

    /// Solver settings with the output snapshot stride applied.
    pub fn time_step(&self) -> TimeStepConfig {
        TimeStepConfig {
            snapshot_stride: self.output.snapshot_stride,
            ..self.solver.clone()
        }
    }

    /// `theta_0` on `grid`, mean free.
    pub fn initial_theta(&self, grid: &Grid) -> Result<ScalarField, ConfigError> {
        let f = match &self.initial {
            InitialData::Zero => ScalarField::zeros(grid),
            InitialData::Shear { amplitude } => shear(grid, *amplitude),
            InitialData::RandomSeeded { kmax, amplitude } => random_smooth(grid, self.rng_seed, *kmax, *amplitude),
            InitialData::BumpSum { bumps } => sum_bumps(grid, bumps, false).map_err(|e| ConfigError::Invalid {
                field: "initial.bumps".into(),
                line: None,
                message: e.to_string(),
            })?,
        };
        Ok(f.mean_free())
    }
}
