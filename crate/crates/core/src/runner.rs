//! Drivers for the `simulate`, `check`, `nonuniform` and `scaling`
//! subcommands. Every driver writes only below the configured output
//! directory and returns a printable report.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, Formulation, OutputFormat, RunConfig};
use crate::diffeo::compose_scalar;
use crate::error::{FieldError, LabError, SolverError};
use crate::eulerian::{diagnose, relative_divergence, solve_theta, solve_u, write_diagnostics_csv};
use crate::field::{divergence, gradient, ScalarField};
use crate::geodesic::solve_geodesic;
use crate::grid::{Axis, Grid};
use crate::initial::random_smooth;
use crate::interp::Interpolation;
use crate::nonuniform::{self, run_nonuniform, scaling_check, HumpSpec};
use crate::operators::{riesz, theta_from_u, velocity_from_theta};
use crate::snapshot::{write_displacement, write_field};
use crate::stepper::TimeStepConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ABORT: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver aborted: {0}")]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("cannot write {path}: {message}")]
    Output { path: PathBuf, message: String },
    #[error("{failed} of {total} checks failed")]
    CheckFailed { failed: usize, total: usize },
    #[error("every row of the experiment aborted")]
    NoRows,
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Output { .. } => EXIT_CONFIG,
            RunError::Solver(e) | RunError::Lab(LabError::Solver(e)) => solver_code(e),
            RunError::Lab(_) => EXIT_CONFIG,
            RunError::CheckFailed { .. } => EXIT_CHECK,
            RunError::NoRows => EXIT_ABORT,
        }
    }
}

fn solver_code(e: &SolverError) -> i32 {
    if e.is_abort() {
        EXIT_ABORT
    } else {
        EXIT_CONFIG
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Reads `path` (defaults when absent) and applies `overrides`.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &overrides.out {
        cfg.output.directory = out.clone();
    }
    if let Some(seed) = overrides.seed {
        cfg.rng_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Out {
    dir: PathBuf,
}

impl Out {
    fn new(cfg: &RunConfig) -> Result<Out, RunError> {
        let dir = cfg.output.directory.clone();
        fs::create_dir_all(&dir).map_err(|e| RunError::Output { path: dir.clone(), message: e.to_string() })?;
        Ok(Out { dir })
    }

    fn write(&self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> Result<(), RunError>) -> Result<PathBuf, RunError> {
        let path = self.dir.join(name);
        let fail = |e: &dyn fmt::Display| RunError::Output { path: path.clone(), message: e.to_string() };
        let mut w = BufWriter::new(File::create(&path).map_err(|e| fail(&e))?);
        body(&mut w)?;
        w.flush().map_err(|e| fail(&e))?;
        Ok(path)
    }
}

fn io_err(e: std::io::Error) -> RunError {
    RunError::Output { path: PathBuf::new(), message: e.to_string() }
}

fn field_err(e: FieldError) -> RunError {
    RunError::Output { path: PathBuf::new(), message: e.to_string() }
}

fn grid_of(cfg: &RunConfig) -> Result<Grid, RunError> {
    cfg.grid().map_err(|e| {
        RunError::Config(ConfigError::Invalid { field: "grid".into(), line: None, message: e.to_string() })
    })
}

/// Runs the configured formulation and writes `diagnostics.csv` and
/// `snapshots.sqgf1`. The Lagrangian run reports diagnostics at snapshot
/// times only, from `theta_0 o phi^{-1}`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<String, RunError> {
    let grid = grid_of(cfg)?;
    let theta0 = cfg.initial_theta(&grid)?;
    let ts = cfg.time_step();
    let out = Out::new(cfg)?;
    let mut records: Vec<(String, ScalarField)> = Vec::new();
    let mut disps = Vec::new();
    let diagnostics = match cfg.formulation {
        Formulation::EulerianTheta => {
            let traj = solve_theta(&theta0, &ts)?;
            for s in &traj.snapshots {
                records.push((format!("theta@{:.9}", s.t), s.theta.clone()));
            }
            traj.diagnostics
        }
        Formulation::EulerianU => {
            let traj = solve_u(&velocity_from_theta(&theta0), &ts)?;
            for s in &traj.snapshots {
                records.push((format!("theta@{:.9}", s.t), s.theta.clone()));
                if let Some(u) = &s.u {
                    records.push((format!("u.x@{:.9}", s.t), u.x().clone()));
                    records.push((format!("u.y@{:.9}", s.t), u.y().clone()));
                }
            }
            traj.diagnostics
        }
        Formulation::Lagrangian => {
            let traj = solve_geodesic(&velocity_from_theta(&theta0), &ts)?;
            let mut diags = Vec::new();
            for s in &traj.snapshots {
                let inv = s.state.phi.invert().map_err(|source| SolverError::Diffeo { t: s.t, source })?;
                let theta = compose_scalar(&theta0, &inv, Interpolation::CubicSpline);
                diags.push(diagnose(s.t, &theta, ts.diag_sobolev));
                records.push((format!("theta@{:.9}", s.t), theta));
                disps.push((records.len(), s.state.phi.displacement().clone()));
            }
            diags
        }
    };
    let mut written = Vec::new();
    if cfg.output.wants(OutputFormat::Csv) {
        written.push(out.write("diagnostics.csv", |w| write_diagnostics_csv(w, &diagnostics).map_err(io_err))?);
    }
    if cfg.output.wants(OutputFormat::Sqgf1) {
        written.push(out.write("snapshots.sqgf1", |w| {
            let mut d = disps.iter().peekable();
            for (i, (name, f)) in records.iter().enumerate() {
                write_field(w, name, f).map_err(field_err)?;
                if let Some((_, disp)) = d.next_if(|(after, _)| *after == i + 1) {
                    write_displacement(w, disp).map_err(field_err)?;
                }
            }
            Ok(())
        })?);
    }
    let last = diagnostics.last().expect("initial diagnostics are always recorded");
    let mut report = format!(
        "{} on {}^2, t = {}: l2 {:.6e}, linf {:.6e}, hs {:.6e}, div {:.3e}\n",
        cfg.formulation,
        grid.n(),
        last.t,
        last.l2,
        last.linf,
        last.hs,
        last.div_diag
    );
    for p in written {
        report.push_str(&format!("wrote {}\n", p.display()));
    }
    Ok(report)
}

/// One line of the check table.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.measured <= self.threshold
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
    /// Factor applied to the solver-level thresholds.
    pub tolerance_scale: f64,
}

impl CheckReport {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| !r.passed()).count()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<26} {:>12} {:>12}  result", "check", "measured", "threshold")?;
        for r in &self.rows {
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{:<26} {:>12.3e} {:>12.3e}  {verdict}", r.name, r.measured, r.threshold)?;
        }
        write!(f, "{} of {} checks passed", self.rows.len() - self.failed(), self.rows.len())
    }
}

/// Solver-level thresholds are stated at 128 points per axis and multiplied
/// by `(128 / N)^2` on coarser grids.
pub fn tolerance_scale(n: usize) -> f64 {
    (128.0 / n as f64).powi(2).max(1.0)
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a
    } else {
        a / b
    }
}

/// Runs the invariant suites at the configured grid, data and step. Spectral
/// identities use a seeded random field; the solver checks use `theta_0`.
pub fn run_checks(cfg: &RunConfig) -> Result<CheckReport, RunError> {
    let grid = grid_of(cfg)?;
    let scale = tolerance_scale(grid.n());
    let ts = cfg.time_step();
    let mut rows = Vec::new();

    let kmax = (grid.n() / 4 - 1).clamp(1, 8) as u32;
    let f = random_smooth(&grid, cfg.rng_seed, kmax, 1.0);
    let g = random_smooth(&grid, cfg.rng_seed.wrapping_add(1), kmax, 1.0);
    let r1 = riesz(&f, Axis::X);
    let r2 = riesz(&f, Axis::Y);
    let back = &riesz(&r1, Axis::X) + &riesz(&r2, Axis::Y);
    rows.push(CheckRow {
        name: "riesz_inverse",
        measured: ratio((&back + &f).l2_norm(), f.l2_norm()),
        threshold: 1e-12,
    });
    let anti = [Axis::X, Axis::Y]
        .iter()
        .map(|&a| (riesz(&f, a).inner(&g) + f.inner(&riesz(&g, a))).abs())
        .fold(0.0, f64::max);
    rows.push(CheckRow {
        name: "riesz_antisymmetry",
        measured: ratio(anti, f.l2_norm() * g.l2_norm()),
        threshold: 1e-12,
    });
    let div = divergence(&velocity_from_theta(&f)).map_err(field_err)?;
    rows.push(CheckRow {
        name: "velocity_divergence_free",
        measured: ratio(div.l2_norm(), gradient(&f).l2_norm()),
        threshold: 1e-12,
    });

    let theta0 = cfg.initial_theta(&grid)?;
    let u0 = velocity_from_theta(&theta0);
    let by_u = solve_u(&u0, &ts)?;
    let div_ratio = by_u
        .diagnostics
        .iter()
        .map(|d| ratio(d.div_diag, d.u_l2))
        .fold(0.0, f64::max);
    rows.push(CheckRow {
        name: "divergence_conserved",
        measured: div_ratio,
        threshold: 1e-8 * scale,
    });
    let by_theta = solve_theta(&theta0, &ts)?;
    let th = by_theta.final_theta();
    rows.push(CheckRow {
        name: "theta_u_equivalence",
        measured: ratio((th - &theta_from_u(&by_u.final_u())).l2_norm(), th.l2_norm()),
        threshold: 1e-6 * scale,
    });
    let flow = solve_geodesic(&u0, &TimeStepConfig { snapshot_stride: 0, ..ts.clone() })?;
    let lag = flow
        .last()
        .state
        .eulerian_velocity()
        .map_err(|source| SolverError::Diffeo { t: ts.t_end, source })?;
    rows.push(CheckRow {
        name: "eulerian_lagrangian",
        measured: ratio((&lag - &by_theta.final_u()).l2_norm(), u0.l2_norm()),
        threshold: 1e-3 * scale,
    });
    rows.push(CheckRow {
        name: "final_divergence",
        measured: relative_divergence(&by_u.final_u()),
        threshold: 1e-8 * scale,
    });
    Ok(CheckReport { rows, tolerance_scale: scale })
}

/// [`run_checks`] plus `check.csv`; fails with [`RunError::CheckFailed`]
/// after writing when any row fails.
pub fn cmd_check(cfg: &RunConfig) -> Result<CheckReport, RunError> {
    let report = run_checks(cfg)?;
    let out = Out::new(cfg)?;
    if cfg.output.wants(OutputFormat::Csv) {
        out.write("check.csv", |w| {
            writeln!(w, "check,measured,threshold,passed").map_err(io_err)?;
            for r in &report.rows {
                writeln!(w, "{},{:e},{:e},{}", r.name, r.measured, r.threshold, r.passed()).map_err(io_err)?;
            }
            Ok(())
        })?;
    }
    Ok(report)
}

/// Runs the non-uniform dependence experiment of the `[experiment]` table
/// and writes `nonuniform.csv` plus the solution pairs.
pub fn cmd_nonuniform(cfg: &RunConfig) -> Result<String, RunError> {
    let exp = cfg.experiment.as_ref().ok_or_else(|| ConfigError::Invalid {
        field: "experiment".into(),
        line: None,
        message: "missing [experiment] section".into(),
    })?;
    let grid = grid_of(cfg)?;
    let spec = HumpSpec::build(&grid, exp)?;
    let out = Out::new(cfg)?;
    let result = run_nonuniform(&spec, &cfg.time_step())?;
    if cfg.output.wants(OutputFormat::Csv) {
        out.write("nonuniform.csv", |w| nonuniform::write_csv(w, &result.rows).map_err(io_err))?;
    }
    if cfg.output.wants(OutputFormat::Sqgf1) {
        out.write("nonuniform.sqgf1", |w| {
            for r in &result.fields {
                write_field(w, &format!("phi_theta@n={}", r.n), &r.phi_theta).map_err(field_err)?;
                write_field(w, &format!("phi_theta_tilde@n={}", r.n), &r.phi_theta_tilde).map_err(field_err)?;
            }
            Ok(())
        })?;
    }
    let summary = result.summary();
    if summary.rows_ok == 0 {
        return Err(RunError::NoRows);
    }
    let mut report = format!(
        "m = {:.6e}, L = {:.6e}, ||v||_s = {:.6e}\n",
        result.constants.m, result.constants.l_lip, result.probe_norm
    );
    for r in &result.rows {
        report.push_str(&format!(
            "n = {:>3}  r_n {:.4e}  input {:.4e}  output {:.4e}  sep {:.4e}  ratio {:.4e}  {}  ({:.1} s)\n",
            r.n,
            r.r_n,
            r.input_dist,
            r.output_dist,
            r.hump_sep,
            r.ratio,
            if r.status.is_ok() { "ok" } else { "aborted" },
            r.runtime_s
        ));
    }
    report.push_str(&format!(
        "input exact: {}, output floor: {}, ratio increasing: {}, min scaled separation: {:.4}",
        summary.input_exact, summary.output_floor, summary.ratio_increasing, summary.min_sep_scaled
    ));
    Ok(report)
}

/// Evaluates the scaling identity at `[scaling].t` and writes `scaling.csv`.
pub fn cmd_scaling(cfg: &RunConfig) -> Result<String, RunError> {
    let grid = grid_of(cfg)?;
    let theta0 = cfg.initial_theta(&grid)?;
    let out = Out::new(cfg)?;
    let err = scaling_check(&theta0, cfg.scaling.t, &cfg.solver, cfg.scaling.matching)?;
    if cfg.output.wants(OutputFormat::Csv) {
        out.write("scaling.csv", |w| {
            writeln!(w, "t,dt,rel_error").map_err(io_err)?;
            writeln!(w, "{:e},{:e},{:e}", cfg.scaling.t, cfg.solver.dt, err).map_err(io_err)
        })?;
    }
    Ok(format!("scaling identity at T = {}: relative error {:.6e}", cfg.scaling.t, err))
}
