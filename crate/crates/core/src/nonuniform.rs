//! Gliding-hump experiment on the data-to-solution map `Phi: theta_0 ->
//! theta(1)`, and the time-scaling identity `Phi_T(theta_0) = Phi(T
//! theta_0) / T`.
//!
//! Two sequences of data are built around a base state `theta_0`:
//!
//! ```text
//! theta^(n)  = theta_0 + w^(n)
//! ttheta^(n) = theta_0 + w^(n) + v / n
//! ```
//!
//! where `w^(n)` is a bump of `H^s` norm `R/2` supported in the ball of radius
//! `r_n = m ||v||_s / (8 n L)` around `x*`. The inputs approach each other
//! like `1/n` while the flows carry the two humps apart by about
//! `m ||v||_s / n`, which keeps the outputs separated.

use std::io::{self, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, SolverError};
use crate::eulerian::solve_theta;
use crate::field::ScalarField;
use crate::geodesic::{exp_map, flow_solution};
use crate::grid::Grid;
use crate::interp::Interpolation;
use crate::operators::velocity_from_theta;
use crate::stepper::TimeStepConfig;

/// Samples with `|f| <= SUPPORT_THRESHOLD * ||f||_inf` count as outside the
/// support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;
/// Smallest resolvable hump radius, in grid spacings.
pub const MIN_HUMP_SPACINGS: f64 = 4.0;
/// Required gap between `supp theta_0` and the largest hump ball.
pub const HUMP_CLEARANCE: f64 = 1.0;
/// Smallest accepted velocity response.
pub const MIN_RESPONSE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
}

fn periodic_offset(a: f64, b: f64, length: f64) -> f64 {
    let d = a - b;
    d - length * (d / length).round()
}

/// `amplitude * exp(1 - 1/(1 - d^2/radius^2))` inside the radius, zero
/// outside, `d` the periodic distance to `center`. No mean removal.
pub fn bump_raw(grid: &Grid, b: &BumpSpec) -> Result<ScalarField, LabError> {
    let min = 2.0 * grid.spacing();
    if !(b.radius > min) {
        return Err(LabError::BumpUnderResolved { radius: b.radius, min });
    }
    let len = grid.length();
    let r2 = b.radius * b.radius;
    Ok(ScalarField::from_fn(grid, |x, y| {
        let dx = periodic_offset(x, b.center[0], len);
        let dy = periodic_offset(y, b.center[1], len);
        let q = (dx * dx + dy * dy) / r2;
        if q < 1.0 {
            b.amplitude * (1.0 - 1.0 / (1.0 - q)).exp()
        } else {
            0.0
        }
    }))
}

/// [`bump_raw`] with its mean removed. Removing the mean spreads a constant
/// over the box, which is reported as a warning.
pub fn bump(grid: &Grid, b: &BumpSpec) -> Result<ScalarField, LabError> {
    let raw = bump_raw(grid, b)?;
    let mean = raw.mean();
    if mean.abs() > SUPPORT_THRESHOLD * b.amplitude.abs() {
        log::warn!(
            "mean removal leaks {mean:.3e} outside the bump at ({}, {})",
            b.center[0],
            b.center[1]
        );
    }
    Ok(raw.mean_free())
}

pub fn sum_bumps(grid: &Grid, bumps: &[BumpSpec], raw: bool) -> Result<ScalarField, LabError> {
    let mut acc = ScalarField::zeros(grid);
    for b in bumps {
        let f = if raw { bump_raw(grid, b)? } else { bump(grid, b)? };
        acc = &acc + &f;
    }
    Ok(acc)
}

/// Grid points where `|f|` exceeds the support threshold.
pub fn support_points(f: &ScalarField) -> Vec<[f64; 2]> {
    let peak = f.linf_norm();
    if peak == 0.0 {
        return Vec::new();
    }
    let n = f.grid().n();
    f.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > SUPPORT_THRESHOLD * peak)
        .map(|(i, _)| f.grid().point(i % n, i / n))
        .collect()
}

/// Periodic distance from `p` to the support of `f`; infinite for `f = 0`.
pub fn distance_to_support(f: &ScalarField, p: [f64; 2]) -> f64 {
    let len = f.grid().length();
    support_points(f)
        .iter()
        .map(|q| periodic_offset(q[0], p[0], len).hypot(periodic_offset(q[1], p[1], len)))
        .fold(f64::INFINITY, f64::min)
}

/// Experiment parameters as read from a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// The point `x*` the humps shrink to.
    pub center: [f64; 2],
    /// Bumps summed into `theta_0`.
    pub base: Vec<BumpSpec>,
    /// Bumps summed into the probe `v`.
    pub probe: Vec<BumpSpec>,
    /// Ball radius `R`.
    pub ball_radius: f64,
    pub sobolev: f64,
    pub n_list: Vec<u32>,
    /// When set, `v` is rescaled so the smallest hump radius is this many
    /// times the minimum of four grid spacings.
    pub probe_target: Option<f64>,
    /// Fraction of the CFL limit used as time step for each flow.
    pub dt_margin: f64,
    /// Restrict every `H^s` sum to the dealias band.
    pub mask_norms: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::reference()
    }
}

impl ExperimentConfig {
    /// Reference geometry on the 32-box: a base vortex up and right of `x*`
    /// and a probe down and left of it.
    pub fn reference() -> ExperimentConfig {
        ExperimentConfig {
            center: [16.0, 16.0],
            base: vec![BumpSpec { center: [21.0, 20.0], radius: 1.5, amplitude: 0.25 }],
            probe: vec![BumpSpec { center: [12.8, 12.8], radius: 3.0, amplitude: 1.0 }],
            ball_radius: 0.1,
            sobolev: 2.5,
            n_list: vec![1, 2, 4, 8],
            probe_target: Some(1.05),
            dt_margin: 0.8,
            mask_norms: true,
        }
    }

    /// Grid of the reference experiment.
    pub fn reference_grid() -> Grid {
        Grid::new(512, 32.0).expect("valid reference grid")
    }

    /// Solver settings of the reference experiment. `dt` is an upper bound;
    /// each flow takes `dt_margin` of its own CFL limit when that is smaller.
    pub fn reference_time_step() -> TimeStepConfig {
        TimeStepConfig { dt: 1.0 / 32.0, cfl_safety: 1.0, ..Default::default() }
    }
}

/// Validated experiment geometry with its fields.
#[derive(Clone, Debug)]
pub struct HumpSpec {
    pub grid: Grid,
    pub center: [f64; 2],
    pub base_theta: ScalarField,
    pub probe: ScalarField,
    /// Raw rasterizations used for the support geometry.
    pub base_raw: ScalarField,
    pub probe_raw: ScalarField,
    pub ball_radius: f64,
    pub sobolev: f64,
    pub n_list: Vec<u32>,
    pub probe_target: Option<f64>,
    pub dt_margin: f64,
    pub mask_norms: bool,
}

impl HumpSpec {
    pub fn build(grid: &Grid, cfg: &ExperimentConfig) -> Result<HumpSpec, LabError> {
        let spec = HumpSpec {
            grid: grid.clone(),
            center: cfg.center,
            base_theta: sum_bumps(grid, &cfg.base, false)?,
            probe: sum_bumps(grid, &cfg.probe, false)?,
            base_raw: sum_bumps(grid, &cfg.base, true)?,
            probe_raw: sum_bumps(grid, &cfg.probe, true)?,
            ball_radius: cfg.ball_radius,
            sobolev: cfg.sobolev,
            n_list: cfg.n_list.clone(),
            probe_target: cfg.probe_target,
            dt_margin: cfg.dt_margin,
            mask_norms: cfg.mask_norms,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let geo = |m: String| Err(LabError::Geometry(m));
        if !(self.sobolev > 2.0) {
            return geo(format!("Sobolev index must exceed 2, got {}", self.sobolev));
        }
        if !(self.ball_radius > 0.0 && self.ball_radius.is_finite()) {
            return geo(format!("ball radius must be positive, got {}", self.ball_radius));
        }
        if self.n_list.is_empty() || self.n_list[0] == 0 || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return geo(format!("n_list must be positive and strictly increasing, got {:?}", self.n_list));
        }
        if !(self.dt_margin > 0.0 && self.dt_margin <= 1.0) {
            return geo(format!("dt_margin must lie in (0, 1], got {}", self.dt_margin));
        }
        if let Some(t) = self.probe_target {
            if !(t >= 1.0 && t.is_finite()) {
                return geo(format!("probe_target must be >= 1, got {t}"));
            }
        }
        let len = self.grid.length();
        if self.center.iter().any(|c| !(0.0..len).contains(c)) {
            return geo(format!("center {:?} lies outside the box", self.center));
        }
        let dist = self.base_distance();
        if dist < 2.0 {
            return geo(format!("dist(x*, supp theta_0) = {dist:.4} is below 2"));
        }
        for p in support_points(&self.probe_raw) {
            let dx = periodic_offset(p[0], self.center[0], len);
            let dy = periodic_offset(p[1], self.center[1], len);
            if !(dx < 0.0 && dy < 0.0) {
                return geo(format!(
                    "probe support point ({:.4}, {:.4}) is not left-down of x*",
                    p[0], p[1]
                ));
            }
        }
        Ok(())
    }

    /// `dist(x*, supp theta_0)` on the raw rasterization.
    pub fn base_distance(&self) -> f64 {
        distance_to_support(&self.base_raw, self.center)
    }

    /// Largest admissible hump radius.
    pub fn max_hump_radius(&self) -> f64 {
        self.base_distance() - HUMP_CLEARANCE
    }

    pub fn min_hump_radius(&self) -> f64 {
        MIN_HUMP_SPACINGS * self.grid.spacing()
    }

    pub fn norm(&self, f: &ScalarField) -> f64 {
        if self.mask_norms {
            f.sobolev_norm_masked(self.sobolev)
        } else {
            f.sobolev_norm(self.sobolev)
        }
    }

    pub fn probe_norm(&self) -> f64 {
        self.norm(&self.probe)
    }

    /// Copy with the probe scaled by `factor`.
    pub fn with_probe_scaled(&self, factor: f64) -> HumpSpec {
        HumpSpec {
            probe: &self.probe * factor,
            probe_raw: &self.probe_raw * factor,
            ..self.clone()
        }
    }

    /// Time step for one flow: the configured step capped by `dt_margin`
    /// times the CFL limit of the data's initial velocity.
    pub fn flow_config(&self, theta: &ScalarField, cfg: &TimeStepConfig) -> TimeStepConfig {
        let speed = velocity_from_theta(theta).linf_norm();
        let capped = cfg.with_cfl_dt(&self.grid, speed, self.dt_margin);
        TimeStepConfig {
            dt: capped.dt.min(cfg.dt),
            t_end: 1.0,
            snapshot_stride: 0,
            ..cfg.clone()
        }
    }

    /// `exp~(theta) = exp(u(theta))` and its value at `x*`.
    fn exp_tilde(&self, theta: &ScalarField, cfg: &TimeStepConfig) -> Result<crate::diffeo::DiffeoMap, SolverError> {
        let c = self.flow_config(theta, cfg);
        exp_map(&velocity_from_theta(theta), 1.0, &c)
    }
}

/// Measured stand-ins for the constants of the construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasuredConstants {
    /// `|d exp~(v)(x*)| / ||v||_s`.
    pub m: f64,
    /// Largest operator norm of `d exp~(theta_0)`.
    pub l_lip: f64,
}

/// Central difference of `exp~` in direction `v` at `x*`, step `1e-3 R`, and
/// the Lipschitz constant of `exp~(theta_0)`.
pub fn measure_constants(spec: &HumpSpec, cfg: &TimeStepConfig) -> Result<MeasuredConstants, LabError> {
    let vn = spec.probe_norm();
    if vn == 0.0 {
        return Err(LabError::DegenerateProbe { m: 0.0 });
    }
    let eps = 1e-3 * spec.ball_radius;
    let plus = &spec.base_theta + &(&spec.probe * eps);
    let minus = &spec.base_theta - &(&spec.probe * eps);
    let a = spec.exp_tilde(&plus, cfg)?.apply(spec.center);
    let b = spec.exp_tilde(&minus, cfg)?.apply(spec.center);
    let d = [(a[0] - b[0]) / (2.0 * eps), (a[1] - b[1]) / (2.0 * eps)];
    let m = d[0].hypot(d[1]) / vn;
    if !(m >= MIN_RESPONSE) {
        return Err(LabError::DegenerateProbe { m });
    }
    let l_lip = spec.exp_tilde(&spec.base_theta, cfg)?.lipschitz();
    Ok(MeasuredConstants { m, l_lip })
}

/// `r_n = m ||v||_s / (8 n L)`.
pub fn hump_radius(spec: &HumpSpec, consts: &MeasuredConstants, n: u32) -> f64 {
    consts.m * spec.probe_norm() / (8.0 * n as f64 * consts.l_lip)
}

/// Rescales the probe so the smallest hump radius equals
/// `probe_target * 4 dx`. The response `m` is a derivative, so it does not
/// change with the probe's scale.
pub fn calibrate_probe(spec: &HumpSpec, consts: &MeasuredConstants) -> HumpSpec {
    match spec.probe_target {
        None => spec.clone(),
        Some(target) => {
            let n_max = *spec.n_list.last().expect("validated non-empty");
            let want = target * spec.min_hump_radius();
            spec.with_probe_scaled(want / hump_radius(spec, consts, n_max))
        }
    }
}

/// The pair `(theta^(n), ttheta^(n))` and the hump `w^(n)`.
#[derive(Clone, Debug)]
pub struct SequencePair {
    pub n: u32,
    pub r_n: f64,
    pub hump: ScalarField,
    pub theta: ScalarField,
    pub theta_tilde: ScalarField,
}

pub fn build_sequences(spec: &HumpSpec, consts: &MeasuredConstants, n: u32) -> Result<SequencePair, LabError> {
    let r_n = hump_radius(spec, consts, n);
    let (lo, hi) = (spec.min_hump_radius(), spec.max_hump_radius());
    if !(r_n >= lo) {
        return Err(LabError::Unresolved {
            n,
            r_n,
            problem: format!("below {MIN_HUMP_SPACINGS} grid spacings ({lo:.4e})"),
        });
    }
    if !(r_n <= hi) {
        return Err(LabError::Unresolved {
            n,
            r_n,
            problem: format!("above dist(x*, supp theta_0) - {HUMP_CLEARANCE} ({hi:.4e})"),
        });
    }
    let unit = bump(&spec.grid, &BumpSpec { center: spec.center, radius: r_n, amplitude: 1.0 })?;
    let hump = &unit * (spec.ball_radius / 2.0 / spec.norm(&unit));
    let theta = &spec.base_theta + &hump;
    let theta_tilde = &theta + &(&spec.probe * (1.0 / n as f64));
    Ok(SequencePair { n, r_n, hump, theta, theta_tilde })
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowStatus {
    Ok,
    Aborted(String),
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }

    fn csv(&self) -> String {
        match self {
            RowStatus::Ok => "ok".into(),
            RowStatus::Aborted(msg) => format!("aborted: {}", msg.replace([',', '\n'], ";")),
        }
    }
}

/// One row of the experiment.
#[derive(Clone, Debug)]
pub struct ExperimentRecord {
    pub n: u32,
    pub r_n: f64,
    /// `||ttheta^(n) - theta^(n)||_s`.
    pub input_dist: f64,
    /// `||Phi(theta^(n)) - Phi(ttheta^(n))||_s`.
    pub output_dist: f64,
    /// `|phi^(n)(x*) - tphi^(n)(x*)|`.
    pub hump_sep: f64,
    pub ratio: f64,
    /// `||f + g||_s / (||f||_s + ||g||_s)` for two copies of `w^(n)` whose
    /// centers are `4 r_n` apart.
    pub disjoint_ratio: f64,
    pub status: RowStatus,
    pub runtime_s: f64,
}

pub const CSV_HEADER: &str = "n,r_n,input_dist,output_dist,hump_sep,ratio,status";

/// Writes the rows in ascending `n`. Wall-clock time is left out so reruns
/// are byte-identical.
pub fn write_csv<W: Write>(w: &mut W, rows: &[ExperimentRecord]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    let mut sorted: Vec<&ExperimentRecord> = rows.iter().collect();
    sorted.sort_by_key(|r| r.n);
    for r in sorted {
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e},{:e},{}",
            r.n,
            r.r_n,
            r.input_dist,
            r.output_dist,
            r.hump_sep,
            r.ratio,
            r.status.csv()
        )?;
    }
    Ok(())
}

/// Solutions of one row, kept for snapshots.
#[derive(Clone, Debug)]
pub struct RowFields {
    pub n: u32,
    pub phi_theta: ScalarField,
    pub phi_theta_tilde: ScalarField,
}

/// Full output of [`run_nonuniform`].
#[derive(Clone, Debug)]
pub struct Experiment {
    pub constants: MeasuredConstants,
    pub probe_norm: f64,
    pub spec: HumpSpec,
    pub rows: Vec<ExperimentRecord>,
    pub fields: Vec<RowFields>,
}

/// Measures the constants, calibrates the probe, then runs every `n`. Solver
/// failures are recorded in the row's status and the remaining rows still
/// run.
pub fn run_nonuniform(spec: &HumpSpec, cfg: &TimeStepConfig) -> Result<Experiment, LabError> {
    cfg.validate()?;
    spec.validate()?;
    let pre = measure_constants(spec, cfg)?;
    let spec = calibrate_probe(spec, &pre);
    let constants = if spec.probe_target.is_some() {
        measure_constants(&spec, cfg)?
    } else {
        pre
    };
    for &n in &spec.n_list {
        build_sequences(&spec, &constants, n)?;
    }
    let mut rows = Vec::new();
    let mut fields = Vec::new();
    let mut last_input = f64::INFINITY;
    for &n in &spec.n_list {
        let started = Instant::now();
        let pair = build_sequences(&spec, &constants, n)?;
        let input_dist = spec.norm(&(&pair.theta_tilde - &pair.theta));
        if !(input_dist < last_input) {
            return Err(LabError::Geometry(format!(
                "input distance {input_dist:.6e} at n = {n} does not decrease"
            )));
        }
        last_input = input_dist;
        let disjoint_ratio = hump_pair_ratio(&spec, &pair)?;
        let solved = (|| -> Result<_, SolverError> {
            let a = flow_solution(&pair.theta, 1.0, &spec.flow_config(&pair.theta, cfg), Interpolation::CubicSpline)?;
            let b = flow_solution(
                &pair.theta_tilde,
                1.0,
                &spec.flow_config(&pair.theta_tilde, cfg),
                Interpolation::CubicSpline,
            )?;
            Ok((a, b))
        })();
        let mut row = ExperimentRecord {
            n,
            r_n: pair.r_n,
            input_dist,
            output_dist: f64::NAN,
            hump_sep: f64::NAN,
            ratio: f64::NAN,
            disjoint_ratio,
            status: RowStatus::Ok,
            runtime_s: 0.0,
        };
        match solved {
            Ok((a, b)) => {
                row.output_dist = spec.norm(&(&a.theta - &b.theta));
                let pa = a.phi.apply(spec.center);
                let pb = b.phi.apply(spec.center);
                row.hump_sep = (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
                row.ratio = row.output_dist / input_dist;
                fields.push(RowFields { n, phi_theta: a.theta, phi_theta_tilde: b.theta });
            }
            Err(e) => {
                log::warn!("row n = {n} aborted: {e}");
                row.status = RowStatus::Aborted(e.to_string());
            }
        }
        row.runtime_s = started.elapsed().as_secs_f64();
        rows.push(row);
    }
    Ok(Experiment {
        constants,
        probe_norm: spec.probe_norm(),
        spec,
        rows,
        fields,
    })
}

/// Ratio of [`disjoint_support_norm_check`] for `w^(n)` and a copy moved by
/// `4 r_n` along the diagonal.
fn hump_pair_ratio(spec: &HumpSpec, pair: &SequencePair) -> Result<f64, LabError> {
    let shift = 4.0 * pair.r_n / std::f64::consts::SQRT_2;
    let moved = BumpSpec {
        center: [spec.center[0] + shift, spec.center[1] + shift],
        radius: pair.r_n,
        amplitude: 1.0,
    };
    let here = BumpSpec { center: spec.center, radius: pair.r_n, amplitude: 1.0 };
    disjoint_support_norm_check(&bump_raw(&spec.grid, &here)?, &bump_raw(&spec.grid, &moved)?, spec.sobolev)
}

/// Trend verdicts over the successful rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendSummary {
    /// `input_dist * n` equals `||v||_s` for every row, to `1e-10`.
    pub input_exact: bool,
    /// Every `output_dist >= 0.5 * output_dist(n_min)`.
    pub output_floor: bool,
    /// `output_dist / input_dist` strictly increases with `n`.
    pub ratio_increasing: bool,
    /// Smallest `hump_sep * n / (m ||v||_s)`.
    pub min_sep_scaled: f64,
    pub rows_ok: usize,
}

impl Experiment {
    pub fn summary(&self) -> TrendSummary {
        let ok: Vec<&ExperimentRecord> = self.rows.iter().filter(|r| r.status.is_ok()).collect();
        let vn = self.probe_norm;
        let input_exact = self
            .rows
            .iter()
            .all(|r| ((r.input_dist * r.n as f64 - vn) / vn).abs() <= 1e-10);
        let first = ok.first().map(|r| r.output_dist).unwrap_or(f64::NAN);
        let output_floor = !ok.is_empty() && ok.iter().all(|r| r.output_dist >= 0.5 * first);
        let ratio_increasing = ok.len() >= 2 && ok.windows(2).all(|w| w[1].ratio > w[0].ratio);
        let min_sep_scaled = ok
            .iter()
            .map(|r| r.hump_sep * r.n as f64 / (self.constants.m * vn))
            .fold(f64::INFINITY, f64::min);
        TrendSummary {
            input_exact,
            output_floor,
            ratio_increasing,
            min_sep_scaled,
            rows_ok: ok.len(),
        }
    }
}

/// How the two sides of the scaling identity are discretized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMatching {
    /// Both sides use the configured `dt`; the right side takes `1/T` times
    /// as many steps, so the residual is the integrators' truncation error.
    #[default]
    Size,
    /// Both sides take the same number of steps. RK4 commutes with the
    /// rescaling, so the residual is rounding only.
    Count,
}

/// `||Phi_T(theta_0) - Phi(T theta_0) / T||_{L^2} / ||theta_0||_{L^2}`, left
/// side on `[0, T]` and right side on `[0, 1]`, both Eulerian.
pub fn scaling_check(
    theta0: &ScalarField,
    t: f64,
    cfg: &TimeStepConfig,
    matching: StepMatching,
) -> Result<f64, SolverError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(SolverError::Config(format!("scaling time must be positive, got {t}")));
    }
    let norm = theta0.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let left_cfg = TimeStepConfig { t_end: t, snapshot_stride: 0, ..cfg.clone() };
    let (steps, _) = left_cfg.steps_for(t);
    let right_dt = match matching {
        StepMatching::Size => cfg.dt,
        StepMatching::Count => 1.0 / steps as f64,
    };
    let right_cfg = TimeStepConfig { t_end: 1.0, dt: right_dt, snapshot_stride: 0, ..cfg.clone() };
    let left = solve_theta(theta0, &left_cfg)?;
    // Scaling the spectrum keeps `T = 1` bit-identical to the left side.
    let right = solve_theta(&theta0.spectrum().scaled(t).into_field(), &right_cfg)?;
    let diff = left.final_theta() - &(right.final_theta() * (1.0 / t));
    Ok(diff.l2_norm() / norm)
}

/// `||f + g||_s / (||f||_s + ||g||_s)` for disjointly supported `f`, `g`.
pub fn disjoint_support_norm_check(f: &ScalarField, g: &ScalarField, s: f64) -> Result<f64, LabError> {
    let (fp, gp) = (f.linf_norm(), g.linf_norm());
    let overlap = f
        .values()
        .iter()
        .zip(g.values())
        .any(|(a, b)| a.abs() > SUPPORT_THRESHOLD * fp && b.abs() > SUPPORT_THRESHOLD * gp);
    if fp > 0.0 && gp > 0.0 && overlap {
        return Err(LabError::OverlappingSupports);
    }
    let denom = f.sobolev_norm(s) + g.sobolev_norm(s);
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((f + g).sobolev_norm(s) / denom)
}
