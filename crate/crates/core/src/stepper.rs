//! Time-step configuration and the classical RK4 step shared by all solvers.

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::field::Spectrum;
use crate::grid::Grid;

/// Floor on the speed used in the CFL bound.
pub const SPEED_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeStepConfig {
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub dealias: bool,
    /// 36th-order exponential spectral filter after every step.
    pub filter: bool,
    /// Keep a snapshot every this many steps; 0 keeps only the first and last.
    /// Configured under `[output]`, so it is not part of this table.
    #[serde(skip)]
    pub snapshot_stride: usize,
    /// Sobolev index of the `hs` diagnostic column.
    pub diag_sobolev: f64,
}

impl Default for TimeStepConfig {
    fn default() -> Self {
        TimeStepConfig {
            dt: 1e-2,
            t_end: 1.0,
            cfl_safety: 0.5,
            dealias: true,
            filter: false,
            snapshot_stride: 0,
            diag_sobolev: 2.5,
        }
    }
}

impl TimeStepConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SolverError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(SolverError::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(SolverError::Config(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.diag_sobolev.is_finite() && self.diag_sobolev >= 0.0) {
            return Err(SolverError::Config(format!(
                "diag_sobolev must be >= 0, got {}",
                self.diag_sobolev
            )));
        }
        Ok(())
    }

    /// Number of steps and the uniform step that land exactly on `span`,
    /// never exceeding `dt`.
    pub fn steps_for(&self, span: f64) -> (usize, f64) {
        let n = ((span / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (n, span / n as f64)
    }

    /// Largest step admitted by the CFL bound for a given speed.
    pub fn cfl_limit(&self, grid: &Grid, max_speed: f64) -> f64 {
        self.cfl_safety * grid.spacing() / max_speed.max(SPEED_FLOOR)
    }

    pub fn check_cfl(&self, grid: &Grid, t: f64, dt: f64, max_speed: f64) -> Result<(), SolverError> {
        let limit = self.cfl_limit(grid, max_speed);
        if dt > limit * (1.0 + 1e-12) {
            return Err(SolverError::Cfl { t, dt, limit });
        }
        Ok(())
    }

    /// Copy with `dt` set to `margin` times the CFL limit for `max_speed`.
    pub fn with_cfl_dt(&self, grid: &Grid, max_speed: f64, margin: f64) -> TimeStepConfig {
        TimeStepConfig {
            dt: margin * self.cfl_limit(grid, max_speed),
            ..self.clone()
        }
    }

    pub(crate) fn keep_snapshot(&self, step: usize, last: usize) -> bool {
        step == 0 || step == last || (self.snapshot_stride > 0 && step.is_multiple_of(self.snapshot_stride))
    }
}

/// State that RK4 can combine linearly.
pub trait Axpy: Clone {
    /// `self += a * other`.
    fn axpy(&mut self, a: f64, other: &Self);
}

impl Axpy for Spectrum {
    fn axpy(&mut self, a: f64, other: &Self) {
        Spectrum::axpy(self, a, other)
    }
}

impl Axpy for Vec<f64> {
    fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.iter_mut().zip(other) {
            *x += a * y;
        }
    }
}

impl<A: Axpy, B: Axpy> Axpy for (A, B) {
    fn axpy(&mut self, a: f64, other: &Self) {
        self.0.axpy(a, &other.0);
        self.1.axpy(a, &other.1);
    }
}

/// One classical RK4 step of `y' = f(y)`.
pub fn rk4_step<S, E>(y: &S, dt: f64, mut f: impl FnMut(&S) -> Result<S, E>) -> Result<S, E>
where
    S: Axpy,
{
    let k1 = f(y)?;
    let mut y2 = y.clone();
    y2.axpy(0.5 * dt, &k1);
    let k2 = f(&y2)?;
    let mut y3 = y.clone();
    y3.axpy(0.5 * dt, &k2);
    let k3 = f(&y3)?;
    let mut y4 = y.clone();
    y4.axpy(dt, &k3);
    let k4 = f(&y4)?;
    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

/// `exp(-36 (|k_x|/k_max)^36) exp(-36 (|k_y|/k_max)^36)` applied in place.
pub fn exponential_filter(s: &mut Spectrum) {
    let grid = s.grid().clone();
    let n = grid.n();
    let kmax = (n / 2) as f64;
    let sigma = |k: i64| (-36.0 * (k.abs() as f64 / kmax).powi(36)).exp();
    for ix in 0..grid.half() {
        for iy in 0..n {
            let f = sigma(ix as i64) * sigma(grid.signed_index(iy));
            s.coeffs_mut()[grid.slot(ix, iy)] *= f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_is_fourth_order_on_linear_decay() {
        let err = |steps: usize| {
            let dt = 1.0 / steps as f64;
            let mut y = vec![1.0];
            for _ in 0..steps {
                y = rk4_step::<_, ()>(&y, dt, |y| Ok(vec![-y[0]])).unwrap();
            }
            (y[0] - (-1f64).exp()).abs()
        };
        let order = (err(10) / err(20)).log2();
        assert!(order > 3.9 && order < 4.1, "order {order}");
    }

    #[test]
    fn steps_land_on_span() {
        let cfg = TimeStepConfig { dt: 0.1, ..Default::default() };
        assert_eq!(cfg.steps_for(1.0).0, 10);
        let (n, dt) = cfg.steps_for(0.25);
        assert_eq!(n, 3);
        assert!((dt * 3.0 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(TimeStepConfig::default().validate().is_ok());
        for bad in [
            TimeStepConfig { dt: 0.0, ..Default::default() },
            TimeStepConfig { t_end: -1.0, ..Default::default() },
            TimeStepConfig { cfl_safety: 1.5, ..Default::default() },
            TimeStepConfig { cfl_safety: 0.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
