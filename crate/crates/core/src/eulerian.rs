//! Eulerian time integration of the transport form (for `theta`) and the
//! velocity form (for `u`).

use std::io::{self, Write};

use crate::error::SolverError;
use crate::field::{ScalarField, Spectrum, VectorField2};
use crate::grid::Grid;
use crate::operators::{
    b_operator_spectra, div_diagnostic, riesz_spectrum, theta_spectrum, velocity_spectra, Transport,
};
use crate::stepper::{exponential_filter, rk4_step, TimeStepConfig};
use crate::grid::Axis;

/// Per-step diagnostics. The CSV carries `t, l2, linf, hs, div_diag`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    /// `||theta||_{L^2}`.
    pub l2: f64,
    /// `||theta||_inf` over grid samples.
    pub linf: f64,
    /// `||theta||_s` with `s = diag_sobolev`.
    pub hs: f64,
    /// `||R_1 u_1 + R_2 u_2||_{L^2}`.
    pub div_diag: f64,
    /// `||u||_{L^2}`.
    pub u_l2: f64,
}

pub const CSV_HEADER: &str = "t,l2,linf,hs,div_diag";

pub fn write_diagnostics_csv<W: Write>(w: &mut W, rows: &[Diagnostics]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for d in rows {
        writeln!(w, "{:e},{:e},{:e},{:e},{:e}", d.t, d.l2, d.linf, d.hs, d.div_diag)?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub theta: ScalarField,
    pub u: Option<VectorField2>,
}

/// Output of [`solve_theta`] and [`solve_u`]; snapshot times strictly
/// increase from 0.
#[derive(Clone, Debug)]
pub struct EulerianTrajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<Diagnostics>,
}

impl EulerianTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectory holds the initial snapshot")
    }

    pub fn final_theta(&self) -> &ScalarField {
        &self.last().theta
    }

    /// Final velocity; derived from `theta` for the transport form.
    pub fn final_u(&self) -> VectorField2 {
        let last = self.last();
        last.u
            .clone()
            .unwrap_or_else(|| crate::operators::velocity_from_theta(&last.theta))
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_diagnostics_csv(w, &self.diagnostics)
    }
}

fn l2_of(s: &Spectrum) -> f64 {
    s.sobolev_norm(0.0)
}

fn diagnostics(t: f64, theta: &ScalarField, ux: &Spectrum, uy: &Spectrum, s: f64) -> Diagnostics {
    let mut phi = riesz_spectrum(ux, Axis::X);
    phi.axpy(1.0, &riesz_spectrum(uy, Axis::Y));
    Diagnostics {
        t,
        l2: theta.l2_norm(),
        linf: theta.linf_norm(),
        hs: theta.sobolev_norm(s),
        div_diag: l2_of(&phi),
        u_l2: l2_of(ux).hypot(l2_of(uy)),
    }
}

/// Diagnostics of `theta` with its velocity recomputed.
pub fn diagnose(t: f64, theta: &ScalarField, s: f64) -> Diagnostics {
    let (ux, uy) = velocity_spectra(theta.spectrum());
    diagnostics(t, theta, &ux, &uy, s)
}

fn rhs_theta_spectrum(theta: &Spectrum, dealias: bool) -> (Spectrum, f64) {
    let (ux, uy) = velocity_spectra(theta);
    let transport = Transport::new(&ux, &uy, dealias);
    let mut out = transport.apply(theta).scaled(-1.0);
    out.zero_mean();
    (out, transport.max_speed())
}

/// `-(u . grad) theta` with `u = (-R_2 theta, R_1 theta)`.
pub fn rhs_theta(theta: &ScalarField, dealias: bool) -> ScalarField {
    rhs_theta_spectrum(theta.spectrum(), dealias).0.into_field()
}

fn rhs_u_spectra(ux: &Spectrum, uy: &Spectrum, dealias: bool) -> ((Spectrum, Spectrum), f64) {
    let (mut b1, mut b2) = b_operator_spectra(ux, uy, dealias);
    let transport = Transport::new(ux, uy, dealias);
    b1.axpy(-1.0, &transport.apply(ux));
    b2.axpy(-1.0, &transport.apply(uy));
    b1.zero_mean();
    b2.zero_mean();
    ((b1, b2), transport.max_speed())
}

/// `B(u, u) - (u . grad) u`.
pub fn rhs_u(u: &VectorField2, dealias: bool) -> VectorField2 {
    let ((b1, b2), _) = rhs_u_spectra(u.x().spectrum(), u.y().spectrum(), dealias);
    VectorField2::new(b1.into_field(), b2.into_field()).expect("components share a grid")
}

fn check_finite(t: f64, f: &ScalarField) -> Result<(), SolverError> {
    if f.is_finite() {
        Ok(())
    } else {
        Err(SolverError::NonFinite { t })
    }
}

/// Classical RK4 for `theta_t + (u . grad) theta = 0`.
pub fn solve_theta(theta0: &ScalarField, cfg: &TimeStepConfig) -> Result<EulerianTrajectory, SolverError> {
    cfg.validate()?;
    let grid = theta0.grid().clone();
    let (steps, dt) = cfg.steps_for(cfg.t_end);
    let mut state = theta0.spectrum().clone();
    state.zero_mean();
    let record = |t: f64, s: &Spectrum| -> (ScalarField, Diagnostics) {
        let field = s.to_field();
        let (ux, uy) = velocity_spectra(s);
        let d = diagnostics(t, &field, &ux, &uy, cfg.diag_sobolev);
        (field, d)
    };
    let (f0, d0) = record(0.0, &state);
    let mut traj = EulerianTrajectory {
        snapshots: vec![Snapshot { t: 0.0, theta: f0, u: None }],
        diagnostics: vec![d0],
    };
    for step in 1..=steps {
        let t_prev = (step - 1) as f64 * dt;
        let mut first_stage = true;
        let mut next = rk4_step(&state, dt, |y: &Spectrum| {
            let (k, speed) = rhs_theta_spectrum(y, cfg.dealias);
            if first_stage {
                first_stage = false;
                cfg.check_cfl(&grid, t_prev, dt, speed)?;
            }
            Ok::<_, SolverError>(k)
        })?;
        if cfg.filter {
            exponential_filter(&mut next);
        }
        next.zero_mean();
        state = next;
        let t = step as f64 * dt;
        let (field, d) = record(t, &state);
        check_finite(t, &field)?;
        traj.diagnostics.push(d);
        if cfg.keep_snapshot(step, steps) {
            traj.snapshots.push(Snapshot { t, theta: field, u: None });
        }
    }
    Ok(traj)
}

/// Classical RK4 for `u_t + (u . grad) u = B(u, u)`.
pub fn solve_u(u0: &VectorField2, cfg: &TimeStepConfig) -> Result<EulerianTrajectory, SolverError> {
    cfg.validate()?;
    let grid: Grid = u0.grid().clone();
    let (steps, dt) = cfg.steps_for(cfg.t_end);
    let mut state = (u0.x().spectrum().clone(), u0.y().spectrum().clone());
    state.0.zero_mean();
    state.1.zero_mean();
    let record = |t: f64, s: &(Spectrum, Spectrum)| -> (Snapshot, Diagnostics) {
        let theta = theta_spectrum(&s.0, &s.1).into_field();
        let d = diagnostics(t, &theta, &s.0, &s.1, cfg.diag_sobolev);
        let u = VectorField2::new(s.0.to_field(), s.1.to_field()).expect("shared grid");
        (Snapshot { t, theta, u: Some(u) }, d)
    };
    let (s0, d0) = record(0.0, &state);
    let mut traj = EulerianTrajectory {
        snapshots: vec![s0],
        diagnostics: vec![d0],
    };
    for step in 1..=steps {
        let t_prev = (step - 1) as f64 * dt;
        let mut first_stage = true;
        let mut next = rk4_step(&state, dt, |y: &(Spectrum, Spectrum)| {
            let (k, speed) = rhs_u_spectra(&y.0, &y.1, cfg.dealias);
            if first_stage {
                first_stage = false;
                cfg.check_cfl(&grid, t_prev, dt, speed)?;
            }
            Ok::<_, SolverError>(k)
        })?;
        if cfg.filter {
            exponential_filter(&mut next.0);
            exponential_filter(&mut next.1);
        }
        next.0.zero_mean();
        next.1.zero_mean();
        state = next;
        let t = step as f64 * dt;
        let (snap, d) = record(t, &state);
        check_finite(t, &snap.theta)?;
        traj.diagnostics.push(d);
        if cfg.keep_snapshot(step, steps) {
            traj.snapshots.push(snap);
        }
    }
    Ok(traj)
}

/// Relative divergence diagnostic `||Phi||_{L^2} / ||u||_{L^2}` of a field.
pub fn relative_divergence(u: &VectorField2) -> f64 {
    let norm = u.l2_norm();
    if norm == 0.0 {
        0.0
    } else {
        div_diagnostic(u).l2_norm() / norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::shear;
    use std::f64::consts::PI;

    fn cfg(t_end: f64, dt: f64) -> TimeStepConfig {
        TimeStepConfig { dt, t_end, ..Default::default() }
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let z = ScalarField::zeros(&g);
        assert_eq!(rhs_theta(&z, true).linf_norm(), 0.0);
        let traj = solve_theta(&z, &cfg(0.5, 0.1)).unwrap();
        assert_eq!(traj.final_theta().linf_norm(), 0.0);
        let traj = solve_u(&VectorField2::zeros(&g), &cfg(0.5, 0.1)).unwrap();
        assert_eq!(traj.final_u().linf_norm(), 0.0);
        assert_eq!(rhs_u(&VectorField2::zeros(&g), true).linf_norm(), 0.0);
    }

    #[test]
    fn shear_is_steady() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let th = shear(&g, 1.0);
        assert!(rhs_theta(&th, true).linf_norm() < 1e-14);
        let traj = solve_theta(&th, &cfg(1.0, 0.05)).unwrap();
        assert!((traj.final_theta() - &th).linf_norm() < 1e-13);
        let u0 = crate::operators::velocity_from_theta(&th);
        assert!(rhs_u(&u0, true).l2_norm() < 1e-12);
        let traj = solve_u(&u0, &cfg(1.0, 0.05)).unwrap();
        assert!((&traj.final_u() - &u0).linf_norm() < 1e-12);
    }

    #[test]
    fn cfl_violation_aborts() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let th = crate::initial::random_smooth(&g, 1, 3, 1.0);
        let err = solve_theta(&th, &cfg(1.0, 0.5)).unwrap_err();
        assert!(matches!(err, SolverError::Cfl { .. }));
        assert!(err.is_abort());
    }

    #[test]
    fn snapshot_times_increase() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let th = crate::initial::random_smooth(&g, 2, 2, 0.1);
        let c = TimeStepConfig { snapshot_stride: 2, ..cfg(0.5, 0.05) };
        let traj = solve_theta(&th, &c).unwrap();
        let times = traj.times();
        assert_eq!(times[0], 0.0);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(times.len(), 6);
        assert_eq!(traj.diagnostics.len(), 11);
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,l2,linf,hs,div_diag\n"));
        assert_eq!(text.lines().count(), 12);
    }
}
