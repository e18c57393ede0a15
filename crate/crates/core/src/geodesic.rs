//! The Lagrangian system
//!
//! ```text
//! phi_t = v,   v_t = B(v o phi^{-1}, v o phi^{-1}) o phi,   phi(0) = id, v(0) = u_0
//! ```
//!
//! its exponential map `u_0 -> phi(1; u_0)`, and the flow-map solution law
//! `theta(T) = theta_0 o phi(T)^{-1}`.

use crate::diffeo::{compose_scalar, compose_vector, DiffeoMap};
use crate::error::{DiffeoError, SolverError};
use crate::field::{ScalarField, VectorField2};
use crate::grid::Grid;
use crate::interp::Interpolation;
use crate::operators::{b_operator_spectra, velocity_from_theta};
use crate::stepper::{rk4_step, TimeStepConfig};

/// State `(phi, v)` of the geodesic system.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub phi: DiffeoMap,
    pub v: VectorField2,
}

impl FlowState {
    pub fn initial(u0: &VectorField2) -> FlowState {
        FlowState {
            phi: DiffeoMap::identity(u0.grid()),
            v: u0.clone(),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.v.grid()
    }

    /// Eulerian velocity `v o phi^{-1}`.
    pub fn eulerian_velocity(&self) -> Result<VectorField2, DiffeoError> {
        let inv = self.phi.invert()?;
        Ok(compose_vector(&self.v, &inv, Interpolation::CubicSpline))
    }

    fn pack(&self) -> Vec<f64> {
        let d = self.phi.displacement();
        [d.x().values(), d.y().values(), self.v.x().values(), self.v.y().values()].concat()
    }

    fn unpack(grid: &Grid, flat: &[f64]) -> FlowState {
        let m = grid.len();
        let field = |k: usize| {
            ScalarField::from_values(grid, flat[k * m..(k + 1) * m].to_vec()).expect("packed state has 4 N^2 entries")
        };
        let pair = |a: usize| VectorField2::new(field(a), field(a + 1)).expect("shared grid");
        FlowState {
            phi: DiffeoMap::from_displacement(pair(0)),
            v: pair(2),
        }
    }
}

fn mean_free(u: VectorField2) -> VectorField2 {
    u.map(|c| c.mean_free())
}

/// Right side with a warm-started inverse; returns the new inverse too.
fn rhs_with_guess(
    state: &FlowState,
    dealias: bool,
    guess: Option<&DiffeoMap>,
) -> Result<(VectorField2, VectorField2, DiffeoMap), DiffeoError> {
    let (inv, _) = state.phi.invert_from(guess)?;
    let u = mean_free(compose_vector(&state.v, &inv, Interpolation::CubicSpline));
    let (b1, b2) = b_operator_spectra(u.x().spectrum(), u.y().spectrum(), dealias);
    let b = mean_free(VectorField2::new(b1.into_field(), b2.into_field()).expect("shared grid"));
    let dv = compose_vector(&b, &state.phi, Interpolation::CubicSpline);
    Ok((state.v.clone(), dv, inv))
}

/// `(d phi/dt, dv/dt) = (v, B(v o phi^{-1}) o phi)`.
pub fn geodesic_rhs(state: &FlowState, dealias: bool) -> Result<(VectorField2, VectorField2), DiffeoError> {
    rhs_with_guess(state, dealias, None).map(|(a, b, _)| (a, b))
}

#[derive(Clone, Debug)]
pub struct FlowSnapshot {
    pub t: f64,
    pub state: FlowState,
}

#[derive(Clone, Debug)]
pub struct FlowTrajectory {
    pub snapshots: Vec<FlowSnapshot>,
    /// `max_t |det(d phi) - 1|` over all steps.
    pub max_det_defect: f64,
}

impl FlowTrajectory {
    pub fn last(&self) -> &FlowSnapshot {
        self.snapshots.last().expect("trajectory holds the initial state")
    }

    pub fn final_phi(&self) -> &DiffeoMap {
        &self.last().state.phi
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

fn max_det_defect(phi: &DiffeoMap) -> f64 {
    phi.jacobian_det().values().iter().fold(0.0, |m, &d| m.max((d - 1.0).abs()))
}

/// RK4 integration of the geodesic system on `[0, cfg.t_end]` from
/// `phi = id, v = u0`. The CFL bound is checked on `||v||_inf`.
pub fn solve_geodesic(u0: &VectorField2, cfg: &TimeStepConfig) -> Result<FlowTrajectory, SolverError> {
    cfg.validate()?;
    let grid = u0.grid().clone();
    let (steps, dt) = cfg.steps_for(cfg.t_end);
    let init = FlowState::initial(&mean_free(u0.clone()));
    let mut flat = init.pack();
    let mut traj = FlowTrajectory {
        snapshots: vec![FlowSnapshot { t: 0.0, state: init }],
        max_det_defect: 0.0,
    };
    let mut guess: Option<DiffeoMap> = None;
    let m = grid.len();
    for step in 1..=steps {
        let t_prev = (step - 1) as f64 * dt;
        let mut stage = 0;
        flat = rk4_step(&flat, dt, |y: &Vec<f64>| {
            let state = FlowState::unpack(&grid, y);
            if stage == 0 {
                cfg.check_cfl(&grid, t_prev, dt, state.v.linf_norm())?;
            }
            stage += 1;
            let (dphi, dv, inv) = rhs_with_guess(&state, cfg.dealias, guess.as_ref())
                .map_err(|source| SolverError::Diffeo { t: t_prev, source })?;
            guess = Some(inv);
            let mut out = Vec::with_capacity(4 * m);
            out.extend_from_slice(dphi.x().values());
            out.extend_from_slice(dphi.y().values());
            out.extend_from_slice(dv.x().values());
            out.extend_from_slice(dv.y().values());
            Ok::<_, SolverError>(out)
        })?;
        let t = step as f64 * dt;
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite { t });
        }
        let state = FlowState::unpack(&grid, &flat);
        state.phi.validate().map_err(|source| SolverError::Diffeo { t, source })?;
        traj.max_det_defect = traj.max_det_defect.max(max_det_defect(&state.phi));
        if cfg.keep_snapshot(step, steps) {
            traj.snapshots.push(FlowSnapshot { t, state });
        }
    }
    Ok(traj)
}

/// `exp(t u0) = phi(1; t u0)`: the geodesic from `t u0` integrated over unit
/// time in `ceil(|t| / cfg.dt)` steps.
pub fn exp_map(u0: &VectorField2, t: f64, cfg: &TimeStepConfig) -> Result<DiffeoMap, SolverError> {
    if t == 0.0 {
        return Ok(DiffeoMap::identity(u0.grid()));
    }
    let scaled = u0 * t;
    let unit = TimeStepConfig {
        dt: cfg.dt / t.abs(),
        t_end: 1.0,
        snapshot_stride: 0,
        ..cfg.clone()
    };
    Ok(solve_geodesic(&scaled, &unit)?.final_phi().clone())
}

/// `phi(t; u0)` by integrating the geodesic from `u0` over `[0, t]`.
pub fn flow_at(u0: &VectorField2, t: f64, cfg: &TimeStepConfig) -> Result<DiffeoMap, SolverError> {
    if t == 0.0 {
        return Ok(DiffeoMap::identity(u0.grid()));
    }
    let span = TimeStepConfig {
        t_end: t,
        snapshot_stride: 0,
        ..cfg.clone()
    };
    Ok(solve_geodesic(u0, &span)?.final_phi().clone())
}

/// Flow-map solution at time `T` and the map that produced it.
#[derive(Clone, Debug)]
pub struct FlowSolution {
    pub theta: ScalarField,
    pub phi: DiffeoMap,
}

/// `theta(T) = theta_0 o exp(T u_0)^{-1}` with `u_0` the velocity of
/// `theta_0`, composing with `kind`.
pub fn flow_solution(
    theta0: &ScalarField,
    t: f64,
    cfg: &TimeStepConfig,
    kind: Interpolation,
) -> Result<FlowSolution, SolverError> {
    let theta0 = theta0.mean_free();
    let u0 = velocity_from_theta(&theta0);
    let phi = exp_map(&u0, t, cfg)?;
    let inv = phi.invert().map_err(|source| SolverError::Diffeo { t, source })?;
    Ok(FlowSolution {
        theta: compose_scalar(&theta0, &inv, kind),
        phi,
    })
}

pub fn solve_via_flow(theta0: &ScalarField, t: f64, cfg: &TimeStepConfig) -> Result<ScalarField, SolverError> {
    flow_solution(theta0, t, cfg, Interpolation::CubicSpline).map(|s| s.theta)
}
