mod common;

use std::f64::consts::PI;

use common::rel;
use sqg::diffeo::DiffeoMap;
use sqg::error::SolverError;
use sqg::eulerian::{solve_theta, solve_u};
use sqg::field::ScalarField;
use sqg::geodesic::{exp_map, flow_at, solve_geodesic, solve_via_flow};
use sqg::grid::Grid;
use sqg::initial::{random_smooth, shear};
use sqg::nonuniform::{scaling_check, StepMatching};
use sqg::operators::{theta_from_u, velocity_from_theta};
use sqg::stepper::TimeStepConfig;

fn grid(n: usize) -> Grid {
    Grid::new(n, 2.0 * PI).unwrap()
}

fn cfg(dt: f64, t_end: f64) -> TimeStepConfig {
    TimeStepConfig { dt, t_end, ..Default::default() }
}

#[test]
fn zero_data_stays_zero() {
    let g = grid(16);
    let z = ScalarField::zeros(&g);
    let traj = solve_theta(&z, &cfg(0.1, 0.5)).unwrap();
    assert!(traj.diagnostics.iter().all(|d| d.l2 == 0.0 && d.linf == 0.0 && d.hs == 0.0));
    assert_eq!(solve_via_flow(&z, 0.5, &cfg(0.1, 0.5)).unwrap().linf_norm(), 0.0);
}

#[test]
fn shear_is_steady_in_both_forms() {
    let g = grid(32);
    let th = shear(&g, 1.0);
    let c = cfg(0.01, 1.0);
    let a = solve_theta(&th, &c).unwrap();
    let first = a.diagnostics[0];
    for d in &a.diagnostics {
        assert!((d.l2 - first.l2).abs() < 1e-10 && (d.linf - first.linf).abs() < 1e-10);
    }
    assert!(rel(a.final_theta(), &th) < 1e-12);
    let b = solve_u(&velocity_from_theta(&th), &c).unwrap();
    assert!(rel(b.final_theta(), &th) < 1e-12);
}

#[test]
fn cfl_violation_aborts() {
    let g = grid(32);
    let th = random_smooth(&g, 1, 4, 5.0);
    match solve_theta(&th, &cfg(0.5, 1.0)) {
        Err(e @ SolverError::Cfl { .. }) => assert!(e.is_abort()),
        other => panic!("expected a CFL abort, got {other:?}"),
    }
}

#[test]
fn runs_are_bit_identical() {
    let g = grid(32);
    let th = random_smooth(&g, 7, 4, 1.0);
    let c = cfg(1.0 / 32.0, 0.25);
    let a = solve_theta(&th, &c).unwrap();
    let b = solve_theta(&th, &c).unwrap();
    assert_eq!(a.final_theta(), b.final_theta());
    let mut x = Vec::new();
    let mut y = Vec::new();
    a.write_csv(&mut x).unwrap();
    b.write_csv(&mut y).unwrap();
    assert_eq!(x, y);
}

#[test]
fn velocity_form_keeps_divergence_zero_and_matches_transport_form() {
    let g = grid(64);
    let th = random_smooth(&g, 42, 4, 1.0);
    let c = cfg(1.0 / 64.0, 0.25);
    let by_u = solve_u(&velocity_from_theta(&th), &c).unwrap();
    let worst = by_u.diagnostics.iter().map(|d| d.div_diag / d.u_l2).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst:e}");
    let by_theta = solve_theta(&th, &c).unwrap();
    let e = rel(&theta_from_u(&by_u.final_u()), by_theta.final_theta());
    assert!(e < 1e-6, "{e:e}");
}

#[test]
fn norms_are_nearly_conserved() {
    let g = grid(64);
    let th = random_smooth(&g, 3, 3, 1.0);
    let traj = solve_theta(&th, &cfg(1.0 / 64.0, 0.5)).unwrap();
    let (d0, d1) = (traj.diagnostics[0], *traj.diagnostics.last().unwrap());
    assert!((d1.l2 / d0.l2 - 1.0).abs() < 1e-3);
    assert!((d1.linf / d0.linf - 1.0).abs() < 1e-2);
}

#[test]
fn lagrangian_matches_eulerian_on_a_coarse_grid() {
    let g = grid(32);
    let th = random_smooth(&g, 42, 3, 1.0);
    let u0 = velocity_from_theta(&th);
    let c = cfg(1.0 / 32.0, 0.25);
    let flow = solve_geodesic(&u0, &c).unwrap();
    let lag = flow.last().state.eulerian_velocity().unwrap();
    let eul = solve_theta(&th, &c).unwrap().final_u();
    assert!((&lag - &eul).l2_norm() < 1e-3 * u0.l2_norm());
    assert!(flow.max_det_defect < 1e-3);
    let e = rel(&solve_via_flow(&th, 0.25, &c).unwrap(), solve_theta(&th, &c).unwrap().final_theta());
    assert!(e < 1e-3, "{e:e}");
}

#[test]
fn exp_map_basics() {
    let g = grid(32);
    let u0 = velocity_from_theta(&random_smooth(&g, 9, 3, 1.0));
    let c = cfg(1.0 / 16.0, 1.0);
    assert_eq!(exp_map(&u0, 0.0, &c).unwrap(), DiffeoMap::identity(&g));
    // exp(t u0) and phi(t; u0) are the same continuum map.
    let t = 0.25;
    let a = exp_map(&u0, t, &c).unwrap();
    let b = flow_at(&u0, t, &c).unwrap();
    assert!(a.distance(&b) < 1e-6 * g.length());
}

#[test]
fn scaling_identity_edges() {
    let g = grid(32);
    let th = random_smooth(&g, 5, 3, 1.0);
    let c = cfg(1.0 / 32.0, 1.0);
    assert_eq!(scaling_check(&th, 1.0, &c, StepMatching::Size).unwrap(), 0.0);
    assert_eq!(scaling_check(&ScalarField::zeros(&g), 0.5, &c, StepMatching::Size).unwrap(), 0.0);
    assert!(scaling_check(&th, 0.5, &c, StepMatching::Count).unwrap() < 1e-13);
    assert!(scaling_check(&th, 0.0, &c, StepMatching::Size).is_err());
}
