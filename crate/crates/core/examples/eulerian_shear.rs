//! Eulerian theta-form and u-form runs: a steady shear and random data.

use std::f64::consts::PI;

use sqg::eulerian::{solve_theta, solve_u};
use sqg::grid::Grid;
use sqg::initial::{random_smooth, shear};
use sqg::operators::{theta_from_u, velocity_from_theta};
use sqg::stepper::TimeStepConfig;

fn main() {
    let grid = Grid::new(64, 2.0 * PI).unwrap();
    let cfg = TimeStepConfig { dt: 1.0 / 64.0, t_end: 0.5, snapshot_stride: 8, ..Default::default() };

    let steady = shear(&grid, 1.0);
    let run = solve_theta(&steady, &cfg).unwrap();
    let drift = (run.final_theta() - &steady).linf_norm();
    println!("shear: sup change after t = {} is {drift:.3e}", cfg.t_end);

    let theta0 = random_smooth(&grid, 42, 4, 1.0);
    let a = solve_theta(&theta0, &cfg).unwrap();
    let b = solve_u(&velocity_from_theta(&theta0), &cfg).unwrap();
    println!("random data, theta-form diagnostics:");
    println!("{:>8} {:>12} {:>12} {:>12}", "t", "l2", "linf", "hs");
    for d in &a.diagnostics {
        println!("{:>8.4} {:>12.8} {:>12.8} {:>12.6}", d.t, d.l2, d.linf, d.hs);
    }
    let gap = (&theta_from_u(&b.final_u()) - a.final_theta()).l2_norm() / theta0.l2_norm();
    println!("theta-form vs u-form at t = {}: {gap:.3e}", cfg.t_end);
    let div = b.diagnostics.iter().map(|d| d.div_diag / d.u_l2).fold(0.0, f64::max);
    println!("u-form max relative divergence diagnostic: {div:.3e}");
}
