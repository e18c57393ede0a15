//! Geodesic flow on the diffeomorphism group compared with the Eulerian run.

use std::f64::consts::PI;

use sqg::eulerian::solve_theta;
use sqg::geodesic::{solve_geodesic, solve_via_flow};
use sqg::grid::Grid;
use sqg::initial::random_smooth;
use sqg::operators::velocity_from_theta;
use sqg::stepper::TimeStepConfig;

fn main() {
    let cfg = TimeStepConfig { dt: 1.0 / 64.0, t_end: 0.25, ..Default::default() };
    println!("{:>5} {:>14} {:>14} {:>12}", "N", "u gap", "theta gap", "det defect");
    for n in [32, 64, 128] {
        let grid = Grid::new(n, 2.0 * PI).unwrap();
        let theta0 = random_smooth(&grid, 42, 4, 1.0);
        let u0 = velocity_from_theta(&theta0);
        let flow = solve_geodesic(&u0, &cfg).unwrap();
        let eul = solve_theta(&theta0, &cfg).unwrap();
        let u_lag = flow.last().state.eulerian_velocity().unwrap();
        let u_gap = (&u_lag - &eul.final_u()).l2_norm() / u0.l2_norm();
        let th = solve_via_flow(&theta0, cfg.t_end, &cfg).unwrap();
        let th_gap = (&th - eul.final_theta()).l2_norm() / theta0.l2_norm();
        println!("{n:>5} {u_gap:>14.3e} {th_gap:>14.3e} {:>12.3e}", flow.max_det_defect);
    }
}
