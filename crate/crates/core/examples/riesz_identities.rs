//! Riesz transforms, the SQG velocity and Sobolev norms on a random field.

use std::f64::consts::PI;

use sqg::field::{divergence, gradient};
use sqg::grid::{Axis, Grid};
use sqg::initial::random_smooth;
use sqg::operators::{riesz, theta_from_u, velocity_from_theta};

fn main() {
    let grid = Grid::new(128, 2.0 * PI).unwrap();
    let theta = random_smooth(&grid, 7, 6, 1.0);

    let r1 = riesz(&riesz(&theta, Axis::X), Axis::X);
    let r2 = riesz(&riesz(&theta, Axis::Y), Axis::Y);
    let inverse = (&(&r1 + &r2) + &theta).l2_norm() / theta.l2_norm();
    println!("||R1^2 + R2^2 + I|| / ||theta||  = {inverse:.3e}");

    let u = velocity_from_theta(&theta);
    let div = divergence(&u).unwrap().l2_norm() / gradient(&theta).l2_norm();
    println!("||div u|| / ||grad theta||       = {div:.3e}");
    println!("||u||_L2 / ||theta||_L2           = {:.15}", u.l2_norm() / theta.l2_norm());
    let back = theta_from_u(&u);
    println!("theta from u, relative error      = {:.3e}", (&back - &theta).l2_norm() / theta.l2_norm());

    for s in [0.0, 1.0, 2.5] {
        println!("||theta||_H^{s:<3}                   = {:.6}", theta.sobolev_norm(s));
    }
}
