//! The exponential map `exp(t u0) = phi(1)` against the flow `phi(t)`.

use std::f64::consts::PI;

use sqg::geodesic::{exp_map, flow_at};
use sqg::grid::Grid;
use sqg::initial::random_smooth;
use sqg::operators::velocity_from_theta;
use sqg::stepper::TimeStepConfig;

fn main() {
    let grid = Grid::new(64, 2.0 * PI).unwrap();
    let u0 = velocity_from_theta(&random_smooth(&grid, 42, 4, 1.0));
    let cfg = TimeStepConfig { dt: 1.0 / 64.0, ..Default::default() };
    // Equal step counts make both maps identical to rounding; halve the step
    // of the re-integration so the comparison sees truncation error.
    let fine = TimeStepConfig { dt: cfg.dt / 2.0, ..cfg.clone() };
    println!("{:>6} {:>14} {:>14} {:>10}", "t", "|exp - flow|", "|exp - id|", "lipschitz");
    for t in [0.0, 0.1, 0.25, 0.5] {
        let phi = exp_map(&u0, t, &cfg).unwrap();
        let flow = flow_at(&u0, t, &fine).unwrap();
        println!(
            "{t:>6.2} {:>14.3e} {:>14.6} {:>10.4}",
            phi.distance(&flow),
            phi.displacement().linf_norm(),
            phi.lipschitz()
        );
    }
    let x = [1.0, 2.0];
    println!("exp(0.5 u0) maps {x:?} to {:?}", exp_map(&u0, 0.5, &cfg).unwrap().apply(x));
}
