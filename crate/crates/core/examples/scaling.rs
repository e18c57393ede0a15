//! The scaling identity `Phi_T(theta) = Phi(T theta) / T` and its time order.

use std::f64::consts::PI;

use sqg::grid::Grid;
use sqg::initial::random_smooth;
use sqg::nonuniform::{scaling_check, StepMatching};
use sqg::stepper::TimeStepConfig;

fn main() {
    let grid = Grid::new(64, 2.0 * PI).unwrap();
    let theta0 = random_smooth(&grid, 42, 4, 1.0);
    println!("{:>8} {:>14} {:>14}", "dt", "same size", "same count");
    for dt in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
        let cfg = TimeStepConfig { dt, cfl_safety: 1.0, ..Default::default() };
        let size = scaling_check(&theta0, 0.5, &cfg, StepMatching::Size).unwrap();
        let count = scaling_check(&theta0, 0.5, &cfg, StepMatching::Count).unwrap();
        println!("{dt:>8.5} {size:>14.3e} {count:>14.3e}");
    }
}
