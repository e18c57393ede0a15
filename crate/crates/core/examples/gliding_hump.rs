//! A small gliding-hump run on 128^2. The probe is scaled so the smallest
//! hump spans four grid spacings; the flows this needs are strong enough that
//! the rows usually abort, and the CSV records why. The reference experiment
//! lives in `configs/nonuniform_reference.toml` and runs through `sqg`.

use sqg::grid::Grid;
use sqg::nonuniform::{run_nonuniform, write_csv, BumpSpec, ExperimentConfig, HumpSpec};
use sqg::stepper::TimeStepConfig;

fn main() {
    let grid = Grid::new(128, 32.0).unwrap();
    let cfg = ExperimentConfig {
        base: vec![BumpSpec { center: [21.0, 20.0], radius: 2.5, amplitude: 0.25 }],
        probe: vec![BumpSpec { center: [12.0, 12.0], radius: 3.0, amplitude: 0.2 }],
        n_list: vec![1, 2],
        probe_target: Some(1.05),
        ..ExperimentConfig::reference()
    };
    let spec = HumpSpec::build(&grid, &cfg).unwrap();
    let ts = TimeStepConfig { dt: 1.0 / 16.0, cfl_safety: 1.0, ..Default::default() };
    let exp = run_nonuniform(&spec, &ts).unwrap();
    println!("m = {:.4e}, L = {:.4}, ||v||_s = {:.4e}", exp.constants.m, exp.constants.l_lip, exp.probe_norm);
    let mut out = std::io::stdout();
    write_csv(&mut out, &exp.rows).unwrap();
    println!("{:?}", exp.summary());
}
