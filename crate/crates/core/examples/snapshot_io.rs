//! Writes a field and a displacement to SQGF1 and reads them back.

use std::f64::consts::PI;
use std::io::Cursor;

use sqg::diffeo::DiffeoMap;
use sqg::grid::Grid;
use sqg::initial::random_smooth;
use sqg::operators::velocity_from_theta;
use sqg::snapshot::{read_all, read_displacement, write_displacement, write_field};

fn main() {
    let grid = Grid::new(32, 2.0 * PI).unwrap();
    let theta = random_smooth(&grid, 1, 3, 1.0);
    let mut buf = Vec::new();
    write_field(&mut buf, "theta@0", &theta).unwrap();
    write_field(&mut buf, "theta@1", &(&theta * 2.0)).unwrap();
    println!("two records, {} bytes", buf.len());
    for (name, f) in read_all(&mut Cursor::new(&buf), Some(&grid)).unwrap() {
        println!("{name}: N = {}, ||f|| = {:.6}", f.grid().n(), f.l2_norm());
    }

    let phi = DiffeoMap::from_displacement(&velocity_from_theta(&theta) * 0.1);
    let mut buf = Vec::new();
    write_displacement(&mut buf, phi.displacement()).unwrap();
    let back = read_displacement(&mut Cursor::new(&buf), Some(&grid)).unwrap();
    println!("displacement round trip exact: {}", &back == phi.displacement());
}
