//! Direct-summation oracles shared by the integration tests. Everything here
//! is O(N^4) or O(N^2) per point and meant for small grids.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use sqg::field::ScalarField;
use sqg::grid::{Axis, Grid};

/// Signed wavenumbers `-N/2+1 ..= N/2`.
pub fn wavenumbers(n: usize) -> Vec<i64> {
    let h = (n / 2) as i64;
    (-h + 1..=h).collect()
}

/// Full-plane coefficients `c[k] = N^-2 sum_j f(x_j) exp(-i k . x_j)` by
/// direct summation, keyed by signed `(kx, ky)`.
pub fn dft(f: &ScalarField) -> Vec<((i64, i64), Complex64)> {
    let g = f.grid();
    let n = g.n();
    let ks = wavenumbers(n);
    let mut out = Vec::with_capacity(n * n);
    for &kx in &ks {
        for &ky in &ks {
            let mut acc = Complex64::new(0.0, 0.0);
            for iy in 0..n {
                for ix in 0..n {
                    let phase = -2.0 * PI * ((kx * ix as i64 + ky * iy as i64) as f64) / n as f64;
                    acc += f.at(ix, iy) * Complex64::from_polar(1.0, phase);
                }
            }
            out.push(((kx, ky), acc / (n * n) as f64));
        }
    }
    out
}

/// `sum_k c_k exp(i xi_k . p)` at an arbitrary point, real part.
pub fn eval_series(grid: &Grid, coeffs: &[((i64, i64), Complex64)], p: [f64; 2]) -> f64 {
    let k0 = grid.base_wavenumber();
    coeffs
        .iter()
        .map(|&((kx, ky), c)| {
            let phase = k0 * (kx as f64 * p[0] + ky as f64 * p[1]);
            (c * Complex64::from_polar(1.0, phase)).re
        })
        .sum()
}

/// Inverse of [`dft`] onto the grid.
pub fn idft(grid: &Grid, coeffs: &[((i64, i64), Complex64)]) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| eval_series(grid, coeffs, [x, y]))
}

/// Multiplier applied by direct summation.
pub fn apply_direct(f: &ScalarField, m: impl Fn(i64, i64) -> Complex64) -> ScalarField {
    let c: Vec<_> = dft(f).into_iter().map(|(k, c)| (k, c * m(k.0, k.1))).collect();
    idft(f.grid(), &c)
}

/// `R_axis` oracle: `i xi_axis / |xi|`, zero at the origin and where the
/// axis wavenumber is the Nyquist one.
pub fn riesz_direct(f: &ScalarField, axis: Axis) -> ScalarField {
    let nyq = (f.grid().n() / 2) as i64;
    apply_direct(f, |kx, ky| {
        let k = match axis {
            Axis::X => kx,
            Axis::Y => ky,
        };
        if (kx == 0 && ky == 0) || k == nyq {
            return Complex64::new(0.0, 0.0);
        }
        let mag = ((kx * kx + ky * ky) as f64).sqrt();
        Complex64::new(0.0, k as f64 / mag)
    })
}

/// `H^s` norm by direct summation over the full plane.
pub fn sobolev_direct(f: &ScalarField, s: f64) -> f64 {
    let g = f.grid();
    let k0 = g.base_wavenumber();
    let e: f64 = dft(f)
        .iter()
        .map(|&((kx, ky), c)| {
            let xi2 = k0 * k0 * (kx * kx + ky * ky) as f64;
            (1.0 + xi2).powf(s) * c.norm_sqr()
        })
        .sum();
    g.length() * e.sqrt()
}

/// Band-limited test function with integer modes `|kx|, |ky| <= kmax` and
/// deterministic coefficients, evaluated in closed form.
pub fn trig_value(grid: &Grid, kmax: i64, salt: f64, x: f64, y: f64) -> f64 {
    let k0 = grid.base_wavenumber();
    let mut v = 0.0;
    for kx in 0..=kmax {
        for ky in -kmax..=kmax {
            if kx == 0 && ky <= 0 {
                continue;
            }
            let a = ((kx * 7 + ky * 3) as f64 + salt).sin() / (1 + kx * kx + ky * ky) as f64;
            let b = ((kx * 5 - ky * 11) as f64 + 2.0 * salt).cos() / (1 + kx * kx + ky * ky) as f64;
            let ph = k0 * (kx as f64 * x + ky as f64 * y);
            v += a * ph.cos() + b * ph.sin();
        }
    }
    v
}

pub fn trig_field(grid: &Grid, kmax: i64, salt: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| trig_value(grid, kmax, salt, x, y))
}

pub fn rel(a: &ScalarField, b: &ScalarField) -> f64 {
    let d = (a - b).l2_norm();
    let s = b.l2_norm();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

/// Least-squares slope of `log e` against `log h`.
pub fn order(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
