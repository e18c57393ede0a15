//! Named initial-data presets.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{ScalarField, Spectrum};
use crate::grid::Grid;

/// `amplitude * sin(2 pi x_1 / L)`: a steady shear.
pub fn shear(grid: &Grid, amplitude: f64) -> ScalarField {
    let k = grid.base_wavenumber();
    ScalarField::from_fn(grid, |x, _| amplitude * (k * x).sin())
}

/// Seeded band-limited random field.
///
/// Every mode with integer wavevector `0 < |k| <= kmax` gets a complex
/// Gaussian coefficient weighted by `(1 + |k|^2)^-1`; the result is mean free
/// and rescaled so its largest sample is `amplitude`. The stream is ChaCha8
/// seeded from `seed`, consumed in a fixed mode order, so fields are
/// reproducible across platforms.
pub fn random_smooth(grid: &Grid, seed: u64, kmax: u32, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    };
    let n = grid.n();
    let km = kmax as i64;
    assert!(
        2 * km < n as i64 / 2,
        "kmax {kmax} too large for {n} points"
    );
    let mut spec = Spectrum::zeros(grid);
    for kx in 0..=km {
        for ky in -km..=km {
            let r2 = kx * kx + ky * ky;
            if r2 == 0 || r2 > km * km || (kx == 0 && ky < 0) {
                continue;
            }
            let w = 1.0 / (1.0 + r2 as f64);
            let c = Complex64::new(gauss(), gauss()) * w;
            let iy = ky.rem_euclid(n as i64) as usize;
            spec.coeffs_mut()[grid.slot(kx as usize, iy)] = c;
            if kx == 0 {
                let iy_neg = (-ky).rem_euclid(n as i64) as usize;
                spec.coeffs_mut()[grid.slot(0, iy_neg)] = c.conj();
            }
        }
    }
    let f = spec.into_field();
    let peak = f.linf_norm();
    if peak == 0.0 {
        return f;
    }
    let scale = amplitude / peak;
    let mut s = f.spectrum().scaled(scale);
    s.zero_mean();
    s.into_field()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_reproducible_and_band_limited() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let a = random_smooth(&g, 7, 4, 1.0);
        let b = random_smooth(&g, 7, 4, 1.0);
        assert_eq!(a, b);
        assert_ne!(a, random_smooth(&g, 8, 4, 1.0));
        assert!((a.linf_norm() - 1.0).abs() < 1e-12);
        assert!(a.mean().abs() < 1e-14);
        let s = a.spectrum();
        assert!(s.get(5, 0).norm() < 1e-15);
        assert!(s.get(3, 3).norm() < 1e-15);
        assert!(s.get(2, -3).norm() > 0.0);
    }
}
