mod common;

use std::f64::consts::PI;

use common::{dft, eval_series, trig_field};
use proptest::prelude::*;
use sqg::diffeo::{compose_scalar, DiffeoMap, INVERSE_TOL};
use sqg::field::{ScalarField, VectorField2};
use sqg::grid::Grid;
use sqg::interp::{Interpolant, Interpolation};

fn grid(n: usize) -> Grid {
    Grid::new(n, 2.0 * PI).unwrap()
}

/// Smooth near-identity map with displacement amplitude `a`.
fn wobble(g: &Grid, a: f64, p: f64) -> DiffeoMap {
    let dx = ScalarField::from_fn(g, |x, y| a * (y + p).sin() + 0.5 * a * (2.0 * x).cos());
    let dy = ScalarField::from_fn(g, |x, y| a * (x - p).cos() - 0.3 * a * (x + y).sin());
    DiffeoMap::from_displacement(VectorField2::new(dx, dy).unwrap())
}

#[test]
fn spline_composition_matches_direct_series() {
    let g = grid(64);
    let f = trig_field(&g, 4, 0.3);
    let phi = wobble(&g, 0.2, 0.4);
    let coeffs = dft(&f);
    let got = compose_scalar(&f, &phi, Interpolation::CubicSpline);
    let pts = phi.node_images();
    let mut worst = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        worst = worst.max((got.values()[i] - eval_series(&g, &coeffs, *p)).abs());
    }
    // Modes up to |k| = 4 at h = 2 pi / 64 give (kh)^4 / 384 of about 6e-5.
    assert!(worst < 1e-4 * f.linf_norm(), "{worst:e}");
    let exact = compose_scalar(&f, &phi, Interpolation::Trigonometric);
    for (i, p) in pts.iter().enumerate() {
        assert!((exact.values()[i] - eval_series(&g, &coeffs, *p)).abs() < 1e-12);
    }
}

#[test]
fn spline_error_is_fourth_order() {
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for n in [32, 64, 128] {
        let g = grid(n);
        let f = ScalarField::from_fn(&g, |x, y| (x + 2.0 * y).sin() + (3.0 * x).cos());
        let s = Interpolant::new(&f, Interpolation::CubicSpline);
        let mut worst = 0.0f64;
        for k in 0..200 {
            let p = [0.031 * k as f64, 0.017 * (k * k % 97) as f64];
            let want = (p[0] + 2.0 * p[1]).sin() + (3.0 * p[0]).cos();
            worst = worst.max((s.eval(p) - want).abs());
        }
        errs.push(worst);
        hs.push(g.spacing());
    }
    let p = common::order(&hs, &errs);
    assert!(p > 3.7, "order {p}");
}

#[test]
fn inversion_constants() {
    let g = grid(16);
    assert_eq!(DiffeoMap::identity(&g).invert().unwrap(), DiffeoMap::identity(&g));
    let c = [0.3, -1.1];
    let inv = DiffeoMap::shift(&g, c).invert().unwrap();
    assert!(inv.distance(&DiffeoMap::shift(&g, [-c[0], -c[1]])) < 1e-12);
}

#[test]
fn folded_map_is_rejected() {
    let g = grid(32);
    assert!(wobble(&g, 2.0, 0.0).invert().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inverse_residual_meets_tolerance(a in 0.0f64..0.35, p in 0.0f64..6.0) {
        let g = grid(32);
        let phi = wobble(&g, a, p);
        let inv = phi.invert().unwrap();
        prop_assert!(phi.inverse_residual(&inv) <= INVERSE_TOL * g.length());
    }

    #[test]
    fn double_inverse_is_the_map(a in 0.0f64..0.3, p in 0.0f64..6.0) {
        // The second inversion interpolates the first, so the gap is the
        // spline error of the inverse displacement, not the solver tolerance.
        let g = grid(64);
        let phi = wobble(&g, a, p);
        let back = phi.invert().unwrap().invert().unwrap();
        prop_assert!(back.distance(&phi) <= 1e-5 * g.length());
    }

    #[test]
    fn map_after_inverse_is_identity(a in 0.0f64..0.3, p in 0.0f64..6.0) {
        let g = grid(64);
        let phi = wobble(&g, a, p);
        let id = phi.compose(&phi.invert().unwrap());
        prop_assert!(id.distance(&DiffeoMap::identity(&g)) < 1e-6);
    }

    #[test]
    fn composition_preserves_range(a in 0.0f64..0.3, p in 0.0f64..6.0, salt in 0.0f64..3.0) {
        // Interpolating a band-limited field cannot create large excursions.
        let g = grid(64);
        let f = trig_field(&g, 3, salt);
        let h = compose_scalar(&f, &wobble(&g, a, p), Interpolation::CubicSpline);
        prop_assert!(h.linf_norm() <= f.linf_norm() * 1.01);
    }

    #[test]
    fn jacobian_of_shift_is_one(cx in -3.0f64..3.0, cy in -3.0f64..3.0) {
        let g = grid(16);
        let d = DiffeoMap::shift(&g, [cx, cy]).jacobian_det();
        prop_assert!(d.values().iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }
}
