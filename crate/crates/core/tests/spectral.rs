mod common;

use std::f64::consts::PI;

use common::{dft, rel, riesz_direct, sobolev_direct, trig_field};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqg::field::{apply_multiplier, divergence, gradient, partial, ScalarField};
use sqg::grid::{Axis, Grid};
use sqg::initial::random_smooth;
use sqg::operators::{riesz, theta_from_u, velocity_from_theta};

fn grid(n: usize) -> Grid {
    Grid::new(n, 2.0 * PI).unwrap()
}

fn noise(g: &Grid, seed: u64) -> ScalarField {
    // Full-spectrum data, Nyquist lines included.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..g.len()).map(|_| rng.random::<f64>() - 0.5).collect();
    ScalarField::from_values(g, values).unwrap()
}

#[test]
fn forward_transform_matches_direct_dft() {
    let g = grid(16);
    let f = noise(&g, 3);
    for ((kx, ky), c) in dft(&f) {
        let got = f.spectrum().get(kx, ky);
        assert!((got - c).norm() < 1e-14, "mode ({kx}, {ky}): {got} vs {c}");
    }
}

#[test]
fn riesz_matches_direct_multiplier() {
    let g = grid(16);
    let f = noise(&g, 11);
    for axis in [Axis::X, Axis::Y] {
        let e = rel(&riesz(&f, axis), &riesz_direct(&f, axis));
        assert!(e < 1e-12, "{axis:?}: {e:e}");
    }
}

#[test]
fn general_multiplier_matches_direct() {
    let g = grid(16);
    let f = noise(&g, 5);
    let k0 = g.base_wavenumber();
    let lap = apply_multiplier(&f, |xi| Complex64::new(-(xi[0] * xi[0] + xi[1] * xi[1]), 0.0)).unwrap();
    let direct = common::apply_direct(&f, |kx, ky| Complex64::new(-k0 * k0 * (kx * kx + ky * ky) as f64, 0.0));
    assert!(rel(&lap, &direct) < 1e-12);
}

#[test]
fn odd_multiplier_with_nyquist_content_is_rejected() {
    let g = grid(16);
    let f = ScalarField::from_fn(&g, |x, _| (8.0 * x).cos());
    assert!(apply_multiplier(&f, |xi| Complex64::new(0.0, xi[0])).is_err());
}

#[test]
fn sobolev_norm_matches_direct_sum() {
    let g = Grid::new(16, 5.0).unwrap();
    let f = noise(&g, 9);
    for s in [0.0, 1.0, 2.5] {
        let a = f.sobolev_norm(s);
        let b = sobolev_direct(&f, s);
        assert!((a - b).abs() <= 1e-12 * b, "s = {s}: {a} vs {b}");
    }
    assert!((f.sobolev_norm(0.0) - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
}

#[test]
fn derivative_of_a_trig_polynomial_is_exact() {
    let g = grid(32);
    let f = ScalarField::from_fn(&g, |x, y| (3.0 * x).sin() * (2.0 * y).cos());
    let want = ScalarField::from_fn(&g, |x, y| 3.0 * (3.0 * x).cos() * (2.0 * y).cos());
    assert!(rel(&partial(&f, Axis::X), &want) < 1e-13);
}

#[test]
fn velocity_of_a_single_mode() {
    // theta = cos(k.x) gives u = (-R_2, R_1) theta = (k_2, -k_1)/|k| sin(k.x).
    let g = grid(32);
    let th = ScalarField::from_fn(&g, |x, y| (3.0 * x + 4.0 * y).cos());
    let u = velocity_from_theta(&th);
    let ux = ScalarField::from_fn(&g, |x, y| 0.8 * (3.0 * x + 4.0 * y).sin());
    let uy = ScalarField::from_fn(&g, |x, y| -0.6 * (3.0 * x + 4.0 * y).sin());
    assert!(rel(u.x(), &ux) < 1e-13);
    assert!(rel(u.y(), &uy) < 1e-13);
}

fn band_limited() -> impl Strategy<Value = ScalarField> {
    (any::<u64>(), 1u32..6, 0.1f64..10.0).prop_map(|(seed, kmax, amp)| random_smooth(&grid(32), seed, kmax, amp))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_round_trip(seed in any::<u64>()) {
        let g = grid(16);
        let f = noise(&g, seed);
        let back = f.spectrum().to_field();
        prop_assert!((&back - &f).linf_norm() <= 1e-14 * f.linf_norm().max(1.0));
    }

    #[test]
    fn parseval(seed in any::<u64>(), len in 0.5f64..50.0) {
        let g = Grid::new(16, len).unwrap();
        let f = noise(&g, seed);
        let a = f.l2_norm();
        let b = f.sobolev_norm(0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn sobolev_norm_increases_with_s(f in band_limited(), s in 0.0f64..3.0, ds in 0.01f64..2.0) {
        prop_assert!(f.sobolev_norm(s + ds) >= f.sobolev_norm(s));
        prop_assert!(f.sobolev_norm_masked(s) <= f.sobolev_norm(s) * (1.0 + 1e-14));
    }

    #[test]
    fn sobolev_norm_is_homogeneous(f in band_limited(), a in -5.0f64..5.0) {
        let lhs = (&f * a).sobolev_norm(2.5);
        let rhs = a.abs() * f.sobolev_norm(2.5);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn riesz_is_linear(f in band_limited(), g in band_limited(), a in -3.0f64..3.0) {
        let lhs = riesz(&(&f + &(&g * a)), Axis::X);
        let rhs = &riesz(&f, Axis::X) + &(&riesz(&g, Axis::X) * a);
        prop_assert!((&lhs - &rhs).linf_norm() <= 1e-12 * (f.linf_norm() + a.abs() * g.linf_norm()));
    }

    #[test]
    fn riesz_is_anti_self_adjoint(f in band_limited(), g in band_limited()) {
        for axis in [Axis::X, Axis::Y] {
            let lhs = riesz(&f, axis).inner(&g);
            let rhs = -f.inner(&riesz(&g, axis));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * f.l2_norm() * g.l2_norm());
        }
    }

    #[test]
    fn riesz_squares_sum_to_minus_identity(f in band_limited()) {
        let back = &riesz(&riesz(&f, Axis::X), Axis::X) + &riesz(&riesz(&f, Axis::Y), Axis::Y);
        prop_assert!((&back + &f).l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn velocity_is_divergence_free(f in band_limited()) {
        let div = divergence(&velocity_from_theta(&f)).unwrap();
        prop_assert!(div.l2_norm() <= 1e-12 * gradient(&f).l2_norm());
    }

    #[test]
    fn theta_is_recovered_from_velocity(f in band_limited()) {
        let back = theta_from_u(&velocity_from_theta(&f));
        prop_assert!((&back - &f).l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn velocity_is_norm_preserving_on_mean_free_data(f in band_limited()) {
        // |u_hat|^2 = |theta_hat|^2 off the origin.
        let u = velocity_from_theta(&f);
        prop_assert!((u.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }
}

#[test]
fn trig_helper_is_band_limited() {
    let g = grid(32);
    let f = trig_field(&g, 3, 0.7);
    for ((kx, ky), c) in dft(&f) {
        if kx.abs() > 3 || ky.abs() > 3 {
            assert!(c.norm() < 1e-14);
        }
    }
}
