//! Riesz transforms, the SQG velocity law and the quadratic operator
//! `B(u, u)` of the velocity formulation.
//!
//! Quadratic terms are formed pseudo-spectrally. With dealiasing on, both
//! factors are truncated to the 2/3-rule band before the product and the
//! product is truncated again afterwards.

use crate::field::{ScalarField, Spectrum, VectorField2};
use crate::grid::{Axis, Grid};

/// Spectral `R_k`: multiplier `i xi_k / |xi|`, zero at the origin and on the
/// axis Nyquist line.
pub fn riesz_spectrum(s: &Spectrum, axis: Axis) -> Spectrum {
    let t = s.grid().tables();
    match axis {
        Axis::X => s.times_i(&t.riesz_x),
        Axis::Y => s.times_i(&t.riesz_y),
    }
}

pub(crate) fn deriv_spectrum(s: &Spectrum, axis: Axis) -> Spectrum {
    let t = s.grid().tables();
    match axis {
        Axis::X => s.times_i(&t.deriv_x),
        Axis::Y => s.times_i(&t.deriv_y),
    }
}

pub fn riesz(f: &ScalarField, axis: Axis) -> ScalarField {
    riesz_spectrum(f.spectrum(), axis).into_field()
}

/// `u = (-R_2 theta, R_1 theta)` in spectral form.
pub fn velocity_spectra(theta: &Spectrum) -> (Spectrum, Spectrum) {
    (
        riesz_spectrum(theta, Axis::Y).scaled(-1.0),
        riesz_spectrum(theta, Axis::X),
    )
}

/// `theta = R_2 u_1 - R_1 u_2` in spectral form.
pub fn theta_spectrum(ux: &Spectrum, uy: &Spectrum) -> Spectrum {
    let mut th = riesz_spectrum(ux, Axis::Y);
    th.axpy(-1.0, &riesz_spectrum(uy, Axis::X));
    th
}

pub fn velocity_from_theta(theta: &ScalarField) -> VectorField2 {
    let (ux, uy) = velocity_spectra(theta.spectrum());
    VectorField2::new(ux.into_field(), uy.into_field()).expect("components share a grid")
}

pub fn theta_from_u(u: &VectorField2) -> ScalarField {
    theta_spectrum(u.x().spectrum(), u.y().spectrum()).into_field()
}

/// `Phi = R_1 u_1 + R_2 u_2`, which vanishes exactly when the mean-free part
/// of `u` is divergence free.
pub fn div_diagnostic(u: &VectorField2) -> ScalarField {
    let mut phi = riesz_spectrum(u.x().spectrum(), Axis::X);
    phi.axpy(1.0, &riesz_spectrum(u.y().spectrum(), Axis::Y));
    phi.into_field()
}

/// Evaluates `(u . grad) f` for a fixed transporting velocity.
///
/// Holds the physical samples of the (optionally band-limited) velocity so
/// repeated applications only pay for the gradient and the product.
pub struct Transport {
    grid: Grid,
    dealias: bool,
    ux: Vec<f64>,
    uy: Vec<f64>,
}

impl Transport {
    pub fn new(ux: &Spectrum, uy: &Spectrum, dealias: bool) -> Transport {
        let grid = ux.grid().clone();
        let phys = |s: &Spectrum| {
            if dealias {
                grid.inverse(s.clone().dealiased().coeffs())
            } else {
                grid.inverse(s.coeffs())
            }
        };
        Transport {
            ux: phys(ux),
            uy: phys(uy),
            grid,
            dealias,
        }
    }

    pub fn from_field(u: &VectorField2, dealias: bool) -> Transport {
        Transport::new(u.x().spectrum(), u.y().spectrum(), dealias)
    }

    /// Largest pointwise speed of the transporting velocity.
    pub fn max_speed(&self) -> f64 {
        self.ux
            .iter()
            .zip(&self.uy)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// Spectrum of `(u . grad) f`.
    pub fn apply(&self, f: &Spectrum) -> Spectrum {
        let f = if self.dealias {
            f.clone().dealiased()
        } else {
            f.clone()
        };
        let fx = self.grid.inverse(deriv_spectrum(&f, Axis::X).coeffs());
        let fy = self.grid.inverse(deriv_spectrum(&f, Axis::Y).coeffs());
        let prod: Vec<f64> = (0..fx.len())
            .map(|i| self.ux[i] * fx[i] + self.uy[i] * fy[i])
            .collect();
        let out = Spectrum::from_coeffs(&self.grid, self.grid.forward(&prod))
            .expect("forward transform has the grid's spectral size");
        if self.dealias {
            out.dealiased()
        } else {
            out
        }
    }

    /// `[u . grad, sign R_k] f = (u . grad)(sign R_k f) - sign R_k ((u . grad) f)`.
    pub fn commutator(&self, axis: Axis, sign: f64, f: &Spectrum) -> Spectrum {
        let mut out = self.apply(&riesz_spectrum(f, axis)).scaled(sign);
        out.axpy(-sign, &riesz_spectrum(&self.apply(f), axis));
        out
    }
}

/// `(u . grad) f` as a field.
pub fn advect(u: &VectorField2, f: &ScalarField, dealias: bool) -> ScalarField {
    Transport::from_field(u, dealias).apply(f.spectrum()).into_field()
}

/// `[u . grad, sign R_k] theta`; `sign` is `+1` or `-1`.
pub fn transport_commutator(
    u: &VectorField2,
    axis: Axis,
    theta: &ScalarField,
    sign: f64,
    dealias: bool,
) -> ScalarField {
    Transport::from_field(u, dealias)
        .commutator(axis, sign, theta.spectrum())
        .into_field()
}

/// Spectral `B(u, u)`, with `theta = R_2 u_1 - R_1 u_2`:
///
/// ```text
/// B_1 = [u . grad, -R_2] theta
/// B_2 = [u . grad,  R_1] theta
/// ```
pub fn b_operator_spectra(ux: &Spectrum, uy: &Spectrum, dealias: bool) -> (Spectrum, Spectrum) {
    let (ux, uy) = if dealias {
        (ux.clone().dealiased(), uy.clone().dealiased())
    } else {
        (ux.clone(), uy.clone())
    };
    let transport = Transport::new(&ux, &uy, dealias);
    let theta = theta_spectrum(&ux, &uy);
    // Both commutators share (u . grad) theta.
    let adv_theta = transport.apply(&theta);
    let mut b1 = transport.apply(&riesz_spectrum(&theta, Axis::Y)).scaled(-1.0);
    b1.axpy(1.0, &riesz_spectrum(&adv_theta, Axis::Y));
    let mut b2 = transport.apply(&riesz_spectrum(&theta, Axis::X));
    b2.axpy(-1.0, &riesz_spectrum(&adv_theta, Axis::X));
    (b1, b2)
}

pub fn b_operator(u: &VectorField2, dealias: bool) -> VectorField2 {
    let (b1, b2) = b_operator_spectra(u.x().spectrum(), u.y().spectrum(), dealias);
    VectorField2::new(b1.into_field(), b2.into_field()).expect("components share a grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine_setup() -> (Grid, f64, ScalarField) {
        let g = Grid::new(32, 7.0).unwrap();
        let k = g.base_wavenumber();
        let f = ScalarField::from_fn(&g, move |x, _| (k * x).sin());
        (g, k, f)
    }

    #[test]
    fn riesz_of_single_mode() {
        let (g, k, f) = sine_setup();
        let cos = ScalarField::from_fn(&g, |x, _| (k * x).cos());
        assert!((&riesz(&f, Axis::X) - &cos).linf_norm() < 1e-14);
        assert!(riesz(&f, Axis::Y).linf_norm() < 1e-14);
    }

    #[test]
    fn velocity_of_single_mode_and_back() {
        let (g, k, f) = sine_setup();
        let u = velocity_from_theta(&f);
        assert!(u.x().linf_norm() < 1e-14);
        let cos = ScalarField::from_fn(&g, |x, _| (k * x).cos());
        assert!((u.y() - &cos).linf_norm() < 1e-14);
        assert!((&theta_from_u(&u) - &f).linf_norm() < 1e-14);
        assert!(velocity_from_theta(&ScalarField::zeros(&g)).linf_norm() == 0.0);
        assert!(theta_from_u(&VectorField2::zeros(&g)).linf_norm() == 0.0);
    }

    #[test]
    fn div_diagnostic_single_mode() {
        let (g, k, f) = sine_setup();
        let u = VectorField2::new(f.clone(), ScalarField::zeros(&g)).unwrap();
        let cos = ScalarField::from_fn(&g, |x, _| (k * x).cos());
        assert!((&div_diagnostic(&u) - &cos).linf_norm() < 1e-14);
        let v = velocity_from_theta(&f);
        assert!(div_diagnostic(&v).l2_norm() < 1e-14);
    }

    #[test]
    fn commutator_trivial_cases() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let theta = ScalarField::from_fn(&g, |x, y| (x + y).sin() + (2.0 * x).cos());
        let zero = VectorField2::zeros(&g);
        for axis in [Axis::X, Axis::Y] {
            assert_eq!(transport_commutator(&zero, axis, &theta, 1.0, true).linf_norm(), 0.0);
        }
        let u = velocity_from_theta(&theta);
        let c = ScalarField::constant(&g, 2.5);
        for axis in [Axis::X, Axis::Y] {
            assert!(transport_commutator(&u, axis, &c, -1.0, true).linf_norm() < 1e-13);
        }
    }

    #[test]
    fn b_vanishes_for_shear() {
        let (g, k, _) = sine_setup();
        let u = VectorField2::new(
            ScalarField::zeros(&g),
            ScalarField::from_fn(&g, |x, _| (k * x).cos()),
        )
        .unwrap();
        assert!(b_operator(&u, true).l2_norm() < 1e-10);
        assert_eq!(b_operator(&VectorField2::zeros(&g), true).l2_norm(), 0.0);
    }
}
