//! Scalar and vector fields on a [`Grid`] with a lazily cached spectrum.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::FieldError;
use crate::grid::{Axis, Grid};

/// Output imaginary content above this fraction of the output magnitude marks
/// a multiplier as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Half-plane Fourier series coefficients of a real field.
#[derive(Clone)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectrum").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl Spectrum {
    pub fn zeros(grid: &Grid) -> Spectrum {
        Spectrum {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.spectral_len()],
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Spectrum, FieldError> {
        if coeffs.len() != grid.spectral_len() {
            return Err(FieldError::SizeMismatch {
                expected: grid.spectral_len(),
                got: coeffs.len(),
            });
        }
        Ok(Spectrum {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Stored coefficients, column-major over `(ix, iy)`; see [`Grid::slot`].
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of the mode with signed integer wavenumbers `(kx, ky)`,
    /// recovered from the stored half plane by Hermitian symmetry.
    pub fn get(&self, kx: i64, ky: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        let wrap = |k: i64| -> i64 { k.rem_euclid(n) };
        let (ix, iy) = (wrap(kx), wrap(ky));
        if ix <= n / 2 {
            self.coeffs[self.grid.slot(ix as usize, iy as usize)]
        } else {
            self.coeffs[self.grid.slot((n - ix) as usize, wrap(-ky) as usize)].conj()
        }
    }

    pub fn into_field(self) -> ScalarField {
        ScalarField::from_spectrum(self)
    }

    pub fn to_field(&self) -> ScalarField {
        ScalarField::from_spectrum(self.clone())
    }

    /// Multiply slot-wise by `i * table`.
    pub(crate) fn times_i(&self, table: &[f64]) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .zip(table)
            .map(|(c, &t)| Complex64::new(-c.im * t, c.re * t))
            .collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Multiply slot-wise by a real table.
    pub(crate) fn times_real(&self, table: &[f64]) -> Spectrum {
        let coeffs = self.coeffs.iter().zip(table).map(|(c, &t)| c * t).collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Zero every mode outside the 2/3-rule band.
    pub fn dealiased(mut self) -> Spectrum {
        let mask = &self.grid.tables().mask;
        for (c, &keep) in self.coeffs.iter_mut().zip(mask) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self
    }

    pub fn zero_mean(&mut self) {
        self.coeffs[0] = Complex64::new(0.0, 0.0);
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `self + a * other`, in place.
    pub fn axpy(&mut self, a: f64, other: &Spectrum) {
        assert!(self.grid == other.grid, "spectra live on different grids");
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o * a;
        }
    }

    pub fn scaled(&self, a: f64) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `sum (1+|xi|^2)^s |c|^2` over the full plane, optionally restricted to
    /// the dealiasing band.
    fn weighted_energy(&self, s: f64, masked: bool) -> f64 {
        let t = self.grid.tables();
        let mut acc = 0.0;
        for i in 0..self.coeffs.len() {
            if masked && !t.mask[i] {
                continue;
            }
            let w = if s == 0.0 { 1.0 } else { (1.0 + t.xi_sq[i]).powf(s) };
            acc += t.weight[i] * w * self.coeffs[i].norm_sqr();
        }
        acc
    }

    /// Discrete `H^s` norm, normalized so that `s = 0` equals the `L^2` norm
    /// over the box.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.grid.length() * self.weighted_energy(s, false).sqrt()
    }

    /// [`Spectrum::sobolev_norm`] restricted to the 2/3-rule band.
    pub fn sobolev_norm_masked(&self, s: f64) -> f64 {
        self.grid.length() * self.weighted_energy(s, true).sqrt()
    }
}

impl PartialEq for Spectrum {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.coeffs == other.coeffs
    }
}

/// Real scalar field sampled on the grid, row-major with `x` fastest.
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    spectrum: OnceLock<Spectrum>,
}

impl Clone for ScalarField {
    fn clone(&self) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.clone(),
            spectrum: self.spectrum.clone(),
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("l2", &self.l2_norm())
            .finish()
    }
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> ScalarField {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, c: f64) -> ScalarField {
        ScalarField {
            grid: grid.clone(),
            values: vec![c; grid.len()],
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<ScalarField, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::SizeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(ScalarField {
            grid: grid.clone(),
            values,
            spectrum: OnceLock::new(),
        })
    }

    /// Sample `f(x1, x2)` at every grid point.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..n {
            for ix in 0..n {
                let [x, y] = grid.point(ix, iy);
                values.push(f(x, y));
            }
        }
        ScalarField {
            grid: grid.clone(),
            values,
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_spectrum(spectrum: Spectrum) -> ScalarField {
        let values = spectrum.grid.inverse(&spectrum.coeffs);
        let cache = OnceLock::new();
        let grid = spectrum.grid.clone();
        let _ = cache.set(spectrum);
        ScalarField {
            grid,
            values,
            spectrum: cache,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.n() + ix]
    }

    /// Cached spectral representation.
    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| Spectrum {
            grid: self.grid.clone(),
            coeffs: self.grid.forward(&self.values),
        })
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// The field minus its mean.
    pub fn mean_free(&self) -> ScalarField {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert!(self.grid == other.grid, "fields live on different grids");
        ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Quadrature `L^2` norm `(sum f^2 h^2)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        (self.values.iter().map(|v| v * v).sum::<f64>()).sqrt() * h
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Quadrature inner product `sum f g h^2`.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        assert!(self.grid == other.grid, "fields live on different grids");
        let h = self.grid.spacing();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * h
            * h
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.spectrum().sobolev_norm(s)
    }

    pub fn sobolev_norm_masked(&self, s: f64) -> f64 {
        self.spectrum().sobolev_norm_masked(s)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, a: f64) -> ScalarField {
        self.map(|v| a * v)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// Apply a Fourier multiplier `m(xi)` given as a function of the physical
/// wavevector. `m(0)` is whatever the closure returns at the origin.
///
/// The multiplier must satisfy `m(-xi) = conj(m(xi))` on the modes the input
/// carries; otherwise the output would be complex and an error is returned.
/// At the Nyquist wavenumber `-xi` is identified with `xi`.
pub fn apply_multiplier(
    f: &ScalarField,
    m: impl Fn([f64; 2]) -> Complex64,
) -> Result<ScalarField, FieldError> {
    let grid = f.grid();
    let n = grid.n();
    let nh = grid.half();
    let k0 = grid.base_wavenumber();
    let input = f.spectrum();
    let mut out = Spectrum::zeros(grid);
    let mut real_part = 0.0;
    let mut imag_part = 0.0;
    let mirror = |k: i64| -> i64 {
        if 2 * k.abs() == n as i64 {
            k
        } else {
            -k
        }
    };
    for ix in 0..nh {
        let kx = ix as i64;
        for iy in 0..n {
            let ky = grid.signed_index(iy);
            let s = grid.slot(ix, iy);
            let c = input.coeffs()[s];
            let here = m([kx as f64 * k0, ky as f64 * k0]);
            let there = m([mirror(kx) as f64 * k0, mirror(ky) as f64 * k0]);
            let w = grid.tables().weight[s];
            let sym = c * (here + there.conj()) * 0.5;
            let anti = c * (here - there.conj()) * 0.5;
            real_part += w * sym.norm_sqr();
            imag_part += w * anti.norm_sqr();
            out.coeffs[s] = c * here;
        }
    }
    if imag_part > 0.0 {
        let ratio = (imag_part / real_part.max(f64::MIN_POSITIVE)).sqrt();
        if ratio > HERMITIAN_TOL {
            return Err(FieldError::NonHermitianMultiplier { ratio });
        }
    }
    Ok(out.into_field())
}

/// Pair of scalar fields on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField2 {
    x: ScalarField,
    y: ScalarField,
}

impl VectorField2 {
    pub fn new(x: ScalarField, y: ScalarField) -> Result<VectorField2, FieldError> {
        if x.grid() != y.grid() {
            return Err(FieldError::GridMismatch);
        }
        Ok(VectorField2 { x, y })
    }

    pub fn zeros(grid: &Grid) -> VectorField2 {
        VectorField2 {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
        }
    }

    pub fn constant(grid: &Grid, c: [f64; 2]) -> VectorField2 {
        VectorField2 {
            x: ScalarField::constant(grid, c[0]),
            y: ScalarField::constant(grid, c[1]),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.x.grid()
    }

    pub fn x(&self) -> &ScalarField {
        &self.x
    }

    pub fn y(&self) -> &ScalarField {
        &self.y
    }

    pub fn component(&self, axis: Axis) -> &ScalarField {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }

    pub fn into_components(self) -> (ScalarField, ScalarField) {
        (self.x, self.y)
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> VectorField2 {
        VectorField2 {
            x: f(&self.x),
            y: f(&self.y),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.x.l2_norm().hypot(self.y.l2_norm())
    }

    /// Largest pointwise magnitude `|u(x)|`.
    pub fn linf_norm(&self) -> f64 {
        self.x
            .values()
            .iter()
            .zip(self.y.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.x.sobolev_norm(s).hypot(self.y.sobolev_norm(s))
    }

    pub fn sobolev_norm_masked(&self, s: f64) -> f64 {
        self.x.sobolev_norm_masked(s).hypot(self.y.sobolev_norm_masked(s))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for &VectorField2 {
    type Output = VectorField2;
    fn add(self, rhs: &VectorField2) -> VectorField2 {
        VectorField2 {
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
        }
    }
}

impl Sub for &VectorField2 {
    type Output = VectorField2;
    fn sub(self, rhs: &VectorField2) -> VectorField2 {
        VectorField2 {
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
        }
    }
}

impl Mul<f64> for &VectorField2 {
    type Output = VectorField2;
    fn mul(self, a: f64) -> VectorField2 {
        VectorField2 {
            x: &self.x * a,
            y: &self.y * a,
        }
    }
}

/// Spectral partial derivative along `axis`.
pub fn partial(f: &ScalarField, axis: Axis) -> ScalarField {
    let t = f.grid().tables();
    let table = match axis {
        Axis::X => &t.deriv_x,
        Axis::Y => &t.deriv_y,
    };
    f.spectrum().times_i(table).into_field()
}

pub fn gradient(f: &ScalarField) -> VectorField2 {
    VectorField2 {
        x: partial(f, Axis::X),
        y: partial(f, Axis::Y),
    }
}

/// `d1 u1 + d2 u2`, evaluated spectrally.
pub fn divergence(u: &VectorField2) -> Result<ScalarField, FieldError> {
    let t = u.grid().tables();
    let mut s = u.x().spectrum().times_i(&t.deriv_x);
    s.axpy(1.0, &u.y().spectrum().times_i(&t.deriv_y));
    Ok(s.into_field())
}
