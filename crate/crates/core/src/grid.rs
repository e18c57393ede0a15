//! Periodic square grid and the real-to-complex transform pair.
//!
//! Spectra are stored as the non-negative half plane in `x` (the `N/2 + 1`
//! columns a real FFT produces) laid out column-major, so that the complex
//! transform along `y` runs over contiguous memory. Coefficients are Fourier
//! series coefficients: `f(x) = sum_k c_k exp(i xi_k . x)`, i.e. the forward
//! DFT divided by `N^2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::error::FieldError;

/// Smallest admissible number of points per axis.
pub const MIN_POINTS: usize = 16;

/// Spectral axis selector. `X` is `x_1` (fast, row-contiguous index) and `Y`
/// is `x_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

struct Plans {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

/// Multiplier tables shared by every operator on one grid, built on first use.
pub(crate) struct Tables {
    /// `xi_x` per spectral slot.
    pub xi_x: Vec<f64>,
    /// `xi_y` per spectral slot.
    pub xi_y: Vec<f64>,
    /// Derivative multipliers `i * d` with the axis Nyquist zeroed; stores `d`.
    pub deriv_x: Vec<f64>,
    pub deriv_y: Vec<f64>,
    /// Riesz multipliers `i * r`, `r = xi_k / |xi|`, zero at the origin and the
    /// axis Nyquist; stores `r`.
    pub riesz_x: Vec<f64>,
    pub riesz_y: Vec<f64>,
    /// 2/3-rule mask.
    pub mask: Vec<bool>,
    /// `|xi|^2`.
    pub xi_sq: Vec<f64>,
    /// Multiplicity of each stored slot in the full plane (1 or 2).
    pub weight: Vec<f64>,
    /// Inverse of the periodic cubic B-spline symbol.
    pub spline_prefilter: Vec<f64>,
}

struct GridInner {
    n: usize,
    length: f64,
    plans: Plans,
    tables: OnceLock<Tables>,
}

/// Uniform `N x N` grid on the periodic box `[0, L)^2`.
///
/// Cloning is cheap; clones share FFT plans and multiplier tables.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n
                && self.inner.length.to_bits() == other.inner.length.to_bits())
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Grid, FieldError> {
        if n < MIN_POINTS || !n.is_multiple_of(2) {
            return Err(FieldError::InvalidGrid(format!(
                "points per axis must be even and >= {MIN_POINTS}, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(FieldError::InvalidGrid(format!(
                "box length must be positive and finite, got {length}"
            )));
        }
        let mut real_planner = RealFftPlanner::<f64>::new();
        let mut planner = FftPlanner::<f64>::new();
        let plans = Plans {
            r2c: real_planner.plan_fft_forward(n),
            c2r: real_planner.plan_fft_inverse(n),
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        };
        Ok(Grid {
            inner: Arc::new(GridInner {
                n,
                length,
                plans,
                tables: OnceLock::new(),
            }),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.inner.length
    }

    /// Grid spacing `L / N`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    /// Number of physical samples, `N^2`.
    #[inline]
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    /// Number of stored spectral columns, `N/2 + 1`.
    #[inline]
    pub fn half(&self) -> usize {
        self.inner.n / 2 + 1
    }

    /// Number of stored spectral coefficients.
    #[inline]
    pub fn spectral_len(&self) -> usize {
        self.half() * self.inner.n
    }

    /// Physical coordinate of sample `(ix, iy)`.
    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> [f64; 2] {
        let h = self.spacing();
        [ix as f64 * h, iy as f64 * h]
    }

    /// Fundamental wavenumber `2 pi / L`.
    #[inline]
    pub fn base_wavenumber(&self) -> f64 {
        2.0 * PI / self.inner.length
    }

    /// Signed integer wavenumber for FFT index `i`, in `{-N/2+1, ..., N/2}`.
    #[inline]
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.inner.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Largest wavenumber on one axis, `(N/2) 2 pi / L`.
    pub fn max_wavenumber(&self) -> f64 {
        (self.inner.n / 2) as f64 * self.base_wavenumber()
    }

    /// Storage slot of the spectral coefficient with FFT indices `(ix, iy)`,
    /// `ix <= N/2`.
    #[inline]
    pub fn slot(&self, ix: usize, iy: usize) -> usize {
        ix * self.inner.n + iy
    }

    /// Whether a signed integer wavenumber pair survives the 2/3 rule.
    pub fn in_dealias_band(&self, kx: i64, ky: i64) -> bool {
        let cut = 2.0 / 3.0 * (self.inner.n / 2) as f64;
        (kx.abs() as f64) <= cut && (ky.abs() as f64) <= cut
    }

    pub(crate) fn tables(&self) -> &Tables {
        self.inner.tables.get_or_init(|| self.build_tables())
    }

    fn build_tables(&self) -> Tables {
        let n = self.n();
        let nh = self.half();
        let k0 = self.base_wavenumber();
        let len = self.spectral_len();
        let nyq = (n / 2) as i64;
        let mut t = Tables {
            xi_x: vec![0.0; len],
            xi_y: vec![0.0; len],
            deriv_x: vec![0.0; len],
            deriv_y: vec![0.0; len],
            riesz_x: vec![0.0; len],
            riesz_y: vec![0.0; len],
            mask: vec![false; len],
            xi_sq: vec![0.0; len],
            weight: vec![0.0; len],
            spline_prefilter: vec![0.0; len],
        };
        let symbol = |k: i64| (2.0 + (2.0 * PI * k as f64 / n as f64).cos()) / 3.0;
        for ix in 0..nh {
            let kx = ix as i64;
            for iy in 0..n {
                let ky = self.signed_index(iy);
                let s = self.slot(ix, iy);
                let (xx, yy) = (kx as f64 * k0, ky as f64 * k0);
                let mag2 = xx * xx + yy * yy;
                let mag = mag2.sqrt();
                t.xi_x[s] = xx;
                t.xi_y[s] = yy;
                t.xi_sq[s] = mag2;
                t.deriv_x[s] = if kx == nyq { 0.0 } else { xx };
                t.deriv_y[s] = if ky == nyq { 0.0 } else { yy };
                if mag2 > 0.0 {
                    t.riesz_x[s] = if kx == nyq { 0.0 } else { xx / mag };
                    t.riesz_y[s] = if ky == nyq { 0.0 } else { yy / mag };
                }
                t.mask[s] = self.in_dealias_band(kx, ky);
                t.weight[s] = if ix == 0 || kx == nyq { 1.0 } else { 2.0 };
                t.spline_prefilter[s] = 1.0 / (symbol(kx) * symbol(ky));
            }
        }
        t
    }

    /// Forward transform of `N^2` row-major samples into `N (N/2+1)`
    /// column-major Fourier series coefficients.
    pub(crate) fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.n();
        let nh = self.half();
        debug_assert_eq!(values.len(), n * n);
        let plans = &self.inner.plans;
        let mut row_in = plans.r2c.make_input_vec();
        let mut row_out = plans.r2c.make_output_vec();
        let mut scratch = plans.r2c.make_scratch_vec();
        let mut out = vec![Complex64::new(0.0, 0.0); nh * n];
        for iy in 0..n {
            row_in.copy_from_slice(&values[iy * n..(iy + 1) * n]);
            plans
                .r2c
                .process_with_scratch(&mut row_in, &mut row_out, &mut scratch)
                .expect("row buffer sizes are fixed by the plan");
            for (ix, c) in row_out.iter().enumerate() {
                out[ix * n + iy] = *c;
            }
        }
        plans.fwd.process(&mut out);
        let norm = 1.0 / (n * n) as f64;
        for c in out.iter_mut() {
            *c *= norm;
        }
        out
    }

    /// Inverse of [`Grid::forward`]. The imaginary parts of the `x` zero and
    /// Nyquist columns are discarded after the `y` pass, which projects the
    /// input onto Hermitian-symmetric spectra.
    pub(crate) fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let n = self.n();
        let nh = self.half();
        debug_assert_eq!(coeffs.len(), nh * n);
        let plans = &self.inner.plans;
        let mut work = coeffs.to_vec();
        plans.inv.process(&mut work);
        let mut row_in = plans.c2r.make_input_vec();
        let mut row_out = plans.c2r.make_output_vec();
        let mut scratch = plans.c2r.make_scratch_vec();
        let mut out = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..nh {
                row_in[ix] = work[ix * n + iy];
            }
            row_in[0].im = 0.0;
            row_in[nh - 1].im = 0.0;
            plans
                .c2r
                .process_with_scratch(&mut row_in, &mut row_out, &mut scratch)
                .expect("row buffer sizes are fixed by the plan");
            out[iy * n..(iy + 1) * n].copy_from_slice(&row_out);
        }
        out
    }
}
