//! Off-grid evaluation of periodic fields: a periodic cubic B-spline
//! interpolant for production runs and an exact trigonometric series for
//! verification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::{ScalarField, VectorField2};
use crate::grid::Grid;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    CubicSpline,
    /// Direct Fourier-series evaluation; `O(N^2)` per point.
    Trigonometric,
}

/// Modes below this fraction of the largest coefficient are dropped by the
/// trigonometric evaluator.
pub const TRIG_CUTOFF: f64 = 1e-15;

/// Weights of the four cubic B-spline taps at offsets -1..=2 for fractional
/// position `t` in [0, 1).
#[inline]
fn bspline_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    let s = 1.0 - t;
    [
        s * s * s / 6.0,
        (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
        (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
        t3 / 6.0,
    ]
}

#[inline]
fn bspline_dweights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let s = 1.0 - t;
    [
        -s * s / 2.0,
        (3.0 * t2 - 4.0 * t) / 2.0,
        (-3.0 * t2 + 2.0 * t + 1.0) / 2.0,
        t2 / 2.0,
    ]
}

/// Periodic cubic B-spline interpolant of grid samples.
///
/// The coefficients solve the periodic interpolation system exactly; it is
/// diagonal in Fourier space, so they come from one spectral division.
#[derive(Clone, Debug)]
pub struct SplineField {
    grid: Grid,
    coeffs: Vec<f64>,
}

impl SplineField {
    pub fn new(f: &ScalarField) -> SplineField {
        let grid = f.grid().clone();
        let filtered = f.spectrum().times_real(&grid.tables().spline_prefilter);
        SplineField {
            coeffs: grid.inverse(filtered.coeffs()),
            grid,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    fn locate(&self, x: f64) -> ([usize; 4], f64) {
        let n = self.grid.n();
        let u = (x / self.grid.spacing()).rem_euclid(n as f64);
        let i = u.floor();
        // `rem_euclid` can round up to exactly n.
        (taps(i as usize % n, n), u - i)
    }

    #[inline]
    fn accumulate(&self, cols: &[usize; 4], rows: &[usize; 4], wx: &[f64; 4], wy: &[f64; 4]) -> f64 {
        let n = self.grid.n();
        let mut acc = 0.0;
        for (r, wr) in rows.iter().zip(wy) {
            let row = &self.coeffs[r * n..(r + 1) * n];
            let racc: f64 = cols.iter().zip(wx).map(|(c, wc)| wc * row[*c]).sum();
            acc += wr * racc;
        }
        acc
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let (cols, tx) = self.locate(p[0]);
        let (rows, ty) = self.locate(p[1]);
        self.accumulate(&cols, &rows, &bspline_weights(tx), &bspline_weights(ty))
    }

    /// Value and gradient of the interpolant.
    pub fn eval_grad(&self, p: [f64; 2]) -> (f64, [f64; 2]) {
        let (cols, tx) = self.locate(p[0]);
        let (rows, ty) = self.locate(p[1]);
        let (wx, wy) = (bspline_weights(tx), bspline_weights(ty));
        let inv_h = 1.0 / self.grid.spacing();
        let (dx, dy) = (bspline_dweights(tx), bspline_dweights(ty));
        let v = self.accumulate(&cols, &rows, &wx, &wy);
        let gx = self.accumulate(&cols, &rows, &dx, &wy) * inv_h;
        let gy = self.accumulate(&cols, &rows, &wx, &dy) * inv_h;
        (v, [gx, gy])
    }
}

/// Four periodic tap indices starting one below `i`.
#[inline]
fn taps(i: usize, n: usize) -> [usize; 4] {
    if i >= 1 && i + 2 < n {
        [i - 1, i, i + 1, i + 2]
    } else {
        [(i + n - 1) % n, i % n, (i + 1) % n, (i + 2) % n]
    }
}

/// Cubic B-spline interpolant of both components of a vector field,
/// sharing the tap weights between them.
#[derive(Clone, Debug)]
pub struct SplineVector {
    grid: Grid,
    coeffs: Vec<[f64; 2]>,
}

impl SplineVector {
    pub fn new(u: &VectorField2) -> SplineVector {
        let grid = u.grid().clone();
        let pre = &grid.tables().spline_prefilter;
        let cx = grid.inverse(u.x().spectrum().times_real(pre).coeffs());
        let cy = grid.inverse(u.y().spectrum().times_real(pre).coeffs());
        SplineVector {
            coeffs: cx.into_iter().zip(cy).map(|(a, b)| [a, b]).collect(),
            grid,
        }
    }

    #[inline]
    fn locate(&self, p: [f64; 2]) -> ([usize; 4], [usize; 4], f64, f64) {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let ux = (p[0] / h).rem_euclid(n as f64);
        let uy = (p[1] / h).rem_euclid(n as f64);
        let (fx, fy) = (ux.floor(), uy.floor());
        let cols = taps(fx as usize % n, n);
        let mut rows = taps(fy as usize % n, n);
        for r in rows.iter_mut() {
            *r *= n;
        }
        (cols, rows, ux - fx, uy - fy)
    }

    #[inline]
    fn accumulate(&self, cols: &[usize; 4], rows: &[usize; 4], wx: &[f64; 4], wy: &[f64; 4]) -> [f64; 2] {
        let mut acc = [0.0; 2];
        for (r, wr) in rows.iter().zip(wy) {
            let mut racc = [0.0; 2];
            for (c, wc) in cols.iter().zip(wx) {
                let v = self.coeffs[r + c];
                racc[0] += wc * v[0];
                racc[1] += wc * v[1];
            }
            acc[0] += wr * racc[0];
            acc[1] += wr * racc[1];
        }
        acc
    }

    pub fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        let (cols, rows, tx, ty) = self.locate(p);
        self.accumulate(&cols, &rows, &bspline_weights(tx), &bspline_weights(ty))
    }

    /// Value and Jacobian `[[d_x f_1, d_y f_1], [d_x f_2, d_y f_2]]`.
    pub fn eval_jacobian(&self, p: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let (cols, rows, tx, ty) = self.locate(p);
        let (wx, wy) = (bspline_weights(tx), bspline_weights(ty));
        let (dx, dy) = (bspline_dweights(tx), bspline_dweights(ty));
        let inv_h = 1.0 / self.grid.spacing();
        let v = self.accumulate(&cols, &rows, &wx, &wy);
        let gx = self.accumulate(&cols, &rows, &dx, &wy);
        let gy = self.accumulate(&cols, &rows, &wx, &dy);
        (
            v,
            [[gx[0] * inv_h, gy[0] * inv_h], [gx[1] * inv_h, gy[1] * inv_h]],
        )
    }

    /// Both components sampled at `points`, one per grid node.
    pub fn sample(&self, points: &[[f64; 2]]) -> VectorField2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&p| {
            let v = self.eval(p);
            (v[0], v[1])
        }).unzip();
        VectorField2::new(
            ScalarField::from_values(&self.grid, xs).expect("one point per grid node"),
            ScalarField::from_values(&self.grid, ys).expect("one point per grid node"),
        )
        .expect("shared grid")
    }
}

/// Exact evaluation of the trigonometric interpolant of grid samples.
///
/// Axis-Nyquist modes are evaluated as cosines, which is the real symmetric
/// reading of the half-spectrum.
#[derive(Clone, Debug)]
pub struct TrigSeries {
    grid: Grid,
    modes: Vec<(i64, i64, Complex64)>,
}

impl TrigSeries {
    pub fn new(f: &ScalarField) -> TrigSeries {
        let grid = f.grid().clone();
        let spec = f.spectrum();
        let t = grid.tables();
        let peak = spec.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let mut modes = Vec::new();
        for ix in 0..grid.half() {
            for iy in 0..grid.n() {
                let s = grid.slot(ix, iy);
                let c = spec.coeffs()[s];
                if c.norm() > TRIG_CUTOFF * peak {
                    modes.push((ix as i64, grid.signed_index(iy), c * t.weight[s]));
                }
            }
        }
        TrigSeries { grid, modes }
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let k0 = self.grid.base_wavenumber();
        self.modes
            .iter()
            .map(|&(kx, ky, c)| {
                let phase = k0 * (kx as f64 * p[0] + ky as f64 * p[1]);
                c.re * phase.cos() - c.im * phase.sin()
            })
            .sum()
    }
}

/// Either evaluator behind one interface.
#[derive(Clone, Debug)]
pub enum Interpolant {
    Spline(SplineField),
    Trig(TrigSeries),
}

impl Interpolant {
    pub fn new(f: &ScalarField, kind: Interpolation) -> Interpolant {
        match kind {
            Interpolation::CubicSpline => Interpolant::Spline(SplineField::new(f)),
            Interpolation::Trigonometric => Interpolant::Trig(TrigSeries::new(f)),
        }
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        match self {
            Interpolant::Spline(s) => s.eval(p),
            Interpolant::Trig(t) => t.eval(p),
        }
    }

    /// Field of values at `points`, one per grid node in row-major order.
    pub fn sample(&self, grid: &Grid, points: &[[f64; 2]]) -> ScalarField {
        let values = points.iter().map(|&p| self.eval(p)).collect();
        ScalarField::from_values(grid, values).expect("one point per grid node")
    }
}
