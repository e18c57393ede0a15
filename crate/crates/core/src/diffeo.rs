//! Diffeomorphisms of the periodic box stored as identity plus a periodic
//! displacement, with composition, Jacobians and inversion.

use crate::error::DiffeoError;
use crate::field::{partial, ScalarField, VectorField2};
use crate::grid::{Axis, Grid};
use crate::interp::{Interpolant, Interpolation, SplineVector};

/// Smallest Jacobian determinant accepted as a diffeomorphism.
pub const JACOBIAN_FLOOR: f64 = 1e-6;
/// Inversion residual tolerance, relative to the box length.
pub const INVERSE_TOL: f64 = 1e-10;
pub const INVERSE_MAX_ITER: usize = 100;
/// Fraction of displacement energy outside the dealias band that triggers a
/// smoothness warning.
const TAIL_WARN: f64 = 1e-8;

/// `phi(x) = x + g(x)` with `g` periodic.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffeoMap {
    disp: VectorField2,
}

/// How each point of an inverse was obtained, for diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InversionStats {
    pub fixed_point: usize,
    pub damped: usize,
    pub newton: usize,
    pub max_iterations: usize,
}

impl DiffeoMap {
    pub fn identity(grid: &Grid) -> DiffeoMap {
        DiffeoMap { disp: VectorField2::zeros(grid) }
    }

    pub fn shift(grid: &Grid, c: [f64; 2]) -> DiffeoMap {
        DiffeoMap { disp: VectorField2::constant(grid, c) }
    }

    pub fn from_displacement(disp: VectorField2) -> DiffeoMap {
        DiffeoMap { disp }
    }

    pub fn grid(&self) -> &Grid {
        self.disp.grid()
    }

    pub fn displacement(&self) -> &VectorField2 {
        &self.disp
    }

    pub fn into_displacement(self) -> VectorField2 {
        self.disp
    }

    /// `phi(x_j)` for every grid node, row-major.
    pub fn node_images(&self) -> Vec<[f64; 2]> {
        let g = self.grid();
        let n = g.n();
        let (dx, dy) = (self.disp.x().values(), self.disp.y().values());
        (0..n * n)
            .map(|i| {
                let p = g.point(i % n, i / n);
                [p[0] + dx[i], p[1] + dy[i]]
            })
            .collect()
    }

    /// `phi(p)` at an arbitrary point, interpolating the displacement.
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let g = SplineVector::new(&self.disp).eval(p);
        [p[0] + g[0], p[1] + g[1]]
    }

    /// Entries `(a, b, c, d)` of `d phi = [[a, b], [c, d]]` at every node.
    fn jacobian(&self) -> [ScalarField; 4] {
        let (gx, gy) = (self.disp.x(), self.disp.y());
        [
            partial(gx, Axis::X).map(|v| v + 1.0),
            partial(gx, Axis::Y),
            partial(gy, Axis::X),
            partial(gy, Axis::Y).map(|v| v + 1.0),
        ]
    }

    /// `det(d phi)` via spectral derivatives of the displacement.
    pub fn jacobian_det(&self) -> ScalarField {
        let [a, b, c, d] = self.jacobian();
        let ad = a.zip_with(&d, |p, q| p * q);
        let bc = b.zip_with(&c, |p, q| p * q);
        &ad - &bc
    }

    /// Largest operator norm of `d phi` over the grid.
    pub fn lipschitz(&self) -> f64 {
        let [a, b, c, d] = self.jacobian();
        let mut best = 0.0f64;
        for i in 0..a.values().len() {
            let (a, b, c, d) = (a.values()[i], b.values()[i], c.values()[i], d.values()[i]);
            // Largest singular value of a 2x2 matrix.
            let s = a * a + b * b + c * c + d * d;
            let det = a * d - b * c;
            let sigma = ((s + (s * s - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt();
            best = best.max(sigma);
        }
        best
    }

    /// Checks the Jacobian floor; warns when the displacement carries
    /// significant energy outside the dealias band.
    pub fn validate(&self) -> Result<(), DiffeoError> {
        self.check_jacobian()?;
        let total = self.disp.sobolev_norm(0.0);
        if total > 0.0 {
            let inner = self.disp.sobolev_norm_masked(0.0);
            let tail = (total * total - inner * inner).max(0.0) / (total * total);
            if tail > TAIL_WARN {
                log::warn!("displacement has {tail:.2e} of its energy outside the resolved band");
            }
        }
        Ok(())
    }

    /// The Jacobian floor alone.
    pub fn check_jacobian(&self) -> Result<(), DiffeoError> {
        let min_det = self
            .jacobian_det()
            .values()
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        if !(min_det > JACOBIAN_FLOOR) {
            return Err(DiffeoError::NotDiffeomorphism { min_det });
        }
        Ok(())
    }

    /// `self o other`.
    pub fn compose(&self, other: &DiffeoMap) -> DiffeoMap {
        let moved = compose_vector(&self.disp, other, Interpolation::CubicSpline);
        DiffeoMap { disp: &other.disp + &moved }
    }

    /// `phi^{-1}`; see [`DiffeoMap::invert_from`].
    pub fn invert(&self) -> Result<DiffeoMap, DiffeoError> {
        self.invert_from(None).map(|(m, _)| m)
    }

    /// Solves `h(y) = -g(y + h(y))` at every node so that `phi^{-1} = id + h`.
    ///
    /// Each node runs plain fixed-point iteration, then the same iteration
    /// damped by 1/2, then Newton's method, stopping once
    /// `|phi(phi^{-1}(y)) - y| <= 1e-10 L`. `guess` warm-starts all three.
    pub fn invert_from(&self, guess: Option<&DiffeoMap>) -> Result<(DiffeoMap, InversionStats), DiffeoError> {
        self.check_jacobian()?;
        let grid = self.grid().clone();
        let n = grid.n();
        let tol = INVERSE_TOL * grid.length();
        let g = SplineVector::new(&self.disp);
        let start: Vec<[f64; 2]> = match guess {
            Some(g) => {
                let (hx, hy) = (g.disp.x().values(), g.disp.y().values());
                (0..n * n).map(|i| [hx[i], hy[i]]).collect()
            }
            None => {
                let (gx, gy) = (self.disp.x().values(), self.disp.y().values());
                (0..n * n).map(|i| [-gx[i], -gy[i]]).collect()
            }
        };
        let mut hx = vec![0.0; n * n];
        let mut hy = vec![0.0; n * n];
        let mut stats = InversionStats::default();
        for i in 0..n * n {
            let y = grid.point(i % n, i / n);
            let (h, how, iters) = invert_point(&g, y, start[i], tol)?;
            match how {
                Method::FixedPoint => stats.fixed_point += 1,
                Method::Damped => stats.damped += 1,
                Method::Newton => stats.newton += 1,
            }
            stats.max_iterations = stats.max_iterations.max(iters);
            hx[i] = h[0];
            hy[i] = h[1];
        }
        let disp = VectorField2::new(
            ScalarField::from_values(&grid, hx)?,
            ScalarField::from_values(&grid, hy)?,
        )?;
        Ok((DiffeoMap { disp }, stats))
    }

    /// `sup_j |phi(psi(x_j)) - x_j|` with `phi` interpolated.
    pub fn inverse_residual(&self, psi: &DiffeoMap) -> f64 {
        let sg = SplineVector::new(&self.disp);
        let (hx, hy) = (psi.disp.x().values(), psi.disp.y().values());
        let g = self.grid();
        let n = g.n();
        (0..n * n)
            .map(|i| {
                let y = g.point(i % n, i / n);
                let h = [hx[i], hy[i]];
                residual(&sg, y, h).1
            })
            .fold(0.0, f64::max)
    }

    /// Largest pointwise distance between two maps.
    pub fn distance(&self, other: &DiffeoMap) -> f64 {
        (&self.disp - &other.disp).linf_norm()
    }
}

#[derive(Clone, Copy, Debug)]
enum Method {
    FixedPoint,
    Damped,
    Newton,
}

/// `(r, |r|)` with `r = h + g(y + h)`.
#[inline]
fn residual(g: &SplineVector, y: [f64; 2], h: [f64; 2]) -> ([f64; 2], f64) {
    let gv = g.eval([y[0] + h[0], y[1] + h[1]]);
    let r = [h[0] + gv[0], h[1] + gv[1]];
    (r, r[0].hypot(r[1]))
}

fn invert_point(
    g: &SplineVector,
    y: [f64; 2],
    h0: [f64; 2],
    tol: f64,
) -> Result<([f64; 2], Method, usize), DiffeoError> {
    let mut worst = f64::INFINITY;
    for (damping, method) in [(1.0, Method::FixedPoint), (0.5, Method::Damped)] {
        let mut h = h0;
        let (_, r0) = residual(g, y, h);
        for it in 0..INVERSE_MAX_ITER {
            let (r, norm) = residual(g, y, h);
            if norm <= tol {
                return Ok((h, method, it));
            }
            if !norm.is_finite() || norm > 1e3 * r0.max(tol) {
                break;
            }
            h = [h[0] - damping * r[0], h[1] - damping * r[1]];
        }
        worst = worst.min(residual(g, y, h).1);
    }
    let mut h = h0;
    for it in 0..INVERSE_MAX_ITER {
        let (gv, dg) = g.eval_jacobian([y[0] + h[0], y[1] + h[1]]);
        let r = [h[0] + gv[0], h[1] + gv[1]];
        let norm = r[0].hypot(r[1]);
        if norm <= tol {
            return Ok((h, Method::Newton, it));
        }
        if !norm.is_finite() {
            break;
        }
        worst = worst.min(norm);
        let (a, b, c, d) = (1.0 + dg[0][0], dg[0][1], dg[1][0], 1.0 + dg[1][1]);
        let det = a * d - b * c;
        if det.abs() < JACOBIAN_FLOOR {
            return Err(DiffeoError::NotDiffeomorphism { min_det: det });
        }
        h = [
            h[0] - (d * r[0] - b * r[1]) / det,
            h[1] - (-c * r[0] + a * r[1]) / det,
        ];
    }
    Err(DiffeoError::NoConvergence {
        iterations: INVERSE_MAX_ITER,
        residual: worst,
    })
}

/// `f o phi`, evaluated at the node images of `phi`.
pub fn compose_scalar(f: &ScalarField, phi: &DiffeoMap, kind: Interpolation) -> ScalarField {
    let points = phi.node_images();
    Interpolant::new(f, kind).sample(f.grid(), &points)
}

pub fn compose_vector(u: &VectorField2, phi: &DiffeoMap, kind: Interpolation) -> VectorField2 {
    let points = phi.node_images();
    if kind == Interpolation::CubicSpline {
        return SplineVector::new(u).sample(&points);
    }
    let x = Interpolant::new(u.x(), kind).sample(u.grid(), &points);
    let y = Interpolant::new(u.y(), kind).sample(u.grid(), &points);
    VectorField2::new(x, y).expect("components share a grid")
}
