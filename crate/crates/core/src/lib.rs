//! Pseudo-spectral solver for the inviscid surface quasi-geostrophic equation
//! on the doubly periodic square.
//!
//! The same dynamics is integrated three ways: transport of `theta` by
//! `u = R^perp theta`, the closed evolution of the velocity `u`, and the
//! geodesic equation for the flow map on the diffeomorphism group. On top of
//! these sit the exponential map, the gliding-hump experiment for non-uniform
//! dependence of the data-to-solution map, and the scaling identity
//! `Phi_T(theta) = Phi(T theta) / T`.
//!
//! Fields live on an `N x N` grid ([`grid::Grid`]) and carry their spectrum
//! ([`field::ScalarField`]). Flow maps are stored as periodic displacements
//! ([`diffeo::DiffeoMap`]) and evaluated off the grid with cubic B-splines.

// `!(x > lo)` style guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diffeo;
pub mod error;
pub mod eulerian;
pub mod field;
pub mod geodesic;
pub mod grid;
pub mod initial;
pub mod interp;
pub mod nonuniform;
pub mod operators;
pub mod runner;
pub mod snapshot;
pub mod stepper;
