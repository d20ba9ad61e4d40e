//! Exact graph-algebra identities meet graph-directed fractal geometry.
//!
//! For a finite directed graph that is row-finite and has no sources, this
//! crate builds two computational worlds and the bridge between them:
//!
//! * **Symbolic.** The *-algebra generated by vertex projections `p_v` and
//!   edge isometries `s_e` under the Cuntz-Krieger relations
//!   ([`algebra`]), cylinder functions on the space of infinite paths
//!   ([`cylinder`]), the diagonal embedding `tau` sending the indicator of
//!   a cylinder to a path projection, and an expression grammar for all of
//!   it ([`expr`]). Every identity here is decided exactly over complex
//!   rationals ([`scalar`]).
//! * **Geometric.** A Mauldin-Williams system attaches boxes to vertices
//!   and contracting similarities to edges ([`mwifs`]); the engine
//!   certifies attractor approximations, codes finite paths to points with
//!   exact radius bounds, checks equivariance and surjectivity of the
//!   coding map, and computes the Hausdorff dimension from the spectral
//!   radius of the ratio matrix.
//!
//! The bridge is the bundle of correspondences ([`correspondence`]): one
//! fiber per edge over a coefficient algebra with one fiber per vertex.
//! Its representation `(psi, pi)` satisfies the Toeplitz identities and
//! the Cuntz-Pimsner covariance relation exactly in the path-space model,
//! and up to contraction-rate residuals in the geometric model, which is
//! the checkable content of the statement that a self-similar structure
//! on the graph's path space represents the graph algebra.
//!
//! [`config`] reads a declarative TOML description of a system,
//! [`sampling`] and [`suites`] provide seeded randomized verification
//! batteries, and [`render`] draws attractors.

pub mod algebra;
pub mod config;
pub mod correspondence;
pub mod cylinder;
pub mod error;
pub mod expr;
pub mod graph;
pub mod mesh;
pub mod mwifs;
pub mod render;
pub mod sampling;
pub mod scalar;
pub mod suites;

pub use error::{Error, Result};
