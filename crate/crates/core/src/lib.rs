//! Numerical laboratory for volume densities, geodesic spheres and tubes on
//! Riemannian model spaces.
//!
//! Module map:
//! - [`manifold`]: chart metrics, connection, curvature, geodesic and Jacobi ODEs.
//! - [`spaces`]: built-in geometries and closed-form radial profiles.
//! - [`density`]: `θ`, the geodesic involution, sphere mean curvature, ball volumes, D'Atri checks.
//! - [`sphere`]: quadrature on unit spheres and spherical integral transforms.
//! - [`tube`]: tube volumes and curvature integrals about curves.
//! - [`series`]: Taylor coefficients of `θ(ru)` and harmonicity tests.
//! - [`cli`]: experiment configs, orchestration and report emission.

pub mod cli;
pub mod density;
pub mod error;
pub mod manifold;
pub mod numerics;
pub mod series;
pub mod spaces;
pub mod sphere;
pub mod tube;

pub use error::{Error, Result};
