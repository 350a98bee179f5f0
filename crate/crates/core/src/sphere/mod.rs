//! Quadrature on unit spheres and the spherical integral transforms.

mod rule;
mod transforms;

pub use rule::{build_rule, great_subsphere, RuleKind, SphereRule};
pub use transforms::{
    cosine_transform, hemisphere_moment, stiefel_fubini_check, Parity, SphericalFunction,
};
