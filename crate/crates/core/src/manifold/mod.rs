//! Chart-based Riemannian metrics, the Levi-Civita connection and curvature,
//! and the ODE engine for geodesics, parallel transport and Jacobi fields.

mod curvature;
mod geodesic;
mod metric;
mod rays;

pub use curvature::{curvature, CurvatureData};
pub use geodesic::{
    integrate_geodesic, integrate_geodesic_with, parallel_transport, CoordinateCurve, GeodesicState,
};
pub use metric::{
    christoffel, ChartMetric, Christoffel, Connection, ExactMetric, MetricFormula, MetricJet,
    MetricSource, ProductMetric, SampledMetric, TangentVector,
};
pub use rays::{trace_ray, FieldInit, RayPoint, RaySpec};

#[cfg(test)]
mod tests;
