//! Benchmark geometries and their closed-form radial density profiles.
//!
//! Chart choices:
//! - euclidean: Cartesian coordinates.
//! - sphere: gnomonic chart about the north pole (any `n`), or colatitude/longitude for `n = 2`.
//! - hyperbolic: upper half-space `x_n > 0`, centered at `(0, …, 0, 1)`.
//! - damek_ricci: global coordinates `(V, Z, s)`, see [`damek_ricci`].
//! - ellipsoid: angles `(u, v)` of `(a sin u cos v, b sin u sin v, c cos u)`, centered on the equator.
//! - product: concatenated factor coordinates.
//! - generic: user expressions in `x0 … x{n-1}` on a coordinate box.

pub mod damek_ricci;
pub mod formulas;
pub mod generic;
pub mod profile;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{ChartMetric, ExactMetric, MetricSource, ProductMetric, SampledMetric};
pub use damek_ricci::{CliffordData, DamekRicci};
pub use profile::{Provenance, RadialProfile};

const WIDE: f64 = 1e3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereChart {
    #[default]
    Gnomonic,
    Polar,
}

fn one() -> f64 {
    1.0
}

fn minus_one() -> f64 {
    -1.0
}

fn default_axes() -> [f64; 3] {
    [1.0, 1.0, 1.3]
}

/// Description of a geometry, deserializable from experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Euclidean {
        n: usize,
    },
    Sphere {
        n: usize,
        #[serde(default = "one")]
        curvature: f64,
        #[serde(default)]
        chart: SphereChart,
    },
    Hyperbolic {
        n: usize,
        #[serde(default = "minus_one")]
        curvature: f64,
    },
    Product {
        factors: Vec<SpaceSpec>,
    },
    DamekRicci {
        p: usize,
        q: usize,
        /// Optional row-major `p × p` matrices; shipped tables are used when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j_maps: Option<Vec<Vec<Vec<f64>>>>,
    },
    Ellipsoid {
        #[serde(default = "default_axes")]
        semi_axes: [f64; 3],
    },
    Generic {
        metric: Vec<Vec<String>>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default = "one")]
        scale: f64,
    },
}

impl SpaceSpec {
    /// Short names used in configs and reports.
    pub fn from_alias(name: &str) -> Result<Self> {
        let spec = match name {
            "euclidean2" | "r2" => Self::Euclidean { n: 2 },
            "euclidean3" | "r3" => Self::Euclidean { n: 3 },
            "euclidean4" | "r4" => Self::Euclidean { n: 4 },
            "euclidean5" | "r5" => Self::Euclidean { n: 5 },
            "s2" => Self::Sphere {
                n: 2,
                curvature: 1.0,
                chart: SphereChart::Gnomonic,
            },
            "s2polar" => Self::Sphere {
                n: 2,
                curvature: 1.0,
                chart: SphereChart::Polar,
            },
            "s3" => Self::Sphere {
                n: 3,
                curvature: 1.0,
                chart: SphereChart::Gnomonic,
            },
            "h2" => Self::Hyperbolic {
                n: 2,
                curvature: -1.0,
            },
            "h3" => Self::Hyperbolic {
                n: 3,
                curvature: -1.0,
            },
            "s2xr" => Self::Product {
                factors: vec![
                    Self::Sphere {
                        n: 2,
                        curvature: 1.0,
                        chart: SphereChart::Gnomonic,
                    },
                    Self::Euclidean { n: 1 },
                ],
            },
            "ellipsoid" => Self::Ellipsoid {
                semi_axes: default_axes(),
            },
            "dr21" => Self::DamekRicci {
                p: 2,
                q: 1,
                j_maps: None,
            },
            "dr43" => Self::DamekRicci {
                p: 4,
                q: 3,
                j_maps: None,
            },
            other => return Err(Error::Config(format!("unknown space alias `{other}`"))),
        };
        Ok(spec)
    }

    /// Compact human-readable descriptor.
    pub fn descriptor(&self) -> String {
        match self {
            Self::Euclidean { n } => format!("R{n}"),
            Self::Sphere { n, curvature, .. } if *curvature == 1.0 => format!("S{n}"),
            Self::Sphere { n, curvature, .. } => format!("S{n}(K={curvature})"),
            Self::Hyperbolic { n, curvature } if *curvature == -1.0 => format!("H{n}"),
            Self::Hyperbolic { n, curvature } => format!("H{n}(K={curvature})"),
            Self::Product { factors } => factors
                .iter()
                .map(|f| f.descriptor())
                .collect::<Vec<_>>()
                .join("x"),
            Self::DamekRicci { p, q, .. } => format!("DR({p},{q})"),
            Self::Ellipsoid {
                semi_axes: [a, b, c],
            } => format!("E({a},{b},{c})"),
            Self::Generic { metric, .. } => format!("generic{}", metric.len()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Euclidean { n } | Self::Sphere { n, .. } | Self::Hyperbolic { n, .. } => *n,
            Self::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
            Self::DamekRicci { p, q, .. } => p + q + 1,
            Self::Ellipsoid { .. } => 2,
            Self::Generic { metric, .. } => metric.len(),
        }
    }

    /// Whether a closed-form radial density is known.
    pub fn is_harmonic_model(&self) -> bool {
        closed_form_profile(self).is_ok()
    }
}

struct Built {
    source: Arc<dyn MetricSource>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    center: Vec<f64>,
}

fn boxed(n: usize, half: f64) -> (Vec<f64>, Vec<f64>) {
    (vec![-half; n], vec![half; n])
}

fn build(spec: &SpaceSpec) -> Result<Built> {
    let built = match spec {
        SpaceSpec::Euclidean { n } => {
            if *n == 0 {
                return Err(Error::Parameter("dimension must be positive".into()));
            }
            let (lower, upper) = boxed(*n, WIDE);
            Built {
                source: Arc::new(ExactMetric(formulas::Flat { n: *n })),
                lower,
                upper,
                center: vec![0.0; *n],
            }
        }
        SpaceSpec::Sphere {
            n,
            curvature,
            chart,
        } => {
            if *curvature <= 0.0 || !curvature.is_finite() {
                return Err(Error::Parameter(format!(
                    "sphere curvature must be positive, got {curvature}"
                )));
            }
            match chart {
                SphereChart::Gnomonic => {
                    let (lower, upper) = boxed(*n, WIDE);
                    Built {
                        source: Arc::new(ExactMetric(formulas::Gnomonic {
                            n: *n,
                            k: *curvature,
                        })),
                        lower,
                        upper,
                        center: vec![0.0; *n],
                    }
                }
                SphereChart::Polar => {
                    if *n != 2 {
                        return Err(Error::Unsupported(
                            "the polar sphere chart is two-dimensional".into(),
                        ));
                    }
                    Built {
                        source: Arc::new(ExactMetric(formulas::PolarS2 { k: *curvature })),
                        lower: vec![0.0, -WIDE],
                        upper: vec![std::f64::consts::PI, WIDE],
                        center: vec![std::f64::consts::FRAC_PI_2, 0.0],
                    }
                }
            }
        }
        SpaceSpec::Hyperbolic { n, curvature } => {
            if *curvature >= 0.0 || !curvature.is_finite() {
                return Err(Error::Parameter(format!(
                    "hyperbolic curvature must be negative, got {curvature}"
                )));
            }
            let (lower, mut upper) = boxed(*n, WIDE);
            upper[n - 1] = 1e6;
            let mut center = vec![0.0; *n];
            center[n - 1] = 1.0;
            Built {
                source: Arc::new(ExactMetric(formulas::HalfSpace {
                    n: *n,
                    k: *curvature,
                })),
                lower,
                upper,
                center,
            }
        }
        SpaceSpec::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::Parameter("product needs at least one factor".into()));
            }
            let parts = factors.iter().map(build).collect::<Result<Vec<_>>>()?;
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            let mut center = Vec::new();
            let mut sources = Vec::new();
            for p in parts {
                lower.extend(p.lower);
                upper.extend(p.upper);
                center.extend(p.center);
                sources.push(p.source);
            }
            Built {
                source: Arc::new(ProductMetric::new(sources)),
                lower,
                upper,
                center,
            }
        }
        SpaceSpec::DamekRicci { p, q, j_maps } => {
            let clifford = match j_maps {
                None => CliffordData::shipped(*p, *q)?,
                Some(maps) => {
                    if maps.len() != *q {
                        return Err(Error::Algebra(format!(
                            "expected {q} J-maps, got {}",
                            maps.len()
                        )));
                    }
                    let mut flat = Vec::with_capacity(*q);
                    for m in maps {
                        if m.len() != *p || m.iter().any(|row| row.len() != *p) {
                            return Err(Error::Algebra(format!("J-maps must be {p}×{p}")));
                        }
                        flat.push(m.iter().flatten().copied().collect());
                    }
                    CliffordData { p: *p, maps: flat }
                }
            };
            let dr = DamekRicci::new(clifford)?;
            let n = p + q + 1;
            let (lower, upper) = boxed(n, WIDE);
            Built {
                source: Arc::new(ExactMetric(dr)),
                lower,
                upper,
                center: vec![0.0; n],
            }
        }
        SpaceSpec::Ellipsoid { semi_axes } => {
            if semi_axes.iter().any(|a| *a <= 0.0 || !a.is_finite()) {
                return Err(Error::Parameter(format!(
                    "semi-axes must be positive, got {semi_axes:?}"
                )));
            }
            Built {
                source: Arc::new(ExactMetric(formulas::Ellipsoid {
                    axes: *semi_axes,
                    pole_margin: 0.05,
                })),
                lower: vec![0.0, -WIDE],
                upper: vec![std::f64::consts::PI, WIDE],
                center: vec![std::f64::consts::FRAC_PI_2, 0.0],
            }
        }
        SpaceSpec::Generic {
            metric,
            lower,
            upper,
            center,
            scale,
        } => {
            let expr = generic::ExpressionMetric::parse(metric)?;
            let n = expr.dim();
            if lower.len() != n || upper.len() != n {
                return Err(Error::Config(
                    "generic metric box does not match its dimension".into(),
                ));
            }
            if lower.iter().zip(upper).any(|(a, b)| a >= b) {
                return Err(Error::Config("generic metric box is empty".into()));
            }
            if *scale <= 0.0 {
                return Err(Error::Config(
                    "generic metric scale must be positive".into(),
                ));
            }
            let center = center.clone().unwrap_or_else(|| {
                lower
                    .iter()
                    .zip(upper)
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect()
            });
            Built {
                source: Arc::new(SampledMetric::new(n, *scale, move |x| expr.eval(x))),
                lower: lower.clone(),
                upper: upper.clone(),
                center,
            }
        }
    };
    Ok(built)
}

/// Instantiates the chart metric described by `spec`.
pub fn make_space(spec: &SpaceSpec) -> Result<ChartMetric> {
    let b = build(spec)?;
    ChartMetric::new(spec.descriptor(), b.source, b.lower, b.upper, b.center)
}

/// Closed-form `θ̄` for the harmonic model spaces.
pub fn closed_form_profile(spec: &SpaceSpec) -> Result<RadialProfile> {
    match spec {
        SpaceSpec::Euclidean { n } => Ok(RadialProfile::flat(*n)),
        SpaceSpec::Sphere { n, curvature, .. } => Ok(RadialProfile::sphere(*n, *curvature)),
        SpaceSpec::Hyperbolic { n, curvature } => Ok(RadialProfile::hyperbolic(*n, *curvature)),
        SpaceSpec::DamekRicci { p, q, .. } => Ok(RadialProfile::damek_ricci(*p, *q)),
        SpaceSpec::Product { factors }
            if factors
                .iter()
                .all(|f| matches!(f, SpaceSpec::Euclidean { .. })) =>
        {
            Ok(RadialProfile::flat(spec.dim()))
        }
        other => Err(Error::Unsupported(format!(
            "{} has no closed-form radial density",
            other.descriptor()
        ))),
    }
}
