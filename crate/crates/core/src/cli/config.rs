use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::series::FitWindow;
use crate::spaces::SpaceSpec;
use crate::sphere::RuleKind;
use crate::tube::TubeQuadrature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DensityProfile,
    BallVolumes,
    TubeVolume,
    TubeInvariants,
    CheckHarmonic,
    CheckDatri,
    TransformCosine,
    StiefelFubini,
    SeriesFit,
    SteinerCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::DensityProfile => "density-profile",
            Self::BallVolumes => "ball-volumes",
            Self::TubeVolume => "tube-volume",
            Self::TubeInvariants => "tube-invariants",
            Self::CheckHarmonic => "check-harmonic",
            Self::CheckDatri => "check-datri",
            Self::TransformCosine => "transform-cosine",
            Self::StiefelFubini => "stiefel-fubini",
            Self::SeriesFit => "series-fit",
            Self::SteinerCheck => "steiner-check",
        }
    }
}

/// A space given by alias or by full description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Alias(String),
    Spec(SpaceSpec),
}

impl SpaceRef {
    pub fn resolve(&self) -> Result<SpaceSpec> {
        match self {
            Self::Alias(a) => SpaceSpec::from_alias(a),
            Self::Spec(s) => Ok(s.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            Self::One(x) => vec![x.clone()],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Radii {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Default for Radii {
    fn default() -> Self {
        Self::List(Vec::new())
    }
}

impl Radii {
    /// Expanded radii; ranges include both ends.
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Self::List(v) => v.clone(),
            Self::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                c => (0..*c)
                    .map(|i| start + (stop - start) * i as f64 / (c - 1) as f64)
                    .collect(),
            },
        };
        if v.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Config("radii must be positive".into()));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("radii must be strictly increasing".into()));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    /// Unit-speed geodesic; point defaults to the chart center.
    Geodesic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Vec<f64>>,
        length: f64,
    },
    /// Coordinate circle `c + R(cos t e_a + sin t e_b)`, `t ∈ [0, 2π]`.
    Circle {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "default_plane")]
        plane: [usize; 2],
    },
}

fn default_plane() -> [usize; 2] {
    [0, 1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Level and kind of the sphere rule for ball volumes, D'Atri checks and transforms.
    pub rule_level: usize,
    pub rule_kind: RuleKind,
    /// Level of the great-subsphere rule in the Stiefel check.
    pub inner_level: usize,
    pub ode_rtol: f64,
    pub tube: TubeQuadrature,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rule_level: 8,
            rule_kind: RuleKind::Hemispherical,
            inner_level: 8,
            ode_rtol: 1e-10,
            tube: TubeQuadrature::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Plot,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "plot" => Ok(Self::Plot),
            o => Err(Error::Config(format!("unknown output format `{o}`"))),
        }
    }
}

fn default_spread() -> f64 {
    0.2
}

pub const DEFAULT_TIMESTAMP: &str = "1970-01-01T00:00:00Z";

fn default_timestamp() -> String {
    DEFAULT_TIMESTAMP.into()
}

/// One experiment, read from a single JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub space: OneOrMany<SpaceRef>,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub radii: Radii,
    /// Base points; the chart center when empty.
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// Additional seeded base points `center + δ`, `δ` uniform in `±point_spread` per coordinate.
    #[serde(default)]
    pub random_points: usize,
    #[serde(default = "default_spread")]
    pub point_spread: f64,
    /// Explicit directions, used at every base point.
    #[serde(default)]
    pub directions: Vec<Vec<f64>>,
    /// Additional seeded random directions per base point.
    #[serde(default)]
    pub random_directions: usize,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    /// Per-quantity tolerances overriding the built-in ones.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Quantities that are negative controls and must fail, as `name` or `SPACE:name`.
    #[serde(default)]
    pub expect_fail: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    /// Series order `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<FitWindow>,
    /// Odd-order relation indices `k` checked by `series-fit`.
    #[serde(default)]
    pub vanhecke: Vec<usize>,
    /// Test functions for the transform experiments.
    #[serde(default)]
    pub functions: Vec<String>,
    /// Ambient dimensions for the transform experiments; the space dimension when empty.
    #[serde(default)]
    pub dims: Vec<usize>,
    /// Steiner steps `Δ`.
    #[serde(default)]
    pub deltas: Vec<f64>,
    /// Geodesic times for the first-integral check.
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default = "default_timestamp")]
    pub timestamp: String,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_value(v: Value) -> Result<Self> {
        let c: Self = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_value(v)
    }

    pub fn spaces(&self) -> Result<Vec<SpaceSpec>> {
        self.space.to_vec().iter().map(SpaceRef::resolve).collect()
    }

    pub fn tolerance(&self, quantity: &str, default: f64) -> f64 {
        self.tolerances.get(quantity).copied().unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        let spaces = self.spaces()?;
        if spaces.is_empty() {
            return Err(Error::Config("no space given".into()));
        }
        let radii = self.radii.values()?;
        let needs_radii = matches!(
            self.experiment,
            ExperimentKind::DensityProfile
                | ExperimentKind::BallVolumes
                | ExperimentKind::TubeVolume
                | ExperimentKind::TubeInvariants
                | ExperimentKind::CheckDatri
                | ExperimentKind::SteinerCheck
        );
        if needs_radii && radii.is_empty() {
            return Err(Error::Config(format!(
                "{} needs radii",
                self.experiment.name()
            )));
        }
        if self.tolerances.values().any(|t| !(*t >= 0.0)) {
            return Err(Error::Config("tolerances must be nonnegative".into()));
        }
        if self.deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Config("Steiner steps must be positive".into()));
        }
        if !(self.point_spread >= 0.0) {
            return Err(Error::Config("point_spread must be nonnegative".into()));
        }
        if !(self.quadrature.ode_rtol > 0.0) {
            return Err(Error::Config("ode_rtol must be positive".into()));
        }
        Ok(())
    }
}

/// Sets `path` (dot-separated, numeric segments index arrays) to `value`,
/// parsed as JSON or taken as a string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, key) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Array(items) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| Error::Config(format!("`{key}` is not an array index")))?;
                let slot = items.get_mut(idx).ok_or_else(|| {
                    Error::Config(format!("index {idx} out of range in `{path}`"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            Value::Object(map) => {
                if last {
                    map.insert((*key).to_string(), value);
                    return Ok(());
                }
                map.entry(*key)
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            _ => {
                return Err(Error::Config(format!(
                    "cannot descend into `{key}` of `{path}`"
                )))
            }
        };
    }
    Err(Error::Config("empty override path".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn alias_and_range() {
        let c = ExperimentConfig::from_json(
            r#"{"space": "h3", "experiment": "tube-volume", "radii": {"start": 0.2, "stop": 0.8, "count": 3}}"#,
        )
        .unwrap();
        assert_eq!(c.spaces().unwrap()[0].descriptor(), "H3");
        let r = c.radii.values().unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn schema_violations() {
        for bad in [
            r#"{"space": "h3", "experiment": "tube-volume", "radii": [0.5, 0.2]}"#,
            r#"{"space": "h3", "experiment": "tube-volume", "radii": [-0.1]}"#,
            r#"{"space": "h3", "experiment": "tube-volume"}"#,
            r#"{"space": "h3", "experiment": "bogus", "radii": [0.5]}"#,
            r#"{"space": "nowhere", "experiment": "series-fit"}"#,
            r#"{"space": "h3", "experiment": "series-fit", "colour": 1}"#,
        ] {
            assert!(
                matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn overrides() {
        let mut v =
            json!({"space": "h3", "radii": [0.2, 0.5], "quadrature": {"tube": {"t_order": 4}}});
        apply_override(&mut v, "space=s3").unwrap();
        apply_override(&mut v, "radii.1=0.6").unwrap();
        apply_override(&mut v, "quadrature.tube.t_order=8").unwrap();
        apply_override(&mut v, "seed=3").unwrap();
        assert_eq!(v["space"], "s3");
        assert_eq!(v["radii"][1], 0.6);
        assert_eq!(v["quadrature"]["tube"]["t_order"], 8);
        assert_eq!(v["seed"], 3);
        assert!(apply_override(&mut v, "noequals").is_err());
        assert!(apply_override(&mut v, "radii.9=1").is_err());
    }
}
