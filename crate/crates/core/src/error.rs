use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A direction at which a ray hit the conjugate-point guard.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateHit {
    pub direction: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the chart domain")]
    Domain { point: Vec<f64> },
    #[error("metric is not positive definite: {0}")]
    Metric(String),
    #[error("orbit left the chart domain near parameter {t}")]
    Escape { t: f64 },
    #[error("step size underflow at parameter {t} (step {step:e})")]
    Stiffness { t: f64, step: f64 },
    #[error("conjugate point reached at radius {radius}")]
    ConjugatePoint { radius: f64 },
    #[error("conjugate points in {} direction(s), first at radius {}", .0.len(), .0.first().map_or(f64::NAN, |h| h.radius))]
    ConjugateDirections(Vec<ConjugateHit>),
    #[error("tube self-focus at t = {t}, radius {rho}")]
    SelfFocus { t: f64, rho: f64 },
    #[error("inadmissible Clifford data: {0}")]
    Algebra(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("ill-conditioned fit (condition number {condition:e}); use a smaller order or window")]
    IllConditioned { condition: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures that mean "this step wandered off the valid region".
    pub(crate) fn is_domain_like(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::Metric(_))
    }

    /// Failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Escape { .. }
                | Error::Stiffness { .. }
                | Error::ConjugatePoint { .. }
                | Error::ConjugateDirections(_)
                | Error::SelfFocus { .. }
                | Error::IllConditioned { .. }
                | Error::Domain { .. }
                | Error::Metric(_)
        )
    }
}
