use thiserror::Error;

use crate::ambient::Geometry;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("point is off the curve (residual {residual:.3e})")]
    OffCurve { residual: f64 },
    #[error("point is off the model surface (drift {drift:.3e})")]
    OffSurface { drift: f64 },
    #[error("geodesics do not intersect")]
    NoIntersection,
    #[error("point projects to infinity")]
    AtInfinity,
    #[error("point lies on the horizon of the pole")]
    OnHorizon,
    #[error("ill-conditioned fit: null space dimension {nullity} (singular values {singular_values:?})")]
    IllConditioned {
        nullity: usize,
        singular_values: Vec<f64>,
    },
    #[error("curve vanishes identically on the geodesic")]
    IdenticallyZero,
    #[error("operation not defined for {0:?} geometry")]
    WrongGeometry(Geometry),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
