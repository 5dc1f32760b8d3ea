use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("saddle exponent alpha must satisfy alpha > 1 (got {0})")]
    InvalidAlpha(f64),
    #[error("smoothing scale epsilon must be positive and finite (got {0})")]
    InvalidEpsilon(f64),
    #[error("non-finite coordinate ({re}, {im})")]
    NonFinite { re: f64, im: f64 },
    #[error("closed-form Kahler factor is only defined for the pure smoothing")]
    ClosedFormUnavailable,
    #[error("symplectic form is degenerate (|det| = {det:e})")]
    Degenerate { det: f64 },
    #[error("polygon order must be at least 1 (got {0})")]
    InvalidOrder(u32),
    #[error("grid needs at least 2 points per axis (got {0})")]
    GridTooSmall(usize),
    #[error("potential is not finite at ({x}, {y})")]
    NonFinitePotential { x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("flow settings invalid: {0}")]
    InvalidSettings(&'static str),
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("trajectory did not leave the perturbed region before t = {max_time}")]
    NoEscape { max_time: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SectorError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("point never enters the V region on the requested side")]
    NotInNeighborhood,
    #[error("ill-conditioned tangent estimate (|grad| = {0:e})")]
    Condition(f64),
    #[error("truncation region not reached before t = {max_time}")]
    MaxTime { max_time: f64 },
}

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("malformed surface json")]
    Json(#[from] serde_json::Error),
    #[error("unknown built-in surface `{0}`")]
    UnknownBuiltin(String),
    #[error("surface failed validation: {0:?}")]
    Invalid(Vec<crate::surface::Violation>),
    #[error("unknown hypersurface ({saddle}, {minimum})")]
    UnknownHypersurface { saddle: String, minimum: String },
    #[error("unknown piece ({0}, {1})")]
    UnknownPiece(String, String),
    #[error("component `{0}` is not a polygon (genus 0, one end); add arcs first")]
    NotPolygonal(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
