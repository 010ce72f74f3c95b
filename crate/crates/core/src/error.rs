use thiserror::Error;

/// Errors raised by grid construction, solvers, and the geometric transforms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite value {value} at node ({i}, {j}) = ({x}, {y})")]
    NonFinite {
        i: usize,
        j: usize,
        x: f64,
        y: f64,
        value: f64,
    },

    #[error("point ({x}, {y}) is at a singular corner of the barrier")]
    SingularCorner { x: f64, y: f64 },

    #[error(
        "cell-Peclet violation: |k| hx = {product} exceeds 2 (k = {k}, hx = {hx}); \
         refine nx or use upwind convection"
    )]
    CellPeclet { k: f64, hx: f64, product: f64 },

    #[error("singular system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("the origin is not in the domain of the inverse map")]
    Puncture,

    #[error("point ({x}, {y}) is outside the closed upper half-plane")]
    OutsideHalfPlane { x: f64, y: f64 },

    #[error("stencil at ({x}, {y}) touches the excluded disk of radius {radius}")]
    PunctureProximity { x: f64, y: f64, radius: f64 },

    #[error("integration path passes within {radius} of the origin")]
    PathThroughPuncture { radius: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("field shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("point ({x}, {y}) lies outside the sampled region")]
    OutOfRange { x: f64, y: f64 },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
