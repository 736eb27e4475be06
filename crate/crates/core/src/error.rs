use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial degree {0} outside supported range 1..=10")]
    UnsupportedDegree(usize),

    #[error("quadrature order {order} too weak for degree {p} (need >= {min})")]
    QuadratureTooWeak { order: usize, p: usize, min: usize },

    #[error("size mismatch: expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("non-positive jacobian at quadrature point {index}: {value}")]
    InvertedElement { index: usize, value: f64 },

    #[error("degenerate tangents in element {element}: |a1 x a2| = {norm}")]
    DegenerateElement { element: usize, norm: f64 },

    #[error("frame projection degenerate in element {element} (seed parallel to target normal)")]
    ProjectionDegenerate { element: usize },

    #[error("normal rule {rule} does not match surface kind {surface}")]
    NormalRuleMismatch { rule: String, surface: String },

    #[error("mesh error stats are only defined for sphere meshes")]
    UnsupportedSurface,

    #[error("invalid mesh parameter: {0}")]
    InvalidParameter(String),

    #[error("mesh file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh adjacency inconsistent: {0}")]
    BadAdjacency(String),

    #[error("field/frames mismatch: {0}")]
    FrameMismatch(String),

    #[error("unknown test case '{name}'; available: {available}")]
    UnknownCase { name: String, available: String },

    #[error("non-finite state detected at step {step} (t = {time})")]
    NumericalAbort { step: usize, time: f64 },

    #[error("non-positive depth {value} at step {step}")]
    DryState { step: usize, value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
