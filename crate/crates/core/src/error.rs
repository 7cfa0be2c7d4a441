use thiserror::Error;

/// Failures of the exact polynomial and linear algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable contexts differ: {left:?} vs {right:?}")]
    ContextMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("variable `{0}` has no counterpart in the target context")]
    IncompatibleContext(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("exponent vector has length {got}, context has {expected} variables")]
    Arity { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Failures of line-geometry constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("points are proportional; they do not span a line")]
    DegenerateLine,
    #[error("the zero vector is not a projective point")]
    ZeroPoint,
    #[error("section index {0} is outside 1..=6")]
    IndexOutOfRange(usize),
    #[error("point and plane are not incident")]
    NotIncident,
    #[error("lines do not meet (skew residual {0:.3e})")]
    SkewLines(f64),
    #[error("gradient vanishes: {0}")]
    SingularPoint(String),
    #[error("{0}")]
    Degenerate(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("branch values must be pairwise distinct: lambda_{i} = lambda_{j}")]
    DuplicateLambdas { i: usize, j: usize },
    #[error("expected 6 branch values, got {0}")]
    WrongLambdaCount(usize),
    #[error("invalid tolerance `{name}` = {value}")]
    BadTolerance { name: String, value: f64 },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("trajectory diverged at step {step}")]
    Divergence { step: usize },
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error("expected a Hamiltonian in the 6-variable affine context, got {0:?}")]
    WrongContext(Vec<String>),
}

/// Crate-wide error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
