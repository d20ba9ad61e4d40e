use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge id `{0}`")]
    UnknownEdge(String),
    #[error("duplicate id `{0}` in graph description")]
    DuplicateId(String),
    #[error("graph fails row-finite/no-source validation: {0}")]
    InvalidGraph(String),
    #[error("operands belong to different graph instances")]
    GraphMismatch,
    #[error("paths do not compose: source {left} != range {right}")]
    NotComposable { left: String, right: String },
    #[error("vertex `{0}` receives no edge; cannot extend canonically")]
    NoIncomingEdge(String),
    #[error("monomial requires matching sources: s(mu) = {mu_source}, s(nu) = {nu_source}")]
    SourceMismatch { mu_source: String, nu_source: String },
    #[error("refinement depth {requested} is below existing key depth {present}")]
    RefineDepth { requested: usize, present: usize },
    #[error("evaluation path has length {given}, shorter than max key length {needed}")]
    EvalDepth { given: usize, needed: usize },
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("component at {place} is not supported on fiber {fiber}")]
    SupportViolation { place: String, fiber: String },
    #[error("operands belong to different models: {0}")]
    ModelMismatch(String),
    #[error("system fails Mauldin-Williams validation: {0}")]
    InvalidSystem(String),
    #[error("invalid similarity map: {0}")]
    InvalidMap(String),
    #[error("depth {requested} is below path length {length}")]
    CodeDepth { requested: usize, length: usize },
    #[error("point budget exceeded: needs {needed} points, cap is {cap}")]
    ResourceExceeded { needed: usize, cap: usize },
    #[error("graph is not strongly connected; dimension is undefined per component")]
    NotStronglyConnected,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("geometry section required for this operation")]
    GeometryRequired,
}

pub type Result<T> = std::result::Result<T, Error>;
