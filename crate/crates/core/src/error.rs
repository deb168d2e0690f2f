use thiserror::Error;

/// Errors raised by grid construction, assembly, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no interior nodes (m = {0}, need m >= 2)")]
    NoInteriorNodes(usize),
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("non-finite sample at node {node}")]
    NonFiniteSample { node: usize },
    #[error("stencil leaves grid at node {node}")]
    StencilLeavesGrid { node: usize },
    #[error("invalid order k = {k}, n = {n}")]
    InvalidOrder { k: usize, n: usize },
    #[error("mesh function does not belong to this grid")]
    GridMismatch,
    #[error("coefficient field incomplete at node {node}")]
    CoefficientFieldIncomplete { node: usize },
    #[error("linear solve did not converge after {iterations} iterations (residual {residual:e})")]
    LinearNotConverged { iterations: usize, residual: f64 },
    #[error("solver breakdown: {0}")]
    SolverBreakdown(String),
    #[error("negative right-hand side {value:e} at node {node}")]
    NegativeRhs { node: usize, value: f64 },
    #[error("radicand negative at node {node} ({value:e})")]
    RadicandNegative { node: usize, value: f64 },
    #[error("frozen coefficient not elliptic: {0}")]
    FrozenCoefficientNotElliptic(Box<Error>),
    #[error("Newton linearization not solvable: {0}")]
    NewtonNotSolvable(Box<Error>),
    #[error("method requires {0}")]
    UnsupportedMethod(String),
    #[error("unknown problem label {0:?}")]
    UnknownProblem(String),
    #[error("no exact solution")]
    NoExactSolution,
    #[error("slice plane not on grid (value {0})")]
    SliceOffGrid(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("outer iteration {outer}: {source}")]
    InnerSolve {
        outer: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("malformed field file: {0}")]
    MalformedField(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status for the command-line driver: 2 for invalid configuration,
    /// 3 for solver failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Csv(_) | Error::MalformedField(_) => 4,
            Error::LinearNotConverged { .. }
            | Error::SolverBreakdown(_)
            | Error::RadicandNegative { .. }
            | Error::FrozenCoefficientNotElliptic(_)
            | Error::NewtonNotSolvable(_)
            | Error::InnerSolve { .. }
            | Error::NotConverged(_) => 3,
            _ => 2,
        }
    }
}
