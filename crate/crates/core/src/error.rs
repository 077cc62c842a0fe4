use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex sets overlap at {0}")]
    Overlap(usize),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("path is not Hamiltonian")]
    NotHamiltonian,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid mass: {0}")]
    InvalidMass(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
