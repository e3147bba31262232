use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: VertexId, count: usize },
    #[error("edge {edge} out of range (graph has {count} edges)")]
    EdgeOutOfRange { edge: EdgeId, count: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: VertexId },
    #[error("edge {edge} at position {position} does not touch vertex {vertex}")]
    BrokenPath { position: usize, edge: EdgeId, vertex: VertexId },
    #[error("vertex {to} is unreachable from {from}")]
    Unreachable { from: VertexId, to: VertexId },
    #[error("search budget exhausted after {expansions} expansions ({yielded} results so far)")]
    BudgetExceeded { expansions: u64, yielded: u64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ball would hold more than {cap} vertices")]
    TooLarge { cap: usize },
    #[error("sector contains no lattice points")]
    EmptySector,
    #[error("generator `{0}` evaluates to the identity")]
    TrivialGenerator(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetourError {
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("the path is a unique geodesic; use an ε-detour search instead")]
    UniqueGeodesic,
    #[error("the Cayley ball of radius {radius} is too small for this construction")]
    BallTooSmall { radius: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FppError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error("distribution has infinite mean")]
    InfiniteMean,
    #[error("P(w̃ > w) = 0 for this coupling; constants cannot be derived")]
    NoUpwardMass,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("weight configuration has {got} entries, graph has {expected} edges")]
    WeightLength { got: usize, expected: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}
