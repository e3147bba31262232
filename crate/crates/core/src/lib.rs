//! Graphs, ε-detours, first-passage weights and Voronoi tilings.
//!
//! Everything here is deterministic given its inputs; Monte Carlo routines take
//! an explicit seed and replicate index.

pub mod builders;
pub mod cayley;
pub mod detours;
pub mod error;
pub mod fpp;
pub mod graph;
pub mod groups;
pub mod stats;
pub mod tiling;

pub use detours::Rational;
pub use error::{BuildError, DetourError, FppError, GraphError};
pub use fpp::{BorelSet, Coupling, CouplingKind, Distribution, GeodesicResult, WeightConfig};
pub use graph::{BallView, EdgeId, Graph, GraphBuilder, Path, VertexId};
