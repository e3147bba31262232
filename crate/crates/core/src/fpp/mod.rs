//! Edge-weight laws, couplings, sampling and weighted geodesics.

pub mod constants;
pub mod coupling;
pub mod distribution;
pub mod feasible;
pub mod geodesic;
pub mod measure;
pub mod sampling;
pub mod variability;

pub use constants::{derive_technical_constants, TechnicalConstants};
pub use coupling::{Coupling, CouplingKind};
pub use distribution::{parse_rational, BorelSet, Distribution, Piece};
pub use feasible::{ball_edge_region, disjointify, scan_feasible_pairs, EdgeSet, FeasiblePair, FeasibleParams, RegionScan};
pub use geodesic::{passage_time, passage_time_geodesic, Dijkstra, GeodesicResult};
pub use measure::{empirical_edge_measure, resamplable_mass, EdgeMeasure};
pub use sampling::{
    edge_uniforms, layer_uniforms_into, sample_single_into, sample_weights, sample_weights_into, WeightConfig,
};
pub use variability::{is_more_variable, VariabilityCheck};
