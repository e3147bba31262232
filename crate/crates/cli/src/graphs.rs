//! Graph construction from a [`GraphSpec`] and test-pair selection.

use fpplab_core::builders::{build_half_space, build_lattice_ball, build_regular_tree, build_sector, double_edges};
use fpplab_core::cayley::{build_cayley_ball, CayleyMode, GeneratorSpec};
use fpplab_core::graph::bfs_distances;
use fpplab_core::groups::{FiniteByLattice, FiniteGroup, FreeGroup, Group, Heisenberg, InfiniteDihedral, IntegerLattice};
use fpplab_core::{Graph, VertexId};

use crate::config::{bad, ConfigError, GeneratorEntry, GraphSpec, GroupSpec, ModeSpec, PairRule};

/// A built truncation. The basepoint is always vertex 0.
#[derive(Clone, Debug)]
pub struct BuiltGraph {
    pub graph: Graph,
    pub radius: usize,
    /// `vertex <id> element <canonical>` lines for Cayley balls.
    pub elements: Option<String>,
}

pub const BASEPOINT: VertexId = 0;

pub fn build_graph(spec: &GraphSpec, radius: usize) -> Result<BuiltGraph, ConfigError> {
    let err = |e: fpplab_core::BuildError| ConfigError(format!("graph: {e}"));
    let (graph, elements) = match spec {
        GraphSpec::Lattice { dimension, .. } => (build_lattice_ball(*dimension, radius).map_err(err)?.graph, None),
        GraphSpec::Sector { theta, theta_prime, .. } => {
            (build_sector(*theta, *theta_prime, radius).map_err(err)?.graph, None)
        }
        GraphSpec::HalfSpace { dimension, .. } => (build_half_space(*dimension, radius).map_err(err)?.graph, None),
        GraphSpec::Tree { degree, .. } => (build_regular_tree(*degree, radius).map_err(err)?, None),
        GraphSpec::Cayley { group, generators, mode, .. } => {
            let (g, table) = build_cayley(group, generators, *mode, radius)?;
            (g, Some(table))
        }
        GraphSpec::Doubled { inner } => {
            let b = build_graph(inner, radius)?;
            (double_edges(&b.graph), b.elements)
        }
    };
    Ok(BuiltGraph { graph, radius, elements })
}

fn cayley_with<G: Group>(
    group: G,
    gens: &[GeneratorEntry],
    mode: ModeSpec,
    radius: usize,
    image: impl Fn(&[i64]) -> Result<G::Elem, ConfigError>,
) -> Result<(Graph, String), ConfigError> {
    let names: Vec<&str> = gens.iter().map(|g| g.name.as_str()).collect();
    let images = gens.iter().map(|g| image(&g.image).map(|x| group.canonicalize(x))).collect::<Result<Vec<_>, _>>()?;
    let mode = match mode {
        ModeSpec::Reduced => CayleyMode::Reduced,
        ModeSpec::Unreduced => CayleyMode::Unreduced,
    };
    let ball = build_cayley_ball(group, GeneratorSpec::new(&names, images, mode), radius)
        .map_err(|e| ConfigError(format!("graph: {e}")))?;
    let table = ball.element_table();
    Ok((ball.into_graph(), table))
}

fn build_cayley(
    group: &GroupSpec,
    gens: &[GeneratorEntry],
    mode: ModeSpec,
    radius: usize,
) -> Result<(Graph, String), ConfigError> {
    if gens.is_empty() {
        return bad("a Cayley graph needs generators");
    }
    let arity = |want: usize, v: &[i64]| -> Result<(), ConfigError> {
        if v.len() == want {
            Ok(())
        } else {
            bad(format!("generator image {v:?} should have {want} entries"))
        }
    };
    match group {
        GroupSpec::Integers { dimension } => cayley_with(IntegerLattice::new(*dimension), gens, mode, radius, |v| {
            arity(*dimension, v)?;
            Ok(v.to_vec())
        }),
        GroupSpec::Free { rank } => {
            let rank = *rank;
            cayley_with(FreeGroup::new(rank), gens, mode, radius, |v| {
                if v.iter().any(|&x| x == 0 || x.unsigned_abs() as usize > rank) {
                    return bad(format!("free-group word {v:?} uses letters outside ±1..±{rank}"));
                }
                Ok(v.iter().map(|&x| x as i32).collect())
            })
        }
        GroupSpec::Dihedral => cayley_with(InfiniteDihedral, gens, mode, radius, |v| {
            arity(2, v)?;
            match v[1] {
                0 | 1 => Ok((v[0], v[1] == 1)),
                _ => bad("dihedral flip must be 0 or 1"),
            }
        }),
        GroupSpec::Heisenberg => cayley_with(Heisenberg, gens, mode, radius, |v| {
            arity(3, v)?;
            Ok((v[0], v[1], v[2]))
        }),
        GroupSpec::Semidirect { order, dimension, actions } => {
            let finite = FiniteGroup::cyclic(*order);
            let group = if actions.is_empty() {
                FiniteByLattice::direct(finite, *dimension)
            } else {
                if actions.len() != *dimension {
                    return bad("one action per lattice direction");
                }
                FiniteByLattice::new(finite, actions.clone()).map_err(|e| ConfigError(format!("graph: {e}")))?
            };
            let order = *order as i64;
            cayley_with(group, gens, mode, radius, |v| {
                arity(1 + *dimension, v)?;
                if !(0..order).contains(&v[0]) {
                    return bad(format!("finite part {} outside 0..{order}", v[0]));
                }
                Ok((v[0] as usize, v[1..].to_vec()))
            })
        }
    }
}

/// Truncation radius for a pair at distance `d`: the fixed radius, else `⌈κ·d⌉`.
pub fn radius_for(spec: &GraphSpec, kappa: f64, d: usize) -> usize {
    spec.fixed_radius().unwrap_or_else(|| ((kappa * d as f64).ceil() as usize).max(1))
}

/// Candidates are `x` at distance `⌊d/2⌋` and `y` at distance `⌈d/2⌉` from the
/// basepoint with `d(x, y) = d`. [`PairRule::First`] takes the smallest `x`
/// with a partner and then the smallest `y`.
pub fn select_pair(g: &Graph, d: usize, rule: PairRule) -> Option<(VertexId, VertexId)> {
    let from_base = bfs_distances(g, BASEPOINT);
    let (half_lo, half_hi) = (d / 2, d - d / 2);
    let mut best: Option<(u64, VertexId, VertexId)> = None;
    for x in (0..g.vertex_count()).filter(|&v| from_base[v] == Some(half_lo)) {
        let (from_x, counts) = geodesic_counts_from(g, x);
        for y in (0..g.vertex_count()).filter(|&v| from_base[v] == Some(half_hi) && from_x[v] == Some(d)) {
            match rule {
                PairRule::First => return Some((x, y)),
                PairRule::MostGeodesics => {
                    if best.is_none_or(|(c, _, _)| counts[y] > c) {
                        best = Some((counts[y], x, y));
                    }
                }
            }
        }
    }
    best.map(|(_, x, y)| (x, y))
}

/// Hop distances and saturating geodesic counts from `x`, parallel edges counted.
fn geodesic_counts_from(g: &Graph, x: VertexId) -> (Vec<Option<usize>>, Vec<u64>) {
    let dist = bfs_distances(g, x);
    let mut order: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| dist[v].is_some()).collect();
    order.sort_by_key(|&v| dist[v]);
    let mut counts = vec![0u64; g.vertex_count()];
    counts[x] = 1;
    for &v in &order[1..] {
        let dv = dist[v].unwrap();
        counts[v] = g
            .incident(v)
            .iter()
            .map(|&e| g.other_end(e, v))
            .filter(|&u| dist[u] == Some(dv - 1))
            .fold(0u64, |acc, u| acc.saturating_add(counts[u]));
    }
    (dist, counts)
}
