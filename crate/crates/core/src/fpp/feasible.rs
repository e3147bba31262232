//! Feasible pairs `(α, γ)` along a weighted geodesic.

use std::collections::HashMap;

use crate::detours::{detour_length_bound, is_epsilon_detour, Rational};
use crate::error::GraphError;
use crate::graph::{
    bfs_limited, induced_edges, EdgeId, Graph, GraphBuilder, Path, PathSearch, SelfAvoidingPaths, VertexId,
};

use super::distribution::BorelSet;
use super::geodesic::GeodesicResult;

/// A set of edge ids, sorted and without repeats.
pub type EdgeSet = Vec<EdgeId>;

/// Edges with both endpoints in `B(v, radius)`.
pub fn ball_edge_region(g: &Graph, v: VertexId, radius: usize) -> EdgeSet {
    let dist = bfs_limited(g, v, radius, |_| true);
    let inside: Vec<bool> = dist.iter().map(Option::is_some).collect();
    induced_edges(g, &inside)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibleParams<'a> {
    pub epsilon: Rational,
    pub c: usize,
    pub i0: &'a BorelSet,
    /// Node expansions allowed per region.
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasiblePair {
    pub region: usize,
    /// `α` is `geodesic.subpath(alpha_range.0, alpha_range.1)`.
    pub alpha_range: (usize, usize),
    pub alpha: Path,
    pub gamma: Path,
}

impl FeasiblePair {
    /// Re-checks the defining conditions from scratch.
    pub fn verify(&self, geodesic: &Path, w: &[f64], region: &[EdgeId], params: &FeasibleParams<'_>) -> bool {
        let (from, to) = self.alpha_range;
        if to > geodesic.len() || from >= to || geodesic.subpath(from, to) != self.alpha {
            return false;
        }
        let eps1 = Rational::from_integer(1) + params.epsilon;
        let length_ok = Rational::from_integer(self.gamma.len() as i64) <= eps1 * Rational::from_integer(params.c as i64);
        let in_region = |p: &Path| p.edges().iter().all(|e| region.binary_search(e).is_ok());
        let a = self.alpha.edge_set();
        let c = self.gamma.edge_set();
        let symmetric_ok = a
            .iter()
            .filter(|e| c.binary_search(e).is_err())
            .chain(c.iter().filter(|e| a.binary_search(e).is_err()))
            .all(|&e| params.i0.contains(w[e]));
        self.alpha.is_self_avoiding()
            && self.gamma.is_self_avoiding()
            && is_epsilon_detour(&self.alpha, &self.gamma, params.epsilon)
            && length_ok
            && self.alpha.len() <= params.c
            && in_region(&self.alpha)
            && in_region(&self.gamma)
            && symmetric_ok
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionScan {
    pub found: Option<FeasiblePair>,
    pub budget_exceeded: bool,
    pub expansions: u64,
}

/// For every region, the first feasible pair in the order (start of `α`,
/// length of `α`, lexicographic `γ`), with `|α| ≤ C`.
pub fn scan_feasible_pairs(
    g: &Graph,
    w: &[f64],
    geo: &GeodesicResult,
    regions: &[EdgeSet],
    params: &FeasibleParams<'_>,
) -> Result<Vec<RegionScan>, GraphError> {
    let in_i0: Vec<bool> = w.iter().map(|&x| params.i0.contains(x)).collect();
    regions.iter().enumerate().map(|(index, region)| scan_region(g, &geo.path, index, region, &in_i0, params)).collect()
}

/// The subgraph spanned by a region, with local ids in the order of the
/// global ones so that enumeration order is preserved.
struct LocalRegion {
    graph: Graph,
    global_edge: Vec<EdgeId>,
    local_edge: HashMap<EdgeId, EdgeId>,
    local_vertex: HashMap<VertexId, VertexId>,
    global_vertex: Vec<VertexId>,
}

impl LocalRegion {
    fn new(g: &Graph, region: &[EdgeId]) -> Self {
        let mut global_vertex: Vec<VertexId> = region.iter().flat_map(|&e| g.endpoints(e)).collect();
        global_vertex.sort_unstable();
        global_vertex.dedup();
        let local_vertex: HashMap<VertexId, VertexId> = global_vertex.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut b = GraphBuilder::new(global_vertex.len());
        for &e in region {
            let [u, v] = g.endpoints(e);
            b.add_edge(local_vertex[&u], local_vertex[&v]).expect("region edges are graph edges");
        }
        let local_edge = region.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        LocalRegion { graph: b.build(), global_edge: region.to_vec(), local_edge, local_vertex, global_vertex }
    }
}

fn scan_region(
    g: &Graph,
    pi: &Path,
    index: usize,
    region: &[EdgeId],
    in_i0: &[bool],
    params: &FeasibleParams<'_>,
) -> Result<RegionScan, GraphError> {
    let mut expansions = 0u64;
    let edges = pi.edges();
    if !edges.iter().any(|e| region.binary_search(e).is_ok()) {
        return Ok(RegionScan { found: None, budget_exceeded: false, expansions });
    }
    let local = LocalRegion::new(g, region);
    let base: Vec<bool> = local.global_edge.iter().map(|&e| in_i0[e]).collect();
    let mut allowed = base.clone();
    for from in 0..edges.len() {
        for len in 1..=params.c.min(edges.len() - from) {
            let to = from + len;
            if !local.local_edge.contains_key(&edges[to - 1]) {
                break;
            }
            let alpha = pi.subpath(from, to);
            let alpha_edges = alpha.edge_set();
            let alpha_local: Vec<EdgeId> = alpha_edges.iter().map(|e| local.local_edge[e]).collect();
            // γ may use region edges with weight in I₀ plus the edges of α.
            for &e in &alpha_local {
                allowed[e] = true;
            }
            let max_len = detour_length_bound(len, params.epsilon);
            let search = PathSearch::new(max_len).budget(params.budget.saturating_sub(expansions)).restrict(&allowed);
            let (s, t) = (local.local_vertex[&alpha.start()], local.local_vertex[&alpha.end()]);
            let mut paths = SelfAvoidingPaths::new(&local.graph, s, t, &search)?;
            let mut hit = None;
            let mut exhausted = false;
            for candidate in paths.by_ref() {
                let gamma = match candidate {
                    Ok(p) => p,
                    Err(GraphError::BudgetExceeded { .. }) => {
                        exhausted = true;
                        break;
                    }
                    Err(e) => return Err(e),
                };
                let gamma = Path::new(g, local.global_vertex[gamma.start()], gamma.edges().iter().map(|&e| local.global_edge[e]).collect())?;
                if !is_epsilon_detour(&alpha, &gamma, params.epsilon) {
                    continue;
                }
                let gamma_edges = gamma.edge_set();
                if alpha_edges.iter().filter(|e| gamma_edges.binary_search(e).is_err()).all(|&e| in_i0[e]) {
                    hit = Some(gamma);
                    break;
                }
            }
            expansions += paths.expansions();
            drop(paths);
            for &e in &alpha_local {
                allowed[e] = base[e];
            }
            if exhausted {
                return Ok(RegionScan { found: None, budget_exceeded: true, expansions });
            }
            if let Some(gamma) = hit {
                let pair = FeasiblePair { region: index, alpha_range: (from, to), alpha, gamma };
                return Ok(RegionScan { found: Some(pair), budget_exceeded: false, expansions });
            }
        }
    }
    Ok(RegionScan { found: None, budget_exceeded: false, expansions })
}

/// Greedy colouring of the overlap graph in region order; regions of one
/// colour are pairwise disjoint.
pub fn disjointify(regions: &[EdgeSet]) -> Vec<usize> {
    let mut owners: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (i, r) in regions.iter().enumerate() {
        for &e in r {
            owners.entry(e).or_default().push(i);
        }
    }
    let mut colors: Vec<usize> = Vec::with_capacity(regions.len());
    for (i, r) in regions.iter().enumerate() {
        let mut used: Vec<usize> =
            r.iter().flat_map(|e| owners[e].iter().copied()).filter(|&j| j < i).map(|j| colors[j]).collect();
        used.sort_unstable();
        used.dedup();
        let color = used.iter().enumerate().find(|&(k, &c)| k != c).map_or(used.len(), |(k, _)| k);
        colors.push(color);
    }
    colors
}
