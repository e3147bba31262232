//! Separated nets, Voronoi tiles and the percolation-style diagnostics built
//! on them.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::fpp::{layer_uniforms_into, sample_single_into, Dijkstra, Distribution, GeodesicResult};
use crate::graph::{bfs_distances, bfs_limited, graph_distance, Graph, VertexId};
use crate::stats::{weighted_line_fit, wilson_interval, LineFit, Z95};

/// Default scale of the enlarged balls `B(o_i, ΣR)`.
pub const DEFAULT_SIGMA: usize = 3;

/// Greedy maximal `R`-separated set, scanning vertices in BFS order from the
/// basepoint (then any unreached vertices by id).
pub fn r_separated_net(g: &Graph, radius: usize, basepoint: VertexId) -> Vec<VertexId> {
    assert!(radius >= 1, "R must be at least 1");
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut seen = vec![false; g.vertex_count()];
    for root in std::iter::once(basepoint).chain(0..g.vertex_count()) {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &e in g.incident(u) {
                let v = g.other_end(e, u);
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    // covered[v]: some chosen centre lies within distance R − 1.
    let mut covered = vec![false; g.vertex_count()];
    let mut centers = Vec::new();
    for v in order {
        if covered[v] {
            continue;
        }
        centers.push(v);
        for (u, d) in bfs_limited(g, v, radius - 1, |_| true).iter().enumerate() {
            if d.is_some() {
                covered[u] = true;
            }
        }
    }
    centers
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiTiling {
    pub radius: usize,
    pub sigma: usize,
    pub centers: Vec<VertexId>,
    /// Tile index of every vertex.
    pub assignment: Vec<usize>,
    /// Distance from every vertex to its own centre.
    pub depth: Vec<usize>,
}

/// Each vertex joins the nearest centre; among equidistant centres the one
/// listed first wins.
pub fn voronoi_tiles(g: &Graph, centers: &[VertexId], radius: usize, sigma: usize) -> VoronoiTiling {
    let n = g.vertex_count();
    let mut assignment = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut frontier: Vec<VertexId> = Vec::new();
    for (i, &c) in centers.iter().enumerate() {
        if assignment[c] == usize::MAX {
            assignment[c] = i;
            depth[c] = 0;
            frontier.push(c);
        }
    }
    let mut level = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for &e in g.incident(u) {
                let v = g.other_end(e, u);
                if depth[v] == usize::MAX {
                    depth[v] = level + 1;
                    assignment[v] = assignment[u];
                    next.push(v);
                } else if depth[v] == level + 1 && assignment[u] < assignment[v] {
                    assignment[v] = assignment[u];
                }
            }
        }
        frontier = next;
        level += 1;
    }
    VoronoiTiling { radius, sigma, centers: centers.to_vec(), assignment, depth }
}

/// Which tiling properties hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TilingCheck {
    pub partition: bool,
    pub separation: bool,
    pub coverage: bool,
    pub tile_in_ball: bool,
    pub half_ball_inside: bool,
}

impl TilingCheck {
    pub fn all(&self) -> bool {
        self.partition && self.separation && self.coverage && self.tile_in_ball && self.half_ball_inside
    }
}

impl VoronoiTiling {
    pub fn tile_count(&self) -> usize {
        self.centers.len()
    }

    /// Radius of the ball around each centre that must lie inside its tile.
    pub fn half_ball_radius(&self) -> Option<usize> {
        (self.radius / 2).checked_sub(1)
    }

    /// Verifies every invariant from independent BFS runs.
    pub fn check(&self, g: &Graph) -> TilingCheck {
        let n = g.vertex_count();
        let k = self.centers.len();
        let dist: Vec<Vec<Option<usize>>> = self.centers.iter().map(|&c| bfs_distances(g, c)).collect();
        let partition = self.assignment.len() == n && self.assignment.iter().all(|&a| a < k);
        let separation =
            (0..k).all(|i| (i + 1..k).all(|j| dist[i][self.centers[j]].is_none_or(|d| d >= self.radius)));
        let coverage = (0..n).all(|v| (0..k).any(|i| dist[i][v].is_some_and(|d| d < self.radius)));
        let tile_in_ball = partition && (0..n).all(|v| dist[self.assignment[v]][v].is_some_and(|d| d <= self.radius));
        let half_ball_inside = partition
            && match self.half_ball_radius() {
                None => true,
                Some(h) => (0..k).all(|i| (0..n).all(|v| dist[i][v].is_none_or(|d| d > h) || self.assignment[v] == i)),
            };
        TilingCheck { partition, separation, coverage, tile_in_ball, half_ball_inside }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileGraphs {
    /// Tiles joined by an edge of the graph.
    pub adjacency: Vec<Vec<usize>>,
    /// Tiles whose enlarged balls `B(o_i, ΣR)` meet.
    pub enlarged: Vec<Vec<usize>>,
    pub max_degree: usize,
    pub max_degree_enlarged: usize,
}

pub fn tile_graph_degrees(g: &Graph, tiling: &VoronoiTiling) -> TileGraphs {
    let k = tiling.tile_count();
    let mut adjacency = vec![Vec::new(); k];
    for (_, [u, v]) in g.edges() {
        let (a, b) = (tiling.assignment[u], tiling.assignment[v]);
        if a != b {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    // Integer-radius balls in a graph meet iff their centres are within 2ΣR.
    let reach = 2 * tiling.sigma * tiling.radius;
    let mut enlarged = vec![Vec::new(); k];
    for (i, &c) in tiling.centers.iter().enumerate() {
        let dist = bfs_limited(g, c, reach, |_| true);
        enlarged[i] = (0..k).filter(|&j| j != i && dist[tiling.centers[j]].is_some()).collect();
    }
    let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
    let max_degree_enlarged = enlarged.iter().map(Vec::len).max().unwrap_or(0);
    TileGraphs { adjacency, enlarged, max_degree, max_degree_enlarged }
}

/// Tiles `i` with `flags[i]` that the geodesic visits while both of its
/// endpoints lie outside `B(o_i, ΣR)`.
pub fn count_crossed_tiles(g: &Graph, geo: &GeodesicResult, tiling: &VoronoiTiling, flags: &[bool]) -> usize {
    let mut visited: Vec<usize> = geo.path.vertices().iter().map(|&v| tiling.assignment[v]).collect();
    visited.sort_unstable();
    visited.dedup();
    let (start, end) = (geo.path.start(), geo.path.end());
    let enlarged = tiling.sigma * tiling.radius;
    visited
        .into_iter()
        .filter(|&i| flags[i])
        .filter(|&i| {
            let dist = bfs_limited(g, tiling.centers[i], enlarged, |_| true);
            dist[start].is_none() && dist[end].is_none()
        })
        .count()
}

/// The least `Δ` such that every `x → y` path meets `B(z, Δ)`.
pub fn bottleneck_radius(g: &Graph, x: VertexId, y: VertexId, z: VertexId) -> Option<usize> {
    let from_z = bfs_distances(g, z);
    let (dx, dy) = (from_z[x]?, from_z[y]?);
    graph_distance(g, x, y).ok()??;
    for delta in 0..dx.min(dy) {
        let reach = bfs_limited(g, x, usize::MAX, |e| {
            let [a, b] = g.endpoints(e);
            from_z[a].is_none_or(|d| d > delta) && from_z[b].is_none_or(|d| d > delta)
        });
        if reach[y].is_none() {
            return Some(delta);
        }
    }
    Some(dx.min(dy))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRow {
    pub radius: usize,
    pub successes: usize,
    pub n: usize,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl DecayRow {
    fn new(radius: usize, successes: usize, n: usize) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, n, Z95);
        DecayRow { radius, successes, n, estimate: successes as f64 / n.max(1) as f64, ci_lo, ci_hi }
    }

    /// `R, estimate, ci_lo, ci_hi, N`.
    pub fn csv(&self) -> String {
        format!("{},{},{},{},{}", self.radius, self.estimate, self.ci_lo, self.ci_hi, self.n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayEstimate {
    pub rows: Vec<DecayRow>,
    /// Fit of `log(estimate)` against the abscissa over rows with successes.
    pub fit: Option<LineFit>,
}

fn log_fit(xs: &[f64], rows: &[DecayRow]) -> Option<LineFit> {
    let (mut x, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for (&xi, r) in xs.iter().zip(rows) {
        if r.successes > 0 {
            x.push(xi);
            y.push(r.estimate.ln());
            // Delta-method standard error of the log proportion.
            s.push(((1.0 - r.estimate) / (r.n as f64 * r.estimate)).sqrt().max(1e-12));
        }
    }
    if x.len() < 2 {
        return None;
    }
    weighted_line_fit(&x, &y, &s)
}

/// Bernoulli(`p`) bond percolation: for each radius, the fraction of
/// replicates whose open cluster of `basepoint` reaches `S(basepoint, R)`.
/// Edge `e` is open when its first-layer uniform is below `p`.
pub fn estimate_connection_decay(
    g: &Graph,
    basepoint: VertexId,
    p: f64,
    radii: &[usize],
    replicates: usize,
    seed: u64,
) -> DecayEstimate {
    assert!((0.0..=1.0).contains(&p));
    let from_base = bfs_distances(g, basepoint);
    let reached: Vec<usize> = (0..replicates as u64)
        .into_par_iter()
        .map_init(Vec::new, |u, rep| {
            layer_uniforms_into(g.edge_count(), seed, rep, 0, u);
            bfs_limited(g, basepoint, usize::MAX, |e| u[e] < p)
                .iter()
                .zip(&from_base)
                .filter_map(|(open, d)| open.and(*d))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let rows: Vec<DecayRow> =
        radii.iter().map(|&r| DecayRow::new(r, reached.iter().filter(|&&m| m >= r).count(), replicates)).collect();
    let xs: Vec<f64> = radii.iter().map(|&r| r as f64).collect();
    let fit = log_fit(&xs, &rows);
    DecayEstimate { rows, fit }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheapPassage {
    pub pairs: Vec<(VertexId, VertexId)>,
    pub distances: Vec<usize>,
    /// One row per pair; `radius` holds the graph distance.
    pub rows: Vec<DecayRow>,
    pub fit: Option<LineFit>,
    /// Replicates whose geodesic touched the frontier, per pair.
    pub contaminated: Vec<usize>,
}

/// Fraction of replicates with `T(x, y) < (inf supp ν + q)·d(x, y)`, per pair.
pub fn estimate_cheap_passage_prob(
    g: &Graph,
    nu: &Distribution,
    q: f64,
    pairs: &[(VertexId, VertexId)],
    replicates: usize,
    seed: u64,
) -> CheapPassage {
    assert!(q > 0.0);
    let distances: Vec<usize> =
        pairs.iter().map(|&(x, y)| graph_distance(g, x, y).ok().flatten().expect("pairs must be connected")).collect();
    let floor = nu.inf_support();
    let per_rep: Vec<Vec<(bool, bool)>> = (0..replicates as u64)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Dijkstra::new()),
            |(w, dij), rep| {
                sample_single_into(g.edge_count(), nu, seed, rep, w);
                pairs
                    .iter()
                    .zip(&distances)
                    .map(|(&(x, y), &d)| {
                        let geo = dij.geodesic_bidirectional(g, w, x, y).expect("connected pair");
                        (geo.time < (floor + q) * d as f64, geo.touched_frontier)
                    })
                    .collect()
            },
        )
        .collect();
    let rows: Vec<DecayRow> = (0..pairs.len())
        .map(|k| DecayRow::new(distances[k], per_rep.iter().filter(|r| r[k].0).count(), replicates))
        .collect();
    let contaminated = (0..pairs.len()).map(|k| per_rep.iter().filter(|r| r[k].1).count()).collect();
    let xs: Vec<f64> = distances.iter().map(|&d| d as f64).collect();
    let fit = log_fit(&xs, &rows);
    CheapPassage { pairs: pairs.to_vec(), distances, rows, fit, contaminated }
}
