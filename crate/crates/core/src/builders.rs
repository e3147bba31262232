//! Explicit truncations of lattices, sectors, trees and edge-doubled graphs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::BuildError;
use crate::graph::{Graph, GraphBuilder, VertexId};

pub use crate::cayley::{build_cayley_ball, build_cayley_ball_capped, CayleyBall, CayleyMode, GeneratorSpec};

pub const DEFAULT_VERTEX_CAP: usize = crate::cayley::DEFAULT_VERTEX_CAP;

/// A truncated lattice region with integer coordinates for every vertex.
#[derive(Clone, Debug)]
pub struct LatticeRegion {
    pub graph: Graph,
    pub coords: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, VertexId>,
}

impl LatticeRegion {
    pub fn vertex_at(&self, point: &[i64]) -> Option<VertexId> {
        self.index.get(point).copied()
    }

    pub fn dimension(&self) -> usize {
        self.coords[0].len()
    }
}

fn l1(p: &[i64]) -> u64 {
    p.iter().map(|x| x.unsigned_abs()).sum()
}

/// Breadth-first construction of the basepoint component of `{p : |p|₁ ≤ L, keep(p)}`.
///
/// Neighbours are explored in the order +e₁, −e₁, +e₂, −e₂, …; edge ids follow
/// vertex order with the positive directions of each vertex. A vertex is on the
/// frontier when it has an admissible lattice neighbour beyond radius `L`.
pub fn build_lattice_region(
    d: usize,
    radius: usize,
    cap: usize,
    keep: impl Fn(&[i64]) -> bool,
) -> Result<LatticeRegion, BuildError> {
    if d == 0 || radius == 0 {
        return Err(BuildError::InvalidParameter("dimension and radius must be at least 1".into()));
    }
    let origin = vec![0i64; d];
    let mut coords = vec![origin.clone()];
    let mut index = HashMap::from([(origin, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    let r = radius as u64;
    while let Some(v) = queue.pop_front() {
        for k in 0..d {
            for step in [1i64, -1] {
                let mut p = coords[v].clone();
                p[k] += step;
                if l1(&p) > r || !keep(&p) || index.contains_key(&p) {
                    continue;
                }
                if coords.len() >= cap {
                    return Err(BuildError::TooLarge { cap });
                }
                index.insert(p.clone(), coords.len());
                coords.push(p);
                queue.push_back(coords.len() - 1);
            }
        }
    }
    let mut b = GraphBuilder::new(coords.len());
    for (v, p) in coords.iter().enumerate() {
        let mut q = p.clone();
        for k in 0..d {
            q[k] += 1;
            if let Some(&w) = index.get(&q) {
                b.add_edge(v, w)?;
            }
            q[k] -= 1;
        }
        let outward = (0..d).any(|k| {
            [1i64, -1].iter().any(|&s| {
                q[k] += s;
                let beyond = l1(&q) > r && keep(&q);
                q[k] -= s;
                beyond
            })
        });
        if outward {
            b.mark_frontier(v)?;
        }
    }
    Ok(LatticeRegion { graph: b.build(), coords, index })
}

/// B(0, L) in ℤᵈ; the frontier is S(0, L).
pub fn build_lattice_ball(d: usize, radius: usize) -> Result<LatticeRegion, BuildError> {
    build_lattice_region(d, radius, DEFAULT_VERTEX_CAP, |_| true)
}

/// `{(x, y) : θ ≤ arg(x, y) ≤ θ′} ∩ B(0, L)`, angles in radians within [0, 2π].
pub fn build_sector(theta: f64, theta_prime: f64, radius: usize) -> Result<LatticeRegion, BuildError> {
    if !(theta < theta_prime) {
        return Err(BuildError::InvalidParameter("sector needs θ < θ′".into()));
    }
    const TOL: f64 = 1e-12;
    let keep = move |p: &[i64]| {
        if p[0] == 0 && p[1] == 0 {
            return true;
        }
        let mut angle = (p[1] as f64).atan2(p[0] as f64);
        if angle < 0.0 {
            angle += std::f64::consts::TAU;
        }
        // The positive x-axis sits at both 0 and 2π.
        let on_axis = p[1] == 0 && p[0] > 0;
        let inside = |a: f64| a >= theta - TOL && a <= theta_prime + TOL;
        inside(angle) || (on_axis && inside(std::f64::consts::TAU))
    };
    let region = build_lattice_region(2, radius, DEFAULT_VERTEX_CAP, keep)?;
    if region.graph.vertex_count() <= 1 {
        return Err(BuildError::EmptySector);
    }
    Ok(region)
}

/// `ℤ^{d−1} × ℤ_{≥0}` truncated at L¹ radius L.
pub fn build_half_space(d: usize, radius: usize) -> Result<LatticeRegion, BuildError> {
    build_lattice_region(d, radius, DEFAULT_VERTEX_CAP, |p| *p.last().unwrap() >= 0)
}

/// Rooted k-regular tree truncated at depth L. Vertex ids are in BFS order and
/// the edge to vertex v has id v − 1.
pub fn build_regular_tree(k: usize, radius: usize) -> Result<Graph, BuildError> {
    build_regular_tree_capped(k, radius, DEFAULT_VERTEX_CAP)
}

pub fn build_regular_tree_capped(k: usize, radius: usize, cap: usize) -> Result<Graph, BuildError> {
    if k < 2 || radius == 0 {
        return Err(BuildError::InvalidParameter("tree needs degree ≥ 2 and radius ≥ 1".into()));
    }
    let mut size: usize = 1;
    let mut layer: usize = k;
    for _ in 0..radius {
        size = size.checked_add(layer).filter(|&s| s <= cap).ok_or(BuildError::TooLarge { cap })?;
        layer = layer.saturating_mul(k - 1);
    }
    let mut b = GraphBuilder::new(1);
    let mut current = vec![0usize];
    for depth in 0..radius {
        let mut next = Vec::with_capacity(current.len() * (k - 1));
        for &v in &current {
            let children = if depth == 0 { k } else { k - 1 };
            for _ in 0..children {
                let c = b.add_vertex();
                b.add_edge(v, c)?;
                next.push(c);
            }
        }
        current = next;
    }
    for v in current {
        b.mark_frontier(v)?;
    }
    Ok(b.build())
}

/// Adds one parallel twin for every adjacent vertex pair. Original edges keep
/// their ids; twins follow in order of first appearance.
pub fn double_edges(g: &Graph) -> Graph {
    let mut b = GraphBuilder::new(g.vertex_count());
    for (_, [u, v]) in g.edges() {
        b.add_edge(u, v).expect("edges of a valid graph");
    }
    let mut seen = BTreeSet::new();
    for (_, [u, v]) in g.edges() {
        if seen.insert((u.min(v), u.max(v))) {
            b.add_edge(u, v).expect("edges of a valid graph");
        }
    }
    for &f in g.frontier() {
        b.mark_frontier(f).expect("frontier of a valid graph");
    }
    b.build()
}

/// Connected random multigraph: a random spanning tree plus `extra` random
/// edges (parallel edges allowed, no loops).
pub fn build_random_connected(vertices: usize, extra: usize, seed: u64) -> Graph {
    assert!(vertices >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(vertices);
    for v in 1..vertices {
        let parent = rng.gen_range(0..v);
        b.add_edge(parent, v).unwrap();
    }
    if vertices >= 2 {
        for _ in 0..extra {
            let u = rng.gen_range(0..vertices);
            let mut v = rng.gen_range(0..vertices - 1);
            if v >= u {
                v += 1;
            }
            b.add_edge(u, v).unwrap();
        }
    }
    b.build()
}
