//! Weighted geodesics by Dijkstra's algorithm with a fixed tie-break.
//!
//! Among equal-time relaxations the predecessor edge with the smaller id wins.
//! The heap breaks key ties by vertex id, so every run is reproducible.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::GraphError;
use crate::graph::{EdgeId, Graph, Path, VertexId};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicResult {
    pub path: Path,
    pub time: f64,
    pub touched_frontier: bool,
    pub tie_broken: bool,
}

/// Sum of `w` along `path`, in path order.
pub fn passage_time(w: &[f64], path: &Path) -> f64 {
    path.edges().iter().map(|&e| w[e]).sum()
}

/// Orders non-negative floats by their bit patterns.
#[inline]
fn key(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    x.to_bits()
}

/// One search direction with buffers reused across queries.
#[derive(Clone, Debug, Default)]
struct Side {
    dist: Vec<f64>,
    pred: Vec<EdgeId>,
    done: Vec<bool>,
    touched: Vec<VertexId>,
    heap: BinaryHeap<Reverse<(u64, VertexId)>>,
    tie: bool,
}

impl Side {
    fn reset(&mut self, n: usize, source: VertexId) {
        if self.dist.len() != n {
            self.dist = vec![f64::INFINITY; n];
            self.pred = vec![NONE; n];
            self.done = vec![false; n];
            self.touched.clear();
        } else {
            for &v in &self.touched {
                self.dist[v] = f64::INFINITY;
                self.pred[v] = NONE;
                self.done[v] = false;
            }
            self.touched.clear();
        }
        self.heap.clear();
        self.tie = false;
        self.dist[source] = 0.0;
        self.touched.push(source);
        self.heap.push(Reverse((key(0.0), source)));
    }

    /// Pops the next unsettled vertex.
    fn pop(&mut self) -> Option<VertexId> {
        while let Some(Reverse((k, v))) = self.heap.pop() {
            if !self.done[v] && k == key(self.dist[v]) {
                self.done[v] = true;
                return Some(v);
            }
        }
        None
    }

    fn top_key(&mut self) -> f64 {
        while let Some(&Reverse((k, v))) = self.heap.peek() {
            if self.done[v] || k != key(self.dist[v]) {
                self.heap.pop();
            } else {
                return f64::from_bits(k);
            }
        }
        f64::INFINITY
    }

    #[inline]
    fn relax(&mut self, g: &Graph, w: &[f64], u: VertexId) {
        let du = self.dist[u];
        for &e in g.incident(u) {
            let v = g.other_end(e, u);
            if self.done[v] {
                continue;
            }
            let nd = du + w[e];
            let old = self.dist[v];
            if nd < old {
                if old == f64::INFINITY {
                    self.touched.push(v);
                }
                self.dist[v] = nd;
                self.pred[v] = e;
                self.heap.push(Reverse((key(nd), v)));
            } else if nd == old {
                self.tie = true;
                if e < self.pred[v] {
                    self.pred[v] = e;
                }
            }
        }
    }

    /// Edges from the source to `v`, in order from the source.
    fn trace(&self, g: &Graph, mut v: VertexId) -> Vec<EdgeId> {
        let mut edges = Vec::new();
        while self.pred[v] != NONE {
            let e = self.pred[v];
            edges.push(e);
            v = g.other_end(e, v);
        }
        edges.reverse();
        edges
    }
}

/// Point-to-point Dijkstra with reusable buffers.
#[derive(Clone, Debug, Default)]
pub struct Dijkstra {
    forward: Side,
    backward: Side,
}

impl Dijkstra {
    pub fn new() -> Self {
        Self::default()
    }

    fn finish(g: &Graph, w: &[f64], x: VertexId, edges: Vec<EdgeId>, tie: bool) -> GeodesicResult {
        let path = Path::new(g, x, edges).expect("predecessor chains are paths");
        let time = passage_time(w, &path);
        let touched_frontier = path.vertices().iter().any(|&v| g.is_frontier(v));
        GeodesicResult { path, time, touched_frontier, tie_broken: tie }
    }

    fn check(g: &Graph, w: &[f64], x: VertexId, y: VertexId) -> Result<(), GraphError> {
        g.check_vertex(x)?;
        g.check_vertex(y)?;
        if w.len() != g.edge_count() {
            return Err(GraphError::EdgeOutOfRange { edge: w.len(), count: g.edge_count() });
        }
        Ok(())
    }

    /// Single-source search stopped when `y` is settled.
    pub fn geodesic(&mut self, g: &Graph, w: &[f64], x: VertexId, y: VertexId) -> Result<GeodesicResult, GraphError> {
        Self::check(g, w, x, y)?;
        let s = &mut self.forward;
        s.reset(g.vertex_count(), x);
        while let Some(u) = s.pop() {
            if u == y {
                let edges = s.trace(g, y);
                return Ok(Self::finish(g, w, x, edges, s.tie));
            }
            s.relax(g, w, u);
        }
        Err(GraphError::Unreachable { from: x, to: y })
    }

    /// Bidirectional search; the same passage time as [`Dijkstra::geodesic`],
    /// usually with far fewer settled vertices. Among equal-time meeting
    /// edges the first one found is kept and the tie flag is raised.
    pub fn geodesic_bidirectional(
        &mut self,
        g: &Graph,
        w: &[f64],
        x: VertexId,
        y: VertexId,
    ) -> Result<GeodesicResult, GraphError> {
        Self::check(g, w, x, y)?;
        if x == y {
            return Ok(Self::finish(g, w, x, Vec::new(), false));
        }
        let n = g.vertex_count();
        self.forward.reset(n, x);
        self.backward.reset(n, y);
        let mut best = f64::INFINITY;
        let mut meeting: Option<(VertexId, EdgeId, VertexId)> = None;
        let mut meet_tie = false;
        loop {
            let tf = self.forward.top_key();
            let tb = self.backward.top_key();
            if tf == f64::INFINITY && tb == f64::INFINITY || tf + tb >= best {
                break;
            }
            let forward_turn = tf <= tb;
            let (side, other) =
                if forward_turn { (&mut self.forward, &self.backward) } else { (&mut self.backward, &self.forward) };
            let Some(u) = side.pop() else { break };
            side.relax(g, w, u);
            let du = side.dist[u];
            for &e in g.incident(u) {
                let v = g.other_end(e, u);
                let dv = other.dist[v];
                if dv == f64::INFINITY {
                    continue;
                }
                let cand = du + w[e] + dv;
                let oriented = if forward_turn { (u, e, v) } else { (v, e, u) };
                if cand < best {
                    best = cand;
                    meeting = Some(oriented);
                } else if cand == best && meeting != Some(oriented) {
                    meet_tie = true;
                }
            }
        }
        let Some((a, e, b)) = meeting else {
            return Err(GraphError::Unreachable { from: x, to: y });
        };
        let mut edges = self.forward.trace(g, a);
        edges.push(e);
        let mut back = self.backward.trace(g, b);
        back.reverse();
        edges.extend(back);
        let tie = meet_tie || self.forward.tie || self.backward.tie;
        Ok(Self::finish(g, w, x, edges, tie))
    }

    /// Single-source distances to every vertex.
    pub fn distances(&mut self, g: &Graph, w: &[f64], x: VertexId) -> Vec<f64> {
        let s = &mut self.forward;
        s.reset(g.vertex_count(), x);
        while let Some(u) = s.pop() {
            s.relax(g, w, u);
        }
        s.dist.clone()
    }
}

/// One-shot form of [`Dijkstra::geodesic`].
pub fn passage_time_geodesic(g: &Graph, w: &[f64], x: VertexId, y: VertexId) -> Result<GeodesicResult, GraphError> {
    Dijkstra::new().geodesic(g, w, x, y)
}
