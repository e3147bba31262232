//! Immutable multigraphs, paths and the metric operations built on them.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::GraphError;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Locally finite multigraph with dense vertex and edge ids.
///
/// Parallel edges are allowed, self-loops are not. A non-empty frontier marks
/// the truncation boundary of an infinite graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    endpoints: Vec<[VertexId; 2]>,
    offsets: Vec<usize>,
    incidence: Vec<EdgeId>,
    frontier: Vec<VertexId>,
    frontier_mask: Vec<bool>,
}

#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertex_count: usize,
    endpoints: Vec<[VertexId; 2]>,
    frontier: BTreeSet<VertexId>,
}

impl GraphBuilder {
    pub fn new(vertex_count: usize) -> Self {
        Self { vertex_count, ..Self::default() }
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        for x in [u, v] {
            if x >= self.vertex_count {
                return Err(GraphError::VertexOutOfRange { vertex: x, count: self.vertex_count });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { vertex: u });
        }
        self.endpoints.push([u, v]);
        Ok(self.endpoints.len() - 1)
    }

    pub fn mark_frontier(&mut self, v: VertexId) -> Result<(), GraphError> {
        if v >= self.vertex_count {
            return Err(GraphError::VertexOutOfRange { vertex: v, count: self.vertex_count });
        }
        self.frontier.insert(v);
        Ok(())
    }

    pub fn build(self) -> Graph {
        let n = self.vertex_count;
        let mut degree = vec![0usize; n];
        for &[u, v] in &self.endpoints {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut incidence = vec![0; offsets[n]];
        // Edges are visited in id order, so every incidence list ends up sorted.
        for (e, &[u, v]) in self.endpoints.iter().enumerate() {
            incidence[fill[u]] = e;
            fill[u] += 1;
            incidence[fill[v]] = e;
            fill[v] += 1;
        }
        let mut frontier_mask = vec![false; n];
        for &v in &self.frontier {
            frontier_mask[v] = true;
        }
        Graph {
            vertex_count: n,
            endpoints: self.endpoints,
            offsets,
            incidence,
            frontier: self.frontier.into_iter().collect(),
            frontier_mask,
        }
    }
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.endpoints[e]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.endpoints[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Incident edge ids of `v`, ascending.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn frontier(&self) -> &[VertexId] {
        &self.frontier
    }

    pub fn is_frontier(&self, v: VertexId) -> bool {
        self.frontier_mask[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, [VertexId; 2])> + '_ {
        self.endpoints.iter().copied().enumerate()
    }

    /// Edge ids joining `u` and `v`, ascending.
    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        self.incident(u).iter().copied().filter(|&e| self.other_end(e, u) == v).collect()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, count: self.vertex_count })
        }
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count == 0 || bfs_distances(self, 0).iter().all(Option::is_some)
    }

    /// Line-oriented text rendering: `vertices N`, one `edge <id> <u> <v>` per
    /// edge, then a single `frontier ...` line when the frontier is non-empty.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "vertices {}", self.vertex_count).unwrap();
        for (e, [u, v]) in self.edges() {
            writeln!(out, "edge {e} {u} {v}").unwrap();
        }
        if !self.frontier.is_empty() {
            out.push_str("frontier");
            for v in &self.frontier {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Graph, GraphError> {
        let mut builder: Option<GraphBuilder> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| GraphError::Parse { line: line_no, message: msg.to_string() };
            let mut tokens = line.split_whitespace();
            let keyword = tokens.next().unwrap_or_default();
            let numbers: Vec<usize> = tokens
                .map(|t| t.parse::<usize>().map_err(|_| bad(&format!("not an integer: {t}"))))
                .collect::<Result<_, _>>()?;
            match keyword {
                "vertices" => {
                    if builder.is_some() {
                        return Err(bad("duplicate vertices header"));
                    }
                    let [n] = numbers[..] else { return Err(bad("expected `vertices N`")) };
                    builder = Some(GraphBuilder::new(n));
                }
                "edge" => {
                    let b = builder.as_mut().ok_or_else(|| bad("edge before vertices header"))?;
                    let [id, u, v] = numbers[..] else { return Err(bad("expected `edge <id> <u> <v>`")) };
                    if id != b.edge_count() {
                        return Err(bad(&format!("edge id {id} out of sequence")));
                    }
                    b.add_edge(u, v).map_err(|e| bad(&e.to_string()))?;
                }
                "frontier" => {
                    let b = builder.as_mut().ok_or_else(|| bad("frontier before vertices header"))?;
                    for v in numbers {
                        b.mark_frontier(v).map_err(|e| bad(&e.to_string()))?;
                    }
                }
                other => return Err(bad(&format!("unknown keyword `{other}`"))),
            }
        }
        builder
            .map(GraphBuilder::build)
            .ok_or(GraphError::Parse { line: 0, message: "missing vertices header".into() })
    }
}

/// A walk given by its start vertex and edge sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    edges: Vec<EdgeId>,
    vertices: Vec<VertexId>,
}

impl Path {
    pub fn new(g: &Graph, start: VertexId, edges: Vec<EdgeId>) -> Result<Path, GraphError> {
        g.check_vertex(start)?;
        let mut vertices = Vec::with_capacity(edges.len() + 1);
        vertices.push(start);
        let mut cur = start;
        for (i, &e) in edges.iter().enumerate() {
            if e >= g.edge_count() {
                return Err(GraphError::EdgeOutOfRange { edge: e, count: g.edge_count() });
            }
            let [a, b] = g.endpoints(e);
            cur = if a == cur {
                b
            } else if b == cur {
                a
            } else {
                return Err(GraphError::BrokenPath { position: i, edge: e, vertex: cur });
            };
            vertices.push(cur);
        }
        Ok(Path { edges, vertices })
    }

    /// Builds a path from parts already known to be consistent.
    pub(crate) fn from_parts(edges: Vec<EdgeId>, vertices: Vec<VertexId>) -> Path {
        debug_assert_eq!(edges.len() + 1, vertices.len());
        Path { edges, vertices }
    }

    pub fn trivial(v: VertexId) -> Path {
        Path { edges: Vec::new(), vertices: vec![v] }
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn is_self_avoiding(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.vertices.iter().all(|v| seen.insert(*v))
    }

    pub fn has_repeated_edges(&self) -> bool {
        self.edge_set().len() != self.edges.len()
    }

    /// Distinct edge ids, ascending.
    pub fn edge_set(&self) -> Vec<EdgeId> {
        let mut s = self.edges.clone();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Contiguous piece `[from, to)` of the edge sequence.
    pub fn subpath(&self, from: usize, to: usize) -> Path {
        Path { edges: self.edges[from..to].to_vec(), vertices: self.vertices[from..=to].to_vec() }
    }

    pub fn same_edge_set(&self, other: &Path) -> bool {
        self.edge_set() == other.edge_set()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallView {
    pub center: VertexId,
    pub radius: usize,
    /// B(x, R), ascending.
    pub members: Vec<VertexId>,
    /// S(x, R), ascending.
    pub shell: Vec<VertexId>,
    /// Whether a member lies on the frontier, in which case the ball may be cut short.
    pub frontier_contact: bool,
}

/// Breadth-first distances from `source`; `None` marks unreachable vertices.
pub fn bfs_distances(g: &Graph, source: VertexId) -> Vec<Option<usize>> {
    bfs_limited(g, source, usize::MAX, |_| true)
}

/// BFS distances through edges accepted by `allow`, stopping at depth `limit`.
pub fn bfs_limited(
    g: &Graph,
    source: VertexId,
    limit: usize,
    allow: impl Fn(EdgeId) -> bool,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        if du >= limit {
            continue;
        }
        for &e in g.incident(u) {
            if !allow(e) {
                continue;
            }
            let v = g.other_end(e, u);
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn graph_distance(g: &Graph, u: VertexId, v: VertexId) -> Result<Option<usize>, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return Ok(Some(0));
    }
    Ok(bfs_distances(g, u)[v])
}

/// Graph distance from every vertex to the frontier (`None` when the frontier is empty
/// or unreachable).
pub fn frontier_distances(g: &Graph) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &f in g.frontier() {
        dist[f] = Some(0);
        queue.push_back(f);
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &e in g.incident(u) {
            let v = g.other_end(e, u);
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn ball(g: &Graph, x: VertexId, radius: usize) -> Result<BallView, GraphError> {
    g.check_vertex(x)?;
    let dist = bfs_limited(g, x, radius, |_| true);
    let mut members = Vec::new();
    let mut shell = Vec::new();
    for (v, d) in dist.iter().enumerate() {
        if let Some(d) = *d {
            members.push(v);
            if d == radius {
                shell.push(v);
            }
        }
    }
    let frontier_contact = members.iter().any(|&v| g.is_frontier(v));
    Ok(BallView { center: x, radius, members, shell, frontier_contact })
}

/// Edge ids with both endpoints in the vertex set given by `inside`.
pub fn induced_edges(g: &Graph, inside: &[bool]) -> Vec<EdgeId> {
    g.edges().filter(|(_, [u, v])| inside[*u] && inside[*v]).map(|(e, _)| e).collect()
}

/// Chronological loop erasure.
pub fn loop_erase(p: &Path) -> Path {
    let mut vertices: Vec<VertexId> = vec![p.start()];
    let mut edges: Vec<EdgeId> = Vec::new();
    for (&e, &v) in p.edges().iter().zip(&p.vertices()[1..]) {
        if let Some(pos) = vertices.iter().position(|&x| x == v) {
            vertices.truncate(pos + 1);
            edges.truncate(pos);
        } else {
            vertices.push(v);
            edges.push(e);
        }
    }
    Path::from_parts(edges, vertices)
}

/// Returns `(|p\q|, |q\p|, |p∩q|)` on edge sets.
pub fn path_set_difference_sizes(p: &Path, q: &Path) -> (usize, usize, usize) {
    let a = p.edge_set();
    let b = q.edge_set();
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (a.len() - common, b.len() - common, common)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicCount {
    pub distance: usize,
    /// Number of edge-geodesics, saturating at the cap.
    pub count: u64,
    pub saturated: bool,
    /// Geodesic with the lexicographically smallest edge-id sequence.
    pub witness: Path,
}

pub fn geodesic_count(g: &Graph, u: VertexId, v: VertexId) -> Result<GeodesicCount, GraphError> {
    geodesic_count_capped(g, u, v, u64::MAX)
}

pub fn geodesic_count_capped(
    g: &Graph,
    u: VertexId,
    v: VertexId,
    cap: u64,
) -> Result<GeodesicCount, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let from_u = bfs_distances(g, u);
    let distance = from_u[v].ok_or(GraphError::Unreachable { from: u, to: v })?;
    let from_v = bfs_limited(g, v, distance, |_| true);
    let on_geodesic = |x: VertexId| matches!((from_u[x], from_v[x]), (Some(a), Some(b)) if a + b == distance);

    let mut layers: Vec<Vec<VertexId>> = vec![Vec::new(); distance + 1];
    for x in 0..g.vertex_count() {
        if on_geodesic(x) {
            layers[from_u[x].unwrap()].push(x);
        }
    }
    let mut count = vec![0u64; g.vertex_count()];
    let mut saturated = false;
    count[u] = 1;
    for layer in &layers[1..] {
        for &x in layer {
            let dx = from_u[x].unwrap();
            let mut total = 0u64;
            for &e in g.incident(x) {
                let y = g.other_end(e, x);
                if from_u[y] == Some(dx - 1) && on_geodesic(y) {
                    total = match total.checked_add(count[y]) {
                        Some(t) if t <= cap => t,
                        _ => {
                            saturated = true;
                            cap
                        }
                    };
                }
            }
            count[x] = total;
        }
    }

    let mut edges = Vec::with_capacity(distance);
    let mut vertices = vec![u];
    let mut cur = u;
    for step in 0..distance {
        let e = g
            .incident(cur)
            .iter()
            .copied()
            .find(|&e| {
                let y = g.other_end(e, cur);
                from_u[y] == Some(step + 1) && on_geodesic(y)
            })
            .expect("geodesic layer is connected");
        cur = g.other_end(e, cur);
        edges.push(e);
        vertices.push(cur);
    }
    Ok(GeodesicCount { distance, count: count[v], saturated, witness: Path::from_parts(edges, vertices) })
}

/// Search parameters for self-avoiding path enumeration.
#[derive(Clone, Debug)]
pub struct PathSearch<'a> {
    pub max_len: usize,
    /// Maximum number of DFS node expansions; `None` means unlimited.
    pub budget: Option<u64>,
    /// Optional per-edge admission mask.
    pub allowed: Option<&'a [bool]>,
}

impl<'a> PathSearch<'a> {
    pub fn new(max_len: usize) -> Self {
        Self { max_len, budget: None, allowed: None }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn restrict(mut self, allowed: &'a [bool]) -> Self {
        self.allowed = Some(allowed);
        self
    }
}

/// Streams self-avoiding `u → v` paths of length at most `max_len` in
/// lexicographic order of their edge-id sequences.
///
/// When the expansion budget runs out the stream yields one
/// [`GraphError::BudgetExceeded`] and then ends.
pub struct SelfAvoidingPaths<'g> {
    g: &'g Graph,
    target: VertexId,
    max_len: usize,
    budget: Option<u64>,
    allowed: Option<Vec<bool>>,
    /// Distance to the target through admitted edges, capped at `max_len`.
    to_target: Vec<Option<usize>>,
    on_path: Vec<bool>,
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    /// Next incidence slot to try at each depth.
    cursor: Vec<usize>,
    expansions: u64,
    yielded: u64,
    done: bool,
}

impl<'g> SelfAvoidingPaths<'g> {
    pub fn new(g: &'g Graph, u: VertexId, v: VertexId, search: &PathSearch<'_>) -> Result<Self, GraphError> {
        g.check_vertex(u)?;
        g.check_vertex(v)?;
        let allowed = search.allowed.map(<[bool]>::to_vec);
        let to_target = match &allowed {
            Some(mask) => bfs_limited(g, v, search.max_len, |e| mask[e]),
            None => bfs_limited(g, v, search.max_len, |_| true),
        };
        let mut on_path = vec![false; g.vertex_count()];
        on_path[u] = true;
        let done = to_target[u].is_none();
        Ok(Self {
            g,
            target: v,
            max_len: search.max_len,
            budget: search.budget,
            allowed,
            to_target,
            on_path,
            vertices: vec![u],
            edges: Vec::new(),
            cursor: vec![0],
            expansions: 0,
            yielded: 0,
            done,
        })
    }

    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    fn pop(&mut self) {
        let v = self.vertices.pop().unwrap();
        self.on_path[v] = false;
        self.edges.pop();
        self.cursor.pop();
    }
}

impl Iterator for SelfAvoidingPaths<'_> {
    type Item = Result<Path, GraphError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.edges.is_empty() && self.vertices[0] == self.target && self.yielded == 0 {
            self.yielded = 1;
            self.done = true;
            return Some(Ok(Path::trivial(self.target)));
        }
        while let Some(&cur) = self.vertices.last() {
            let depth = self.edges.len();
            let slot = *self.cursor.last().unwrap();
            let incident = self.g.incident(cur);
            if slot >= incident.len() {
                if depth == 0 {
                    break;
                }
                self.pop();
                continue;
            }
            *self.cursor.last_mut().unwrap() += 1;
            let e = incident[slot];
            if let Some(mask) = &self.allowed {
                if !mask[e] {
                    continue;
                }
            }
            let next = self.g.other_end(e, cur);
            if self.on_path[next] {
                continue;
            }
            match self.to_target[next] {
                Some(d) if depth + 1 + d <= self.max_len => {}
                _ => continue,
            }
            if let Some(budget) = self.budget {
                if self.expansions >= budget {
                    self.done = true;
                    return Some(Err(GraphError::BudgetExceeded {
                        expansions: self.expansions,
                        yielded: self.yielded,
                    }));
                }
            }
            self.expansions += 1;
            if next == self.target {
                let mut vertices = self.vertices.clone();
                vertices.push(next);
                let mut edges = self.edges.clone();
                edges.push(e);
                self.yielded += 1;
                return Some(Ok(Path::from_parts(edges, vertices)));
            }
            self.on_path[next] = true;
            self.vertices.push(next);
            self.edges.push(e);
            self.cursor.push(0);
        }
        self.done = true;
        None
    }
}

pub fn enumerate_self_avoiding_paths<'g>(
    g: &'g Graph,
    u: VertexId,
    v: VertexId,
    max_len: usize,
) -> Result<SelfAvoidingPaths<'g>, GraphError> {
    SelfAvoidingPaths::new(g, u, v, &PathSearch::new(max_len))
}
