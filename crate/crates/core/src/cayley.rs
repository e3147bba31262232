//! Balls in reduced and unreduced Cayley graphs, with the word–path dictionary.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{BuildError, DetourError};
use crate::graph::{bfs_distances, EdgeId, Graph, GraphBuilder, Path, VertexId};
use crate::groups::Group;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CayleyMode {
    /// One edge per unordered adjacent pair.
    Reduced,
    /// One edge per (element, symbol); order-two symbols give parallel edges.
    Unreduced,
}

/// A symbol or its formal inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub symbol: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: usize) -> Self {
        Self { symbol, inverse: false }
    }

    pub fn inv(self) -> Self {
        Self { symbol: self.symbol, inverse: !self.inverse }
    }
}

pub type Word = Vec<Letter>;

pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inv()).collect()
}

pub fn power_word(w: &[Letter], n: i64) -> Word {
    let base = if n < 0 { inverse_word(w) } else { w.to_vec() };
    let mut out = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
    for _ in 0..n.unsigned_abs() {
        out.extend_from_slice(&base);
    }
    out
}

#[derive(Clone, Debug)]
pub struct GeneratorSpec<E> {
    pub names: Vec<String>,
    pub images: Vec<E>,
    pub mode: CayleyMode,
}

impl<E> GeneratorSpec<E> {
    pub fn new(names: &[&str], images: Vec<E>, mode: CayleyMode) -> Self {
        assert_eq!(names.len(), images.len(), "one name per generator");
        Self { names: names.iter().map(|s| s.to_string()).collect(), images, mode }
    }
}

/// Explicit ball B(1, L) in a Cayley graph, vertex 0 being the identity.
#[derive(Clone, Debug)]
pub struct CayleyBall<G: Group> {
    group: G,
    gens: GeneratorSpec<G::Elem>,
    radius: usize,
    graph: Graph,
    elements: Vec<G::Elem>,
    depth: Vec<usize>,
    index: HashMap<G::Elem, VertexId>,
    /// Traversable letters in canonical order.
    alphabet: Vec<Letter>,
    alphabet_images: Vec<G::Elem>,
    /// `steps[v * |alphabet| + a]` is the neighbour reached from `v` by letter `a`.
    steps: Vec<Option<(VertexId, EdgeId)>>,
    stalled_at: Option<usize>,
}

pub const DEFAULT_VERTEX_CAP: usize = 4_000_000;

pub fn build_cayley_ball<G: Group>(
    group: G,
    gens: GeneratorSpec<G::Elem>,
    radius: usize,
) -> Result<CayleyBall<G>, BuildError> {
    build_cayley_ball_capped(group, gens, radius, DEFAULT_VERTEX_CAP)
}

pub fn build_cayley_ball_capped<G: Group>(
    group: G,
    mut gens: GeneratorSpec<G::Elem>,
    radius: usize,
    cap: usize,
) -> Result<CayleyBall<G>, BuildError> {
    if radius == 0 {
        return Err(BuildError::InvalidParameter("truncation radius must be at least 1".into()));
    }
    if gens.images.is_empty() {
        return Err(BuildError::InvalidParameter("empty generating set".into()));
    }
    let identity = group.identity();
    for (name, img) in gens.names.iter().zip(gens.images.iter_mut()) {
        *img = group.canonicalize(img.clone());
        if *img == identity {
            return Err(BuildError::TrivialGenerator(name.clone()));
        }
    }

    let mut alphabet = Vec::new();
    let mut alphabet_images: Vec<G::Elem> = Vec::new();
    for (s, img) in gens.images.iter().enumerate() {
        for letter in [Letter::new(s), Letter::new(s).inv()] {
            let image = if letter.inverse { group.inverse(img) } else { img.clone() };
            if gens.mode == CayleyMode::Reduced && alphabet_images.contains(&image) {
                continue;
            }
            alphabet.push(letter);
            alphabet_images.push(image);
        }
    }

    let mut elements = vec![identity.clone()];
    let mut depth = vec![0usize];
    let mut index = HashMap::from([(identity, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    let mut stalled_at = None;
    while let Some(v) = queue.pop_front() {
        if depth[v] >= radius {
            continue;
        }
        for img in &alphabet_images {
            let h = group.multiply(&elements[v], img);
            if !index.contains_key(&h) {
                if elements.len() >= cap {
                    return Err(BuildError::TooLarge { cap });
                }
                index.insert(h.clone(), elements.len());
                elements.push(h);
                depth.push(depth[v] + 1);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    let reached = *depth.last().unwrap();
    if reached < radius {
        stalled_at = Some(reached);
    }

    let n = elements.len();
    let k = alphabet.len();
    let mut builder = GraphBuilder::new(n);
    let mut steps = vec![None; n * k];
    let letter_slot = |l: Letter, alphabet_images: &[G::Elem]| -> usize {
        let img = if l.inverse { group.inverse(&gens.images[l.symbol]) } else { gens.images[l.symbol].clone() };
        alphabet_images.iter().position(|x| *x == img).expect("letter in alphabet")
    };
    match gens.mode {
        CayleyMode::Unreduced => {
            for v in 0..n {
                for (s, img) in gens.images.iter().enumerate() {
                    let h = group.multiply(&elements[v], img);
                    if let Some(&w) = index.get(&h) {
                        let e = builder.add_edge(v, w)?;
                        let fwd = alphabet.iter().position(|&l| l == Letter::new(s)).unwrap();
                        let back = alphabet.iter().position(|&l| l == Letter::new(s).inv()).unwrap();
                        steps[v * k + fwd] = Some((w, e));
                        steps[w * k + back] = Some((v, e));
                    }
                }
            }
        }
        CayleyMode::Reduced => {
            let inverse_slot: Vec<usize> =
                alphabet.iter().map(|&l| letter_slot(l.inv(), &alphabet_images)).collect();
            for v in 0..n {
                for a in 0..k {
                    let h = group.multiply(&elements[v], &alphabet_images[a]);
                    if let Some(&w) = index.get(&h) {
                        if w > v {
                            let e = builder.add_edge(v, w)?;
                            steps[v * k + a] = Some((w, e));
                            steps[w * k + inverse_slot[a]] = Some((v, e));
                        }
                    }
                }
            }
        }
    }
    for v in 0..n {
        if depth[v] == radius {
            builder.mark_frontier(v)?;
        }
    }
    Ok(CayleyBall {
        group,
        gens,
        radius,
        graph: builder.build(),
        elements,
        depth,
        index,
        alphabet,
        alphabet_images,
        steps,
        stalled_at,
    })
}

impl<G: Group> CayleyBall<G> {
    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn generators(&self) -> &GeneratorSpec<G::Elem> {
        &self.gens
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn mode(&self) -> CayleyMode {
        self.gens.mode
    }

    /// Radius at which the ball stopped growing, if it did so before `L`.
    pub fn stalled_at(&self) -> Option<usize> {
        self.stalled_at
    }

    pub fn element(&self, v: VertexId) -> &G::Elem {
        &self.elements[v]
    }

    pub fn vertex_of(&self, g: &G::Elem) -> Option<VertexId> {
        self.index.get(g).copied()
    }

    /// Word length |g| of an element inside the ball.
    pub fn word_length(&self, g: &G::Elem) -> Option<usize> {
        self.vertex_of(g).map(|v| self.depth[v])
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    /// Position of `l` in the traversable alphabet. In reduced mode letters
    /// with equal images are identified.
    pub fn letter_slot(&self, l: Letter) -> usize {
        let img = self.letter_image(l);
        self.alphabet_images.iter().position(|x| *x == img).expect("letter in alphabet")
    }

    pub fn letter_image(&self, l: Letter) -> G::Elem {
        let img = &self.gens.images[l.symbol];
        if l.inverse {
            self.group.inverse(img)
        } else {
            img.clone()
        }
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.gens.names.iter().position(|n| n == name).map(Letter::new)
    }

    /// Parses whitespace-separated tokens `s`, `s^-1` or `s^k`.
    pub fn parse_word(&self, text: &str) -> Result<Word, BuildError> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e.parse().map_err(|_| BuildError::InvalidParameter(format!("bad exponent in `{tok}`")))?;
                    (n, e)
                }
                None => (tok, 1),
            };
            let l = self.letter(name).ok_or_else(|| BuildError::InvalidParameter(format!("unknown generator `{name}`")))?;
            out.extend(power_word(&[l], exp));
        }
        Ok(out)
    }

    pub fn render_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|l| {
                let n = &self.gens.names[l.symbol];
                if l.inverse {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn evaluate(&self, w: &[Letter]) -> G::Elem {
        w.iter().fold(self.group.identity(), |acc, &l| self.group.multiply(&acc, &self.letter_image(l)))
    }

    /// The path spelled by `w` from `start`.
    pub fn word_path(&self, start: VertexId, w: &[Letter]) -> Result<Path, DetourError> {
        let k = self.alphabet.len();
        let mut cur = start;
        let mut edges = Vec::with_capacity(w.len());
        for &l in w {
            let (next, e) = self.steps[cur * k + self.letter_slot(l)].ok_or(DetourError::BallTooSmall { radius: self.radius })?;
            edges.push(e);
            cur = next;
        }
        Ok(Path::new(&self.graph, start, edges)?)
    }

    /// The word spelled by a path, using the traversed edge to disambiguate
    /// parallel edges.
    pub fn path_word(&self, p: &Path) -> Word {
        let k = self.alphabet.len();
        p.edges()
            .iter()
            .zip(p.vertices())
            .map(|(&e, &v)| {
                let a = (0..k).find(|&a| matches!(self.steps[v * k + a], Some((_, f)) if f == e)).expect("edge leaves v");
                self.alphabet[a]
            })
            .collect()
    }

    /// Lexicographically smallest (in alphabet order) geodesic word from the
    /// identity to `target`.
    pub fn geodesic_word(&self, target: &G::Elem) -> Option<Word> {
        let t = self.vertex_of(target)?;
        let to_t = bfs_distances(&self.graph, t);
        let k = self.alphabet.len();
        let mut cur = 0;
        let mut word = Vec::new();
        while cur != t {
            let d = to_t[cur]?;
            let a = (0..k).find(|&a| matches!(self.steps[cur * k + a], Some((w, _)) if to_t[w] == Some(d - 1)))?;
            word.push(self.alphabet[a]);
            cur = self.steps[cur * k + a].unwrap().0;
        }
        Some(word)
    }

    /// Debug table, one `vertex <id> element <canonical-string>` line per vertex.
    pub fn element_table(&self) -> String {
        let mut out = String::new();
        for (v, g) in self.elements.iter().enumerate() {
            writeln!(out, "vertex {v} element {}", self.group.render(g)).unwrap();
        }
        out
    }
}
