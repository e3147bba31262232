//! ε-detours: exact arithmetic, exhaustive search, certificates and the
//! group-theoretic constructions.

use num_rational::Ratio;

use crate::cayley::{inverse_word, power_word, CayleyBall, Letter, Word};
use crate::error::{DetourError, GraphError};
use crate::graph::{
    bfs_limited, frontier_distances, geodesic_count, path_set_difference_sizes, Graph, Path, PathSearch,
    SelfAvoidingPaths, VertexId,
};
use crate::groups::Group;

pub type Rational = Ratio<i64>;

/// Default DFS expansion budget for detour searches.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// `|π′\π|·q ≤ (p+q)·|π\π′|` for `ε = p/q`, with matching endpoints and
/// distinct edge sets.
pub fn is_epsilon_detour(pi: &Path, detour: &Path, eps: Rational) -> bool {
    if pi.start() != detour.start() || pi.end() != detour.end() {
        return false;
    }
    let (removed, added, _) = path_set_difference_sizes(pi, detour);
    if removed == 0 && added == 0 {
        return false;
    }
    let (p, q) = (*eps.numer() as i128, *eps.denom() as i128);
    added as i128 * q <= (p + q) * removed as i128
}

/// `|π| + ⌊ε|π|⌋`.
pub fn detour_length_bound(len: usize, eps: Rational) -> usize {
    len + (Rational::from_integer(len as i64) * eps).floor().to_integer() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetourVerdict {
    pub epsilon: Rational,
    pub detour: Option<Path>,
    /// False when the search budget ran out before a detour was found.
    pub exhaustive: bool,
    pub expansions: u64,
}

/// Options for [`find_epsilon_detour_with`].
#[derive(Clone, Debug, Default)]
pub struct DetourSearch<'a> {
    pub budget: Option<u64>,
    pub allowed: Option<&'a [bool]>,
    /// Further caps the length bound.
    pub max_len: Option<usize>,
}

pub fn find_epsilon_detour(g: &Graph, pi: &Path, eps: Rational, budget: u64) -> Result<DetourVerdict, DetourError> {
    find_epsilon_detour_with(g, pi, eps, &DetourSearch { budget: Some(budget), ..Default::default() })
}

/// First self-avoiding ε-detour of `pi` in lexicographic edge order.
pub fn find_epsilon_detour_with(
    g: &Graph,
    pi: &Path,
    eps: Rational,
    opts: &DetourSearch<'_>,
) -> Result<DetourVerdict, DetourError> {
    if *eps.numer() < 0 {
        return Err(DetourError::Hypothesis("ε must be non-negative".into()));
    }
    if !pi.is_self_avoiding() {
        return Err(DetourError::Hypothesis("the queried path must be self-avoiding".into()));
    }
    let mut max_len = detour_length_bound(pi.len(), eps);
    if let Some(cap) = opts.max_len {
        max_len = max_len.min(cap);
    }
    let search = PathSearch { max_len, budget: opts.budget, allowed: opts.allowed };
    let mut paths = SelfAvoidingPaths::new(g, pi.start(), pi.end(), &search)?;
    for item in paths.by_ref() {
        match item {
            Ok(candidate) => {
                if is_epsilon_detour(pi, &candidate, eps) {
                    let expansions = paths.expansions();
                    return Ok(DetourVerdict { epsilon: eps, detour: Some(candidate), exhaustive: true, expansions });
                }
            }
            Err(GraphError::BudgetExceeded { expansions, .. }) => {
                return Ok(DetourVerdict { epsilon: eps, detour: None, exhaustive: false, expansions });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(DetourVerdict { epsilon: eps, detour: None, exhaustive: true, expansions: paths.expansions() })
}

/// Distance from a base vertex to the frontier needed for an exact
/// certificate at `(ε, C)`.
///
/// A self-avoiding path of length at most ℓ = C + ⌊εC⌋ between points at
/// distance C never leaves B(b, ⌊(ℓ + C)/2⌋), so that ball must lie strictly
/// inside the truncation.
pub fn certificate_margin(eps: Rational, c: usize) -> usize {
    (detour_length_bound(c, eps) + c) / 2 + 1
}

/// The looser margin C(2+ε)+1, rounded up.
pub fn conservative_margin(eps: Rational, c: usize) -> usize {
    let m = Rational::from_integer(c as i64) * (Rational::from_integer(2) + eps) + Rational::from_integer(1);
    m.ceil().to_integer() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub enum Inconclusive {
    Margin { base: VertexId, distance: Option<usize>, required: usize },
    Budget { geodesic: Path, expansions: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertificateOutcome {
    /// One `(geodesic, detour)` witness per examined unique geodesic.
    Certified { witnesses: Vec<(Path, Path)> },
    Refuted { counterexample: Path },
    Inconclusive(Inconclusive),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetourCertificate {
    pub epsilon: Rational,
    pub c: usize,
    pub bases: Vec<VertexId>,
    pub required_margin: usize,
    /// Whether every base also clears the looser C(2+ε)+1 margin.
    pub conservative_margin_met: bool,
    pub unique_geodesics: usize,
    pub non_unique_targets: usize,
    pub expansions: u64,
    pub outcome: CertificateOutcome,
}

impl DetourCertificate {
    pub fn label(&self) -> &'static str {
        match self.outcome {
            CertificateOutcome::Certified { .. } => "CERTIFIED",
            CertificateOutcome::Refuted { .. } => "REFUTED",
            CertificateOutcome::Inconclusive(_) => "INCONCLUSIVE",
        }
    }
}

/// Checks every unique geodesic of length exactly `c` leaving each base.
pub fn certify_admits_detours(
    g: &Graph,
    eps: Rational,
    c: usize,
    bases: &[VertexId],
    budget: u64,
) -> Result<DetourCertificate, DetourError> {
    let required = certificate_margin(eps, c);
    let conservative = conservative_margin(eps, c);
    let to_frontier = frontier_distances(g);
    let mut cert = DetourCertificate {
        epsilon: eps,
        c,
        bases: bases.to_vec(),
        required_margin: required,
        conservative_margin_met: true,
        unique_geodesics: 0,
        non_unique_targets: 0,
        expansions: 0,
        outcome: CertificateOutcome::Certified { witnesses: Vec::new() },
    };
    for &b in bases {
        g.check_vertex(b)?;
        let margin = to_frontier[b];
        if margin.is_some_and(|m| m < conservative) {
            cert.conservative_margin_met = false;
        }
        if margin.is_some_and(|m| m < required) {
            cert.outcome = CertificateOutcome::Inconclusive(Inconclusive::Margin { base: b, distance: margin, required });
            return Ok(cert);
        }
    }
    let mut witnesses = Vec::new();
    for &b in bases {
        for pi in unique_geodesics_from(g, b, c, &mut cert.non_unique_targets) {
            cert.unique_geodesics += 1;
            let remaining = budget.saturating_sub(cert.expansions);
            let verdict = find_epsilon_detour(g, &pi, eps, remaining)?;
            cert.expansions += verdict.expansions;
            match (verdict.detour, verdict.exhaustive) {
                (Some(d), _) => witnesses.push((pi, d)),
                (None, true) => {
                    cert.outcome = CertificateOutcome::Refuted { counterexample: pi };
                    return Ok(cert);
                }
                (None, false) => {
                    let expansions = cert.expansions;
                    cert.outcome = CertificateOutcome::Inconclusive(Inconclusive::Budget { geodesic: pi, expansions });
                    return Ok(cert);
                }
            }
        }
    }
    cert.outcome = CertificateOutcome::Certified { witnesses };
    Ok(cert)
}

/// Unique geodesics of length `c` from `b`, ordered by target id.
fn unique_geodesics_from(g: &Graph, b: VertexId, c: usize, non_unique: &mut usize) -> Vec<Path> {
    let dist = bfs_limited(g, b, c, |_| true);
    let mut order: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| dist[v].is_some()).collect();
    order.sort_by_key(|&v| (dist[v], v));
    let mut count = vec![0u64; g.vertex_count()];
    count[b] = 1;
    for &v in &order[1..] {
        let dv = dist[v].unwrap();
        count[v] = g
            .incident(v)
            .iter()
            .map(|&e| g.other_end(e, v))
            .filter(|&u| dist[u] == Some(dv - 1))
            .fold(0u64, |acc, u| acc.saturating_add(count[u]));
    }
    let mut out = Vec::new();
    for &t in &order {
        if dist[t] != Some(c) {
            continue;
        }
        if count[t] != 1 {
            *non_unique += 1;
            continue;
        }
        let mut edges = Vec::with_capacity(c);
        let mut vertices = vec![t];
        let mut cur = t;
        for step in (0..c).rev() {
            let e = *g
                .incident(cur)
                .iter()
                .find(|&&e| dist[g.other_end(e, cur)] == Some(step))
                .expect("unique predecessor");
            cur = g.other_end(e, cur);
            edges.push(e);
            vertices.push(cur);
        }
        edges.reverse();
        vertices.reverse();
        out.push(Path::from_parts(edges, vertices));
    }
    out
}

/// A geodesic other than `pi` between its endpoints, which is a 0-detour.
pub fn loop_erase_detour(g: &Graph, pi: &Path) -> Result<Path, DetourError> {
    let gc = geodesic_count(g, pi.start(), pi.end())?;
    if pi.len() > gc.distance {
        return Ok(gc.witness);
    }
    if gc.count <= 1 {
        return Err(DetourError::UniqueGeodesic);
    }
    let search = PathSearch::new(gc.distance);
    for candidate in SelfAvoidingPaths::new(g, pi.start(), pi.end(), &search)? {
        let candidate = candidate?;
        if candidate.edges() != pi.edges() {
            return Ok(candidate);
        }
    }
    Err(DetourError::UniqueGeodesic)
}

/// Output of a group-theoretic detour construction, as a word read from the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Construction {
    pub case: &'static str,
    pub word: Word,
    /// `|π′| − |π|`.
    pub extra_length: usize,
    /// Lower bound on `|π \ π′|` guaranteed by the construction.
    pub separation_bound: Rational,
}

impl Construction {
    /// `extra / bound`, or `None` when the bound is vacuous.
    pub fn implied_epsilon(&self) -> Option<Rational> {
        (self.separation_bound > Rational::from_integer(0))
            .then(|| Rational::from_integer(self.extra_length as i64) / self.separation_bound)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionCheck {
    pub endpoints_equal: bool,
    pub separation: usize,
    pub bound_holds: bool,
    pub implied_epsilon: Option<Rational>,
    /// `is_epsilon_detour` at the implied ε; `None` when the bound is vacuous.
    pub detour_at_implied: Option<bool>,
    pub self_avoiding: bool,
    pub shared_vertices: usize,
}

impl ConstructionCheck {
    pub fn passed(&self) -> bool {
        self.endpoints_equal && self.bound_holds && self.detour_at_implied.unwrap_or(true)
    }
}

/// Re-checks a construction in the group backend and on the ball graph.
pub fn validate_construction<G: Group>(
    ball: &CayleyBall<G>,
    pi: &[Letter],
    c: &Construction,
) -> Result<ConstructionCheck, DetourError> {
    let endpoints_equal = ball.evaluate(pi) == ball.evaluate(&c.word);
    let p = ball.word_path(0, pi)?;
    let q = ball.word_path(0, &c.word)?;
    let (separation, _, _) = path_set_difference_sizes(&p, &q);
    let implied = c.implied_epsilon();
    let shared_vertices = {
        let a: std::collections::BTreeSet<_> = p.vertices().iter().collect();
        q.vertices().iter().collect::<std::collections::BTreeSet<_>>().intersection(&a).count()
    };
    Ok(ConstructionCheck {
        endpoints_equal,
        separation,
        bound_holds: Rational::from_integer(separation as i64) >= c.separation_bound,
        implied_epsilon: implied,
        detour_at_implied: implied.map(|eps| is_epsilon_detour(&p, &q, eps)),
        self_avoiding: q.is_self_avoiding(),
        shared_vertices,
    })
}

fn require_unique_geodesic<G: Group>(ball: &CayleyBall<G>, pi: &[Letter]) -> Result<(), DetourError> {
    let path = ball.word_path(0, pi)?;
    if pi.len() > ball.radius() {
        return Err(DetourError::BallTooSmall { radius: ball.radius() });
    }
    let gc = geodesic_count(ball.graph(), 0, path.end())?;
    if gc.distance != pi.len() || gc.count != 1 {
        return Err(DetourError::Hypothesis("π is not a unique geodesic".into()));
    }
    Ok(())
}

fn half(n: usize) -> Rational {
    Rational::new(n as i64, 2)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// ℤ with more than two traversable letters: conjugate by a letter that π avoids.
pub fn z_detour<G: Group>(ball: &CayleyBall<G>, pi: &[Letter]) -> Result<Construction, DetourError> {
    if ball.alphabet().len() <= 2 {
        return Err(DetourError::Hypothesis("alphabet must have more than two letters".into()));
    }
    let images = &ball.generators().images;
    if images.iter().any(|x| images.iter().any(|y| !ball.group().commutes(x, y))) {
        return Err(DetourError::Hypothesis("the group is not abelian".into()));
    }
    require_unique_geodesic(ball, pi)?;
    let used: Vec<usize> = pi.iter().map(|&l| ball.letter_slot(l)).collect();
    let s = ball
        .alphabet()
        .iter()
        .copied()
        .find(|&l| !used.contains(&ball.letter_slot(l)) && !used.contains(&ball.letter_slot(l.inv())))
        .ok_or_else(|| DetourError::Hypothesis("π uses every generator".into()))?;
    let mut word = vec![s];
    word.extend_from_slice(pi);
    word.push(s.inv());
    Ok(Construction { case: "conjugate by an avoided letter", word, extra_length: 2, separation_bound: half(pi.len()) - int(2) })
}

/// Infinite dihedral group with at least three reflection letters.
pub fn dihedral_detour<G: Group>(ball: &CayleyBall<G>, pi: &[Letter]) -> Result<Construction, DetourError> {
    let group = ball.group();
    let id = group.identity();
    let reflections: Vec<Letter> = ball
        .alphabet()
        .iter()
        .copied()
        .filter(|&l| {
            let x = ball.letter_image(l);
            group.multiply(&x, &x) == id
        })
        .collect();
    if reflections.len() < 3 || ball.mode() != crate::cayley::CayleyMode::Reduced {
        return Err(DetourError::Hypothesis("need a reduced Cayley graph with three distinct order-2 letters".into()));
    }
    require_unique_geodesic(ball, pi)?;
    let (a, b, c) = (reflections[0], reflections[1], reflections[2]);
    let slot = |l: Letter| ball.letter_slot(l);
    let (sa, sb) = (slot(a), slot(b));
    let touches_ab = pi.windows(2).any(|w| {
        let (x, y) = (slot(w[0]), slot(w[1]));
        (x, y) == (sa, sb) || (x, y) == (sb, sa)
    });
    let odd = pi.len() % 2 == 1;
    let (case, first, second, bound) = if touches_ab {
        let alternating = pi.iter().all(|&l| slot(l) == sa || slot(l) == sb) && pi.windows(2).all(|w| slot(w[0]) != slot(w[1]));
        if !alternating {
            return Err(DetourError::Hypothesis("π meets ab but is not a subword of (ab)^N".into()));
        }
        ("subword of (ab)^N", a, c, int(pi.len() as i64) - int(3))
    } else {
        ("avoids ab and ba", a, b, half(pi.len()) - int(3))
    };
    let mut word = vec![first, second];
    word.extend_from_slice(pi);
    // (second first)^{(-1)^{|π|}}; order-2 letters are their own inverses.
    if odd {
        word.extend([first, second]);
    } else {
        word.extend([second, first]);
    }
    Ok(Construction { case, word, extra_length: 4, separation_bound: bound })
}

fn check_central<G: Group>(ball: &CayleyBall<G>, z: &G::Elem) -> Result<(), DetourError> {
    let group = ball.group();
    if *z == group.identity() {
        return Err(DetourError::Hypothesis("z must not be the identity".into()));
    }
    let central = (0..ball.generators().images.len()).all(|s| group.commutes(z, &ball.generators().images[s]));
    if !central {
        return Err(DetourError::Hypothesis("z is not central".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConjugationOutcome {
    Detour(Construction),
    /// π contains a geodesic word for z (or its inverse) starting at `position`.
    FactorForm { position: usize, inverse: bool },
}

/// `w π w⁻¹` for a geodesic word `w` of a central element `z`.
pub fn conjugation_detour<G: Group>(
    ball: &CayleyBall<G>,
    z: &G::Elem,
    pi: &[Letter],
) -> Result<ConjugationOutcome, DetourError> {
    check_central(ball, z)?;
    let w = ball.geodesic_word(z).ok_or(DetourError::BallTooSmall { radius: ball.radius() })?;
    require_unique_geodesic(ball, pi)?;
    let group = ball.group();
    let z_inv = group.inverse(z);
    if pi.len() >= w.len() {
        for i in 0..=pi.len() - w.len() {
            let value = ball.evaluate(&pi[i..i + w.len()]);
            if value == *z || value == z_inv {
                return Ok(ConjugationOutcome::FactorForm { position: i, inverse: value != *z });
            }
        }
    }
    let mut word = w.clone();
    word.extend_from_slice(pi);
    word.extend(inverse_word(&w));
    let bound = half(pi.len() + 1) - int(w.len() as i64) - int(1);
    Ok(ConjugationOutcome::Detour(Construction {
        case: "conjugate by a central geodesic",
        word,
        extra_length: 2 * w.len(),
        separation_bound: bound,
    }))
}

/// Largest |k| tried when testing membership in a cyclic subgroup.
pub const CYCLIC_SEARCH_BOUND: i64 = 4096;
/// Largest power tried when looking for a central power.
pub const CENTRAL_POWER_BOUND: usize = 64;

fn in_cyclic_subgroup<G: Group>(group: &G, h: &G::Elem, g: &G::Elem) -> bool {
    let id = group.identity();
    if *g == id {
        return true;
    }
    let h_inv = group.inverse(h);
    let (mut up, mut down) = (id.clone(), id.clone());
    for _ in 0..CYCLIC_SEARCH_BOUND {
        up = group.multiply(&up, h);
        down = group.multiply(&down, &h_inv);
        if up == *g || down == *g {
            return true;
        }
        if up == id {
            return false;
        }
    }
    false
}

/// `α η^{M+r} α⁻¹ η^{−r}` for `π = η^M`, where `r` makes `M + r` a multiple of
/// the least `l` with `ρ(η)^l` central.
pub fn power_case_detour<G: Group>(
    ball: &CayleyBall<G>,
    eta: &[Letter],
    m: usize,
    alpha: Option<Word>,
) -> Result<Construction, DetourError> {
    if eta.is_empty() || m == 0 {
        return Err(DetourError::Hypothesis("η and M must be non-trivial".into()));
    }
    let group = ball.group();
    let h = ball.evaluate(eta);
    let central = |x: &G::Elem| (0..ball.generators().images.len()).all(|s| group.commutes(x, &ball.generators().images[s]));
    let l = (1..=CENTRAL_POWER_BOUND)
        .find(|&l| central(&group.power(&h, l as i64)))
        .ok_or_else(|| DetourError::Hypothesis("no power of ρ(η) is central".into()))?;
    let pi = power_word(eta, m as i64);
    require_unique_geodesic(ball, &pi)?;
    let alpha = match alpha {
        Some(a) => a,
        None => ball
            .alphabet()
            .iter()
            .map(|&l| vec![l])
            .find(|a| !in_cyclic_subgroup(group, &h, &ball.evaluate(a)))
            .ok_or_else(|| DetourError::Hypothesis("every letter lies in ⟨ρ(η)⟩".into()))?,
    };
    if in_cyclic_subgroup(group, &h, &ball.evaluate(&alpha)) {
        return Err(DetourError::Hypothesis("α lies in ⟨ρ(η)⟩".into()));
    }
    let r = (l - m % l) % l;
    let mut word = alpha.clone();
    word.extend(power_word(eta, (m + r) as i64));
    word.extend(inverse_word(&alpha));
    word.extend(power_word(eta, -(r as i64)));
    let bound = half(pi.len() + 1) - int(alpha.len() as i64) - int((l * eta.len()) as i64) - int(1);
    Ok(Construction {
        case: "power of a central factor",
        extra_length: word.len() - pi.len(),
        word,
        separation_bound: bound,
    })
}

/// Splice `γ₁ π′ γ₂` into π, where π′ is the longest piece of π surviving
/// loop erasure in Γ/F and `γ₁`, `γ₂` are geodesics to `f` and `(f^{ρ(π′)})⁻¹`.
pub fn normal_subgroup_detour<G: Group>(
    ball: &CayleyBall<G>,
    normal: &[G::Elem],
    pi: &[Letter],
) -> Result<Construction, DetourError> {
    let group = ball.group();
    let id = group.identity();
    let f = normal
        .iter()
        .find(|x| **x != id)
        .ok_or_else(|| DetourError::Hypothesis("F is trivial".into()))?
        .clone();
    for s in &ball.generators().images {
        if normal.iter().any(|x| !normal.contains(&group.conjugate(x, s))) {
            return Err(DetourError::Hypothesis("F is not normal".into()));
        }
    }
    let mut ell = 0;
    for x in normal {
        ell = ell.max(ball.word_length(x).ok_or(DetourError::BallTooSmall { radius: ball.radius() })?);
    }
    if pi.len() < ell {
        return Err(DetourError::Hypothesis(format!("|π| = {} is shorter than ℓ = {ell}", pi.len())));
    }
    require_unique_geodesic(ball, pi)?;

    let coset = |g: &G::Elem| normal.iter().map(|x| group.multiply(x, g)).min().unwrap();
    let mut prefix = id.clone();
    let mut stack: Vec<(usize, G::Elem)> = vec![(0, coset(&prefix))];
    for (i, &l) in pi.iter().enumerate() {
        prefix = group.multiply(&prefix, &ball.letter_image(l));
        let key = coset(&prefix);
        if let Some(j) = stack.iter().position(|(_, k)| *k == key) {
            stack.truncate(j + 1);
        } else {
            stack.push((i + 1, key));
        }
    }
    // Letter k − 1 survives when stack entry k directly follows entry k − 1.
    let kept: Vec<usize> = stack.iter().map(|(p, _)| *p).collect::<Vec<_>>().windows(2).map(|w| w[1] - 1).collect();
    let (mut best, mut run_start) = ((0usize, 0usize), 0usize);
    for i in 0..kept.len() {
        if i > 0 && kept[i] != kept[i - 1] + 1 {
            run_start = i;
        }
        if i + 1 - run_start > best.1 - best.0 {
            best = (kept[run_start], kept[i] + 1);
        }
    }
    let (from, to) = best;
    let ell_r = int(ell as i64);
    let floor_len = (int(pi.len() as i64) - ell_r) / (ell_r + int(1));
    if int((to - from) as i64) < floor_len {
        return Err(DetourError::Hypothesis("loop-erased piece is shorter than the guaranteed bound".into()));
    }
    let sub = &pi[from..to];
    let g_sub = ball.evaluate(sub);
    let gamma1 = ball.geodesic_word(&f).ok_or(DetourError::BallTooSmall { radius: ball.radius() })?;
    let target2 = group.inverse(&group.conjugate(&f, &g_sub));
    let gamma2 = ball.geodesic_word(&target2).ok_or(DetourError::BallTooSmall { radius: ball.radius() })?;
    let mut word = pi[..from].to_vec();
    word.extend(gamma1.iter().copied());
    word.extend_from_slice(sub);
    word.extend(gamma2.iter().copied());
    word.extend_from_slice(&pi[to..]);
    Ok(Construction {
        case: "splice through a finite normal subgroup",
        extra_length: gamma1.len() + gamma2.len(),
        word,
        separation_bound: floor_len - int(2 * ell as i64),
    })
}
