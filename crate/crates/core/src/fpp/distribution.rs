//! Atom, uniform and shifted-exponential mixtures on [0, ∞), and Borel sets.

use std::fmt;
use std::str::FromStr;

use crate::detours::Rational;
use crate::error::FppError;

/// Parses `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, FppError> {
    let bad = || FppError::InvalidDistribution(format!("not a rational number: `{text}`"));
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() || frac_part.len() > 15 {
        return Err(bad());
    }
    let int_val: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let frac_val: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = 10i64.pow(frac_part.len() as u32);
    let value = Rational::new(int_val.checked_mul(scale).and_then(|x| x.checked_add(frac_val)).ok_or_else(bad)?, scale);
    Ok(if neg { -value } else { value })
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    Atom { value: f64, mass: Rational },
    Uniform { lo: f64, hi: f64, mass: Rational },
    /// `shift + Exp(rate)`.
    Exponential { rate: f64, shift: f64, mass: Rational },
}

impl Piece {
    pub fn mass(&self) -> Rational {
        match self {
            Piece::Atom { mass, .. } | Piece::Uniform { mass, .. } | Piece::Exponential { mass, .. } => *mass,
        }
    }

    fn weight(&self) -> f64 {
        rational_to_f64(self.mass())
    }

    fn with_mass(&self, mass: Rational) -> Piece {
        let mut p = self.clone();
        match &mut p {
            Piece::Atom { mass: m, .. } | Piece::Uniform { mass: m, .. } | Piece::Exponential { mass: m, .. } => *m = mass,
        }
        p
    }

    fn shifted(&self, delta: f64) -> Piece {
        match *self {
            Piece::Atom { value, mass } => Piece::Atom { value: value + delta, mass },
            Piece::Uniform { lo, hi, mass } => Piece::Uniform { lo: lo + delta, hi: hi + delta, mass },
            Piece::Exponential { rate, shift, mass } => Piece::Exponential { rate, shift: shift + delta, mass },
        }
    }

    /// Unnormalised contribution to P(W ≤ x), ignoring atoms exactly at `x`
    /// when `strict` is set.
    fn cdf_part(&self, x: f64, strict: bool) -> f64 {
        match *self {
            Piece::Atom { value, .. } => {
                let hit = if strict { value < x } else { value <= x };
                if hit {
                    self.weight()
                } else {
                    0.0
                }
            }
            Piece::Uniform { lo, hi, .. } => self.weight() * ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Piece::Exponential { rate, shift, .. } => {
                if x <= shift {
                    0.0
                } else {
                    self.weight() * -(-rate * (x - shift)).exp_m1()
                }
            }
        }
    }

    /// E[min(W, t)] for this piece, unnormalised.
    fn min_integral(&self, t: f64) -> f64 {
        let v = match *self {
            Piece::Atom { value, .. } => value.min(t),
            Piece::Uniform { lo, hi, .. } => {
                if t <= lo {
                    t
                } else if t >= hi {
                    0.5 * (lo + hi)
                } else {
                    (0.5 * (t * t - lo * lo) + t * (hi - t)) / (hi - lo)
                }
            }
            Piece::Exponential { rate, shift, .. } => {
                if t <= shift {
                    t
                } else {
                    shift - (-rate * (t - shift)).exp_m1() / rate
                }
            }
        };
        v * self.weight()
    }

    fn mean(&self) -> f64 {
        let v = match *self {
            Piece::Atom { value, .. } => value,
            Piece::Uniform { lo, hi, .. } => 0.5 * (lo + hi),
            Piece::Exponential { rate, shift, .. } => shift + 1.0 / rate,
        };
        v * self.weight()
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        match *self {
            Piece::Atom { value, .. } => out.push(value),
            Piece::Uniform { lo, hi, .. } => out.extend([lo, hi]),
            Piece::Exponential { shift, .. } => out.push(shift),
        }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Atom { value, mass } => write!(f, "atom {value} {mass}"),
            Piece::Uniform { lo, hi, mass } => write!(f, "unif {lo} {hi} {mass}"),
            Piece::Exponential { rate, shift, mass } => write!(f, "exp {rate} {shift} {mass}"),
        }
    }
}

impl FromStr for Piece {
    type Err = FppError;

    /// `atom v m`, `unif lo hi m` or `exp rate shift m`.
    fn from_str(s: &str) -> Result<Self, FppError> {
        let bad = |m: &str| FppError::InvalidDistribution(format!("`{s}`: {m}"));
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(&format!("not a number: {t}")));
        match tokens.as_slice() {
            ["atom", v, m] => Ok(Piece::Atom { value: num(v)?, mass: parse_rational(m)? }),
            ["unif", lo, hi, m] => Ok(Piece::Uniform { lo: num(lo)?, hi: num(hi)?, mass: parse_rational(m)? }),
            ["exp", rate, shift, m] => Ok(Piece::Exponential { rate: num(rate)?, shift: num(shift)?, mass: parse_rational(m)? }),
            _ => Err(bad("expected `atom v m`, `unif lo hi m` or `exp rate shift m`")),
        }
    }
}

/// A breakpoint of the CDF with its left limit and value.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Knot {
    x: f64,
    left: f64,
    value: f64,
}

/// Probability measure on [0, ∞) given as a finite mixture.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pieces: Vec<Piece>,
    knots: Vec<Knot>,
    has_exponential: bool,
}

impl Distribution {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, FppError> {
        let bad = |m: String| FppError::InvalidDistribution(m);
        let zero = Rational::from_integer(0);
        let mut total = zero;
        let mut exponentials = 0;
        for p in &pieces {
            if p.mass() < zero {
                return Err(bad(format!("negative mass in `{p}`")));
            }
            total += p.mass();
            match *p {
                Piece::Atom { value, .. } => {
                    if !(value.is_finite() && value >= 0.0) {
                        return Err(bad(format!("atom outside [0, ∞): `{p}`")));
                    }
                }
                Piece::Uniform { lo, hi, .. } => {
                    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
                        return Err(bad(format!("need 0 ≤ lo < hi: `{p}`")));
                    }
                }
                Piece::Exponential { rate, shift, .. } => {
                    exponentials += 1;
                    if !(rate.is_finite() && rate > 0.0 && shift.is_finite() && shift >= 0.0) {
                        return Err(bad(format!("need rate > 0 and shift ≥ 0: `{p}`")));
                    }
                }
            }
        }
        if total != Rational::from_integer(1) {
            return Err(bad(format!("masses sum to {total}, not 1")));
        }
        if exponentials > 1 {
            return Err(bad("at most one exponential piece is supported".into()));
        }
        let pieces: Vec<Piece> = pieces.into_iter().filter(|p| p.mass() > zero).collect();
        let mut d = Distribution { knots: Vec::new(), has_exponential: exponentials == 1, pieces };
        d.knots = d.breakpoints().into_iter().map(|x| Knot { x, left: d.cdf_left(x), value: d.cdf(x) }).collect();
        Ok(d)
    }

    pub fn parse_lines<S: AsRef<str>>(lines: &[S]) -> Result<Self, FppError> {
        Self::new(lines.iter().map(|l| l.as_ref().parse()).collect::<Result<_, _>>()?)
    }

    pub fn dirac(value: f64) -> Self {
        Self::new(vec![Piece::Atom { value, mass: Rational::from_integer(1) }]).expect("valid atom")
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Self::new(vec![Piece::Uniform { lo, hi, mass: Rational::from_integer(1) }]).expect("valid interval")
    }

    pub fn exponential(rate: f64) -> Self {
        Self::new(vec![Piece::Exponential { rate, shift: 0.0, mass: Rational::from_integer(1) }]).expect("valid rate")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Sorted, deduplicated CDF breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for p in &self.pieces {
            p.breakpoints(&mut out);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// P(W ≤ x).
    pub fn cdf(&self, x: f64) -> f64 {
        self.pieces.iter().map(|p| p.cdf_part(x, false)).sum::<f64>().min(1.0)
    }

    /// P(W < x).
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.pieces.iter().map(|p| p.cdf_part(x, true)).sum::<f64>().min(1.0)
    }

    /// P(W ≤ x) without the atoms.
    pub fn continuous_cdf(&self, x: f64) -> f64 {
        self.pieces.iter().filter(|p| !matches!(p, Piece::Atom { .. })).map(|p| p.cdf_part(x, false)).sum()
    }

    /// Total mass of atoms located in `[a, b)`.
    pub fn atom_mass_in(&self, a: f64, b: f64) -> f64 {
        self.pieces
            .iter()
            .filter_map(|p| match *p {
                Piece::Atom { value, .. } if a <= value && value < b => Some(p.weight()),
                _ => None,
            })
            .sum()
    }

    pub fn atom_mass_at(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .filter_map(|p| match *p {
                Piece::Atom { value, .. } if value == x => Some(p.weight()),
                _ => None,
            })
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.pieces.iter().map(Piece::mean).sum()
    }

    pub fn inf_support(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match *p {
                Piece::Atom { value, .. } => value,
                Piece::Uniform { lo, .. } => lo,
                Piece::Exponential { shift, .. } => shift,
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sup_support(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match *p {
                Piece::Atom { value, .. } => value,
                Piece::Uniform { hi, .. } => hi,
                Piece::Exponential { .. } => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    /// E[min(W, t)].
    pub fn min_integral(&self, t: f64) -> f64 {
        self.pieces.iter().map(|p| p.min_integral(t)).sum()
    }

    /// Generalised inverse `inf { x : F(x) ≥ u }` for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        if let [piece] = self.pieces.as_slice() {
            return match *piece {
                Piece::Atom { value, .. } => value,
                Piece::Uniform { lo, hi, .. } => lo + u * (hi - lo),
                Piece::Exponential { rate, shift, .. } => shift - (-u).ln_1p() / rate,
            };
        }
        let k = self.knots.partition_point(|kn| kn.value < u);
        if k == self.knots.len() {
            return self.solve_between(self.knots.last().map_or(0.0, |kn| kn.x), f64::INFINITY, u);
        }
        let knot = self.knots[k];
        if knot.left >= u && k > 0 {
            let prev = self.knots[k - 1];
            if !self.has_exponential {
                let span = knot.left - prev.value;
                if span <= 0.0 {
                    return knot.x;
                }
                return prev.x + (u - prev.value) / span * (knot.x - prev.x);
            }
            return self.solve_between(prev.x, knot.x, u);
        }
        knot.x
    }

    /// Bisection for `F(x) = u` on `(a, b)`, where `F` is continuous.
    fn solve_between(&self, a: f64, b: f64, u: f64) -> f64 {
        let mut lo = a;
        let mut hi = if b.is_finite() {
            b
        } else {
            let mut span = 1.0;
            while self.cdf(a + span) < u && span < 1e300 {
                span *= 2.0;
            }
            a + span
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// The law of `W + delta` for each shift, mixed with the given weights.
    pub fn shifted_mixture(&self, shifts: &[(Rational, Rational)]) -> Result<Distribution, FppError> {
        let mut pieces = Vec::new();
        for &(delta, weight) in shifts {
            let d = rational_to_f64(delta);
            for p in &self.pieces {
                pieces.push(p.shifted(d).with_mass(p.mass() * weight));
            }
        }
        let exps = pieces.iter().filter(|p| matches!(p, Piece::Exponential { .. })).count();
        if exps > 1 {
            return Err(FppError::Unsupported("shifting an exponential piece by several amounts".into()));
        }
        Distribution::new(pieces)
    }

    /// Points at which two CDFs must agree for the laws to coincide: all
    /// breakpoints, points just left of them, and interior points of every gap.
    pub fn probe_points(&self, other: &Distribution) -> Vec<f64> {
        let mut bps = self.breakpoints();
        bps.extend(other.breakpoints());
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let mut out = Vec::new();
        for (i, &b) in bps.iter().enumerate() {
            out.push(b);
            if let Some(&next) = bps.get(i + 1) {
                for j in 1..8 {
                    out.push(b + (next - b) * j as f64 / 8.0);
                }
            } else {
                for j in 1..=16 {
                    out.push(b + j as f64 * 0.5);
                }
            }
        }
        out
    }

    /// Same law, compared through CDFs and left limits at the probe points.
    pub fn same_law(&self, other: &Distribution, tol: f64) -> bool {
        self.probe_points(other).iter().all(|&x| {
            (self.cdf(x) - other.cdf(x)).abs() <= tol && (self.cdf_left(x) - other.cdf_left(x)).abs() <= tol
        })
    }

    pub fn to_lines(&self) -> Vec<String> {
        self.pieces.iter().map(Piece::to_string).collect()
    }
}

/// Finite union of disjoint half-open intervals `[a, b)` and isolated points.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct BorelSet {
    intervals: Vec<(f64, f64)>,
    points: Vec<f64>,
}

impl BorelSet {
    pub fn new(intervals: &[(f64, f64)], points: &[f64]) -> Self {
        let mut iv: Vec<(f64, f64)> = intervals.iter().copied().filter(|(a, b)| a < b).collect();
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in iv {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let mut pts: Vec<f64> =
            points.iter().copied().filter(|p| !merged.iter().any(|&(a, b)| a <= *p && *p < b)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        // A point at the left end of an interval extends it.
        let mut s = BorelSet { intervals: merged, points: Vec::new() };
        for p in pts {
            if let Some(iv) = s.intervals.iter_mut().find(|iv| iv.0 == p) {
                iv.0 = p;
            } else {
                s.points.push(p);
            }
        }
        s
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self::new(&[(a, b)], &[])
    }

    /// [0, ∞).
    pub fn non_negative() -> Self {
        Self::interval(0.0, f64::INFINITY)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x < b) || self.points.contains(&x)
    }

    pub fn intersect_interval(&self, lo: f64, hi: f64) -> BorelSet {
        let iv: Vec<(f64, f64)> = self.intervals.iter().map(|&(a, b)| (a.max(lo), b.min(hi))).collect();
        let pts: Vec<f64> = self.points.iter().copied().filter(|p| lo <= *p && *p < hi).collect();
        BorelSet::new(&iv, &pts)
    }

    pub fn inf(&self) -> f64 {
        self.intervals.iter().map(|iv| iv.0).chain(self.points.iter().copied()).fold(f64::INFINITY, f64::min)
    }

    pub fn sup(&self) -> f64 {
        self.intervals.iter().map(|iv| iv.1).chain(self.points.iter().copied()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// ν(self).
    pub fn measure(&self, nu: &Distribution) -> f64 {
        let iv: f64 = self.intervals.iter().map(|&(a, b)| nu.cdf_left(b) - nu.cdf_left(a)).sum();
        let pts: f64 = self.points.iter().map(|&p| nu.atom_mass_at(p)).sum();
        iv + pts
    }
}

impl fmt::Display for BorelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.intervals.iter().map(|(a, b)| format!("[{a}, {b})")).collect();
        parts.extend(self.points.iter().map(|p| format!("{{{p}}}")));
        if parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", parts.join(" ∪ "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn literals() {
        let d = Distribution::parse_lines(&["atom 1 1/4", "unif 2 4 3/4"]).unwrap();
        assert!((d.mean() - (0.25 + 0.75 * 3.0)).abs() < 1e-15);
        assert_eq!(d.to_lines(), vec!["atom 1 1/4", "unif 2 4 3/4"]);
        assert!(Distribution::parse_lines(&["unif 2 1 1"]).is_err());
        assert!(Distribution::parse_lines(&["atom 1 1/2"]).is_err());
        assert!(Distribution::parse_lines(&["atom -1 1"]).is_err());
        assert!(Distribution::parse_lines(&["exp 1 0 1/2", "exp 2 0 1/2"]).is_err());
    }

    #[test]
    fn min_integrals_of_the_uniform_pair() {
        assert!((Distribution::uniform(1.0, 2.0).min_integral(1.5) - 1.375).abs() < 1e-15);
        assert!((Distribution::uniform(1.25, 1.75).min_integral(1.5) - 1.4375).abs() < 1e-15);
        // ∫₀^∞ min(x, t) e^{-x} dx = 1 − e^{−t}.
        let e = Distribution::exponential(1.0);
        assert!((e.min_integral(2.0) - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn quantiles_invert_the_cdf() {
        let d = Distribution::parse_lines(&["atom 0.5 1/4", "unif 1 3 1/2", "atom 3 1/4"]).unwrap();
        assert_eq!(d.quantile(0.0), 0.5);
        assert_eq!(d.quantile(0.25), 0.5);
        assert!((d.quantile(0.5) - 2.0).abs() < 1e-12);
        assert_eq!(d.quantile(0.9), 3.0);
        let e = Distribution::parse_lines(&["atom 0 1/2", "exp 2 1 1/2"]).unwrap();
        let x = e.quantile(0.75);
        assert!((e.cdf(x) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn support_bounds() {
        let d = Distribution::parse_lines(&["unif 1 2 1/2", "exp 1 3 1/2"]).unwrap();
        assert_eq!(d.inf_support(), 1.0);
        assert_eq!(d.sup_support(), f64::INFINITY);
    }

    #[test]
    fn shifted_mixture_of_the_kernel_is_uniform() {
        let nu = Distribution::uniform(1.25, 1.75);
        let mix = nu.shifted_mixture(&[(r(-1, 4), r(1, 2)), (r(1, 4), r(1, 2))]).unwrap();
        assert!(mix.same_law(&Distribution::uniform(1.0, 2.0), 1e-12));
        assert!(!mix.same_law(&nu, 1e-12));
    }

    #[test]
    fn borel_sets() {
        let s = BorelSet::new(&[(0.0, 1.0), (0.5, 2.0), (3.0, 4.0)], &[1.5, 5.0, 3.0]);
        assert_eq!(s.intervals(), &[(0.0, 2.0), (3.0, 4.0)]);
        assert_eq!(s.points(), &[5.0]);
        assert!(s.contains(0.0) && !s.contains(2.0) && s.contains(5.0));
        let nu = Distribution::parse_lines(&["unif 0 4 1/2", "atom 5 1/2"]).unwrap();
        assert!((s.measure(&nu) - (0.5 * 3.0 / 4.0 + 0.5)).abs() < 1e-15);
        assert_eq!(BorelSet::empty().measure(&nu), 0.0);
    }

    proptest! {
        #[test]
        fn quantile_is_generalised_inverse(u in 0.0f64..1.0, lo in 0.0f64..2.0, w in 0.1f64..3.0) {
            let d = Distribution::parse_lines(&[
                format!("atom {lo} 1/3"),
                format!("unif {lo} {} 1/3", lo + w),
                format!("unif {} {} 1/3", lo + w / 2.0, lo + 2.0 * w),
            ]).unwrap();
            let x = d.quantile(u);
            prop_assert!(d.cdf(x) >= u - 1e-12);
            prop_assert!(d.cdf_left(x) <= u + 1e-12);
        }

        #[test]
        fn min_integral_is_concave_and_bounded(t1 in 0.0f64..4.0, t2 in 0.0f64..4.0) {
            let d = Distribution::parse_lines(&["atom 1 1/2", "unif 0.5 3 1/2"]).unwrap();
            let mid = d.min_integral(0.5 * (t1 + t2));
            prop_assert!(mid + 1e-12 >= 0.5 * (d.min_integral(t1) + d.min_integral(t2)));
            prop_assert!(d.min_integral(t1) <= d.mean() + 1e-12);
        }
    }
}
