//! Weights seen along a geodesic, and resamplable mass.

use super::distribution::{BorelSet, Distribution};
use super::geodesic::GeodesicResult;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeMeasure {
    pub count: usize,
    /// `count / distance`.
    pub fraction: f64,
}

/// `#{e ∈ π : w(e) ∈ A}` and that count over the graph distance of the pair.
pub fn empirical_edge_measure(geo: &GeodesicResult, w: &[f64], set: &BorelSet, distance: usize) -> EdgeMeasure {
    let count = geo.path.edges().iter().filter(|&&e| set.contains(w[e])).count();
    let fraction = if distance == 0 { 0.0 } else { count as f64 / distance as f64 };
    EdgeMeasure { count, fraction }
}

/// Subintervals per piece of the resamplability profile.
const PROFILE_SUBDIVISIONS: usize = 64;

/// `ν({p : ν([p, p + δ)) ≥ η})`.
///
/// The profile `h(p) = ν([p, p + δ))` is piecewise linear between the points
/// `b` and `b − δ` (`b` a breakpoint of ν) when ν has no exponential piece,
/// and smooth there otherwise; level crossings inside each piece are located
/// by bisection and the jump points are evaluated exactly.
pub fn resamplable_mass(nu: &Distribution, delta: f64, eta: f64) -> f64 {
    assert!(delta > 0.0 && eta >= 0.0);
    let h = |p: f64| nu.cdf_left(p + delta) - nu.cdf_left(p);
    let lo = nu.inf_support();
    let hi = match nu.sup_support() {
        x if x.is_finite() => x,
        _ => nu.quantile(1.0 - 1e-15),
    };
    let mut critical: Vec<f64> = nu
        .breakpoints()
        .into_iter()
        .flat_map(|b| [b, b - delta])
        .chain([lo, hi])
        .filter(|&c| lo <= c && c <= hi)
        .collect();
    critical.sort_by(f64::total_cmp);
    critical.dedup();

    let mut mass: f64 = critical.iter().filter(|&&c| h(c) >= eta).map(|&c| nu.atom_mass_at(c)).sum();
    for pair in critical.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let nudge = (b - a) * 1e-12;
        let grid: Vec<f64> = (0..=PROFILE_SUBDIVISIONS)
            .map(|j| match j {
                0 => a + nudge,
                j if j == PROFILE_SUBDIVISIONS => b - nudge,
                j => a + (b - a) * j as f64 / PROFILE_SUBDIVISIONS as f64,
            })
            .collect();
        for (j, step) in grid.windows(2).enumerate() {
            let (s, t) = (step[0], step[1]);
            let left = if j == 0 { a } else { s };
            let right = if j + 1 == PROFILE_SUBDIVISIONS { b } else { t };
            let (hs, ht) = (h(s) >= eta, h(t) >= eta);
            let (from, to) = match (hs, ht) {
                (true, true) => (left, right),
                (false, false) => continue,
                (true, false) => (left, crossing(&h, eta, s, t, true)),
                (false, true) => (crossing(&h, eta, s, t, false), right),
            };
            mass += continuous_mass(nu, from, to);
        }
    }
    mass.min(1.0)
}

/// ν-mass of the open interval `(a, b)`.
fn continuous_mass(nu: &Distribution, a: f64, b: f64) -> f64 {
    if b <= a {
        0.0
    } else {
        (nu.cdf_left(b) - nu.cdf(a)).max(0.0)
    }
}

/// Point in `[s, t]` where `h ≥ η` switches, by bisection.
fn crossing(h: &impl Fn(f64) -> f64, eta: f64, mut s: f64, mut t: f64, holds_left: bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (s + t);
        if mid <= s || mid >= t {
            break;
        }
        if (h(mid) >= eta) == holds_left {
            s = mid;
        } else {
            t = mid;
        }
    }
    0.5 * (s + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, Path};

    #[test]
    fn uniform_resamplable_mass() {
        let m = resamplable_mass(&Distribution::uniform(0.0, 1.0), 0.1, 0.05);
        assert!((m - 0.95).abs() < 1e-9, "{m}");
    }

    #[test]
    fn dirac_qualifies() {
        assert_eq!(resamplable_mass(&Distribution::dirac(1.0), 0.3, 1.0), 1.0);
        assert_eq!(resamplable_mass(&Distribution::dirac(1.0), 0.3, 0.0), 1.0);
    }

    #[test]
    fn mass_tends_to_one_as_eta_shrinks() {
        let nu = Distribution::parse_lines(&["atom 0.5 1/4", "unif 1 2 1/2", "exp 1 3 1/4"]).unwrap();
        let masses: Vec<f64> = [0.2, 0.05, 1e-3, 1e-6].iter().map(|&eta| resamplable_mass(&nu, 0.1, eta)).collect();
        assert!(masses.windows(2).all(|m| m[0] <= m[1] + 1e-12));
        assert!(masses[3] > 1.0 - 1e-4, "{masses:?}");
    }

    #[test]
    fn counts_edges_in_the_set() {
        let mut b = GraphBuilder::new(4);
        for v in 0..3 {
            b.add_edge(v, v + 1).unwrap();
        }
        let g = b.build();
        let geo = GeodesicResult {
            path: Path::new(&g, 0, vec![0, 1, 2]).unwrap(),
            time: 1.5,
            touched_frontier: false,
            tie_broken: false,
        };
        let w = [0.1, 0.7, 0.3];
        let m = empirical_edge_measure(&geo, &w, &BorelSet::interval(0.0, 0.5), 3);
        assert_eq!(m.count, 2);
        assert!((m.fraction - 2.0 / 3.0).abs() < 1e-15);
        let all = empirical_edge_measure(&geo, &w, &BorelSet::non_negative(), 3);
        assert_eq!(all.fraction, 1.0);
        assert_eq!(empirical_edge_measure(&geo, &w, &BorelSet::interval(5.0, 6.0), 3).count, 0);
    }
}
