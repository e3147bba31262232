//! Explicit constants `ε, a, b, g, δ₀, y₀, I₀` for a kernel coupling with
//! upward mass, with numerical checks of the three required properties.

use crate::detours::Rational;
use crate::error::FppError;

use super::coupling::{Coupling, CouplingKind};
use super::distribution::{rational_to_f64, BorelSet, Distribution, Piece};

/// Largest `k` for which the sum inequality is checked.
pub const K_MAX: usize = 5;
/// `ε` is rounded down to a multiple of this.
pub const EPSILON_DENOMINATOR: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct TechnicalConstants {
    pub epsilon: Rational,
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub delta0: f64,
    pub y0: f64,
    pub i0: BorelSet,
    /// Outcome of each property check, in order.
    pub checks: [bool; 3],
}

impl TechnicalConstants {
    pub fn epsilon_f64(&self) -> f64 {
        rational_to_f64(self.epsilon)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|&c| c)
    }
}

/// The support of `nu` as a Borel set.
pub fn support_set(nu: &Distribution) -> BorelSet {
    let mut intervals = Vec::new();
    let mut points = Vec::new();
    for p in nu.pieces() {
        match *p {
            Piece::Atom { value, .. } => points.push(value),
            Piece::Uniform { lo, hi, .. } => intervals.push((lo, hi)),
            Piece::Exponential { shift, .. } => intervals.push((shift, f64::INFINITY)),
        }
    }
    BorelSet::new(&intervals, &points)
}

/// Follows the constructive argument with fixed choices: `a = 0.8·δ_max`,
/// `b = P(shift > a)`, `B = supp ν`, `y₀` the median of `ν`,
/// `ε = min(1, a/(2y₀))`, `δ₀ = (a − εy₀)/(2(2+ε))` and `g` half the remaining
/// slack.
pub fn derive_technical_constants(coupling: &Coupling) -> Result<TechnicalConstants, FppError> {
    match coupling.kind() {
        CouplingKind::Kernel => {}
        CouplingKind::Quantile if coupling.tilde_dominated() => return Err(FppError::NoUpwardMass),
        kind => {
            return Err(FppError::Unsupported(format!("constants need a kernel coupling, got {}", kind.name())));
        }
    }
    let zero = Rational::from_integer(0);
    let delta_max = coupling.shifts().iter().map(|&(d, _)| d).max().unwrap_or(zero);
    if delta_max <= zero {
        return Err(FppError::NoUpwardMass);
    }
    let a = 0.8 * rational_to_f64(delta_max);
    let b: f64 = coupling.shifts().iter().filter(|&&(d, _)| rational_to_f64(d) > a).map(|&(_, p)| rational_to_f64(p)).sum();
    let nu = coupling.nu();
    let big_b = support_set(nu);
    let y0 = nu.quantile(0.5);
    let eps_real = if y0 > 0.0 { (a / (2.0 * y0)).min(1.0) } else { 1.0 };
    let epsilon = Rational::new((eps_real * EPSILON_DENOMINATOR as f64).floor() as i64, EPSILON_DENOMINATOR);
    let eps = rational_to_f64(epsilon);
    if epsilon <= zero {
        return Err(FppError::Unsupported(format!("median {y0} too large for a usable ε")));
    }
    let delta0 = (a - eps * y0) / (2.0 * (2.0 + eps));
    let g = 0.5 * (a - (eps * y0 + (2.0 + eps) * delta0));
    let i0 = big_b.intersect_interval(y0 - delta0, y0 + delta0);

    let first = (0..=30).all(|j| {
        let delta = delta0 / 2f64.powi(j);
        i0.intersect_interval(y0 - delta, y0 + delta).measure(nu) > 0.0
    });
    let second = b > 0.0 && i0.inf() >= 0.0 && coupling.shifts().iter().filter(|&&(d, _)| rational_to_f64(d) > a).map(|&(_, p)| rational_to_f64(p)).sum::<f64>() >= b;
    let third = sum_inequality_holds(&i0, a, g, epsilon);
    Ok(TechnicalConstants { epsilon, a, b, g, delta0, y0, i0, checks: [first, second, third] })
}

/// For `k ≤ K_MAX`, the worst case (all `y_i` at the infimum of `I₀`, all `y′`
/// at its supremum) and a grid of interior choices satisfy
/// `Σ(y_i + a) − Σ y′_i > k·g`.
fn sum_inequality_holds(i0: &BorelSet, a: f64, g: f64, epsilon: Rational) -> bool {
    let (lo, hi) = (i0.inf(), i0.sup());
    if !(lo.is_finite() && hi.is_finite()) {
        return false;
    }
    let grid: Vec<f64> = (0..=8).map(|j| lo + (hi - lo) * j as f64 / 8.0).filter(|&y| y < hi || y == lo).collect();
    (1..=K_MAX).all(|k| {
        let kp = (Rational::from_integer(k as i64) * (Rational::from_integer(1) + epsilon)).floor().to_integer() as usize;
        let bound = k as f64 * g;
        let worst = k as f64 * (lo + a) - kp as f64 * hi;
        worst > bound
            && grid.iter().all(|&y| grid.iter().all(|&yp| k as f64 * (y + a) - kp as f64 * yp > bound))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spread() -> Coupling {
        let r = Rational::new;
        Coupling::kernel(
            Distribution::uniform(1.25, 1.75),
            vec![(r(-1, 4), r(1, 2)), (r(1, 4), r(1, 2))],
            Distribution::uniform(1.0, 2.0),
            true,
        )
        .unwrap()
    }

    #[test]
    fn constants_for_the_spread_kernel() {
        let c = derive_technical_constants(&spread()).unwrap();
        assert!((c.a - 0.2).abs() < 1e-15);
        assert_eq!(c.b, 0.5);
        assert_eq!(c.y0, 1.5);
        assert!(c.epsilon_f64() * c.y0 < c.a);
        assert!(c.epsilon_f64() < 0.2 / 1.5);
        let slack = c.a - (c.epsilon_f64() * c.y0 + 2.0 * c.delta0 + c.epsilon_f64() * c.delta0);
        assert!(c.g > 0.0 && c.g < slack);
        assert!(c.all_checks_pass(), "{:?}", c.checks);
        // k = 1 directly: (y₀ − δ₀ + a) − ⌊1 + ε⌋(y₀ + δ₀) > g.
        assert!((c.y0 - c.delta0 + c.a) - (c.y0 + c.delta0) > c.g);
        assert!(c.i0.contains(c.y0));
    }

    #[test]
    fn domination_has_no_upward_mass() {
        let q = Coupling::quantile(Distribution::uniform(0.0, 1.0), Distribution::uniform(0.5, 1.5));
        assert_eq!(derive_technical_constants(&q), Err(FppError::NoUpwardMass));
        let i = Coupling::independent(Distribution::uniform(0.0, 1.0), Distribution::uniform(0.5, 1.5));
        assert!(matches!(derive_technical_constants(&i), Err(FppError::Unsupported(_))));
    }

    #[test]
    fn downward_only_kernel_fails() {
        let r = Rational::new;
        let k = Coupling::kernel(
            Distribution::uniform(1.0, 2.0),
            vec![(r(-1, 2), r(1, 1))],
            Distribution::uniform(0.5, 1.5),
            true,
        )
        .unwrap();
        assert_eq!(derive_technical_constants(&k), Err(FppError::NoUpwardMass));
    }
}
