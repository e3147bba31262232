//! Joint laws of the two weight layers `(w, w̃)`.

use crate::detours::Rational;
use crate::error::FppError;

use super::distribution::{rational_to_f64, Distribution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingKind {
    Independent,
    Quantile,
    Kernel,
}

impl CouplingKind {
    pub fn name(self) -> &'static str {
        match self {
            CouplingKind::Independent => "independent",
            CouplingKind::Quantile => "quantile",
            CouplingKind::Kernel => "kernel",
        }
    }
}

/// A coupling of `w ~ ν` with `w̃ ~ ν̃`.
///
/// Kernel couplings set `w̃ = w + δ_j` with probability `p_j`, independently of `w`.
#[derive(Clone, Debug)]
pub struct Coupling {
    kind: CouplingKind,
    nu: Distribution,
    nu_tilde: Distribution,
    shifts: Vec<(Rational, Rational)>,
    shift_values: Vec<f64>,
    shift_cumulative: Vec<f64>,
    certifies_martingale: bool,
}

const LAW_TOLERANCE: f64 = 1e-12;

impl Coupling {
    pub fn independent(nu_tilde: Distribution, nu: Distribution) -> Self {
        Self::plain(CouplingKind::Independent, nu_tilde, nu)
    }

    /// Both layers are quantile transforms of one shared uniform.
    pub fn quantile(nu_tilde: Distribution, nu: Distribution) -> Self {
        Self::plain(CouplingKind::Quantile, nu_tilde, nu)
    }

    fn plain(kind: CouplingKind, nu_tilde: Distribution, nu: Distribution) -> Self {
        Coupling {
            kind,
            nu,
            nu_tilde,
            shifts: Vec::new(),
            shift_values: Vec::new(),
            shift_cumulative: Vec::new(),
            certifies_martingale: false,
        }
    }

    /// Validates the shift list, the declared marginal and, when `certify` is
    /// set, the drift condition `Σ p_j δ_j ≤ 0` (exact).
    pub fn kernel(
        nu: Distribution,
        shifts: Vec<(Rational, Rational)>,
        nu_tilde: Distribution,
        certify: bool,
    ) -> Result<Self, FppError> {
        let zero = Rational::from_integer(0);
        if shifts.is_empty() {
            return Err(FppError::InvalidCoupling("kernel needs at least one shift".into()));
        }
        if shifts.iter().any(|&(_, p)| p <= zero) {
            return Err(FppError::InvalidCoupling("shift probabilities must be positive".into()));
        }
        let total: Rational = shifts.iter().map(|&(_, p)| p).sum();
        if total != Rational::from_integer(1) {
            return Err(FppError::InvalidCoupling(format!("shift probabilities sum to {total}, not 1")));
        }
        let drift: Rational = shifts.iter().map(|&(d, p)| d * p).sum();
        if certify && drift > zero {
            return Err(FppError::InvalidCoupling(format!("E[w̃ − w | w] = {drift} > 0")));
        }
        let mixture = nu
            .shifted_mixture(&shifts)
            .map_err(|e| FppError::InvalidCoupling(format!("shifted law is not a weight law: {e}")))?;
        if !mixture.same_law(&nu_tilde, LAW_TOLERANCE) {
            return Err(FppError::InvalidCoupling("kernel marginal differs from the declared ν̃".into()));
        }
        let shift_values = shifts.iter().map(|&(d, _)| rational_to_f64(d)).collect();
        let mut acc = 0.0;
        let mut shift_cumulative: Vec<f64> = shifts
            .iter()
            .map(|&(_, p)| {
                acc += rational_to_f64(p);
                acc
            })
            .collect();
        *shift_cumulative.last_mut().unwrap() = f64::INFINITY;
        Ok(Coupling { kind: CouplingKind::Kernel, nu, nu_tilde, shifts, shift_values, shift_cumulative, certifies_martingale: certify })
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    pub fn nu(&self) -> &Distribution {
        &self.nu
    }

    pub fn nu_tilde(&self) -> &Distribution {
        &self.nu_tilde
    }

    pub fn shifts(&self) -> &[(Rational, Rational)] {
        &self.shifts
    }

    pub fn certifies_martingale(&self) -> bool {
        self.certifies_martingale
    }

    /// Whether the second uniform is consumed.
    pub fn uses_second_uniform(&self) -> bool {
        self.kind != CouplingKind::Quantile
    }

    /// `CDF̃ ≥ CDF` at every probe point, which makes the quantile coupling
    /// satisfy `w̃ ≤ w` pointwise.
    pub fn tilde_dominated(&self) -> bool {
        self.nu.probe_points(&self.nu_tilde).iter().all(|&x| {
            self.nu_tilde.cdf(x) + LAW_TOLERANCE >= self.nu.cdf(x)
                && self.nu_tilde.cdf_left(x) + LAW_TOLERANCE >= self.nu.cdf_left(x)
        })
    }

    /// `P(w̃ > w)`, exact for kernel and quantile couplings and computed from
    /// breakpoint probes for the independent one.
    pub fn prob_tilde_exceeds(&self) -> f64 {
        match self.kind {
            CouplingKind::Kernel => {
                let zero = Rational::from_integer(0);
                self.shifts.iter().filter(|&&(d, _)| d > zero).map(|&(_, p)| rational_to_f64(p)).sum()
            }
            CouplingKind::Quantile => {
                if self.nu.probe_points(&self.nu_tilde).iter().any(|&x| self.nu_tilde.cdf(x) + LAW_TOLERANCE < self.nu.cdf(x)) {
                    f64::NAN
                } else {
                    0.0
                }
            }
            CouplingKind::Independent => f64::NAN,
        }
    }

    /// Maps the two uniforms of one edge to `(w, w̃)`.
    #[inline]
    pub fn transform(&self, u0: f64, u1: f64) -> (f64, f64) {
        let w = self.nu.quantile(u0);
        let wt = match self.kind {
            CouplingKind::Quantile => self.nu_tilde.quantile(u0),
            CouplingKind::Independent => self.nu_tilde.quantile(u1),
            CouplingKind::Kernel => {
                let j = self.shift_cumulative.partition_point(|&c| c <= u1);
                (w + self.shift_values[j]).max(0.0)
            }
        };
        (w, wt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn spread() -> Result<Coupling, FppError> {
        Coupling::kernel(
            Distribution::uniform(1.25, 1.75),
            vec![(r(-1, 4), r(1, 2)), (r(1, 4), r(1, 2))],
            Distribution::uniform(1.0, 2.0),
            true,
        )
    }

    #[test]
    fn the_spread_kernel_is_valid() {
        let c = spread().unwrap();
        assert_eq!(c.kind(), CouplingKind::Kernel);
        assert_eq!(c.prob_tilde_exceeds(), 0.5);
        assert_eq!(c.transform(0.5, 0.25), (1.5, 1.25));
        assert_eq!(c.transform(0.5, 0.75), (1.5, 1.75));
    }

    #[test]
    fn kernel_rejects_wrong_marginal_and_positive_drift() {
        let wrong = Coupling::kernel(
            Distribution::uniform(1.25, 1.75),
            vec![(r(-1, 4), r(1, 2)), (r(1, 4), r(1, 2))],
            Distribution::uniform(1.0, 2.5),
            true,
        );
        assert!(wrong.is_err());
        let drift = Coupling::kernel(
            Distribution::uniform(1.0, 2.0),
            vec![(r(1, 2), r(1, 1))],
            Distribution::uniform(1.5, 2.5),
            true,
        );
        assert!(matches!(drift, Err(FppError::InvalidCoupling(_))));
        let uncertified = Coupling::kernel(
            Distribution::uniform(1.0, 2.0),
            vec![(r(1, 2), r(1, 1))],
            Distribution::uniform(1.5, 2.5),
            false,
        );
        assert!(uncertified.is_ok());
        let negative = Coupling::kernel(
            Distribution::uniform(0.0, 1.0),
            vec![(r(-1, 2), r(1, 1))],
            Distribution::uniform(0.0, 0.5),
            true,
        );
        assert!(negative.is_err());
    }

    #[test]
    fn quantile_shift() {
        let c = Coupling::quantile(Distribution::uniform(0.0, 1.0), Distribution::uniform(0.5, 1.5));
        assert!(c.tilde_dominated());
        assert_eq!(c.prob_tilde_exceeds(), 0.0);
        let (w, wt) = c.transform(0.3, 0.9);
        assert!((w - wt - 0.5).abs() < 1e-15);
        let rev = Coupling::quantile(Distribution::uniform(0.5, 1.5), Distribution::uniform(0.0, 1.0));
        assert!(!rev.tilde_dominated());
    }
}
