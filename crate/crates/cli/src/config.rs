//! Experiment configuration files (TOML).
//!
//! Unknown keys are rejected everywhere. The seed is mandatory; it may come
//! from the file or from `--seed`, the latter taking precedence.

use std::fmt;

use fpplab_core::fpp::{parse_rational, BorelSet, Coupling, Distribution};
use fpplab_core::Rational;
use serde::{Deserialize, Serialize};

/// Bumped whenever the meaning of a config key changes.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub(crate) fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    /// Truncation radius `L = ⌈κ·d⌉` when the graph has no fixed radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<usize>>,
    /// Explicit vertex pairs; used instead of `distances` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[usize; 2]>>,
    /// How pairs are chosen from `distances`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_rule: Option<PairRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contamination_threshold: Option<f64>,
    /// Analytic value to compare estimates against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub graph: GraphSpec,
    /// Single weight law, one piece per line (`atom v m`, `unif lo hi m`, `exp rate shift m`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detours: Option<DetourSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible: Option<FeasibleSpec>,
    /// Weight set for the empirical edge measure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub percolation: Option<PercolationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cheap: Option<CheapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub override_variability: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Lattice {
        dimension: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<usize>,
    },
    Sector {
        theta: f64,
        theta_prime: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<usize>,
    },
    HalfSpace {
        dimension: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<usize>,
    },
    Tree {
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<usize>,
    },
    Cayley {
        group: GroupSpec,
        generators: Vec<GeneratorEntry>,
        #[serde(default)]
        mode: ModeSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<usize>,
    },
    Doubled {
        inner: Box<GraphSpec>,
    },
}

impl GraphSpec {
    pub fn fixed_radius(&self) -> Option<usize> {
        match self {
            GraphSpec::Lattice { radius, .. }
            | GraphSpec::Sector { radius, .. }
            | GraphSpec::HalfSpace { radius, .. }
            | GraphSpec::Tree { radius, .. }
            | GraphSpec::Cayley { radius, .. } => *radius,
            GraphSpec::Doubled { inner } => inner.fixed_radius(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GraphSpec::Lattice { dimension, .. } => format!("Z^{dimension}"),
            GraphSpec::Sector { theta, theta_prime, .. } => format!("sector[{theta},{theta_prime}]"),
            GraphSpec::HalfSpace { dimension, .. } => format!("half-space Z^{dimension}"),
            GraphSpec::Tree { degree, .. } => format!("{degree}-regular tree"),
            GraphSpec::Cayley { group, generators, .. } => {
                let names: Vec<&str> = generators.iter().map(|g| g.name.as_str()).collect();
                format!("Cayley({}, {{{}}})", group.label(), names.join(","))
            }
            GraphSpec::Doubled { inner } => format!("doubled {}", inner.label()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Integers { dimension: usize },
    Free { rank: usize },
    Dihedral,
    Heisenberg,
    /// Cyclic group of the given order extended by ℤᵈ; `actions[k]` is the
    /// permutation by which the k-th unit vector acts. Empty actions give the
    /// direct product.
    Semidirect {
        order: usize,
        dimension: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        actions: Vec<Vec<usize>>,
    },
}

impl GroupSpec {
    fn label(&self) -> String {
        match self {
            GroupSpec::Integers { dimension } => format!("Z^{dimension}"),
            GroupSpec::Free { rank } => format!("F_{rank}"),
            GroupSpec::Dihedral => "D_inf".into(),
            GroupSpec::Heisenberg => "H_3".into(),
            GroupSpec::Semidirect { order, dimension, .. } => format!("Z/{order} x| Z^{dimension}"),
        }
    }
}

/// Generator name plus its image as integers: a vector for ℤᵈ, a signed
/// letter word for free groups, `[n, flip]` for the dihedral group,
/// `[a, b, c]` for Heisenberg and `[f, v…]` for semidirect products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub name: String,
    pub image: Vec<i64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Reduced,
    Unreduced,
}

/// `first`: smallest ids. `most_geodesics`: the candidate pair joined by the
/// most hop-geodesics, smallest ids on ties.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRule {
    #[default]
    First,
    MostGeodesics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub kind: CouplingKindSpec,
    pub nu: Vec<String>,
    pub nu_tilde: Vec<String>,
    /// `[shift, probability]` as rationals, for kernel couplings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shifts: Vec<[String; 2]>,
    #[serde(default = "yes")]
    pub certify: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKindSpec {
    Independent,
    Quantile,
    Kernel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetourSpec {
    pub epsilon: Vec<String>,
    pub c: Vec<usize>,
    /// Base vertices; the basepoint when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibleSpec {
    /// Rational ε, or `"constants"` to take it from the derived constants.
    pub epsilon: String,
    pub c: usize,
    /// Region radius offset: regions are `B(v, R + ⌈C(2+ε)⌉)`.
    #[serde(default)]
    pub r: usize,
    pub i0: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

/// A weight set: `"support"`, `"constants"` (the derived I₀), or explicit
/// half-open intervals and points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Named(String),
    Explicit(ExplicitSet),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSet {
    #[serde(default)]
    pub intervals: Vec<[f64; 2]>,
    #[serde(default)]
    pub points: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercolationSpec {
    pub p: f64,
    pub radii: Vec<usize>,
    /// Voronoi scales for the tiling diagnostics; none when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub voronoi_radii: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheapSpec {
    pub q: f64,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    /// Canonical TOML rendering, echoed into every report.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn seed(&self) -> Result<u64, ConfigError> {
        self.seed.map_or_else(|| bad("a seed is required (config `seed` or --seed)"), Ok)
    }

    pub fn replicates(&self) -> Result<usize, ConfigError> {
        match self.replicates {
            Some(0) => bad("replicates must be positive"),
            Some(n) => Ok(n),
            None => bad("`replicates` is required for this experiment"),
        }
    }

    pub fn kappa(&self) -> Result<f64, ConfigError> {
        let k = self.kappa.unwrap_or(DEFAULT_KAPPA);
        if !(k.is_finite() && k > 0.0) {
            return bad("kappa must be positive");
        }
        Ok(k)
    }

    pub fn distances(&self) -> Vec<usize> {
        self.distances.clone().unwrap_or_else(|| DEFAULT_DISTANCES.to_vec())
    }

    pub fn nu(&self) -> Result<Distribution, ConfigError> {
        match (&self.nu, &self.coupling) {
            (Some(lines), _) => parse_distribution(lines, "nu"),
            (None, Some(c)) => parse_distribution(&c.nu, "coupling.nu"),
            (None, None) => bad("a weight law `nu` (or a coupling) is required"),
        }
    }

    pub fn coupling(&self) -> Result<Coupling, ConfigError> {
        let spec = self.coupling.as_ref().map_or_else(|| bad("a `[coupling]` table is required"), Ok)?;
        spec.build()
    }
}

/// Default distance schedule.
pub const DEFAULT_DISTANCES: [usize; 3] = [10, 20, 30];
/// Default truncation factor.
pub const DEFAULT_KAPPA: f64 = 3.0;

pub fn parse_distribution(lines: &[String], what: &str) -> Result<Distribution, ConfigError> {
    Distribution::parse_lines(lines).map_err(|e| ConfigError(format!("{what}: {e}")))
}

pub fn parse_epsilon(text: &str) -> Result<Rational, ConfigError> {
    let r = parse_rational(text).map_err(|e| ConfigError(format!("ε: {e}")))?;
    if r < Rational::from_integer(0) {
        return bad("ε must be non-negative");
    }
    Ok(r)
}

impl CouplingSpec {
    pub fn build(&self) -> Result<Coupling, ConfigError> {
        let nu = parse_distribution(&self.nu, "coupling.nu")?;
        let nu_tilde = parse_distribution(&self.nu_tilde, "coupling.nu_tilde")?;
        match self.kind {
            CouplingKindSpec::Independent | CouplingKindSpec::Quantile if !self.shifts.is_empty() => {
                bad("shifts only apply to kernel couplings")
            }
            CouplingKindSpec::Independent => Ok(Coupling::independent(nu_tilde, nu)),
            CouplingKindSpec::Quantile => Ok(Coupling::quantile(nu_tilde, nu)),
            CouplingKindSpec::Kernel => {
                let shifts = self
                    .shifts
                    .iter()
                    .map(|[d, p]| {
                        let d = parse_rational(d).map_err(|e| ConfigError(format!("shift: {e}")))?;
                        let p = parse_rational(p).map_err(|e| ConfigError(format!("shift probability: {e}")))?;
                        Ok((d, p))
                    })
                    .collect::<Result<Vec<_>, ConfigError>>()?;
                Coupling::kernel(nu, shifts, nu_tilde, self.certify).map_err(|e| ConfigError(e.to_string()))
            }
        }
    }
}

impl SetSpec {
    /// Resolves a set against the support of `nu` and, when derived, `i0`.
    pub fn resolve(&self, nu: &Distribution, derived: Option<&BorelSet>) -> Result<BorelSet, ConfigError> {
        match self {
            SetSpec::Named(name) if name == "support" => Ok(fpplab_core::fpp::constants::support_set(nu)),
            SetSpec::Named(name) if name == "all" => Ok(BorelSet::non_negative()),
            SetSpec::Named(name) if name == "constants" => {
                derived.cloned().map_or_else(|| bad("`constants` needs a kernel coupling"), Ok)
            }
            SetSpec::Named(name) => bad(format!("unknown set `{name}` (support, all, constants or explicit)")),
            SetSpec::Explicit(e) => {
                if e.intervals.iter().any(|[a, b]| a.is_nan() || b.is_nan() || a > b) {
                    return bad("set intervals need lo ≤ hi");
                }
                let iv: Vec<(f64, f64)> = e.intervals.iter().map(|&[a, b]| (a, b)).collect();
                Ok(BorelSet::new(&iv, &e.points))
            }
        }
    }
}
