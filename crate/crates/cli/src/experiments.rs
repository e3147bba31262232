//! The named experiments. Each returns a [`Report`] that depends only on the
//! config and seed: replicates run in parallel and are merged in replicate order.

use std::collections::BTreeMap;
use std::sync::Arc;

use fpplab_core::detours::{certificate_margin, certify_admits_detours, CertificateOutcome, Inconclusive, DEFAULT_BUDGET};
use fpplab_core::fpp::{
    ball_edge_region, derive_technical_constants, disjointify, empirical_edge_measure, is_more_variable,
    sample_single_into, sample_weights_into, scan_feasible_pairs, Dijkstra, EdgeSet, FeasibleParams, WeightConfig,
};
use fpplab_core::graph::{frontier_distances, geodesic_count, graph_distance, Path};
use fpplab_core::stats::{mean_and_se, weighted_line_fit, LineFit, MeanEstimate, Z95};
use fpplab_core::tiling::{
    bottleneck_radius, estimate_cheap_passage_prob, estimate_connection_decay, r_separated_net, tile_graph_degrees,
    voronoi_tiles, DecayRow, DEFAULT_SIGMA,
};
use fpplab_core::{Rational, VertexId};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{bad, parse_epsilon, ConfigError, ExperimentConfig};
use crate::graphs::{build_graph, radius_for, select_pair, BuiltGraph, BASEPOINT};
use crate::report::{Report, Row, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    Build,
    CertifyDetours,
    FppGap,
    TimeConstant,
    FeasiblePairs,
    EmpiricalMeasure,
    Bottleneck,
    PercolationScan,
    CheapPassage,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Build,
        Experiment::CertifyDetours,
        Experiment::FppGap,
        Experiment::TimeConstant,
        Experiment::FeasiblePairs,
        Experiment::EmpiricalMeasure,
        Experiment::Bottleneck,
        Experiment::PercolationScan,
        Experiment::CheapPassage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Build => "build",
            Experiment::CertifyDetours => "certify-detours",
            Experiment::FppGap => "fpp-gap",
            Experiment::TimeConstant => "time-constant",
            Experiment::FeasiblePairs => "feasible-pairs",
            Experiment::EmpiricalMeasure => "empirical-measure",
            Experiment::Bottleneck => "bottleneck",
            Experiment::PercolationScan => "percolation-scan",
            Experiment::CheapPassage => "cheap-passage",
        }
    }

    pub fn from_name(name: &str) -> Option<Experiment> {
        Experiment::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// Default share of frontier-touching replicates above which a report is flagged.
pub const DEFAULT_CONTAMINATION_THRESHOLD: f64 = 0.01;

pub fn run_experiment(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    if let Some(tag) = &cfg.experiment {
        if tag != experiment.name() {
            return bad(format!("config is for `{tag}`, not `{}`", experiment.name()));
        }
    }
    cfg.seed()?;
    match experiment {
        Experiment::Build => run_build(cfg),
        Experiment::CertifyDetours => run_certification(cfg),
        Experiment::FppGap => run_gap_experiment(cfg),
        Experiment::TimeConstant => run_time_constant(cfg),
        Experiment::FeasiblePairs => run_feasible_pair_census(cfg),
        Experiment::EmpiricalMeasure => run_empirical_measure(cfg),
        Experiment::Bottleneck => run_bottleneck_scan(cfg),
        Experiment::PercolationScan => run_percolation_scan(cfg),
        Experiment::CheapPassage => run_cheap_passage(cfg),
    }
}

fn new_report(experiment: Experiment, cfg: &ExperimentConfig) -> Report {
    Report::new(experiment.name(), cfg.to_toml())
}

/// One endpoint pair on one truncation.
struct Job {
    d: usize,
    built: Arc<BuiltGraph>,
    x: VertexId,
    y: VertexId,
}

impl Job {
    fn describe(&self) -> Value {
        json!({
            "d": self.d,
            "x": self.x,
            "y": self.y,
            "radius": self.built.radius,
            "vertices": self.built.graph.vertex_count(),
            "edges": self.built.graph.edge_count(),
        })
    }
}

fn jobs(cfg: &ExperimentConfig) -> Result<Vec<Job>, ConfigError> {
    let mut cache: BTreeMap<usize, Arc<BuiltGraph>> = BTreeMap::new();
    let mut get = |radius: usize| -> Result<Arc<BuiltGraph>, ConfigError> {
        if let Some(b) = cache.get(&radius) {
            return Ok(b.clone());
        }
        let b = Arc::new(build_graph(&cfg.graph, radius)?);
        cache.insert(radius, b.clone());
        Ok(b)
    };
    if let Some(pairs) = &cfg.pairs {
        let radius = cfg.graph.fixed_radius().map_or_else(|| bad("explicit pairs need a fixed graph radius"), Ok)?;
        let built = get(radius)?;
        return pairs
            .iter()
            .map(|&[x, y]| {
                let d = graph_distance(&built.graph, x, y)
                    .map_err(|e| ConfigError(format!("pair ({x}, {y}): {e}")))?
                    .ok_or_else(|| ConfigError(format!("pair ({x}, {y}) is disconnected")))?;
                Ok(Job { d, built: built.clone(), x, y })
            })
            .collect();
    }
    let kappa = cfg.kappa()?;
    cfg.distances()
        .into_iter()
        .map(|d| {
            if d == 0 {
                return bad("distances must be positive");
            }
            let built = get(radius_for(&cfg.graph, kappa, d))?;
            let (x, y) = select_pair(&built.graph, d, cfg.pair_rule.unwrap_or_default()).ok_or_else(|| {
                ConfigError(format!("no pair at distance {d} in the radius-{} truncation; raise kappa", built.radius))
            })?;
            Ok(Job { d, built, x, y })
        })
        .collect()
}

/// Runs `f` for replicates `0..n` in parallel and returns results in replicate order.
fn per_replicate<S, T, I, F>(n: usize, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> T + Sync + Send,
{
    (0..n as u64).into_par_iter().map_init(init, f).collect()
}

fn contamination_check(report: &mut Report, cfg: &ExperimentConfig, d: usize, rate: f64) {
    let threshold = cfg.contamination_threshold.unwrap_or(DEFAULT_CONTAMINATION_THRESHOLD);
    if rate > threshold {
        report.flags.push(format!("contamination {rate} exceeds {threshold} at d = {d}"));
    }
}

fn fraction(flags: &[bool]) -> f64 {
    flags.iter().filter(|&&b| b).count() as f64 / flags.len().max(1) as f64
}

fn estimate_row(d: usize, e: &MeanEstimate, contamination: f64) -> Row {
    Row { d, estimate: e.mean, se: e.se, n: e.n, contamination }
}

fn fit_value(fit: Option<LineFit>) -> Value {
    match fit {
        Some(f) => {
            let (lo, hi) = f.slope_interval(Z95);
            json!({ "slope": f.slope, "intercept": f.intercept, "slope_se": f.slope_se, "slope_ci95": [lo, hi] })
        }
        None => Value::Null,
    }
}

pub fn run_build(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let radius = cfg
        .graph
        .fixed_radius()
        .or_else(|| cfg.distances.as_ref().and_then(|d| d.first().copied()))
        .map_or_else(|| bad("`build` needs graph.radius"), Ok)?;
    let built = build_graph(&cfg.graph, radius)?;
    let g = &built.graph;
    let mut report = new_report(Experiment::Build, cfg);
    report.note(format!("graph: {}", cfg.graph.label()));
    report.note(format!(
        "radius {radius}: {} vertices, {} edges, {} frontier vertices, max degree {}",
        g.vertex_count(),
        g.edge_count(),
        g.frontier().len(),
        g.max_degree()
    ));
    report.record = json!({
        "graph": cfg.graph.label(),
        "radius": radius,
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "frontier": g.frontier().len(),
        "max_degree": g.max_degree(),
        "connected": g.is_connected(),
    });
    report.files.push(("graph.txt".into(), g.to_text()));
    if let Some(table) = &built.elements {
        report.files.push(("elements.txt".into(), table.clone()));
    }
    Ok(report)
}

pub fn run_time_constant(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let nu = cfg.nu()?;
    let (seed, n) = (cfg.seed()?, cfg.replicates()?);
    let mut report = new_report(Experiment::TimeConstant, cfg);
    let mut records = Vec::new();
    for job in jobs(cfg)? {
        let g = &job.built.graph;
        let samples = per_replicate(
            n,
            || (Vec::new(), Dijkstra::new()),
            |(w, dij), rep| {
                sample_single_into(g.edge_count(), &nu, seed, rep, w);
                let geo = dij.geodesic_bidirectional(g, w, job.x, job.y).expect("pairs are connected");
                (geo.time / job.d as f64, geo.touched_frontier)
            },
        );
        let ratios: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let touched: Vec<bool> = samples.iter().map(|s| s.1).collect();
        let est = mean_and_se(&ratios);
        let contamination = fraction(&touched);
        contamination_check(&mut report, cfg, job.d, contamination);
        report.rows.push(estimate_row(job.d, &est, contamination));
        let mut rec = job.describe();
        rec["mean"] = json!(est.mean);
        rec["se"] = json!(est.se);
        if let Some(t) = cfg.target {
            let z = est.z_score(t);
            rec["z_vs_target"] = json!(z);
            report.note(format!("d = {}: E T/d = {:.6} ± {:.6}, target {t}, z = {z:.3}", job.d, est.mean, est.se));
        } else {
            report.note(format!("d = {}: E T/d = {:.6} ± {:.6}", job.d, est.mean, est.se));
        }
        records.push(rec);
    }
    report.record = json!({ "law": nu.to_lines(), "target": cfg.target, "pairs": records });
    Ok(report)
}

pub fn run_gap_experiment(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let coupling = cfg.coupling()?;
    let (seed, n) = (cfg.seed()?, cfg.replicates()?);
    let grid = cfg.t_grid.clone().unwrap_or_default();
    let check = is_more_variable(coupling.nu_tilde(), coupling.nu(), &grid).map_err(|e| ConfigError(e.to_string()))?;
    if !check.holds && !cfg.override_variability {
        return bad(format!(
            "ν̃ is not more variable than ν (witness t = {:?}); set override_variability to run anyway",
            check.witness
        ));
    }
    let mut report = new_report(Experiment::FppGap, cfg);
    report.note(format!(
        "coupling {}: E w̃ = {}, E w = {}, more variable: {} ({} points)",
        coupling.kind().name(),
        check.mean_tilde,
        check.mean,
        check.holds,
        check.points_checked
    ));
    let mut records = Vec::new();
    for job in jobs(cfg)? {
        let g = &job.built.graph;
        let d = job.d as f64;
        let samples = per_replicate(
            n,
            || (WeightConfig::default(), Dijkstra::new()),
            |(wc, dij), rep| {
                sample_weights_into(g.edge_count(), &coupling, seed, rep, wc);
                let a = dij.geodesic_bidirectional(g, &wc.w, job.x, job.y).expect("pairs are connected");
                let b = dij.geodesic_bidirectional(g, &wc.w_tilde, job.x, job.y).expect("pairs are connected");
                ((a.time - b.time) / d, a.time / d, b.time / d, a.touched_frontier || b.touched_frontier)
            },
        );
        let gap = mean_and_se(&samples.iter().map(|s| s.0).collect::<Vec<_>>());
        let t = mean_and_se(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
        let tt = mean_and_se(&samples.iter().map(|s| s.2).collect::<Vec<_>>());
        let contamination = fraction(&samples.iter().map(|s| s.3).collect::<Vec<_>>());
        contamination_check(&mut report, cfg, job.d, contamination);
        report.rows.push(estimate_row(job.d, &gap, contamination));
        report.note(format!(
            "d = {}: gap (E T − E T̃)/d = {:.6} ± {:.6} (z = {:.2}); E T/d = {:.6}, E T̃/d = {:.6}",
            job.d,
            gap.mean,
            gap.se,
            gap.z_score(0.0),
            t.mean,
            tt.mean
        ));
        let mut rec = job.describe();
        rec["gap"] = json!(gap.mean);
        rec["se"] = json!(gap.se);
        rec["z"] = json!(gap.z_score(0.0));
        rec["t_over_d"] = json!(t.mean);
        rec["t_tilde_over_d"] = json!(tt.mean);
        records.push(rec);
    }
    let xs: Vec<f64> = report.rows.iter().map(|r| r.d as f64).collect();
    let ys: Vec<f64> = report.rows.iter().map(|r| r.estimate).collect();
    let ss: Vec<f64> = report.rows.iter().map(|r| r.se.max(1e-12)).collect();
    let fit = if xs.len() >= 2 { weighted_line_fit(&xs, &ys, &ss) } else { None };
    let non_decreasing = ys.windows(2).all(|w| w[1] >= w[0]);
    if let Some(f) = fit {
        report.note(format!("trend: slope {:.3e} ± {:.3e} per unit d; non-decreasing: {non_decreasing}", f.slope, f.slope_se));
    }
    report.record = json!({
        "coupling": coupling.kind().name(),
        "more_variable": check.holds,
        "mean_tilde": check.mean_tilde,
        "mean": check.mean,
        "pairs": records,
        "trend": fit_value(fit),
        "non_decreasing": non_decreasing,
    });
    Ok(report)
}

pub fn run_certification(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let spec = cfg.detours.as_ref().map_or_else(|| bad("a `[detours]` table is required"), Ok)?;
    let budget = spec.budget.unwrap_or(DEFAULT_BUDGET);
    let mut report = new_report(Experiment::CertifyDetours, cfg);
    let mut cache: BTreeMap<usize, BuiltGraph> = BTreeMap::new();
    let mut records = Vec::new();
    for eps_text in &spec.epsilon {
        let eps = parse_epsilon(eps_text)?;
        for &c in &spec.c {
            if c == 0 {
                return bad("C must be positive");
            }
            let radius = cfg.graph.fixed_radius().unwrap_or_else(|| certificate_margin(eps, c));
            if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(radius) {
                e.insert(build_graph(&cfg.graph, radius)?);
            }
            let g = &cache[&radius].graph;
            let bases = spec.bases.clone().unwrap_or_else(|| vec![BASEPOINT]);
            let cert = certify_admits_detours(g, eps, c, &bases, budget).map_err(|e| ConfigError(e.to_string()))?;
            let (estimate, status, detail) = match &cert.outcome {
                CertificateOutcome::Certified { witnesses } => (
                    1.0,
                    Status::Ok,
                    json!({ "witnesses": witnesses.iter().map(|(p, q)| json!({ "geodesic": edges(p), "detour": edges(q) })).collect::<Vec<_>>() }),
                ),
                CertificateOutcome::Refuted { counterexample } => {
                    (0.0, Status::Ok, json!({ "counterexample": edges(counterexample), "start": counterexample.start() }))
                }
                CertificateOutcome::Inconclusive(Inconclusive::Margin { base, distance, required }) => (
                    f64::NAN,
                    Status::Inconclusive,
                    json!({ "reason": "margin", "base": base, "distance": distance, "required": required }),
                ),
                CertificateOutcome::Inconclusive(Inconclusive::Budget { geodesic, expansions }) => (
                    f64::NAN,
                    Status::BudgetExceeded,
                    json!({ "reason": "budget", "geodesic": edges(geodesic), "expansions": expansions }),
                ),
            };
            report.status = report.status.worst(status);
            report.rows.push(Row {
                d: c,
                estimate,
                se: 0.0,
                n: cert.unique_geodesics,
                contamination: if cert.conservative_margin_met { 0.0 } else { 1.0 },
            });
            let mut line = format!(
                "ε = {eps}, C = {c}: {} ({} unique geodesics, {} non-unique targets, radius {radius}, margin {})",
                cert.label(),
                cert.unique_geodesics,
                cert.non_unique_targets,
                cert.required_margin
            );
            if let CertificateOutcome::Refuted { counterexample } = &cert.outcome {
                line.push_str(&format!("; counterexample from {} along edges {:?}", counterexample.start(), counterexample.edges()));
            }
            report.note(line);
            records.push(json!({
                "epsilon": eps.to_string(),
                "c": c,
                "radius": radius,
                "bases": cert.bases,
                "verdict": cert.label(),
                "required_margin": cert.required_margin,
                "conservative_margin_met": cert.conservative_margin_met,
                "unique_geodesics": cert.unique_geodesics,
                "non_unique_targets": cert.non_unique_targets,
                "expansions": cert.expansions,
                "detail": detail,
            }));
        }
    }
    report.record = json!({ "graph": cfg.graph.label(), "certificates": records });
    Ok(report)
}

fn edges(p: &Path) -> Vec<usize> {
    p.edges().to_vec()
}

pub fn run_bottleneck_scan(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let mut report = new_report(Experiment::Bottleneck, cfg);
    let mut records = Vec::new();
    for job in jobs(cfg)? {
        let g = &job.built.graph;
        let to_frontier = frontier_distances(g);
        let geodesic = geodesic_count(g, job.x, job.y).map_err(|e| ConfigError(e.to_string()))?.witness;
        let deltas: Vec<usize> = geodesic
            .vertices()
            .par_iter()
            .map(|&z| bottleneck_radius(g, job.x, job.y, z).expect("pairs are connected"))
            .collect();
        let boundary: Vec<bool> =
            geodesic.vertices().iter().zip(&deltas).map(|(&z, &dz)| to_frontier[z].is_some_and(|f| f <= dz)).collect();
        let max = deltas.iter().copied().max().unwrap_or(0);
        let contamination = fraction(&boundary);
        report.rows.push(Row { d: job.d, estimate: max as f64, se: 0.0, n: deltas.len(), contamination });
        report.note(format!("d = {} (radius {}): max Δ = {max} over {} geodesic points", job.d, job.built.radius, deltas.len()));
        let mut rec = job.describe();
        rec["deltas"] = json!(deltas);
        rec["max_delta"] = json!(max);
        records.push(rec);
    }
    report.record = json!({ "graph": cfg.graph.label(), "pairs": records });
    Ok(report)
}

pub fn run_feasible_pair_census(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let spec = cfg.feasible.as_ref().map_or_else(|| bad("a `[feasible]` table is required"), Ok)?;
    let nu = cfg.nu()?;
    let (seed, n) = (cfg.seed()?, cfg.replicates()?);
    let constants = match cfg.coupling.as_ref() {
        Some(_) => derive_technical_constants(&cfg.coupling()?).ok(),
        None => None,
    };
    let epsilon: Rational = if spec.epsilon == "constants" {
        constants.as_ref().map(|c| c.epsilon).map_or_else(|| bad("ε = constants needs a kernel coupling"), Ok)?
    } else {
        parse_epsilon(&spec.epsilon)?
    };
    let i0 = spec.i0.resolve(&nu, constants.as_ref().map(|c| &c.i0))?;
    if spec.c == 0 {
        return bad("C must be positive");
    }
    let reach = (Rational::from_integer(spec.c as i64) * (Rational::from_integer(2) + epsilon)).ceil().to_integer() as usize;
    let region_radius = spec.r + reach;
    let params = FeasibleParams { epsilon, c: spec.c, i0: &i0, budget: spec.budget.unwrap_or(DEFAULT_BUDGET) };
    let mut report = new_report(Experiment::FeasiblePairs, cfg);
    report.note(format!("ε = {epsilon}, C = {}, I₀ = {i0}, regions B(v, {region_radius})", spec.c));
    let mut records = Vec::new();
    let mut budget_hit = false;
    for job in jobs(cfg)? {
        let g = &job.built.graph;
        let to_frontier = frontier_distances(g);
        let samples = per_replicate(
            n,
            || (Vec::new(), Dijkstra::new()),
            |(w, dij), rep| {
                sample_single_into(g.edge_count(), &nu, seed, rep, w);
                let geo = dij.geodesic_bidirectional(g, w, job.x, job.y).expect("pairs are connected");
                let regions: Vec<EdgeSet> = geo.path.vertices().iter().map(|&v| ball_edge_region(g, v, region_radius)).collect();
                let scans = scan_feasible_pairs(g, w, &geo, &regions, &params).expect("regions lie in the graph");
                let found: Vec<EdgeSet> =
                    scans.iter().zip(&regions).filter(|(s, _)| s.found.is_some()).map(|(_, r)| r.clone()).collect();
                let colours = disjointify(&found);
                let mut class_sizes = BTreeMap::new();
                for c in colours {
                    *class_sizes.entry(c).or_insert(0usize) += 1;
                }
                let disjoint = class_sizes.values().copied().max().unwrap_or(0);
                let exceeded = scans.iter().any(|s| s.budget_exceeded);
                let boundary = geo.path.vertices().iter().any(|&v| to_frontier[v].is_some_and(|f| f <= region_radius));
                (found.len() as f64, disjoint as f64, exceeded, boundary)
            },
        );
        let count = mean_and_se(&samples.iter().map(|s| s.0).collect::<Vec<_>>());
        let disjoint = mean_and_se(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
        let exceeded = samples.iter().filter(|s| s.2).count();
        budget_hit |= exceeded > 0;
        let contamination = fraction(&samples.iter().map(|s| s.3).collect::<Vec<_>>());
        contamination_check(&mut report, cfg, job.d, contamination);
        report.rows.push(estimate_row(job.d, &count, contamination));
        report.note(format!(
            "d = {}: regions with a feasible pair {:.4} ± {:.4} ({:.4} per unit d); disjoint family {:.4}; budget exceeded in {exceeded} replicates",
            job.d,
            count.mean,
            count.se,
            count.mean / job.d as f64,
            disjoint.mean
        ));
        let mut rec = job.describe();
        rec["mean_count"] = json!(count.mean);
        rec["se"] = json!(count.se);
        rec["per_unit_d"] = json!(count.mean / job.d as f64);
        rec["mean_disjoint"] = json!(disjoint.mean);
        rec["budget_exceeded"] = json!(exceeded);
        records.push(rec);
    }
    if budget_hit {
        report.status = Status::BudgetExceeded;
        report.flags.push("path-search budget exceeded; counts are lower bounds".into());
    }
    report.record = json!({
        "epsilon": epsilon.to_string(),
        "c": spec.c,
        "i0": i0.to_string(),
        "region_radius": region_radius,
        "constants": constants.as_ref().map(|c| json!({
            "epsilon": c.epsilon.to_string(), "a": c.a, "b": c.b, "g": c.g, "delta0": c.delta0, "y0": c.y0,
            "i0": c.i0.to_string(), "checks": c.checks,
        })),
        "pairs": records,
    });
    Ok(report)
}

pub fn run_empirical_measure(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let nu = cfg.nu()?;
    let set = cfg.set.as_ref().map_or_else(|| bad("a weight `set` is required"), Ok)?.resolve(&nu, None)?;
    let (seed, n) = (cfg.seed()?, cfg.replicates()?);
    let mass = set.measure(&nu);
    let mut report = new_report(Experiment::EmpiricalMeasure, cfg);
    report.note(format!("A = {set}, ν(A) = {mass}"));
    let mut records = Vec::new();
    for job in jobs(cfg)? {
        let g = &job.built.graph;
        let samples = per_replicate(
            n,
            || (Vec::new(), Dijkstra::new()),
            |(w, dij), rep| {
                sample_single_into(g.edge_count(), &nu, seed, rep, w);
                let geo = dij.geodesic_bidirectional(g, w, job.x, job.y).expect("pairs are connected");
                (empirical_edge_measure(&geo, w, &set, job.d).fraction, geo.touched_frontier)
            },
        );
        let est = mean_and_se(&samples.iter().map(|s| s.0).collect::<Vec<_>>());
        let contamination = fraction(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
        contamination_check(&mut report, cfg, job.d, contamination);
        report.rows.push(estimate_row(job.d, &est, contamination));
        report.note(format!("d = {}: #{{e ∈ π : w(e) ∈ A}}/d = {:.6} ± {:.6}", job.d, est.mean, est.se));
        let mut rec = job.describe();
        rec["fraction"] = json!(est.mean);
        rec["se"] = json!(est.se);
        records.push(rec);
    }
    report.record = json!({ "set": set.to_string(), "nu_mass": mass, "pairs": records });
    Ok(report)
}

pub fn run_percolation_scan(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let spec = cfg.percolation.as_ref().map_or_else(|| bad("a `[percolation]` table is required"), Ok)?;
    if !(0.0..=1.0).contains(&spec.p) {
        return bad("p must lie in [0, 1]");
    }
    let (seed, n) = (cfg.seed()?, cfg.replicates()?);
    let max_r = spec.radii.iter().copied().max().map_or_else(|| bad("radii must be non-empty"), Ok)?;
    let radius = cfg.graph.fixed_radius().unwrap_or(max_r);
    if max_r > radius {
        return bad(format!("radius {max_r} exceeds the truncation radius {radius}"));
    }
    let built = build_graph(&cfg.graph, radius)?;
    let g = &built.graph;
    let decay = estimate_connection_decay(g, BASEPOINT, spec.p, &spec.radii, n, seed);
    let mut report = new_report(Experiment::PercolationScan, cfg);
    for r in &decay.rows {
        let se = (r.estimate * (1.0 - r.estimate) / r.n as f64).sqrt();
        report.rows.push(Row { d: r.radius, estimate: r.estimate, se, n: r.n, contamination: 0.0 });
    }
    let strictly_decreasing = decay.rows.windows(2).all(|w| w[1].estimate < w[0].estimate);
    report.note(format!("p = {}: connection probabilities strictly decreasing: {strictly_decreasing}", spec.p));
    if let Some(f) = decay.fit {
        let (lo, hi) = f.slope_interval(Z95);
        report.note(format!("log-linear fit: slope {:.6} (95% CI [{lo:.6}, {hi:.6}])", f.slope));
    }
    report.decay = decay.rows.clone();
    let mut voronoi = Vec::new();
    if !spec.voronoi_radii.is_empty() {
        let sigma = spec.sigma.unwrap_or(DEFAULT_SIGMA);
        let vmax = *spec.voronoi_radii.iter().max().unwrap();
        let vradius = cfg.graph.fixed_radius().unwrap_or(4 * vmax);
        let vb = build_graph(&cfg.graph, vradius)?;
        for &r in &spec.voronoi_radii {
            if r == 0 {
                return bad("Voronoi radii must be positive");
            }
            let centers = r_separated_net(&vb.graph, r, BASEPOINT);
            let tiling = voronoi_tiles(&vb.graph, &centers, r, sigma);
            let check = tiling.check(&vb.graph);
            let tg = tile_graph_degrees(&vb.graph, &tiling);
            report.note(format!(
                "Voronoi R = {r} on radius {vradius}: {} tiles, invariants {}, tile-graph max degree {}, enlarged max degree {}",
                tiling.tile_count(),
                if check.all() { "hold" } else { "FAIL" },
                tg.max_degree,
                tg.max_degree_enlarged
            ));
            voronoi.push(json!({
                "R": r,
                "graph_radius": vradius,
                "sigma": sigma,
                "tiles": tiling.tile_count(),
                "partition": check.partition,
                "separation": check.separation,
                "coverage": check.coverage,
                "tile_in_ball": check.tile_in_ball,
                "half_ball_inside": check.half_ball_inside,
                "max_degree": tg.max_degree,
                "max_degree_enlarged": tg.max_degree_enlarged,
            }));
        }
    }
    report.record = json!({
        "p": spec.p,
        "radius": radius,
        "strictly_decreasing": strictly_decreasing,
        "fit": fit_value(decay.fit),
        "voronoi": voronoi,
    });
    Ok(report)
}

pub fn run_cheap_passage(cfg: &ExperimentConfig) -> Result<Report, ConfigError> {
    let spec = cfg.cheap.as_ref().map_or_else(|| bad("a `[cheap]` table is required"), Ok)?;
    if !(spec.q > 0.0) {
        return bad("q must be positive");
    }
    let nu = cfg.nu()?;
    let (seed, n) = (cfg.seed()?, cfg.replicates()?);
    let mut report = new_report(Experiment::CheapPassage, cfg);
    report.note(format!("threshold (inf supp ν + q)·d with inf = {}, q = {}", nu.inf_support(), spec.q));
    let mut records = Vec::new();
    for job in jobs(cfg)? {
        let cp = estimate_cheap_passage_prob(&job.built.graph, &nu, spec.q, &[(job.x, job.y)], n, seed);
        let row = cp.rows[0];
        let contamination = cp.contaminated[0] as f64 / n as f64;
        contamination_check(&mut report, cfg, job.d, contamination);
        let se = (row.estimate * (1.0 - row.estimate) / n as f64).sqrt();
        report.rows.push(Row { d: job.d, estimate: row.estimate, se, n, contamination });
        report.decay.push(DecayRow { radius: job.d, ..row });
        report.note(format!(
            "d = {}: P(T < (inf + q)d) = {} ({} of {n}), Wilson 95% [{:.6}, {:.6}]",
            job.d, row.estimate, row.successes, row.ci_lo, row.ci_hi
        ));
        let mut rec = job.describe();
        rec["successes"] = json!(row.successes);
        rec["estimate"] = json!(row.estimate);
        records.push(rec);
    }
    let non_increasing = report.decay.windows(2).all(|w| w[1].estimate <= w[0].estimate);
    let upper_decreasing = report.decay.windows(2).all(|w| w[1].ci_hi < w[0].ci_hi);
    report.note(format!("estimates non-increasing: {non_increasing}; Wilson upper bounds decreasing: {upper_decreasing}"));
    report.record = json!({
        "q": spec.q,
        "inf_support": nu.inf_support(),
        "non_increasing": non_increasing,
        "upper_bounds_decreasing": upper_decreasing,
        "pairs": records,
    });
    Ok(report)
}
