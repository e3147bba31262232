//! Acceptance suite. One PASS/FAIL line per criterion, sub-checks indented.
//!
//! Monte Carlo criteria run the shipped configs in `configs/` through the
//! library entry point, so the numbers here are the numbers the CLI prints.
//! The process exits nonzero when a check fails that is not a documented gap.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use fpplab_cli::{run_with_threads, Experiment, ExperimentConfig, Report, Status};
use fpplab_core::builders::build_random_connected;
use fpplab_core::cayley::{build_cayley_ball, CayleyBall, CayleyMode, GeneratorSpec, Letter};
use fpplab_core::detours::{
    conjugation_detour, dihedral_detour, find_epsilon_detour, is_epsilon_detour, loop_erase_detour,
    normal_subgroup_detour, power_case_detour, validate_construction, z_detour, ConjugationOutcome, Construction,
    DEFAULT_BUDGET,
};
use fpplab_core::fpp::{is_more_variable, passage_time, sample_weights_into, Dijkstra, WeightConfig};
use fpplab_core::graph::{enumerate_self_avoiding_paths, geodesic_count, graph_distance, Path};
use fpplab_core::groups::{FiniteByLattice, FiniteGroup, Group, Heisenberg, InfiniteDihedral, IntegerLattice};
use fpplab_core::stats::{mean_and_se, Z95};
use fpplab_core::{Coupling, Distribution, Graph, Rational};

struct Check {
    ok: bool,
    /// Failing is expected and recorded; it does not fail the process.
    known_gap: bool,
    detail: String,
}

struct Criterion {
    id: u8,
    title: &'static str,
    checks: Vec<Check>,
    info: Vec<String>,
}

impl Criterion {
    fn new(id: u8, title: &'static str) -> Self {
        Criterion { id, title, checks: Vec::new(), info: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check { ok, known_gap: false, detail: detail.into() });
    }

    fn gap(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check { ok, known_gap: true, detail: detail.into() });
    }

    fn runtime(&mut self, secs: f64, limit: f64) {
        self.check(secs < limit, format!("runtime {secs:.2} s < {limit} s"));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Runs shipped configs once and keeps every report for the reproducibility check.
struct Runner {
    dir: PathBuf,
    reports: BTreeMap<String, Report>,
}

impl Runner {
    fn config(&self, name: &str) -> ExperimentConfig {
        let path = self.dir.join(format!("{name}.toml"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        ExperimentConfig::from_toml(&text).unwrap()
    }

    fn execute(&self, name: &str, threads: usize) -> (Report, f64) {
        let cfg = self.config(name);
        let experiment = Experiment::from_name(cfg.experiment.as_deref().expect("shipped configs are tagged")).unwrap();
        let t = Instant::now();
        let report = run_with_threads(experiment, &cfg, Some(threads)).unwrap_or_else(|e| panic!("{name}: {e}"));
        (report, t.elapsed().as_secs_f64())
    }

    fn run(&mut self, name: &str) -> (Report, f64) {
        let (report, secs) = self.execute(name, 1);
        self.reports.insert(name.to_string(), report.clone());
        (report, secs)
    }
}

fn rendered(r: &Report) -> Vec<(String, String)> {
    let mut out = vec![
        ("report.txt".to_string(), r.to_text()),
        ("report.csv".to_string(), r.to_csv()),
        ("report.json".to_string(), r.to_json()),
        ("decay.csv".to_string(), r.decay_csv()),
    ];
    out.extend(r.files.iter().cloned());
    out
}

fn max_contamination(r: &Report) -> f64 {
    r.rows.iter().map(|row| row.contamination).fold(0.0, f64::max)
}

fn tree_time_constant(run: &mut Runner) -> Criterion {
    let mut c = Criterion::new(1, "tree time constant equals the mean");
    let (r, secs) = run.run("tree_time_constant");
    let row = &r.rows[0];
    let z = (row.estimate - 1.5) / row.se;
    c.check(row.d == 20 && row.n == 10_000, format!("d = {}, N = {}", row.d, row.n));
    c.check(z.abs() <= 3.0, format!("E T/d = {:.6} ± {:.6}, |z| = {:.2} ≤ 3 vs 1.5", row.estimate, row.se, z.abs()));
    c.check(row.contamination < 0.01, format!("contamination {}", row.contamination));
    c.runtime(secs, 10.0);
    c
}

/// `E min(w₁, w₂ + w₃)` for i.i.d. Exp(1) by quadrature of the tail
/// `P(min > t) = e^{−t}(1 + t)e^{−t}`.
fn cactus_oracle() -> f64 {
    let (n, hi) = (200_000usize, 40.0);
    let h = hi / n as f64;
    let f = |t: f64| (1.0 + t) * (-2.0 * t).exp();
    let mut s = f(0.0) + f(hi);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn cactus_time_constant(run: &mut Runner) -> Criterion {
    let mut c = Criterion::new(2, "triangle-cactus time constant");
    let target = cactus_oracle();
    c.check((target - 0.75).abs() < 1e-9, format!("quadrature oracle {target:.12} agrees with 3/4"));
    let (r, secs) = run.run("cactus_time_constant");
    let row = &r.rows[0];
    let z = (row.estimate - target) / row.se;
    c.check(row.d == 12 && row.n == 10_000, format!("d = {}, N = {}", row.d, row.n));
    c.check(z.abs() <= 3.0, format!("E T/d = {:.6} ± {:.6}, |z| = {:.2} ≤ 3", row.estimate, row.se, z.abs()));
    c.check(row.contamination < 0.01, format!("contamination {}", row.contamination));
    c.runtime(secs, 30.0);
    c
}

fn gap_experiments(run: &mut Runner) -> Criterion {
    let mut c = Criterion::new(3, "no gap on the tree, linear gap on Z^2");
    let (tree, t1) = run.run("tree_gap");
    for row in &tree.rows {
        let z = row.estimate / row.se;
        c.check(z.abs() <= 3.0, format!("tree d = {}: gap {:.6} ± {:.6}, |z| = {:.2} ≤ 3", row.d, row.estimate, row.se, z.abs()));
    }
    let (plane, t2) = run.run("lattice_gap");
    for row in &plane.rows {
        let z = row.estimate / row.se;
        c.check(z >= 5.0, format!("Z^2 d = {}: gap {:.6} ± {:.6}, z = {:.1} ≥ 5", row.d, row.estimate, row.se, z));
    }
    let est: Vec<f64> = plane.rows.iter().map(|r| r.estimate).collect();
    c.check(est.windows(2).all(|w| w[1] >= w[0]), format!("Z^2 gap non-decreasing in d: {est:?}"));
    let ds: Vec<usize> = plane.rows.iter().map(|r| r.d).collect();
    c.check(ds == [10, 20, 30], format!("distances {ds:?}"));
    let n_ok = tree.rows.iter().chain(&plane.rows).all(|r| r.n == 10_000);
    c.check(n_ok, "N = 10^4 replicates per distance");
    let worst = max_contamination(&tree).max(max_contamination(&plane));
    c.check(worst < 0.01, format!("max contamination {worst} < 1%"));
    c.runtime(t1 + t2, 300.0);
    c
}

fn verdicts(r: &Report) -> Vec<(String, usize, String)> {
    r.record["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| (v["epsilon"].as_str().unwrap().to_string(), v["c"].as_u64().unwrap() as usize, v["verdict"].as_str().unwrap().to_string()))
        .collect()
}

fn detour_certificates(run: &mut Runner) -> Criterion {
    let mut c = Criterion::new(4, "detour certificates");
    let cases: [(&str, &str, &[usize]); 5] = [
        ("line_detours", "REFUTED", &[1, 2, 3, 4, 5, 6, 7, 8]),
        ("plane_detours", "CERTIFIED", &[2]),
        ("cactus_detours", "REFUTED", &[1, 2, 3, 4, 5, 6]),
        ("cactus_detours_certified", "CERTIFIED", &[1]),
        ("doubled_tree_detours", "CERTIFIED", &[1]),
    ];
    for (name, want, cs) in cases {
        let (r, secs) = run.run(name);
        let v = verdicts(&r);
        let got: Vec<usize> = v.iter().map(|x| x.1).collect();
        let all = v.iter().all(|x| x.2 == want);
        c.check(all && got == cs, format!("{name}: {want} at ε = {} for C ∈ {got:?}", v[0].0));
        c.check(r.status == Status::Ok, format!("{name}: exhaustive (status {:?})", r.status));
        c.runtime(secs, 60.0);
    }
    c
}

fn sound<G: Group>(c: &mut Criterion, ball: &CayleyBall<G>, pi: &[Letter], k: &Construction) {
    let check = validate_construction(ball, pi, k).unwrap();
    let eps = check.implied_epsilon;
    let p = ball.word_path(0, pi).unwrap();
    let q = ball.word_path(0, &k.word).unwrap();
    let detour = eps.is_some_and(|e| is_epsilon_detour(&p, &q, e));
    c.check(
        check.endpoints_equal && check.bound_holds && detour && check.passed(),
        format!(
            "{}: endpoints equal {}, separation {} ≥ {}, ε-detour at implied ε = {}",
            k.case,
            check.endpoints_equal,
            check.separation,
            k.separation_bound,
            eps.map_or("none".to_string(), |e| e.to_string())
        ),
    );
}

fn constructions() -> Criterion {
    let mut c = Criterion::new(5, "detour constructions are sound");
    let t = Instant::now();

    let gens = GeneratorSpec::new(&["1", "2"], vec![vec![1i64], vec![2]], CayleyMode::Reduced);
    let ball = build_cayley_ball(IntegerLattice::new(1), gens, 14).unwrap();
    let pi = ball.parse_word("2^10").unwrap();
    sound(&mut c, &ball, &pi, &z_detour(&ball, &pi).unwrap());

    let r = InfiniteDihedral::reflection;
    let gens = GeneratorSpec::new(&["a", "b", "c"], vec![r(0), r(1), r(20)], CayleyMode::Reduced);
    let ball = build_cayley_ball(InfiniteDihedral, gens, 16).unwrap();
    let pi = ball.parse_word("a b a b a b a b a b a b").unwrap();
    let end = ball.vertex_of(&ball.evaluate(&pi)).unwrap();
    c.check(geodesic_count(ball.graph(), 0, end).unwrap().count == 1, "(ab)^6 is a unique geodesic");
    sound(&mut c, &ball, &pi, &dihedral_detour(&ball, &pi).unwrap());

    let gens = GeneratorSpec::new(&["x", "y"], vec![Heisenberg::X, Heisenberg::Y], CayleyMode::Reduced);
    let ball = build_cayley_ball(Heisenberg, gens, 16).unwrap();
    let z = ball.vertex_of(&Heisenberg::Z).unwrap();
    let dz = graph_distance(ball.graph(), 0, z).unwrap();
    c.check(dz == Some(4), format!("|z| = {dz:?} by BFS"));
    let pi = ball.parse_word("x^12").unwrap();
    match conjugation_detour(&ball, &Heisenberg::Z, &pi).unwrap() {
        ConjugationOutcome::Detour(k) => sound(&mut c, &ball, &pi, &k),
        other => c.check(false, format!("Heisenberg: unexpected {other:?}")),
    }

    let gens = GeneratorSpec::new(&["e1", "e2"], vec![vec![1i64, 0], vec![0, 1]], CayleyMode::Reduced);
    let ball = build_cayley_ball(IntegerLattice::new(2), gens, 14).unwrap();
    let eta = ball.parse_word("e1").unwrap();
    let pi = ball.parse_word("e1^10").unwrap();
    sound(&mut c, &ball, &pi, &power_case_detour(&ball, &eta, 10, None).unwrap());

    let group = FiniteByLattice::direct(FiniteGroup::cyclic(2), 1);
    let gens = GeneratorSpec::new(&["s", "t"], vec![(1, vec![0]), (0, vec![1])], CayleyMode::Reduced);
    let ball = build_cayley_ball(group.clone(), gens, 14).unwrap();
    let pi = ball.parse_word("t^10").unwrap();
    sound(&mut c, &ball, &pi, &normal_subgroup_detour(&ball, &group.normal_subgroup(), &pi).unwrap());

    c.runtime(t.elapsed().as_secs_f64(), 60.0);
    c
}

fn random_graph(seed: u64) -> Graph {
    let n = 2 + (seed.wrapping_mul(0x9e37_79b9) % 11) as usize;
    let extra = (seed.wrapping_mul(31) % (n as u64 + 1)) as usize;
    build_random_connected(n, extra, seed)
}

fn sa_paths(g: &Graph, u: usize, v: usize) -> Vec<Path> {
    enumerate_self_avoiding_paths(g, u, v, g.vertex_count()).unwrap().map(Result::unwrap).collect()
}

fn sa_paths_of_length(g: &Graph, len: usize) -> Vec<Path> {
    let mut out = Vec::new();
    for u in 0..g.vertex_count() {
        for v in 0..g.vertex_count() {
            if u != v {
                out.extend(
                    enumerate_self_avoiding_paths(g, u, v, len).unwrap().map(Result::unwrap).filter(|p| p.len() == len),
                );
            }
        }
    }
    out
}

fn oracle_equivalence() -> Criterion {
    let mut c = Criterion::new(6, "oracle equivalence on small graphs");
    let t = Instant::now();
    let (mut dijkstra_ok, mut count_ok, mut equiv_ok, mut equiv_total) = (0, 0, 0, 0);
    let mut dj = Dijkstra::new();
    for seed in 0..200u64 {
        let g = random_graph(seed);
        let n = g.vertex_count();
        // Weights from a fixed arithmetic sequence keep the oracle independent of the samplers.
        let w: Vec<f64> = (0..g.edge_count()).map(|e| 0.5 + ((e as u64 * 7919 + seed * 104_729) % 1000) as f64 / 997.0).collect();
        let brute = sa_paths(&g, 0, n - 1).iter().map(|p| passage_time(&w, p)).fold(f64::INFINITY, f64::min);
        let a = dj.geodesic(&g, &w, 0, n - 1).unwrap().time;
        let b = dj.geodesic_bidirectional(&g, &w, 0, n - 1).unwrap().time;
        dijkstra_ok += usize::from((a - brute).abs() <= 1e-9 * brute.max(1.0) && (b - brute).abs() <= 1e-9 * brute.max(1.0));

        let mut counts_match = true;
        for u in 0..n {
            for v in 0..n {
                let gc = geodesic_count(&g, u, v).unwrap();
                let listed = enumerate_self_avoiding_paths(&g, u, v, gc.distance).unwrap().count() as u64;
                counts_match &= gc.count == listed;
            }
        }
        count_ok += usize::from(counts_match);

        for len in 1..=5 {
            let paths = sa_paths_of_length(&g, len);
            for eps in [Rational::new(1, 2), Rational::from_integer(1)] {
                equiv_total += 1;
                let mut every_path = true;
                let mut every_unique = true;
                let mut consistent = true;
                for pi in &paths {
                    let brute = sa_paths(&g, pi.start(), pi.end()).iter().any(|q| is_epsilon_detour(pi, q, eps));
                    every_path &= brute;
                    let gc = geodesic_count(&g, pi.start(), pi.end()).unwrap();
                    if gc.distance == len && gc.count == 1 {
                        let v = find_epsilon_detour(&g, pi, eps, DEFAULT_BUDGET).unwrap();
                        consistent &= v.exhaustive && v.detour.is_some() == brute;
                        every_unique &= brute;
                    } else {
                        let d = loop_erase_detour(&g, pi).unwrap();
                        consistent &= d.is_self_avoiding() && is_epsilon_detour(pi, &d, Rational::from_integer(0));
                    }
                }
                equiv_ok += usize::from(consistent && every_path == every_unique);
            }
        }
    }
    c.check(dijkstra_ok == 200, format!("Dijkstra = brute-force minimum on {dijkstra_ok}/200 graphs"));
    c.check(count_ok == 200, format!("geodesic_count = enumeration on {count_ok}/200 graphs"));
    c.check(
        equiv_ok == equiv_total,
        format!("detour reduction to unique geodesics on {equiv_ok}/{equiv_total} (graph, C ≤ 5, ε) cases"),
    );
    c.info.push(format!("runtime {:.2} s", t.elapsed().as_secs_f64()));
    c
}

fn coupling_invariants() -> Criterion {
    let mut c = Criterion::new(7, "coupling invariants");
    let nu = Distribution::uniform(1.25, 1.75);
    let nu_tilde = Distribution::uniform(1.0, 2.0);
    let shifts = vec![(Rational::new(-1, 4), Rational::new(1, 2)), (Rational::new(1, 4), Rational::new(1, 2))];
    let kernel = Coupling::kernel(nu.clone(), shifts, nu_tilde.clone(), true);
    c.check(kernel.is_ok(), "kernel ±1/4 coupling accepted with declared marginal uniform[1,2]");

    // Closed form: P(w + δ ≤ t) = ½F(t − ¼) + ½F(t + ¼) with F the uniform[1.25,1.75] CDF.
    let f = |s: f64| ((s - 1.25) / 0.5).clamp(0.0, 1.0);
    let worst = (0..=400)
        .map(|i| 0.9 + i as f64 * 1.2 / 400.0)
        .map(|t| (0.5 * f(t - 0.25) + 0.5 * f(t + 0.25) - (t - 1.0).clamp(0.0, 1.0)).abs())
        .fold(0.0, f64::max);
    c.check(worst < 1e-12, format!("shifted CDF equals the uniform[1,2] CDF (max deviation {worst:.1e})"));
    let law_gap = (0..=400).map(|i| 0.9 + i as f64 * 1.2 / 400.0).map(|t| (nu_tilde.cdf(t) - (t - 1.0).clamp(0.0, 1.0)).abs()).fold(0.0, f64::max);
    c.check(law_gap < 1e-12, format!("ν̃ CDF matches closed form (max deviation {law_gap:.1e})"));

    if let Ok(k) = &kernel {
        let mut wc = WeightConfig::default();
        sample_weights_into(10_000, k, 7, 0, &mut wc);
        let diffs: Vec<f64> = wc.w_tilde.iter().zip(&wc.w).map(|(a, b)| a - b).collect();
        let e = mean_and_se(&diffs);
        c.check(e.z_score(0.0).abs() <= 3.0, format!("E[w̃ − w] = {:.5} ± {:.5} over 10^4 edges", e.mean, e.se));
    }

    let pairs = [
        (vec!["unif 0.5 1.5 1"], vec!["unif 1 2 1"]),
        (vec!["exp 1 0 1"], vec!["exp 1 0.5 1"]),
        (vec!["atom 1 0.5", "unif 1 2 0.5"], vec!["unif 1 2 1"]),
        (vec!["atom 1 1/4", "atom 2 3/4"], vec!["atom 2 1"]),
    ];
    for (lo, hi) in pairs {
        let q = Coupling::quantile(Distribution::parse_lines(&lo).unwrap(), Distribution::parse_lines(&hi).unwrap());
        let mut wc = WeightConfig::default();
        sample_weights_into(10_000, &q, 11, 0, &mut wc);
        let bad = wc.w_tilde.iter().zip(&wc.w).filter(|(a, b)| a > b).count();
        c.check(bad == 0, format!("quantile {lo:?} ≤ {hi:?}: w̃ ≤ w on all 10^4 edges ({bad} violations)"));
    }

    let check = is_more_variable(&nu_tilde, &nu, &[]).unwrap();
    c.check(check.holds, "uniform[1,2] is more variable than uniform[1.25,1.75]");
    let (a, b) = (nu_tilde.min_integral(1.5), nu.min_integral(1.5));
    c.check((a - 1.375).abs() < 1e-12 && (b - 1.4375).abs() < 1e-12, format!("∫min(x, 1.5): {a} vs {b}"));
    c
}

/// `P(U₁ + … + U_d ≤ s)` for i.i.d. uniform[0,1].
fn irwin_hall_cdf(d: u32, s: f64) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    for k in 0..=(s.floor() as u32).min(d) {
        if k > 0 {
            binom *= (d - k + 1) as f64 / k as f64;
        }
        total += if k % 2 == 0 { 1.0 } else { -1.0 } * binom * (s - k as f64).powi(d as i32);
    }
    total / (1..=d).map(f64::from).product::<f64>()
}

fn tiling_and_percolation(run: &mut Runner) -> Criterion {
    let mut c = Criterion::new(8, "tiling and percolation diagnostics");
    let (p, t1) = run.run("lattice_percolation");
    let tiles = p.record["voronoi"].as_array().unwrap();
    let mut degrees = Vec::new();
    for v in tiles {
        let flag = |k: &str| v[k].as_bool().unwrap_or(false);
        c.check(
            flag("partition") && flag("separation") && flag("half_ball_inside"),
            format!("R = {}: partition, separation and half-ball inclusion hold", v["R"]),
        );
        degrees.push(v["max_degree"].as_u64().unwrap() as f64);
    }
    let rs: Vec<u64> = tiles.iter().map(|v| v["R"].as_u64().unwrap()).collect();
    c.check(rs == [4, 8, 16], format!("Voronoi scales {rs:?}"));
    let (lo, hi) = degrees.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    c.check(hi < 2.0 * lo, format!("tile-graph max degrees {degrees:?} vary by less than a factor 2"));

    let est: Vec<f64> = p.decay.iter().map(|r| r.estimate).collect();
    let radii: Vec<usize> = p.decay.iter().map(|r| r.radius).collect();
    c.check(radii == [5, 10, 15, 20], format!("radii {radii:?}"));
    c.check(est.windows(2).all(|w| w[1] < w[0]), format!("p = 0.25 connection probabilities strictly decrease: {est:?}"));
    let ci = &p.record["fit"]["slope_ci95"];
    let (slo, shi) = (ci[0].as_f64().unwrap_or(f64::NAN), ci[1].as_f64().unwrap_or(f64::NAN));
    c.check(shi < 0.0, format!("fitted log-slope {} with 95% CI [{slo:.4}, {shi:.4}] below 0", p.record["fit"]["slope"]));

    let (cheap, t2) = run.run("lattice_cheap");
    let fr: Vec<f64> = cheap.rows.iter().map(|r| r.estimate).collect();
    c.gap(fr.windows(2).all(|w| w[1] < w[0]), format!("cheap-passage fractions (q = 0.05) decrease over d ∈ {{10,20,30}}: {fr:?}"));
    c.check(fr.windows(2).all(|w| w[1] <= w[0]), "cheap-passage fractions are non-increasing");
    let wilson_ok = cheap.decay.iter().all(|r| {
        // Independent Wilson score interval.
        let (n, k, z) = (r.n as f64, r.successes as f64, Z95);
        let ph = k / n;
        let centre = (ph + z * z / (2.0 * n)) / (1.0 + z * z / n);
        let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / (1.0 + z * z / n);
        ((centre - half).max(0.0) - r.ci_lo).abs() < 1e-12 && ((centre + half).min(1.0) - r.ci_hi).abs() < 1e-12
    });
    c.check(wilson_ok, "Wilson intervals match an independent computation");
    for d in [10u32, 20, 30] {
        c.info.push(format!(
            "exact P for a single straight geodesic at d = {d}: {:.3e}",
            irwin_hall_cdf(d, 0.05 * d as f64)
        ));
    }
    c.runtime(t1 + t2, 300.0);
    c
}

fn empirical_measure(run: &mut Runner) -> Criterion {
    let mut c = Criterion::new(9, "empirical edge measure is non-degenerate");
    let (r, secs) = run.run("lattice_measure");
    for row in &r.rows {
        c.check(row.estimate > 0.0 && row.n == 1000, format!("d = {}: fraction {:.4} ± {:.4} > 0 (N = {})", row.d, row.estimate, row.se, row.n));
    }
    let by_d: BTreeMap<usize, f64> = r.rows.iter().map(|row| (row.d, row.estimate)).collect();
    let (a, b) = (by_d.get(&10).copied().unwrap_or(0.0), by_d.get(&30).copied().unwrap_or(0.0));
    c.check(b >= 0.5 * a, format!("d = 30 value {b:.4} ≥ half the d = 10 value {a:.4}"));
    c.check(max_contamination(&r) < 0.01, format!("max contamination {}", max_contamination(&r)));
    c.runtime(secs, 180.0);
    c
}

fn reproducibility(run: &mut Runner) -> Criterion {
    let mut c = Criterion::new(10, "reports are byte-identical across runs and thread counts");
    let mut names: Vec<String> = std::fs::read_dir(&run.dir)
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().to_str()?.strip_suffix(".toml").map(str::to_string))
        .collect();
    names.sort();
    for name in names {
        let first = match run.reports.get(&name) {
            Some(r) => r.clone(),
            None => run.run(&name).0,
        };
        let again = run.execute(&name, 1).0;
        let four = run.execute(&name, 4).0;
        let base = rendered(&first);
        c.check(base == rendered(&again) && base == rendered(&four), format!("{name}: identical at threads 1, 1, 4"));
    }
    c
}

fn main() -> ExitCode {
    let mut run = Runner { dir: PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs"), reports: BTreeMap::new() };
    let started = Instant::now();
    let criteria = vec![
        tree_time_constant(&mut run),
        cactus_time_constant(&mut run),
        gap_experiments(&mut run),
        detour_certificates(&mut run),
        constructions(),
        oracle_equivalence(),
        coupling_invariants(),
        tiling_and_percolation(&mut run),
        empirical_measure(&mut run),
        reproducibility(&mut run),
    ];
    let mut unexpected = 0;
    for cr in &criteria {
        let verdict = if cr.passed() { "PASS" } else { "FAIL" };
        let gap_only = !cr.passed() && cr.checks.iter().all(|k| k.ok || k.known_gap);
        println!("{verdict} [{}] {}{}", cr.id, cr.title, if gap_only { " (documented gap)" } else { "" });
        for k in &cr.checks {
            println!("    {} {}", if k.ok { "ok  " } else { "FAIL" }, k.detail);
            unexpected += usize::from(!k.ok && !k.known_gap);
        }
        for line in &cr.info {
            println!("    info {line}");
        }
    }
    let passed = criteria.iter().filter(|c| c.passed()).count();
    println!("{passed}/{} criteria passed in {:.1} s", criteria.len(), started.elapsed().as_secs_f64());
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

