use fpplab_core::builders::{build_lattice_ball, build_random_connected};
use fpplab_core::cayley::{build_cayley_ball, CayleyMode, GeneratorSpec};
use fpplab_core::groups::FreeGroup;
use fpplab_core::detours::{certificate_margin, certify_admits_detours, find_epsilon_detour, CertificateOutcome, is_epsilon_detour, loop_erase_detour, DEFAULT_BUDGET};
use fpplab_core::fpp::{passage_time, Dijkstra};
use fpplab_core::graph::{bfs_distances, enumerate_self_avoiding_paths, geodesic_count, Path};
use fpplab_core::{Graph, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(2..=12);
    let extra = rng.gen_range(0..=n);
    build_random_connected(n, extra, seed)
}

fn all_sa_paths(g: &Graph, u: usize, v: usize) -> Vec<Path> {
    enumerate_self_avoiding_paths(g, u, v, g.vertex_count()).unwrap().map(Result::unwrap).collect()
}

/// All self-avoiding paths of exactly `len` edges, by extending vertex by vertex.
fn sa_paths_of_length(g: &Graph, len: usize) -> Vec<Path> {
    let mut out = Vec::new();
    for s in 0..g.vertex_count() {
        let mut stack = vec![(vec![s], Vec::<usize>::new())];
        while let Some((vs, es)) = stack.pop() {
            if es.len() == len {
                out.push(Path::new(g, s, es).unwrap());
                continue;
            }
            let last = *vs.last().unwrap();
            for &e in g.incident(last) {
                let w = g.other_end(e, last);
                if !vs.contains(&w) {
                    let mut vs2 = vs.clone();
                    vs2.push(w);
                    let mut es2 = es.clone();
                    es2.push(e);
                    stack.push((vs2, es2));
                }
            }
        }
    }
    out
}

fn has_sa_detour_brute(g: &Graph, pi: &Path, eps: Rational) -> bool {
    all_sa_paths(g, pi.start(), pi.end()).iter().any(|q| is_epsilon_detour(pi, q, eps))
}

#[test]
fn dijkstra_matches_brute_force_minimum() {
    let mut dj = Dijkstra::new();
    for seed in 0..200 {
        let g = random_graph(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(0..5) as f64 * 0.5 + rng.gen::<f64>()).collect();
        let (x, y) = (0, g.vertex_count() - 1);
        let brute = all_sa_paths(&g, x, y).iter().map(|p| passage_time(&w, p)).fold(f64::INFINITY, f64::min);
        for geo in [dj.geodesic(&g, &w, x, y).unwrap(), dj.geodesic_bidirectional(&g, &w, x, y).unwrap()] {
            assert!((geo.time - brute).abs() <= 1e-9 * brute.max(1.0), "seed {seed}");
            assert!((passage_time(&w, &geo.path) - geo.time).abs() <= 1e-9 * brute.max(1.0));
        }
    }
}

#[test]
fn geodesic_count_matches_enumeration() {
    for seed in 0..200 {
        let g = random_graph(seed);
        for u in 0..g.vertex_count() {
            let dist = bfs_distances(&g, u);
            for v in 0..g.vertex_count() {
                let d = dist[v].unwrap();
                let gc = geodesic_count(&g, u, v).unwrap();
                let listed = enumerate_self_avoiding_paths(&g, u, v, d).unwrap().count() as u64;
                assert_eq!(gc.distance, d);
                assert_eq!(gc.count, listed, "seed {seed}, {u} → {v}");
                assert_eq!(gc.witness.len(), d);
            }
        }
    }
}

#[test]
fn detour_reduction_to_unique_geodesics() {
    let eps_values = [Rational::new(1, 2), Rational::from_integer(1)];
    for seed in 0..200 {
        let g = random_graph(seed);
        for c in 1..=5 {
            let paths = sa_paths_of_length(&g, c);
            for &eps in &eps_values {
                let mut all_paths = true;
                let mut unique_only = true;
                for pi in &paths {
                    let gc = geodesic_count(&g, pi.start(), pi.end()).unwrap();
                    let unique = gc.distance == c && gc.count == 1;
                    let has = if unique {
                        let v = find_epsilon_detour(&g, pi, eps, DEFAULT_BUDGET).unwrap();
                        assert!(v.exhaustive);
                        assert_eq!(v.detour.is_some(), has_sa_detour_brute(&g, pi, eps), "seed {seed}");
                        v.detour.is_some()
                    } else {
                        let d = loop_erase_detour(&g, pi).unwrap();
                        assert!(d.is_self_avoiding() && is_epsilon_detour(pi, &d, Rational::from_integer(0)));
                        true
                    };
                    all_paths &= has_sa_detour_brute(&g, pi, eps);
                    if unique {
                        unique_only &= has;
                    }
                }
                assert_eq!(all_paths, unique_only, "seed {seed}, C = {c}, ε = {eps}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detours_are_monotone_in_epsilon(seed in 0u64..10_000, p in 0i64..4, q in 1i64..4) {
        let g = random_graph(seed);
        let eps = Rational::new(p, q);
        let bigger = eps + Rational::new(1, 2);
        for pi in sa_paths_of_length(&g, 2).iter().take(20) {
            let v = find_epsilon_detour(&g, pi, eps, DEFAULT_BUDGET).unwrap();
            if let Some(d) = v.detour {
                prop_assert!(is_epsilon_detour(pi, &d, bigger));
                prop_assert!(find_epsilon_detour(&g, pi, bigger, DEFAULT_BUDGET).unwrap().detour.is_some());
            }
        }
    }

    #[test]
    fn triangle_inequality(seed in 0u64..10_000) {
        let g = random_graph(seed);
        let d: Vec<Vec<usize>> = (0..g.vertex_count()).map(|u| bfs_distances(&g, u).into_iter().map(Option::unwrap).collect()).collect();
        let n = g.vertex_count();
        for u in 0..n {
            prop_assert_eq!(d[u][u], 0);
            for v in 0..n {
                prop_assert_eq!(d[u][v], d[v][u]);
                for w in 0..n {
                    prop_assert!(d[u][w] <= d[u][v] + d[v][w]);
                }
            }
        }
    }
}

/// A refuting geodesic beats every other self-avoiding path with its
/// endpoints: `|π′ \ π| > (1+ε)|π \ π′|`.
fn assert_strict_non_detour(g: &Graph, pi: &Path, eps: Rational, max_len: usize) {
    for q in enumerate_self_avoiding_paths(g, pi.start(), pi.end(), max_len).unwrap().map(Result::unwrap) {
        if q.same_edge_set(pi) {
            continue;
        }
        let only_q = q.edge_set().iter().filter(|e| !pi.edge_set().contains(e)).count() as i64;
        let only_pi = pi.edge_set().iter().filter(|e| !q.edge_set().contains(e)).count() as i64;
        assert!(
            Rational::from_integer(only_q) > (Rational::from_integer(1) + eps) * Rational::from_integer(only_pi),
            "{q:?} is an ε-detour of {pi:?}"
        );
    }
}

#[test]
fn refuting_geodesics_admit_no_detour_at_all() {
    let eps = Rational::new(1, 1);
    for c in 1..=8 {
        let g = build_lattice_ball(1, certificate_margin(eps, c)).unwrap().graph;
        let cert = certify_admits_detours(&g, eps, c, &[0], DEFAULT_BUDGET).unwrap();
        let CertificateOutcome::Refuted { counterexample } = cert.outcome else { panic!("ℤ must refute at C = {c}") };
        assert_strict_non_detour(&g, &counterexample, eps, g.vertex_count());
    }

    let half = Rational::new(1, 2);
    for c in 1..=5 {
        let gens = GeneratorSpec::new(&["a", "b", "ab"], vec![vec![1], vec![2], vec![1, 2]], CayleyMode::Reduced);
        let g = build_cayley_ball(FreeGroup::new(2), gens, certificate_margin(half, c)).unwrap().into_graph();
        let cert = certify_admits_detours(&g, half, c, &[0], DEFAULT_BUDGET).unwrap();
        let CertificateOutcome::Refuted { counterexample } = cert.outcome else { panic!("F(a,b) must refute at C = {c}") };
        // Triangles double a path's length at most.
        assert_strict_non_detour(&g, &counterexample, half, 2 * c);
    }

    let mut refuted = 0;
    for seed in 0..200 {
        let g = random_graph(seed);
        for c in 1..=3 {
            let cert = certify_admits_detours(&g, half, c, &[0], DEFAULT_BUDGET).unwrap();
            if let CertificateOutcome::Refuted { counterexample } = cert.outcome {
                refuted += 1;
                assert_strict_non_detour(&g, &counterexample, half, g.vertex_count());
            }
        }
    }
    assert!(refuted > 0);
}
