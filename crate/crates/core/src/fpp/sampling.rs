//! Reproducible per-edge weights from `(seed, replicate, edge id)`.
//!
//! Replicate `r` reads two ChaCha8 streams of the seed: stream `2r` feeds the
//! first uniform of every edge and stream `2r + 1` the second. Edge `e` takes
//! word `e` of each stream, so any single edge can be regenerated on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

use super::coupling::Coupling;
use super::distribution::Distribution;

/// Both coupled layers, indexed by edge id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightConfig {
    pub w: Vec<f64>,
    pub w_tilde: Vec<f64>,
}

impl WeightConfig {
    pub fn edge_count(&self) -> usize {
        self.w.len()
    }
}

fn stream(seed: u64, replicate: u64, layer: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * replicate + layer);
    rng
}

/// The two uniforms of edge `e`, by random access.
pub fn edge_uniforms(seed: u64, replicate: u64, e: usize) -> (f64, f64) {
    let draw = |layer| {
        let mut rng = stream(seed, replicate, layer);
        rng.set_word_pos(2 * e as u128);
        rng.gen::<f64>()
    };
    (draw(0), draw(1))
}

pub fn sample_weights(g: &Graph, coupling: &Coupling, seed: u64, replicate: u64) -> WeightConfig {
    let mut out = WeightConfig::default();
    sample_weights_into(g.edge_count(), coupling, seed, replicate, &mut out);
    out
}

/// Fills `out` with both layers for `edges` edges, reusing its buffers.
pub fn sample_weights_into(edges: usize, coupling: &Coupling, seed: u64, replicate: u64, out: &mut WeightConfig) {
    out.w.clear();
    out.w_tilde.clear();
    let mut first = stream(seed, replicate, 0);
    if coupling.uses_second_uniform() {
        let mut second = stream(seed, replicate, 1);
        for _ in 0..edges {
            let (w, wt) = coupling.transform(first.gen(), second.gen());
            out.w.push(w);
            out.w_tilde.push(wt);
        }
    } else {
        for _ in 0..edges {
            let (w, wt) = coupling.transform(first.gen(), 0.0);
            out.w.push(w);
            out.w_tilde.push(wt);
        }
    }
}

/// The `w` layer only; identical to the first layer of any coupling with
/// marginal `nu`.
pub fn sample_single_into(edges: usize, nu: &Distribution, seed: u64, replicate: u64, out: &mut Vec<f64>) {
    out.clear();
    let mut first = stream(seed, replicate, 0);
    out.extend((0..edges).map(|_| nu.quantile(first.gen())));
}

/// The raw uniforms of one layer (0 or 1) for `edges` edges.
pub fn layer_uniforms_into(edges: usize, seed: u64, replicate: u64, layer: u64, out: &mut Vec<f64>) {
    out.clear();
    let mut rng = stream(seed, replicate, layer);
    out.extend((0..edges).map(|_| rng.gen::<f64>()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::build_lattice_ball;
    use crate::detours::Rational;

    #[test]
    fn dirac_weights_are_exact() {
        let g = build_lattice_ball(2, 3).unwrap().graph;
        let c = Coupling::independent(Distribution::dirac(1.0), Distribution::dirac(1.0));
        let wc = sample_weights(&g, &c, 7, 0);
        assert_eq!(wc.edge_count(), g.edge_count());
        assert!(wc.w.iter().chain(&wc.w_tilde).all(|&x| x == 1.0));
    }

    #[test]
    fn random_access_matches_sequential_draws() {
        let c = Coupling::independent(Distribution::uniform(0.0, 1.0), Distribution::uniform(0.0, 1.0));
        let mut wc = WeightConfig::default();
        sample_weights_into(40, &c, 11, 3, &mut wc);
        for e in [0, 1, 17, 39] {
            let (u0, u1) = edge_uniforms(11, 3, e);
            assert_eq!((wc.w[e], wc.w_tilde[e]), (u0, u1));
        }
    }

    #[test]
    fn replicates_and_seeds_differ() {
        let c = Coupling::quantile(Distribution::uniform(0.0, 1.0), Distribution::uniform(0.0, 1.0));
        let mut a = WeightConfig::default();
        let mut b = WeightConfig::default();
        sample_weights_into(8, &c, 1, 0, &mut a);
        sample_weights_into(8, &c, 1, 1, &mut b);
        assert_ne!(a.w, b.w);
        sample_weights_into(8, &c, 2, 0, &mut b);
        assert_ne!(a.w, b.w);
        sample_weights_into(8, &c, 1, 0, &mut b);
        assert_eq!(a, b);
        assert_eq!(a.w, a.w_tilde);
    }

    #[test]
    fn single_layer_matches_first_layer() {
        let nu = Distribution::exponential(1.0);
        let c = Coupling::quantile(nu.clone(), nu.clone());
        let mut wc = WeightConfig::default();
        sample_weights_into(30, &c, 5, 9, &mut wc);
        let mut single = Vec::new();
        sample_single_into(30, &nu, 5, 9, &mut single);
        assert_eq!(single, wc.w);
    }

    #[test]
    fn kernel_layers_differ_by_a_declared_shift() {
        let r = Rational::new;
        let c = Coupling::kernel(
            Distribution::uniform(1.25, 1.75),
            vec![(r(-1, 4), r(1, 2)), (r(1, 4), r(1, 2))],
            Distribution::uniform(1.0, 2.0),
            true,
        )
        .unwrap();
        let mut wc = WeightConfig::default();
        sample_weights_into(200, &c, 3, 0, &mut wc);
        for (w, wt) in wc.w.iter().zip(&wc.w_tilde) {
            assert!(((wt - w).abs() - 0.25).abs() < 1e-12);
        }
    }
}
