//! Fixtures shared by the benchmarks.

use mbbp::{gen_random, BipartiteGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense uniform instance, as in the random benchmark set.
pub fn dense(n: usize, p: f64, id: u64) -> BipartiteGraph {
    gen_random(n, p, id).expect("valid generator parameters")
}

/// Disjoint union of `parts` sparse blocks of `side x side` vertices with
/// edge probability `p`, each hiding a planted `K_{s,s}` with `s` in 3..=6.
pub fn planted(parts: usize, side: usize, p: f64, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for k in 0..parts {
        let base = k * side;
        for i in 0..side {
            for j in 0..side {
                if rng.random_bool(p) {
                    edges.push((base + i, base + j));
                }
            }
        }
        let s = rng.random_range(3..=6usize).min(side);
        for i in 0..s {
            for j in 0..s {
                edges.push((base + i, base + j));
            }
        }
    }
    BipartiteGraph::new(parts * side, parts * side, edges).expect("edges in range")
}
