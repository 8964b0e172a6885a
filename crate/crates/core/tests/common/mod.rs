//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use mbbp::{BipartiteGraph, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximum balanced size by enumerating every pair of subsets `X ⊆ U`,
/// `Y ⊆ V` of alive vertices. Only for tiny graphs.
pub fn brute_force_optimum(g: &BipartiteGraph) -> usize {
    let us: Vec<VertexId> = (0..g.n_u()).map(|i| g.u(i)).filter(|&v| g.is_alive(v)).collect();
    let vs: Vec<VertexId> = (0..g.n_v()).map(|j| g.v(j)).filter(|&v| g.is_alive(v)).collect();
    assert!(us.len() <= 12 && vs.len() <= 12, "oracle is exponential");
    // adjacency as bitmasks over the alive V list
    let masks: Vec<u32> = us
        .iter()
        .map(|&u| {
            vs.iter()
                .enumerate()
                .filter(|&(_, &v)| g.has_edge(u, v))
                .fold(0u32, |m, (j, _)| m | (1 << j))
        })
        .collect();
    let mut best = 0;
    for x in 0u32..(1 << us.len()) {
        for y in 0u32..(1 << vs.len()) {
            let size = x.count_ones().min(y.count_ones()) as usize;
            if size <= best {
                continue;
            }
            let complete = (0..us.len()).all(|i| x & (1 << i) == 0 || masks[i] & y == y);
            if complete {
                best = size;
            }
        }
    }
    best
}

pub struct CorpusGraph {
    pub graph: BipartiteGraph,
    pub density: f64,
    pub optimum: usize,
}

/// `per_density` graphs for each density in {0.2, 0.5, 0.8}, with side
/// sizes drawn from `1..=7`.
pub fn small_corpus(per_density: usize, seed: u64) -> Vec<CorpusGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for density in [0.2, 0.5, 0.8] {
        for _ in 0..per_density {
            let (a, b) = (rng.random_range(1..=7), rng.random_range(1..=7));
            let g = random_graph(&mut rng, a, b, density);
            let optimum = brute_force_optimum(&g);
            out.push(CorpusGraph { graph: g, density, optimum });
        }
    }
    out
}

pub fn random_graph<R: Rng>(rng: &mut R, n_u: usize, n_v: usize, p: f64) -> BipartiteGraph {
    let mut edges = Vec::new();
    for i in 0..n_u {
        for j in 0..n_v {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    BipartiteGraph::new(n_u, n_v, edges).unwrap()
}

/// Disjoint union of `parts` sparse blocks with `20..=60` vertices per side
/// and edge probability 0.08, each containing a planted `K_{s,s}` with `s`
/// in `3..=6`. Returns the graph and the largest planted `s`.
pub fn planted_union(parts: usize, seed: u64) -> (BipartiteGraph, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let (mut off_u, mut off_v) = (0, 0);
    let mut largest = 0;
    for _ in 0..parts {
        let (a, b) = (rng.random_range(20..=60), rng.random_range(20..=60));
        for i in 0..a {
            for j in 0..b {
                if rng.random_bool(0.08) {
                    edges.push((off_u + i, off_v + j));
                }
            }
        }
        let s: usize = rng.random_range(3..=6);
        largest = largest.max(s);
        let xs: Vec<usize> = rand::seq::index::sample(&mut rng, a, s).into_vec();
        let ys: Vec<usize> = rand::seq::index::sample(&mut rng, b, s).into_vec();
        for &i in &xs {
            for &j in &ys {
                edges.push((off_u + i, off_v + j));
            }
        }
        off_u += a;
        off_v += b;
    }
    (BipartiteGraph::new(off_u, off_v, edges).unwrap(), largest)
}
