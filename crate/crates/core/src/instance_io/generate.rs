//! Uniform random bipartite graphs.
//!
//! The generator is fixed so that instances can be reproduced anywhere:
//! a ChaCha8 stream (`rand_chacha`, `seed_from_u64(seed)`) draws one 64-bit
//! word per pair in row-major order `(u_0, v_0), (u_0, v_1), ...`; the pair
//! is an edge iff `(word >> 11) * 2^-53 < p`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{InstanceMeta, IoError, Source};
use crate::bipgraph::BipartiteGraph;

/// `n x n` bipartite graph with every pair adjacent independently with
/// probability `p`.
pub fn gen_random(n: usize, p: f64, seed: u64) -> Result<BipartiteGraph, IoError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(IoError::InvalidParams(format!("p must lie in (0, 1), got {p}")));
    }
    if n == 0 {
        return Err(IoError::InvalidParams("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity((n as f64 * n as f64 * p) as usize);
    for i in 0..n {
        for j in 0..n {
            let draw = (rng.next_u64() >> 11) as f64 * f64::powi(2.0, -53);
            if draw < p {
                edges.push((i, j));
            }
        }
    }
    Ok(BipartiteGraph::new(n, n, edges)?)
}

/// The generated instance `G_<n>_<p>_<id>`, seeded with `id`.
pub fn generated_instance(
    n: usize,
    p: f64,
    id: u64,
) -> Result<(BipartiteGraph, InstanceMeta), IoError> {
    let g = gen_random(n, p, id)?;
    let meta = InstanceMeta::describe(&g, format!("G_{n}_{p}_{id}"), Source::Generated);
    Ok((g, meta))
}
