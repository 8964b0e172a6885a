//! Graph reductions driven by the current lower bound `omega`.
//!
//! A vertex of degree at most `omega` cannot belong to a balanced biclique of
//! size `omega + 1` (every member of such a biclique has at least `omega + 1`
//! neighbors inside it), so [`peel`] removes such vertices until none is
//! left. [`reduce_by_exact`] then solves small connected components exactly
//! and deletes those it settles.

use std::collections::VecDeque;
use std::time::Duration;

use crate::bipgraph::{BipartiteGraph, VertexId};
use crate::exact::exact_search;
use crate::solution::Biclique;

/// Removes every vertex whose live degree is at most `omega`, cascading
/// until the residual graph has minimum degree above `omega`. Returns the
/// number of vertices removed.
pub fn peel(g: &mut BipartiteGraph, omega: usize) -> usize {
    let mut queued = vec![false; g.len()];
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    for &v in g.alive_vertices() {
        if g.live_degree(v) <= omega {
            queued[v.index()] = true;
            queue.push_back(v);
        }
    }
    queue.make_contiguous().sort_unstable();
    let mut removed = 0;
    while let Some(v) = queue.pop_front() {
        g.remove_vertex(v).expect("queued vertices are alive");
        removed += 1;
        for &w in g.adjacency(v) {
            if g.is_alive(w) && !queued[w.index()] && g.live_degree(w) <= omega {
                queued[w.index()] = true;
                queue.push_back(w);
            }
        }
    }
    removed
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactReduction {
    /// Vertices deleted because their component was solved to optimality.
    pub removed: usize,
    /// Best biclique above the incoming `omega`, in the ids of `g`.
    pub improved: Option<Biclique>,
    /// Components handed to the exact search.
    pub searched: usize,
    /// Components whose search ran out of time.
    pub timed_out: usize,
}

/// Solves every connected component with at most `k` vertices exactly,
/// smallest first. Improvements raise the running bound before the next
/// component is searched. Solved components are removed from `g`; timed-out
/// ones stay.
pub fn reduce_by_exact(
    g: &mut BipartiteGraph,
    omega: usize,
    k: usize,
    budget: Option<Duration>,
) -> ExactReduction {
    let mut components: Vec<Vec<VertexId>> = g
        .connected_components()
        .into_iter()
        .filter(|c| c.len() <= k)
        .collect();
    components.sort_by_key(|c| (c.len(), c[0]));

    let mut out = ExactReduction::default();
    let mut bound = omega;
    for component in components {
        let (sub, map) = g
            .induced_subgraph(&component)
            .expect("components contain alive vertices only");
        let result = exact_search(&sub, bound, budget).expect("induced subgraphs are compact");
        out.searched += 1;
        if let Some(found) = result.improved {
            let found = found.map_ids(|v| map[v.index()]);
            bound = found.balanced_size();
            out.improved = Some(found);
        }
        if result.proven_optimal {
            for &v in &component {
                g.remove_vertex(v).expect("component vertices are alive");
            }
            out.removed += component.len();
        } else {
            out.timed_out += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipgraph::tests::t1;
    use crate::solution::is_biclique;

    fn two_t1() -> BipartiteGraph {
        let mut edges = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if !(i == 2 && j == 2) {
                    edges.push((i, j));
                    edges.push((i + 3, j + 3));
                }
            }
        }
        BipartiteGraph::new(6, 6, edges).unwrap()
    }

    #[test]
    fn peel_t1_at_two_empties_it() {
        let mut g = t1();
        assert_eq!(peel(&mut g, 2), 6);
        assert_eq!(g.alive_count(), 0);
    }

    #[test]
    fn peel_t1_at_one_keeps_everything() {
        let mut g = t1();
        assert_eq!(peel(&mut g, 1), 0);
        assert_eq!(g.alive_count(), 6);
    }

    #[test]
    fn peel_at_zero_removes_isolated_only() {
        let mut g = BipartiteGraph::new(3, 2, vec![(0, 0), (1, 0)]).unwrap();
        assert_eq!(peel(&mut g, 0), 2);
        assert!(!g.is_alive(g.u(2)) && !g.is_alive(g.v(1)));
        assert_eq!(g.alive_count(), 3);
    }

    #[test]
    fn peel_is_idempotent() {
        let mut g = BipartiteGraph::new(4, 4, vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 3), (2, 3)]).unwrap();
        let first = peel(&mut g, 1);
        assert_eq!(first, 4);
        assert_eq!(peel(&mut g, 1), 0);
        assert!(g.min_alive_degree().is_none_or(|d| d > 1));
    }

    #[test]
    fn exact_reduction_solves_both_copies() {
        let mut g = two_t1();
        let r = reduce_by_exact(&mut g, 0, 10, None);
        assert_eq!(r.removed, 12);
        let b = r.improved.unwrap();
        assert_eq!(b.balanced_size(), 2);
        assert!(is_biclique(&two_t1(), &b).unwrap());
        assert_eq!(g.alive_count(), 0);
    }

    #[test]
    fn exact_reduction_respects_threshold() {
        let mut g = t1();
        let r = reduce_by_exact(&mut g, 0, 5, None);
        assert_eq!(r, ExactReduction::default());
        assert_eq!(g.alive_count(), 6);
    }

    #[test]
    fn exact_reduction_at_optimum_removes_without_improving() {
        let mut g = t1();
        let r = reduce_by_exact(&mut g, 2, 10, None);
        assert_eq!(r.removed, 6);
        assert!(r.improved.is_none());
    }

    #[test]
    fn timed_out_component_stays() {
        let mut g = t1();
        let r = reduce_by_exact(&mut g, 0, 10, Some(Duration::ZERO));
        assert_eq!((r.removed, r.timed_out), (0, 1));
        assert_eq!(g.alive_count(), 6);
    }
}
