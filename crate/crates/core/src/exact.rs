//! Branch-and-bound search for a maximum balanced biclique, seeded with a
//! lower bound.
//!
//! The search grows two sets `A` and `B` alternately from the two sides, with
//! `|A| = |B|` or `|A| + 1 = |B|` on entry to every node, so `|A|` is always
//! the balanced size of `(A, B)`. `C_A` and `C_B` hold the vertices adjacent
//! to every member of the opposite set. A node is cut when
//! `|A| + |C_A| <= lb`. Branching takes the smallest id of `C_A`.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bipgraph::{BipartiteGraph, Side, VertexId};
use crate::solution::Biclique;

/// The deadline is consulted on the first node and then every this many.
const CLOCK_INTERVAL: u64 = 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("exact search needs a compact graph, but {0} vertices have been removed")]
    NotCompact(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactOutcome {
    /// Best biclique strictly better than the seed bound, if one was found.
    pub improved: Option<Biclique>,
    /// False iff the budget ran out before the search tree was exhausted.
    pub proven_optimal: bool,
    /// Number of search nodes visited.
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct ExactOptions {
    pub budget: Option<Duration>,
    /// Disabling the bound turns the search into plain enumeration; only
    /// useful for testing the bound itself.
    pub prune: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            budget: None,
            prune: true,
        }
    }
}

/// Searches `g` for a biclique of balanced size greater than `lb`.
/// `budget = None` means no time limit.
pub fn exact_search(
    g: &BipartiteGraph,
    lb: usize,
    budget: Option<Duration>,
) -> Result<ExactOutcome, ExactError> {
    exact_search_with(
        g,
        lb,
        ExactOptions {
            budget,
            ..ExactOptions::default()
        },
    )
}

pub fn exact_search_with(
    g: &BipartiteGraph,
    lb: usize,
    options: ExactOptions,
) -> Result<ExactOutcome, ExactError> {
    if !g.is_compact() {
        return Err(ExactError::NotCompact(g.len() - g.alive_count()));
    }
    let start = Instant::now();
    let mut search = BranchAndBound {
        g,
        lb,
        best: None,
        nodes: 0,
        deadline: options.budget.map(|b| (start, b)),
        expired: false,
        prune: options.prune,
    };
    let c_a: Vec<VertexId> = (0..g.n_u()).map(|i| g.u(i)).collect();
    let c_b: Vec<VertexId> = (0..g.n_v()).map(|j| g.v(j)).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    search.expand(&mut a, &mut b, &c_a, &c_b);

    let improved = search.best.map(|(a, b)| {
        let (x, y) = if a.first().is_some_and(|&v| g.side(v) == Side::U)
            || b.first().is_some_and(|&v| g.side(v) == Side::V)
        {
            (a, b)
        } else {
            (b, a)
        };
        Biclique::from_parts(x.into_iter().collect(), y.into_iter().collect())
    });
    Ok(ExactOutcome {
        improved,
        proven_optimal: !search.expired,
        nodes: search.nodes,
    })
}

struct BranchAndBound<'g> {
    g: &'g BipartiteGraph,
    lb: usize,
    best: Option<(Vec<VertexId>, Vec<VertexId>)>,
    nodes: u64,
    deadline: Option<(Instant, Duration)>,
    expired: bool,
    prune: bool,
}

impl BranchAndBound<'_> {
    fn expand(
        &mut self,
        a: &mut Vec<VertexId>,
        b: &mut Vec<VertexId>,
        c_a: &[VertexId],
        c_b: &[VertexId],
    ) {
        self.nodes += 1;
        if self.nodes % CLOCK_INTERVAL == 1 {
            if let Some((start, budget)) = self.deadline {
                if start.elapsed() >= budget {
                    self.expired = true;
                }
            }
        }
        if self.expired {
            return;
        }
        if c_a.is_empty() {
            if a.len() > self.lb {
                self.lb = a.len();
                self.best = Some((a.clone(), b.clone()));
            }
            return;
        }
        for (k, &i) in c_a.iter().enumerate() {
            let rest = &c_a[k + 1..];
            // remaining candidates, including i itself
            if self.prune && a.len() + rest.len() + 1 <= self.lb {
                return;
            }
            let c_b_i = intersect(c_b, self.g.adjacency(i));
            a.push(i);
            if a.len() <= b.len() {
                self.expand(a, b, rest, &c_b_i);
            } else {
                self.expand(b, a, &c_b_i, rest);
            }
            a.pop();
            if self.expired {
                return;
            }
        }
    }
}

/// Merge intersection of two ascending lists.
fn intersect(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
