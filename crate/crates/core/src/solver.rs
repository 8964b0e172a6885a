//! The restart loop: random construction, tabu search, and bound-driven
//! graph reduction until the time budget runs out or the bound is proven
//! optimal.
//!
//! After every restart the current bound `omega` is compared with the
//! minimum degree of the residual graph. When some vertex has degree at most
//! `omega` the graph is peeled and, depending on the reduction variant, small
//! components are solved exactly. The run stops with a proof as soon as one
//! side of the residual graph has at most `omega` vertices.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipgraph::{BipartiteGraph, Side, VertexId};
use crate::cbts::{SearchState, TabuParams, UnbalanceVariant};
use crate::reduce::{peel, reduce_by_exact};
use crate::solution::{make_balance, Biclique};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReductionVariant {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "peel")]
    Peel,
    #[default]
    #[serde(rename = "peel+exact")]
    PeelExact,
}

impl fmt::Display for ReductionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionVariant::None => "none",
            ReductionVariant::Peel => "peel",
            ReductionVariant::PeelExact => "peel+exact",
        })
    }
}

impl FromStr for ReductionVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ReductionVariant::None),
            "peel" => Ok(ReductionVariant::Peel),
            "peel+exact" => Ok(ReductionVariant::PeelExact),
            other => Err(format!(
                "unknown reduction variant `{other}` (expected none, peel or peel+exact)"
            )),
        }
    }
}

/// Durations as fractional seconds in serialized form.
pub(crate) mod serde_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Tabu search depth `L`.
    pub depth: usize,
    /// Tabu tenure coefficient.
    pub alpha: f64,
    /// Largest component (in vertices) handed to the exact search.
    pub k: usize,
    /// Time budget of each exact search.
    #[serde(with = "serde_secs")]
    pub exact_budget: Duration,
    /// Wall-clock budget of the whole run.
    #[serde(with = "serde_secs")]
    pub time_limit: Duration,
    pub max_restarts: Option<u64>,
    /// Stop as soon as the bound reaches this value.
    pub target: Option<usize>,
    pub unbalance: UnbalanceVariant,
    pub reduction: ReductionVariant,
    pub seed: u64,
}

impl SolverParams {
    /// Settings for dense random graphs: `L = 1000`, `alpha = 0.30`,
    /// `K = 100`, 30 s per run.
    pub fn dense() -> Self {
        SolverParams {
            depth: 1000,
            alpha: 0.30,
            k: 100,
            exact_budget: Duration::from_secs(10),
            time_limit: Duration::from_secs(30),
            max_restarts: None,
            target: None,
            unbalance: UnbalanceVariant::Bound2,
            reduction: ReductionVariant::PeelExact,
            seed: 0,
        }
    }

    /// Settings for large sparse networks: `L = 100`, `alpha = 1.74`,
    /// `K = 500`, 360 s per run.
    pub fn sparse() -> Self {
        SolverParams {
            depth: 100,
            alpha: 1.74,
            k: 500,
            time_limit: Duration::from_secs(360),
            ..SolverParams::dense()
        }
    }

    pub fn tabu(&self) -> TabuParams {
        TabuParams {
            depth: self.depth,
            alpha: self.alpha,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        self.tabu()
            .validate()
            .map_err(|e| SolveError::InvalidParams(e.to_string()))?;
        if self.k == 0 {
            return Err(SolveError::InvalidParams("K must be at least 1".into()));
        }
        if self.time_limit.is_zero() {
            return Err(SolveError::InvalidParams("time limit must be positive".into()));
        }
        Ok(())
    }
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams::dense()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("the graph has no alive vertex")]
    EmptyGraph,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Strictly balanced, in the ids of the input graph.
    pub best: Biclique,
    pub omega: usize,
    pub proven_optimal: bool,
    #[serde(with = "serde_secs")]
    pub time_to_best: Duration,
    #[serde(with = "serde_secs")]
    pub total_time: Duration,
    pub restarts: u64,
    pub removed_by_peel: usize,
    pub removed_by_exact: usize,
}

impl RunReport {
    /// Equality ignoring the wall-clock fields.
    pub fn same_outcome(&self, other: &RunReport) -> bool {
        self.best == other.best
            && self.omega == other.omega
            && self.proven_optimal == other.proven_optimal
            && self.restarts == other.restarts
            && self.removed_by_peel == other.removed_by_peel
            && self.removed_by_exact == other.removed_by_exact
    }
}

/// Random maximal-by-alternation biclique: start from a random alive vertex,
/// then alternately add a random vertex adjacent to every member of the
/// opposite set, until the set to extend has no candidate. The balance
/// deviation of the result is at most 1.
pub fn random_init_solution<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    rng: &mut R,
) -> Result<Biclique, SolveError> {
    let n = g.alive_count();
    if n == 0 {
        return Err(SolveError::EmptyGraph);
    }
    let seed = g.alive_vertex(rng.random_range(0..n));
    let mut own = vec![seed];
    let mut other: Vec<VertexId> = Vec::new();
    // candidates for `other`: common neighbors of `own`
    let mut other_cands: Vec<VertexId> = g.alive_neighbors(seed).collect();
    // candidates for `own`: common neighbors of `other`, minus `own`
    let mut own_cands: Vec<VertexId> = Vec::new();
    let mut extend_other = true;
    loop {
        let cands = if extend_other {
            &mut other_cands
        } else {
            &mut own_cands
        };
        if cands.is_empty() {
            break;
        }
        let picked = cands.remove(rng.random_range(0..cands.len()));
        if extend_other {
            if other.is_empty() {
                own_cands = g
                    .alive_neighbors(picked)
                    .filter(|v| !own.contains(v))
                    .collect();
            } else {
                own_cands = intersect_sorted(&own_cands, g.adjacency(picked));
            }
            other.push(picked);
        } else {
            other_cands = intersect_sorted(&other_cands, g.adjacency(picked));
            own.push(picked);
        }
        extend_other = !extend_other;
    }
    let (x, y) = if g.side(seed) == Side::U {
        (own, other)
    } else {
        (other, own)
    };
    Ok(Biclique::from_parts(
        x.into_iter().collect(),
        y.into_iter().collect(),
    ))
}

fn intersect_sorted(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    a.iter()
        .copied()
        .filter(|v| b.binary_search(v).is_ok())
        .collect()
}

/// Runs the full algorithm on a private copy of `g`.
pub fn solve(g: &BipartiteGraph, params: &SolverParams) -> Result<RunReport, SolveError> {
    params.validate()?;
    let start = Instant::now();
    let mut work = g.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut state = SearchState::new(&work);
    let tabu = params.tabu();

    let mut best = Biclique::empty();
    let mut omega = 0usize;
    let mut time_to_best = Duration::ZERO;
    let mut restarts = 0u64;
    let mut removed_by_peel = 0usize;
    let mut removed_by_exact = 0usize;
    let mut proven_optimal = false;
    // bound for which the residual graph is known to have min degree > bound
    let mut settled_for: Option<usize> = None;

    loop {
        if work.alive_on(Side::U) <= omega || work.alive_on(Side::V) <= omega {
            proven_optimal = true;
            break;
        }
        if start.elapsed() >= params.time_limit
            || params.max_restarts.is_some_and(|m| restarts >= m)
            || params.target.is_some_and(|t| omega >= t)
        {
            break;
        }

        let init = random_init_solution(&work, &mut rng)?;
        state
            .load(&work, &init)
            .expect("random construction yields a biclique of alive vertices");
        let found = state.run(&work, &tabu, params.unbalance, &mut rng);
        restarts += 1;
        if found.balanced_size() > omega {
            omega = found.balanced_size();
            best = found;
            time_to_best = start.elapsed();
        }

        if params.reduction == ReductionVariant::None {
            continue;
        }
        while settled_for != Some(omega) {
            match work.min_alive_degree() {
                Some(d) if omega >= d => {}
                _ => {
                    settled_for = Some(omega);
                    break;
                }
            }
            removed_by_peel += peel(&mut work, omega);
            if params.reduction == ReductionVariant::PeelExact {
                let r = reduce_by_exact(&mut work, omega, params.k, Some(params.exact_budget));
                removed_by_exact += r.removed;
                if let Some(b) = r.improved {
                    if b.balanced_size() > omega {
                        omega = b.balanced_size();
                        best = b;
                        time_to_best = start.elapsed();
                    }
                }
            }
        }
    }

    let best = make_balance(&best).expect("incumbents have deviation at most 2");
    debug_assert_eq!(best.balanced_size(), omega);
    Ok(RunReport {
        best,
        omega,
        proven_optimal,
        time_to_best,
        total_time: start.elapsed(),
        restarts,
        removed_by_peel,
        removed_by_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipgraph::tests::{figure_graph, t1};
    use crate::solution::is_biclique;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn init_on_figure_graph_is_a_biclique() {
        let g = figure_graph();
        let mut saw_example = false;
        let target =
            Biclique::from_sets(&g, [0, 1, 2].map(VertexId), [4, 5].map(VertexId)).unwrap();
        for seed in 0..500 {
            let b = random_init_solution(&g, &mut rng(seed)).unwrap();
            assert!(is_biclique(&g, &b).unwrap());
            assert!(b.balance_deviation() <= 1);
            saw_example |= b == target;
        }
        assert!(saw_example, "the worked example's outcome is reachable");
    }

    #[test]
    fn init_on_single_vertex() {
        let g = BipartiteGraph::new(1, 0, Vec::new()).unwrap();
        let b = random_init_solution(&g, &mut rng(1)).unwrap();
        assert_eq!(b.x().len(), 1);
        assert!(b.y().is_empty());
    }

    #[test]
    fn init_on_complete_graph_takes_everything() {
        let g = BipartiteGraph::new(3, 3, (0..3).flat_map(|i| (0..3).map(move |j| (i, j)))).unwrap();
        for seed in 0..50 {
            let b = random_init_solution(&g, &mut rng(seed)).unwrap();
            assert_eq!((b.x().len(), b.y().len()), (3, 3));
        }
    }

    #[test]
    fn init_on_empty_graph_fails() {
        let g = BipartiteGraph::new(0, 0, Vec::new()).unwrap();
        assert_eq!(random_init_solution(&g, &mut rng(1)), Err(SolveError::EmptyGraph));
    }

    #[test]
    fn solve_t1_proves_two() {
        let g = t1();
        let report = solve(&g, &SolverParams { seed: 11, ..SolverParams::dense() }).unwrap();
        assert_eq!(report.omega, 2);
        assert!(report.proven_optimal);
        assert_eq!(report.best.balance_deviation(), 0);
        assert!(is_biclique(&g, &report.best).unwrap());
        assert!(report.total_time < Duration::from_secs(1));
    }

    #[test]
    fn solve_without_reduction_cannot_prove() {
        let params = SolverParams {
            reduction: ReductionVariant::None,
            time_limit: Duration::from_millis(200),
            ..SolverParams::dense()
        };
        let report = solve(&t1(), &params).unwrap();
        assert_eq!(report.omega, 2);
        assert!(!report.proven_optimal);
        assert!(report.restarts > 1);
    }

    #[test]
    fn solve_empty_graph_is_trivially_optimal() {
        let g = BipartiteGraph::new(0, 0, Vec::new()).unwrap();
        let report = solve(&g, &SolverParams::dense()).unwrap();
        assert_eq!(report.omega, 0);
        assert!(report.proven_optimal);
        assert_eq!(report.restarts, 0);
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = SolverParams { k: 0, ..SolverParams::dense() };
        assert!(matches!(solve(&t1(), &bad), Err(SolveError::InvalidParams(_))));
        let bad = SolverParams { depth: 0, ..SolverParams::dense() };
        assert!(matches!(solve(&t1(), &bad), Err(SolveError::InvalidParams(_))));
        let bad = SolverParams { time_limit: Duration::ZERO, ..SolverParams::dense() };
        assert!(matches!(solve(&t1(), &bad), Err(SolveError::InvalidParams(_))));
    }

    #[test]
    fn profiles() {
        let d = SolverParams::dense();
        assert_eq!((d.depth, d.alpha, d.k), (1000, 0.30, 100));
        let s = SolverParams::sparse();
        assert_eq!((s.depth, s.alpha, s.k), (100, 1.74, 500));
        assert_eq!(s.exact_budget, Duration::from_secs(10));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [ReductionVariant::None, ReductionVariant::Peel, ReductionVariant::PeelExact] {
            assert_eq!(v.to_string().parse::<ReductionVariant>(), Ok(v));
        }
    }
}
