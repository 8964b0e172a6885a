//! Constraint-based tabu search over slightly unbalanced bicliques.
//!
//! The search walks through bicliques with the *push* move: a vertex from
//! the neighborhood of the current solution joins its side, and the members
//! of the other side that are not adjacent to it are expelled. Only pushes
//! that expel at most one vertex are considered. When the balance deviation
//! exceeds the variant's bound, random members of the larger side are
//! dropped until both sides have equal size.
//!
//! [`SearchState`] keeps, for every vertex, the number of its neighbors in
//! the opposite side of the solution (`conn`), which makes move evaluation
//! O(1) and candidate construction linear in the size of the frontier.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipgraph::{BipartiteGraph, IndexedSet, Side, VertexId};
use crate::solution::Biclique;

/// Floor of the tabu tenure.
pub const MIN_TENURE: u64 = 7;

/// Which balance deviation the search tolerates before repairing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnbalanceVariant {
    /// Repair when the deviation exceeds 2.
    #[default]
    #[serde(rename = "2")]
    Bound2,
    /// Repair when the deviation exceeds 1.
    #[serde(rename = "1")]
    Bound1,
    /// Never repair.
    #[serde(rename = "inf")]
    Unbounded,
}

impl UnbalanceVariant {
    pub fn bound(self) -> Option<usize> {
        match self {
            UnbalanceVariant::Bound2 => Some(2),
            UnbalanceVariant::Bound1 => Some(1),
            UnbalanceVariant::Unbounded => None,
        }
    }

    pub fn triggers(self, deviation: usize) -> bool {
        self.bound().is_some_and(|b| deviation > b)
    }
}

impl fmt::Display for UnbalanceVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnbalanceVariant::Bound2 => "2",
            UnbalanceVariant::Bound1 => "1",
            UnbalanceVariant::Unbounded => "inf",
        })
    }
}

impl FromStr for UnbalanceVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2" => Ok(UnbalanceVariant::Bound2),
            "1" => Ok(UnbalanceVariant::Bound1),
            "inf" | "infinity" => Ok(UnbalanceVariant::Unbounded),
            other => Err(format!("unknown unbalance variant `{other}` (expected 2, 1 or inf)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabuParams {
    /// Iterations per run (tabu search depth).
    pub depth: usize,
    /// Tabu tenure coefficient.
    pub alpha: f64,
}

impl TabuParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.depth == 0 {
            return Err(SearchError::InvalidParams("tabu depth must be at least 1".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(SearchError::InvalidParams(format!(
                "tenure coefficient must be a finite non-negative number, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("vertex {0} is already in the solution")]
    InSolution(VertexId),
    #[error("vertex {0} is not in the neighborhood of the solution")]
    NotInFrontier(VertexId),
    #[error("vertex {0} is not an alive vertex of the graph")]
    NotAlive(VertexId),
    #[error("starting solution is not a biclique of the graph")]
    NotABiclique,
    #[error("repair requested at deviation {deviation}, which variant {variant} tolerates")]
    RepairNotTriggered {
        deviation: usize,
        variant: UnbalanceVariant,
    },
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
}

/// `max(7, floor(alpha * r))` with `r` drawn uniformly from `0..=l`.
pub fn tabu_tenure<R: Rng + ?Sized>(alpha: f64, l: usize, rng: &mut R) -> u64 {
    let r = rng.random_range(0..=l as u64);
    let scaled = (alpha * r as f64).floor() as u64;
    scaled.max(MIN_TENURE)
}

/// What one iteration did.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepOutcome {
    pub pushed: Option<VertexId>,
    pub expelled: Vec<VertexId>,
    pub dropped: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct SearchState {
    /// `members[0]` is X (U side), `members[1]` is Y (V side).
    members: [IndexedSet; 2],
    conn: Vec<u32>,
    frontier: IndexedSet,
    /// Absolute iteration number until which each vertex is tabu.
    tabu: Vec<u64>,
    /// Absolute iteration number of local iteration 0 in the current run.
    epoch: u64,
    /// Largest tabu value ever written; the next run starts past it.
    tabu_horizon: u64,
    iter: u64,
    best: Biclique,
    best_size: usize,
    mark: Vec<u32>,
    stamp: u32,
    expand: Vec<VertexId>,
    plateau: Vec<VertexId>,
}

#[inline]
fn slot(side: Side) -> usize {
    match side {
        Side::U => 0,
        Side::V => 1,
    }
}

impl SearchState {
    /// Empty state sized for `g`.
    pub fn new(g: &BipartiteGraph) -> Self {
        let n = g.len();
        SearchState {
            members: [IndexedSet::with_universe(n), IndexedSet::with_universe(n)],
            conn: vec![0; n],
            frontier: IndexedSet::with_universe(n),
            tabu: vec![0; n],
            epoch: 0,
            tabu_horizon: 0,
            iter: 0,
            best: Biclique::empty(),
            best_size: 0,
            mark: vec![0; n],
            stamp: 0,
            expand: Vec::new(),
            plateau: Vec::new(),
        }
    }

    /// Resets the state to `start` with a fresh tabu table and iteration
    /// counter. Cost is proportional to the degrees of the old and new
    /// members, not to the graph size, so the graph may lose vertices
    /// between runs. Counters are kept over the full adjacency; since members
    /// are always alive this equals the alive count for every alive vertex.
    pub fn load(&mut self, g: &BipartiteGraph, start: &Biclique) -> Result<(), SearchError> {
        for &v in start.x().iter().chain(start.y().iter()) {
            if !g.is_alive(v) || v.index() >= self.conn.len() {
                return Err(SearchError::NotAlive(v));
            }
        }
        if start.x().iter().any(|&v| g.side(v) != Side::U)
            || start.y().iter().any(|&v| g.side(v) != Side::V)
        {
            return Err(SearchError::NotABiclique);
        }
        for side in [Side::U, Side::V] {
            while !self.members[slot(side)].is_empty() {
                let v = self.members[slot(side)].get(0);
                self.remove_member(g, v);
            }
        }
        debug_assert!(self.frontier.is_empty());
        for &v in start.x().iter().chain(start.y().iter()) {
            self.add_member(g, v);
        }
        if !self.is_biclique_now() {
            self.load(g, &Biclique::empty())?;
            return Err(SearchError::NotABiclique);
        }
        self.epoch = self.tabu_horizon + 1;
        self.iter = 0;
        self.best = start.clone();
        self.best_size = start.balanced_size();
        Ok(())
    }

    /// Every X member sees all of Y.
    fn is_biclique_now(&self) -> bool {
        let y_len = self.members[1].len() as u32;
        self.members[0]
            .as_slice()
            .iter()
            .all(|&x| self.conn[x.index()] == y_len)
    }

    #[inline]
    fn now(&self) -> u64 {
        self.epoch + self.iter
    }

    #[inline]
    fn in_solution(&self, g: &BipartiteGraph, v: VertexId) -> bool {
        self.members[slot(g.side(v))].contains(v)
    }

    fn add_member(&mut self, g: &BipartiteGraph, v: VertexId) {
        self.members[slot(g.side(v))].insert(v);
        self.frontier.remove(v);
        for &w in g.adjacency(v) {
            self.conn[w.index()] += 1;
            if g.is_alive(w) && !self.members[slot(g.side(w))].contains(w) {
                self.frontier.insert(w);
            }
        }
    }

    fn remove_member(&mut self, g: &BipartiteGraph, v: VertexId) {
        self.members[slot(g.side(v))].remove(v);
        for &w in g.adjacency(v) {
            self.conn[w.index()] -= 1;
            if self.conn[w.index()] == 0 && !self.members[slot(g.side(w))].contains(w) {
                self.frontier.remove(w);
            }
        }
        if self.conn[v.index()] > 0 && g.is_alive(v) {
            self.frontier.insert(v);
        }
    }

    pub fn x_len(&self) -> usize {
        self.members[0].len()
    }

    pub fn y_len(&self) -> usize {
        self.members[1].len()
    }

    pub fn balanced_size(&self) -> usize {
        self.x_len().min(self.y_len())
    }

    pub fn balance_deviation(&self) -> usize {
        self.x_len().abs_diff(self.y_len())
    }

    /// Snapshot of the current solution.
    pub fn solution(&self) -> Biclique {
        Biclique::from_parts(
            self.members[0].as_slice().iter().copied().collect(),
            self.members[1].as_slice().iter().copied().collect(),
        )
    }

    /// Best solution of the current run.
    pub fn best(&self) -> &Biclique {
        &self.best
    }

    /// Iteration counter of the current run.
    pub fn iteration(&self) -> u64 {
        self.iter
    }

    /// `N(X ∪ Y)`, in unspecified order.
    pub fn frontier(&self) -> &[VertexId] {
        self.frontier.as_slice()
    }

    pub fn in_frontier(&self, v: VertexId) -> bool {
        self.frontier.contains(v)
    }

    /// Number of neighbors of `v` in the opposite side of the solution.
    pub fn connections(&self, v: VertexId) -> usize {
        self.conn[v.index()] as usize
    }

    pub fn is_tabu(&self, v: VertexId) -> bool {
        self.tabu[v.index()] > self.now()
    }

    /// Forbids `v` for the next `tenure` iterations.
    pub fn mark_tabu(&mut self, v: VertexId, tenure: u64) {
        let until = self.now() + tenure;
        self.tabu[v.index()] = until;
        self.tabu_horizon = self.tabu_horizon.max(until);
    }

    /// Change of the balanced size caused by pushing `v`.
    pub fn delta(&self, g: &BipartiteGraph, v: VertexId) -> Result<i64, SearchError> {
        if !g.is_alive(v) {
            return Err(SearchError::NotAlive(v));
        }
        if self.in_solution(g, v) {
            return Err(SearchError::InSolution(v));
        }
        Ok(self.delta_unchecked(g, v))
    }

    #[inline]
    fn delta_unchecked(&self, g: &BipartiteGraph, v: VertexId) -> i64 {
        let side = g.side(v);
        let own = self.members[slot(side)].len() as i64;
        let other = self.members[slot(side.other())].len() as i64;
        let lost = other - self.conn[v.index()] as i64;
        if own > other {
            -lost
        } else {
            (other - own - lost).min(1)
        }
    }

    /// Applies the push move and returns the expelled vertices.
    pub fn push(&mut self, g: &BipartiteGraph, v: VertexId) -> Result<Vec<VertexId>, SearchError> {
        if !g.is_alive(v) {
            return Err(SearchError::NotAlive(v));
        }
        if !self.frontier.contains(v) {
            return Err(SearchError::NotInFrontier(v));
        }
        Ok(self.push_unchecked(g, v))
    }

    fn push_unchecked(&mut self, g: &BipartiteGraph, v: VertexId) -> Vec<VertexId> {
        let opposite = slot(g.side(v).other());
        let mut expelled = Vec::new();
        if (self.conn[v.index()] as usize) < self.members[opposite].len() {
            self.stamp = self.stamp.wrapping_add(1);
            if self.stamp == 0 {
                self.mark.iter_mut().for_each(|m| *m = 0);
                self.stamp = 1;
            }
            for &w in g.adjacency(v) {
                self.mark[w.index()] = self.stamp;
            }
            expelled.extend(
                self.members[opposite]
                    .as_slice()
                    .iter()
                    .copied()
                    .filter(|w| self.mark[w.index()] != self.stamp),
            );
            for &w in &expelled {
                self.remove_member(g, w);
            }
        }
        self.add_member(g, v);
        expelled
    }

    /// Restricted candidates split into improving and sideways moves, after
    /// tabu filtering (with aspiration for improving moves).
    pub fn build_candidates(&self, g: &BipartiteGraph) -> (Vec<VertexId>, Vec<VertexId>) {
        let mut expand = Vec::new();
        let mut plateau = Vec::new();
        self.collect_candidates(g, &mut expand, &mut plateau);
        (expand, plateau)
    }

    fn collect_candidates(
        &self,
        g: &BipartiteGraph,
        expand: &mut Vec<VertexId>,
        plateau: &mut Vec<VertexId>,
    ) {
        expand.clear();
        plateau.clear();
        let now = self.now();
        let aspiration = self.balanced_size() + 1 > self.best_size;
        for &v in self.frontier.as_slice() {
            let other = self.members[slot(g.side(v).other())].len();
            if (self.conn[v.index()] as usize) + 1 < other {
                continue;
            }
            let free = self.tabu[v.index()] <= now;
            match self.delta_unchecked(g, v) {
                d if d >= 1 => {
                    if free || aspiration {
                        expand.push(v);
                    }
                }
                0 if free => plateau.push(v),
                _ => {}
            }
        }
    }

    /// Earliest absolute iteration at which a restricted candidate with
    /// `delta >= 0` stops being tabu, or `None` if there is no such
    /// candidate at all.
    fn next_unblock(&self, g: &BipartiteGraph) -> Option<u64> {
        self.frontier
            .as_slice()
            .iter()
            .filter(|&&v| {
                let other = self.members[slot(g.side(v).other())].len();
                (self.conn[v.index()] as usize) + 1 >= other && self.delta_unchecked(g, v) >= 0
            })
            .map(|&v| self.tabu[v.index()])
            .min()
    }

    fn drop_member<R: Rng + ?Sized>(
        &mut self,
        g: &BipartiteGraph,
        side: Side,
        alpha: f64,
        rng: &mut R,
    ) -> VertexId {
        let set = &self.members[slot(side)];
        let u = set.get(rng.random_range(0..set.len()));
        self.remove_member(g, u);
        let tenure = tabu_tenure(alpha, self.members[slot(side)].len(), rng);
        self.mark_tabu(u, tenure);
        u
    }

    /// Drops random members of the larger side until `|X| = |Y|`.
    pub fn repair<R: Rng + ?Sized>(
        &mut self,
        g: &BipartiteGraph,
        variant: UnbalanceVariant,
        alpha: f64,
        rng: &mut R,
    ) -> Result<Vec<VertexId>, SearchError> {
        let deviation = self.balance_deviation();
        if !variant.triggers(deviation) {
            return Err(SearchError::RepairNotTriggered { deviation, variant });
        }
        let mut dropped = Vec::with_capacity(deviation);
        while self.x_len() > self.y_len() {
            dropped.push(self.drop_member(g, Side::U, alpha, rng));
        }
        while self.x_len() < self.y_len() {
            dropped.push(self.drop_member(g, Side::V, alpha, rng));
        }
        Ok(dropped)
    }

    /// One iteration: choose and apply a push, assign tenures to the
    /// expelled vertices, repair if needed, update the best solution.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        g: &BipartiteGraph,
        params: &TabuParams,
        variant: UnbalanceVariant,
        rng: &mut R,
    ) -> StepOutcome {
        let mut expand = std::mem::take(&mut self.expand);
        let mut plateau = std::mem::take(&mut self.plateau);
        self.collect_candidates(g, &mut expand, &mut plateau);
        let chosen = if !expand.is_empty() {
            Some(expand[rng.random_range(0..expand.len())])
        } else if !plateau.is_empty() {
            Some(plateau[rng.random_range(0..plateau.len())])
        } else {
            None
        };
        self.expand = expand;
        self.plateau = plateau;

        let mut outcome = StepOutcome {
            pushed: chosen,
            ..StepOutcome::default()
        };
        if let Some(v) = chosen {
            outcome.expelled = self.push_unchecked(g, v);
            for &u in &outcome.expelled {
                let former = self.members[slot(g.side(u))].len();
                let tenure = tabu_tenure(params.alpha, former, rng);
                self.mark_tabu(u, tenure);
            }
        }
        if variant.triggers(self.balance_deviation()) {
            outcome.dropped = self
                .repair(g, variant, params.alpha, rng)
                .expect("repair is triggered");
        }
        if self.balanced_size() > self.best_size {
            self.best = self.solution();
            self.best_size = self.best.balanced_size();
        }
        self.iter += 1;
        outcome
    }

    /// Runs `params.depth` iterations from the loaded solution and returns
    /// the best biclique seen, trimmed to a deviation of at most 2.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        g: &BipartiteGraph,
        params: &TabuParams,
        variant: UnbalanceVariant,
        rng: &mut R,
    ) -> Biclique {
        let depth = params.depth as u64;
        while self.iter < depth {
            let outcome = self.step(g, params, variant, rng);
            if outcome.pushed.is_none() && outcome.dropped.is_empty() {
                // Nothing changes until a blocked candidate leaves the tabu
                // list, so the idle iterations in between are skipped.
                let resume = match self.next_unblock(g) {
                    Some(t) => t.saturating_sub(self.epoch).min(depth),
                    None => depth,
                };
                self.iter = self.iter.max(resume);
            }
        }
        let mut best = self.best.clone();
        best.trim_to_deviation(2);
        best
    }

    /// Recomputes the counters and the frontier from scratch and compares
    /// them with the incremental values.
    pub fn verify_counters(&self, g: &BipartiteGraph) -> bool {
        for &v in g.alive_vertices() {
            let other = slot(g.side(v).other());
            let expected = g
                .alive_neighbors(v)
                .filter(|&w| self.members[other].contains(w))
                .count();
            if expected != self.conn[v.index()] as usize {
                return false;
            }
            let in_frontier = !self.in_solution(g, v) && expected > 0;
            if in_frontier != self.frontier.contains(v) {
                return false;
            }
        }
        true
    }
}

/// Improves `start` with one tabu search run of `params.depth` iterations.
pub fn cbts_improve<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    start: &Biclique,
    params: &TabuParams,
    variant: UnbalanceVariant,
    rng: &mut R,
) -> Result<Biclique, SearchError> {
    params.validate()?;
    let mut state = SearchState::new(g);
    state.load(g, start)?;
    Ok(state.run(g, params, variant, rng))
}
