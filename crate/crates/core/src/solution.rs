//! Bicliques, their size measures, and the final balancing step.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipgraph::{BipartiteGraph, GraphError, Side, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BicliqueError {
    #[error("balance deviation {0} exceeds 2; make_balance only trims up to two vertices")]
    DeviationTooLarge(usize),
    #[error("vertex {vertex} is on the wrong side for set {set}")]
    WrongSide { vertex: VertexId, set: char },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A pair `(X, Y)` with `X` on the U side and `Y` on the V side.
///
/// Whether every cross pair is an edge is a property checked against a graph
/// with [`is_biclique`], not something this type enforces. Equality is set
/// equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Biclique {
    x: BTreeSet<VertexId>,
    y: BTreeSet<VertexId>,
}

impl Biclique {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a biclique, checking that every member sits on its set's side.
    pub fn from_sets<I, J>(g: &BipartiteGraph, x: I, y: J) -> Result<Self, BicliqueError>
    where
        I: IntoIterator<Item = VertexId>,
        J: IntoIterator<Item = VertexId>,
    {
        let x: BTreeSet<_> = x.into_iter().collect();
        let y: BTreeSet<_> = y.into_iter().collect();
        for &v in x.iter().chain(y.iter()) {
            if !g.contains(v) {
                return Err(GraphError::NoSuchVertex(v).into());
            }
        }
        if let Some(&vertex) = x.iter().find(|&&v| g.side(v) != Side::U) {
            return Err(BicliqueError::WrongSide { vertex, set: 'X' });
        }
        if let Some(&vertex) = y.iter().find(|&&v| g.side(v) != Side::V) {
            return Err(BicliqueError::WrongSide { vertex, set: 'Y' });
        }
        Ok(Biclique { x, y })
    }

    /// Unchecked constructor for callers that already know the sides.
    pub(crate) fn from_parts(x: BTreeSet<VertexId>, y: BTreeSet<VertexId>) -> Self {
        Biclique { x, y }
    }

    pub fn x(&self) -> &BTreeSet<VertexId> {
        &self.x
    }

    pub fn y(&self) -> &BTreeSet<VertexId> {
        &self.y
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.x.contains(&v) || self.y.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() && self.y.is_empty()
    }

    /// `min(|X|, |Y|)`, the objective value.
    pub fn balanced_size(&self) -> usize {
        self.x.len().min(self.y.len())
    }

    /// `||X| - |Y||`.
    pub fn balance_deviation(&self) -> usize {
        self.x.len().abs_diff(self.y.len())
    }

    /// Drops the largest ids of the larger set until the deviation is at
    /// most `k`. The balanced size is unchanged.
    pub fn trim_to_deviation(&mut self, k: usize) {
        while self.x.len() > self.y.len() + k {
            self.x.pop_last();
        }
        while self.y.len() > self.x.len() + k {
            self.y.pop_last();
        }
    }

    /// Applies `f` to every member, e.g. to translate subgraph ids back to
    /// the original graph.
    pub fn map_ids(&self, mut f: impl FnMut(VertexId) -> VertexId) -> Biclique {
        Biclique {
            x: self.x.iter().map(|&v| f(v)).collect(),
            y: self.y.iter().map(|&v| f(v)).collect(),
        }
    }
}

pub fn balanced_size(b: &Biclique) -> usize {
    b.balanced_size()
}

pub fn balance_deviation(b: &Biclique) -> usize {
    b.balance_deviation()
}

/// True iff every `(x, y)` in `X × Y` is an edge of `g`.
pub fn is_biclique(g: &BipartiteGraph, b: &Biclique) -> Result<bool, BicliqueError> {
    for &v in b.x.iter().chain(b.y.iter()) {
        if !g.contains(v) {
            return Err(GraphError::NoSuchVertex(v).into());
        }
        if !g.is_alive(v) {
            return Err(GraphError::DeadVertex(v).into());
        }
    }
    if b.x.iter().any(|&v| g.side(v) != Side::U) || b.y.iter().any(|&v| g.side(v) != Side::V) {
        return Ok(false);
    }
    Ok(b.x.iter().all(|&x| b.y.iter().all(|&y| g.has_edge(x, y))))
}

/// Strictly balanced copy of `b`, removing the largest ids of the larger set.
pub fn make_balance(b: &Biclique) -> Result<Biclique, BicliqueError> {
    let deviation = b.balance_deviation();
    if deviation > 2 {
        return Err(BicliqueError::DeviationTooLarge(deviation));
    }
    let mut out = b.clone();
    out.trim_to_deviation(0);
    Ok(out)
}
