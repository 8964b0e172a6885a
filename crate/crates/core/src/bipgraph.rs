//! Mutable bipartite graph with vertex removal.
//!
//! Vertices share one contiguous id space: ids `0..n_u` are the U side and
//! ids `n_u..n_u + n_v` are the V side. Removal flips an alive flag and keeps
//! per-vertex live degrees current, so ids stay stable for the lifetime of the
//! graph. Compaction only happens through [`BipartiteGraph::induced_subgraph`].

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Global vertex identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::U => Side::V,
            Side::V => Side::U,
        }
    }

    #[inline]
    fn slot(self) -> usize {
        match self {
            Side::U => 0,
            Side::V => 1,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge #{index} ({u}, {v}) is out of range for a graph with |U| = {n_u}, |V| = {n_v}")]
    EdgeOutOfRange {
        index: usize,
        u: usize,
        v: usize,
        n_u: usize,
        n_v: usize,
    },
    #[error("vertex {0} does not exist")]
    NoSuchVertex(VertexId),
    #[error("vertex {0} has been removed")]
    DeadVertex(VertexId),
    #[error("graph has {0} vertices, more than the id space allows")]
    TooLarge(usize),
}

/// Dense set of vertex ids with O(1) insert, remove and uniform sampling.
#[derive(Clone, Debug, Default)]
pub(crate) struct IndexedSet {
    items: Vec<VertexId>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl IndexedSet {
    pub(crate) fn with_universe(n: usize) -> Self {
        IndexedSet {
            items: Vec::new(),
            pos: vec![ABSENT; n],
        }
    }

    #[inline]
    pub(crate) fn contains(&self, v: VertexId) -> bool {
        self.pos[v.index()] != ABSENT
    }

    #[inline]
    pub(crate) fn insert(&mut self, v: VertexId) -> bool {
        if self.contains(v) {
            return false;
        }
        self.pos[v.index()] = self.items.len() as u32;
        self.items.push(v);
        true
    }

    #[inline]
    pub(crate) fn remove(&mut self, v: VertexId) -> bool {
        let p = self.pos[v.index()];
        if p == ABSENT {
            return false;
        }
        let last = *self.items.last().expect("non-empty when an item is present");
        self.items.swap_remove(p as usize);
        if last != v {
            self.pos[last.index()] = p;
        }
        self.pos[v.index()] = ABSENT;
        true
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub(crate) fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    #[inline]
    pub(crate) fn as_slice(&self) -> &[VertexId] {
        &self.items
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> VertexId {
        self.items[i]
    }
}

#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    n_u: usize,
    n_v: usize,
    adjacency: Vec<Vec<VertexId>>,
    alive: Vec<bool>,
    live_degree: Vec<u32>,
    alive_per_side: [usize; 2],
    alive_set: IndexedSet,
    edge_count: usize,
}

impl BipartiteGraph {
    /// Builds a graph from side-local edge endpoints: `(i, j)` joins the
    /// `i`-th U vertex to the `j`-th V vertex. Duplicate edges are collapsed.
    pub fn new<I>(n_u: usize, n_v: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = n_u + n_v;
        if n >= u32::MAX as usize {
            return Err(GraphError::TooLarge(n));
        }
        let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (index, (u, v)) in edges.into_iter().enumerate() {
            if u >= n_u || v >= n_v {
                return Err(GraphError::EdgeOutOfRange {
                    index,
                    u,
                    v,
                    n_u,
                    n_v,
                });
            }
            let vu = VertexId(u as u32);
            let vv = VertexId((n_u + v) as u32);
            adjacency[vu.index()].push(vv);
            adjacency[vv.index()].push(vu);
        }
        let mut edge_count = 0;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        for list in &adjacency[..n_u] {
            edge_count += list.len();
        }
        let live_degree = adjacency.iter().map(|l| l.len() as u32).collect();
        let mut alive_set = IndexedSet::with_universe(n);
        for i in 0..n {
            alive_set.insert(VertexId(i as u32));
        }
        Ok(BipartiteGraph {
            n_u,
            n_v,
            adjacency,
            alive: vec![true; n],
            live_degree,
            alive_per_side: [n_u, n_v],
            alive_set,
            edge_count,
        })
    }

    /// Number of U vertices at construction (alive or not).
    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    /// Total vertex count at construction.
    pub fn len(&self) -> usize {
        self.n_u + self.n_v
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Deduplicated edge count at construction.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Number of edges with both endpoints alive.
    pub fn alive_edge_count(&self) -> usize {
        (0..self.n_u)
            .filter(|&i| self.alive[i])
            .map(|i| self.live_degree[i] as usize)
            .sum()
    }

    #[inline]
    pub fn u(&self, i: usize) -> VertexId {
        debug_assert!(i < self.n_u);
        VertexId(i as u32)
    }

    #[inline]
    pub fn v(&self, j: usize) -> VertexId {
        debug_assert!(j < self.n_v);
        VertexId((self.n_u + j) as u32)
    }

    #[inline]
    pub fn side(&self, v: VertexId) -> Side {
        if v.index() < self.n_u {
            Side::U
        } else {
            Side::V
        }
    }

    /// Index of `v` within its own side.
    #[inline]
    pub fn local_index(&self, v: VertexId) -> usize {
        match self.side(v) {
            Side::U => v.index(),
            Side::V => v.index() - self.n_u,
        }
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.len()
    }

    #[inline]
    pub fn is_alive(&self, v: VertexId) -> bool {
        self.contains(v) && self.alive[v.index()]
    }

    fn check_alive(&self, v: VertexId) -> Result<(), GraphError> {
        if !self.contains(v) {
            Err(GraphError::NoSuchVertex(v))
        } else if !self.alive[v.index()] {
            Err(GraphError::DeadVertex(v))
        } else {
            Ok(())
        }
    }

    /// Alive neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_alive(v)?;
        Ok(self.alive_neighbors(v).collect())
    }

    /// Iterator over alive neighbors; no liveness check on `v` itself.
    #[inline]
    pub fn alive_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency[v.index()]
            .iter()
            .copied()
            .filter(move |w| self.alive[w.index()])
    }

    /// Full construction-time adjacency list, including removed vertices.
    #[inline]
    pub fn adjacency(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.index()]
    }

    #[inline]
    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        let (short, other) = if self.adjacency[a.index()].len() <= self.adjacency[b.index()].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.adjacency[short.index()].binary_search(&other).is_ok()
    }

    #[inline]
    pub fn live_degree(&self, v: VertexId) -> usize {
        self.live_degree[v.index()] as usize
    }

    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        self.check_alive(v)?;
        self.alive[v.index()] = false;
        self.alive_per_side[self.side(v).slot()] -= 1;
        self.alive_set.remove(v);
        for &w in &self.adjacency[v.index()] {
            if self.alive[w.index()] {
                self.live_degree[w.index()] -= 1;
            }
        }
        Ok(())
    }

    pub fn alive_count(&self) -> usize {
        self.alive_set.len()
    }

    pub fn alive_on(&self, side: Side) -> usize {
        self.alive_per_side[side.slot()]
    }

    /// Alive vertices in unspecified (but deterministic) order.
    pub fn alive_vertices(&self) -> &[VertexId] {
        self.alive_set.as_slice()
    }

    /// The `i`-th entry of [`alive_vertices`](Self::alive_vertices).
    pub fn alive_vertex(&self, i: usize) -> VertexId {
        self.alive_set.get(i)
    }

    pub fn min_alive_degree(&self) -> Option<usize> {
        self.alive_set
            .as_slice()
            .iter()
            .map(|v| self.live_degree[v.index()] as usize)
            .min()
    }

    /// Partition of the alive vertices into connected components. Each
    /// component is sorted ascending; components are ordered by their
    /// smallest id.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if !self.alive[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(VertexId(start as u32));
            let mut component = Vec::new();
            while let Some(v) = queue.pop_front() {
                component.push(v);
                for w in self.alive_neighbors(v) {
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        queue.push_back(w);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    /// Compact copy of the subgraph induced by `vertices`.
    ///
    /// The returned map sends each subgraph id to the id it had in `self`.
    /// U-side members come first in ascending original order, then V-side
    /// members, so relative id order is preserved within each side.
    pub fn induced_subgraph(
        &self,
        vertices: &[VertexId],
    ) -> Result<(BipartiteGraph, Vec<VertexId>), GraphError> {
        for &v in vertices {
            self.check_alive(v)?;
        }
        let mut us: Vec<VertexId> = vertices
            .iter()
            .copied()
            .filter(|&v| self.side(v) == Side::U)
            .collect();
        let mut vs: Vec<VertexId> = vertices
            .iter()
            .copied()
            .filter(|&v| self.side(v) == Side::V)
            .collect();
        us.sort_unstable();
        us.dedup();
        vs.sort_unstable();
        vs.dedup();

        let mut local = vec![u32::MAX; self.len()];
        for (j, &v) in vs.iter().enumerate() {
            local[v.index()] = j as u32;
        }
        let mut edges = Vec::new();
        for (i, &u) in us.iter().enumerate() {
            for &w in &self.adjacency[u.index()] {
                let j = local[w.index()];
                if j != u32::MAX {
                    edges.push((i, j as usize));
                }
            }
        }
        let sub = BipartiteGraph::new(us.len(), vs.len(), edges)?;
        let mut map = us;
        map.extend(vs);
        Ok((sub, map))
    }

    /// True when no vertex has been removed.
    pub fn is_compact(&self) -> bool {
        self.alive_count() == self.len()
    }
}
