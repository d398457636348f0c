//! Array encoding of a (local) hierarchy.
//!
//! Nodes are numbered in a topological order: leaves first, sorted by the
//! raster order of their vertex, then non-leaves sorted by the order of their
//! building edges. `par[i] > i` for every non-root node, and a root is its own
//! parent.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{Edge, EdgeRanking, GridGraph, OrderKey, VertexId};
use crate::weight::Weight;

/// What a node stands for in the global graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapEntry {
    /// Leaf node `{x}`.
    Vertex(VertexId),
    /// Non-leaf node, identified by its building edge `{u, v}`, `u < v`.
    Edge(VertexId, VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalHierarchy<W> {
    parent: Vec<usize>,
    leaves: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    weights: Vec<W>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    ParentOutOfRange {
        node: usize,
        parent: usize,
    },
    ParentBelowNode {
        node: usize,
        parent: usize,
    },
    LeafIsParent {
        node: usize,
        parent: usize,
    },
    LeavesNotIncreasing {
        node: usize,
    },
    EdgesNotIncreasing {
        node: usize,
    },
    EdgeNotOrdered {
        node: usize,
    },
    ChildlessNonLeaf {
        node: usize,
    },
    NotBinary {
        node: usize,
        children: usize,
    },
    NoRoot,
    MultipleRoots {
        count: usize,
    },
    WeightMismatch {
        node: usize,
    },
    NotAnEdge {
        node: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl<W: Weight> Default for LocalHierarchy<W> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<W: Weight> LocalHierarchy<W> {
    /// The hierarchy with no node at all.
    pub fn empty() -> Self {
        LocalHierarchy {
            parent: Vec::new(),
            leaves: Vec::new(),
            edges: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn single_leaf(v: VertexId) -> Self {
        LocalHierarchy {
            parent: vec![0],
            leaves: vec![v],
            edges: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Assembles a hierarchy from its arrays. Only shape is checked here
    /// (lengths, parent indices in range); use [`validate`](Self::validate)
    /// for the ordering invariants.
    pub fn from_parts(
        leaves: Vec<VertexId>,
        parent: Vec<usize>,
        edges: Vec<(VertexId, VertexId)>,
        weights: Vec<W>,
    ) -> Result<Self> {
        if parent.len() != leaves.len() + edges.len() {
            return Err(Error::Malformed(format!(
                "{} parents for {} leaves and {} non-leaves",
                parent.len(),
                leaves.len(),
                edges.len()
            )));
        }
        if weights.len() != edges.len() {
            return Err(Error::Malformed(format!(
                "{} weights for {} non-leaves",
                weights.len(),
                edges.len()
            )));
        }
        if let Some((i, &p)) = parent.iter().enumerate().find(|&(_, &p)| p >= parent.len()) {
            return Err(Error::Malformed(format!("parent {p} of node {i} out of range")));
        }
        Ok(LocalHierarchy {
            parent,
            leaves,
            edges,
            weights,
        })
    }

    /// Same as [`from_parts`](Self::from_parts) but takes a tagged map array.
    pub fn from_map(num_leaves: usize, parent: Vec<usize>, map: &[MapEntry], weights: Vec<W>) -> Result<Self> {
        if num_leaves > map.len() {
            return Err(Error::Malformed(format!(
                "{num_leaves} leaves but only {} map entries",
                map.len()
            )));
        }
        let mut leaves = Vec::with_capacity(num_leaves);
        let mut edges = Vec::with_capacity(map.len() - num_leaves);
        for (i, m) in map.iter().enumerate() {
            match (*m, i < num_leaves) {
                (MapEntry::Vertex(v), true) => leaves.push(v),
                (MapEntry::Edge(u, v), false) => edges.push((u, v)),
                _ => return Err(Error::Malformed(format!("map entry {i} has the wrong tag"))),
            }
        }
        Self::from_parts(leaves, parent, edges, weights)
    }

    #[allow(clippy::type_complexity)]
    pub fn into_parts(self) -> (Vec<VertexId>, Vec<usize>, Vec<(VertexId, VertexId)>, Vec<W>) {
        (self.leaves, self.parent, self.edges, self.weights)
    }

    /// Number of nodes.
    #[inline]
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    #[inline]
    pub fn num_non_leaves(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_leaf(&self, n: usize) -> bool {
        n < self.leaves.len()
    }

    #[inline]
    pub fn parent(&self, n: usize) -> usize {
        self.parent[n]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    #[inline]
    pub fn is_root(&self, n: usize) -> bool {
        self.parent[n] == n
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&n| self.is_root(n))
    }

    /// Vertices of the leaves, in node order (the ground of the hierarchy).
    pub fn leaves(&self) -> &[VertexId] {
        &self.leaves
    }

    /// Building edge endpoints of the non-leaves, in node order.
    pub fn building_edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Building edge weights of the non-leaves, in node order.
    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn map_entry(&self, n: usize) -> MapEntry {
        if n < self.leaves.len() {
            MapEntry::Vertex(self.leaves[n])
        } else {
            let (u, v) = self.edges[n - self.leaves.len()];
            MapEntry::Edge(u, v)
        }
    }

    /// Building edge of non-leaf `n`, with its weight.
    #[inline]
    pub fn building_edge(&self, n: usize) -> Option<Edge<W>> {
        let k = n.checked_sub(self.leaves.len())?;
        let (u, v) = *self.edges.get(k)?;
        Some(Edge {
            weight: self.weights[k],
            u,
            v,
        })
    }

    /// Position of node `n` in the extended order on vertices and edges.
    #[inline]
    pub fn node_key(&self, n: usize) -> OrderKey<W> {
        match self.building_edge(n) {
            Some(e) => OrderKey::Edge(e),
            None => OrderKey::Vertex(self.leaves[n]),
        }
    }

    /// Rank (1-based position in the global edge order) of the building edge
    /// of non-leaf `n`.
    pub fn rank_of(&self, n: usize, ranking: &EdgeRanking<W>) -> Result<usize> {
        let e = self
            .building_edge(n)
            .ok_or_else(|| Error::Precondition(format!("node {n} is a leaf and has no rank")))?;
        ranking
            .rank(&e)
            .ok_or_else(|| Error::Precondition(format!("edge {:?} is not in the graph", e.endpoints())))
    }

    /// Index of the leaf mapped to `v`, if any.
    pub fn leaf_index(&self, v: VertexId) -> Option<usize> {
        self.leaves.binary_search(&v).ok()
    }

    /// Number of children of every node.
    pub fn child_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.len()];
        for (n, &p) in self.parent.iter().enumerate() {
            if p != n {
                counts[p] += 1;
            }
        }
        counts
    }

    /// Longest leaf-to-root path length, in edges.
    pub fn depth(&self) -> usize {
        // Parents have larger indices, so a reverse scan sees parents first.
        let mut dist = vec![0usize; self.len()];
        let mut best = 0;
        for n in (0..self.len()).rev() {
            let p = self.parent[n];
            if p != n {
                dist[n] = dist[p] + 1;
                best = best.max(dist[n]);
            }
        }
        best
    }

    /// Leaves below every node, as sorted vertex lists.
    pub fn regions(&self) -> Vec<Vec<VertexId>> {
        let mut regions: Vec<Vec<VertexId>> = vec![Vec::new(); self.len()];
        for (i, &v) in self.leaves.iter().enumerate() {
            regions[i].push(v);
        }
        for n in 0..self.len() {
            let p = self.parent[n];
            if p != n {
                let r = std::mem::take(&mut regions[n]);
                regions[p].extend_from_slice(&r);
                regions[n] = r;
            }
        }
        for r in &mut regions {
            r.sort_unstable();
        }
        regions
    }

    /// Checks the layout invariants. Unary nodes and several roots are
    /// accepted, as produced by select and by joins of disconnected parts.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.len();
        let nl = self.leaves.len();
        if n != nl + self.edges.len() {
            out.push(Violation::LengthMismatch {
                what: "par",
                expected: nl + self.edges.len(),
                found: n,
            });
            return out;
        }
        if self.weights.len() != self.edges.len() {
            out.push(Violation::LengthMismatch {
                what: "weights",
                expected: self.edges.len(),
                found: self.weights.len(),
            });
            return out;
        }
        for (i, &p) in self.parent.iter().enumerate() {
            if p >= n {
                out.push(Violation::ParentOutOfRange { node: i, parent: p });
            } else if p < i {
                out.push(Violation::ParentBelowNode { node: i, parent: p });
            } else if p != i && p < nl {
                out.push(Violation::LeafIsParent { node: i, parent: p });
            }
        }
        for i in 1..nl {
            if self.leaves[i - 1] >= self.leaves[i] {
                out.push(Violation::LeavesNotIncreasing { node: i });
            }
        }
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            if u >= v {
                out.push(Violation::EdgeNotOrdered { node: nl + k });
            }
        }
        for i in nl + 1..n {
            if self.node_key(i - 1) >= self.node_key(i) {
                out.push(Violation::EdgesNotIncreasing { node: i });
            }
        }
        if out.iter().any(|v| matches!(v, Violation::ParentOutOfRange { .. })) {
            return out;
        }
        let counts = self.child_counts();
        for (i, &c) in counts.iter().enumerate().skip(nl) {
            if c == 0 {
                out.push(Violation::ChildlessNonLeaf { node: i });
            }
        }
        if n > 0 && self.roots().next().is_none() {
            out.push(Violation::NoRoot);
        }
        out
    }

    /// [`validate`](Self::validate) plus: every non-leaf is binary and there is
    /// exactly one root. This is what a full BPH of a connected graph satisfies.
    pub fn validate_strict(&self) -> Vec<Violation> {
        let mut out = self.validate();
        if !out.is_empty() {
            return out;
        }
        for (i, &c) in self.child_counts().iter().enumerate().skip(self.num_leaves()) {
            if c != 2 {
                out.push(Violation::NotBinary { node: i, children: c });
            }
        }
        let roots = self.roots().count();
        if roots > 1 {
            out.push(Violation::MultipleRoots { count: roots });
        }
        out
    }

    /// Checks that every building edge exists in `g` with the stored weight.
    pub fn check_weights(&self, g: &GridGraph<W>) -> Vec<Violation> {
        let nl = self.num_leaves();
        self.edges
            .iter()
            .zip(&self.weights)
            .enumerate()
            .filter_map(|(k, (&(u, v), &w))| match g.weight(u, v) {
                None => Some(Violation::NotAnEdge { node: nl + k }),
                Some(gw) if gw != w => Some(Violation::WeightMismatch { node: nl + k }),
                Some(_) => None,
            })
            .collect()
    }
}
