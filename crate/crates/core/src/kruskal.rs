//! Kruskal-style construction of the binary partition hierarchy by altitude
//! ordering. The tree-building state is shared with [`crate::join`], which
//! replays the same process on the edges of two border trees.

use crate::error::{Error, Result};
use crate::grid::{CausalPartition, Edge, GridGraph, VertexId};
use crate::hierarchy::LocalHierarchy;
use crate::union_find::UnionFind;
use crate::weight::{OpCounter, Weight};

/// Union-find over the leaves plus the binary tree grown on top of them.
///
/// `root[c]` is the tree node currently standing for the component whose
/// canonical leaf is `c`.
#[derive(Debug)]
pub(crate) struct KruskalForest<W> {
    components: UnionFind,
    root: Vec<usize>,
    parent: Vec<usize>,
    leaves: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    weights: Vec<W>,
}

impl<W: Weight> KruskalForest<W> {
    pub(crate) fn new(leaves: Vec<VertexId>, expected_nodes: usize) -> Self {
        let n = leaves.len();
        let mut parent = Vec::with_capacity(expected_nodes.max(n));
        parent.extend(0..n);
        KruskalForest {
            components: UnionFind::new(n),
            root: (0..n).collect(),
            parent,
            leaves,
            edges: Vec::with_capacity(expected_nodes.saturating_sub(n)),
            weights: Vec::with_capacity(expected_nodes.saturating_sub(n)),
        }
    }

    #[inline]
    pub(crate) fn find(&mut self, leaf: usize, ops: &mut OpCounter) -> usize {
        self.components.find_counted(leaf, ops)
    }

    /// Creates a new tree node for `edge`. Its children are the current tree
    /// roots of components `cx` and `cy`. With `cy = None` the component of
    /// `cx` is only re-rooted under the new node, nothing is merged.
    pub(crate) fn union(&mut self, cx: usize, cy: Option<usize>, edge: &Edge<W>) -> usize {
        let node = self.parent.len();
        self.parent[self.root[cx]] = node;
        match cy {
            None => self.root[cx] = node,
            Some(cy) => {
                self.parent[self.root[cy]] = node;
                let c = self.components.union(cx, cy);
                self.root[c] = node;
            }
        }
        self.parent.push(node);
        self.edges.push((edge.u, edge.v));
        self.weights.push(edge.weight);
        node
    }

    pub(crate) fn finish(self) -> LocalHierarchy<W> {
        LocalHierarchy::from_parts(self.leaves, self.parent, self.edges, self.weights)
            .expect("kruskal forest arrays are consistent")
    }
}

pub(crate) fn check_sorted_vertices(vertices: &[VertexId]) -> Result<()> {
    for w in vertices.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateVertex(w[0].0));
        }
        if w[0] > w[1] {
            return Err(Error::Precondition(format!("vertices not in raster order at {}", w[1])));
        }
    }
    Ok(())
}

/// BPH of the subgraph induced by `vertices` (sorted, raster order) and
/// `edges`. The leaves are the vertices in order; every edge that joins two
/// distinct components, taken in increasing edge order, becomes a binary
/// node.
pub fn build_bph<W: Weight>(vertices: &[VertexId], edges: &[Edge<W>]) -> Result<LocalHierarchy<W>> {
    check_sorted_vertices(vertices)?;
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let n = vertices.len();
    let mut forest = KruskalForest::new(vertices.to_vec(), 2 * n);
    let mut ops = OpCounter::default();
    let local = |v: VertexId| {
        vertices
            .binary_search(&v)
            .map_err(|_| Error::Precondition(format!("edge endpoint {v} is not among the vertices")))
    };
    let mut merges = 0;
    for e in &sorted {
        let (a, b) = (local(e.u)?, local(e.v)?);
        let (ca, cb) = (forest.find(a, &mut ops), forest.find(b, &mut ops));
        if ca != cb {
            forest.union(ca, Some(cb), e);
            merges += 1;
            if merges + 1 == n {
                break;
            }
        }
    }
    Ok(forest.finish())
}

/// BPH of slice `t` of `g`.
pub fn build_slice_bph<W: Weight>(g: &GridGraph<W>, p: &CausalPartition, t: usize) -> Result<LocalHierarchy<W>> {
    let vertices = p.vertices(t)?;
    let edges: Vec<_> = g.slice_edges(p, t)?.collect();
    build_bph(&vertices, &edges)
}

/// BPH of the whole graph.
pub fn build_graph_bph<W: Weight>(g: &GridGraph<W>) -> LocalHierarchy<W> {
    let vertices: Vec<_> = (0..g.num_vertices()).map(VertexId::from).collect();
    let edges: Vec<_> = g.edges().collect();
    build_bph(&vertices, &edges).expect("grid edges join grid vertices")
}

/// Building edges of the non-leaves of `h`, in increasing order. For a BPH
/// these form a minimum spanning forest of the input graph.
pub fn mst_edges<W: Weight>(h: &LocalHierarchy<W>) -> Vec<Edge<W>> {
    (h.num_leaves()..h.len()).filter_map(|n| h.building_edge(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u64) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn single_vertex() {
        let h = build_bph::<u64>(&[v(4)], &[]).unwrap();
        assert_eq!(h, LocalHierarchy::single_leaf(v(4)));
    }

    #[test]
    fn two_vertices() {
        let e = Edge::new(v(0), v(1), 5u64);
        let h = build_bph(&[v(0), v(1)], &[e]).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.parents(), &[2, 2, 2]);
        assert_eq!(h.building_edges(), &[(v(0), v(1))]);
        assert_eq!(h.weights(), &[5]);
        assert_eq!(mst_edges(&h), vec![e]);
    }

    #[test]
    fn duplicate_vertices_rejected() {
        assert!(matches!(
            build_bph::<u64>(&[v(1), v(1)], &[]),
            Err(Error::DuplicateVertex(1))
        ));
        assert!(build_bph::<u64>(&[v(2), v(1)], &[]).is_err());
        let e = Edge::new(v(0), v(9), 1u64);
        assert!(build_bph(&[v(0), v(1)], &[e]).is_err());
    }

    #[test]
    fn three_by_three_is_strictly_valid() {
        let g = GridGraph::from_fn(3, 3, |a, b| (a.0 * 7 + b.0 * 3) % 5);
        let h = build_graph_bph(&g);
        assert!(h.validate_strict().is_empty(), "{:?}", h.validate_strict());
        assert!(h.check_weights(&g).is_empty());
        assert_eq!(h.num_non_leaves(), 8);
    }

    #[test]
    fn disconnected_input_gives_a_forest() {
        let e = Edge::new(v(0), v(1), 1u64);
        let h = build_bph(&[v(0), v(1), v(5)], &[e]).unwrap();
        assert_eq!(h.roots().collect::<Vec<_>>(), vec![2, 3]);
        assert!(h.validate().is_empty());
    }
}
