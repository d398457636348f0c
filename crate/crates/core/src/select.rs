//! Restriction of a hierarchy to the regions meeting a set of vertices.

use crate::error::{Error, Result};
use crate::grid::VertexId;
use crate::hierarchy::LocalHierarchy;
use crate::kruskal::check_sorted_vertices;
use crate::weight::{OpCounter, Weight};

/// Keeps the leaves `{x}`, `x` in `xs`, and all their ancestors.
///
/// `xs` must be sorted in raster order and every element must be a leaf of
/// `h`. Node order is preserved, so the result is again topologically
/// ordered. Unary nodes are kept as they are.
pub fn select<W: Weight>(h: &LocalHierarchy<W>, xs: &[VertexId]) -> Result<LocalHierarchy<W>> {
    select_counted(h, xs, &mut OpCounter::default())
}

pub fn select_counted<W: Weight>(
    h: &LocalHierarchy<W>,
    xs: &[VertexId],
    ops: &mut OpCounter,
) -> Result<LocalHierarchy<W>> {
    check_sorted_vertices(xs)?;
    let leaves = h.leaves();
    let mut mark = vec![false; h.len()];

    // Merge scan of xs against the sorted leaves.
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < leaves.len() {
        ops.tick();
        if xs[i] == leaves[j] {
            mark[j] = true;
            i += 1;
        }
        j += 1;
    }
    if i < xs.len() {
        return Err(Error::UnknownVertex(xs[i].0));
    }

    for n in 0..h.len() {
        ops.tick();
        if mark[n] {
            mark[h.parent(n)] = true;
        }
    }

    let mut new_index = vec![usize::MAX; h.len()];
    let mut kept = 0;
    for (n, &m) in mark.iter().enumerate() {
        if m {
            new_index[n] = kept;
            kept += 1;
        }
    }

    let nl = h.num_leaves();
    let mut parent = Vec::with_capacity(kept);
    let mut edges = Vec::with_capacity(kept - xs.len());
    let mut weights = Vec::with_capacity(kept - xs.len());
    let out_leaves = xs.to_vec();
    for n in 0..h.len() {
        ops.tick();
        if !mark[n] {
            continue;
        }
        parent.push(new_index[h.parent(n)]);
        if n >= nl {
            edges.push(h.building_edges()[n - nl]);
            weights.push(h.weights()[n - nl]);
        }
    }
    LocalHierarchy::from_parts(out_leaves, parent, edges, weights)
}
