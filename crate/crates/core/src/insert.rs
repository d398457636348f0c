//! Insertion of a hierarchy `x` into a hierarchy `y`.
//!
//! At every scale the result holds the regions of `x` together with the
//! regions of `y` that do not meet the ground of `x`. `x` is assumed to be
//! insertable in `y`: each region of `y` lies inside a region of `x` or
//! outside the ground of `x`. That assumption is not re-checked here.

use crate::error::{Error, Result};
use crate::hierarchy::LocalHierarchy;
use crate::weight::{OpCounter, Weight};

const DROPPED: usize = usize::MAX;

/// Where a node of the result comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    /// Present in `x` (possibly also in `y`, as a duplicate).
    X(usize),
    /// Present in `y` only.
    Y(usize),
}

pub fn insert<W: Weight>(x: &LocalHierarchy<W>, y: &LocalHierarchy<W>) -> Result<LocalHierarchy<W>> {
    insert_counted(x, y, &mut OpCounter::default())
}

pub fn insert_counted<W: Weight>(
    x: &LocalHierarchy<W>,
    y: &LocalHierarchy<W>,
    ops: &mut OpCounter,
) -> Result<LocalHierarchy<W>> {
    let (nx, ny) = (x.len(), y.len());
    let mut x_to_z = vec![DROPPED; nx];
    let mut y_to_z = vec![DROPPED; ny];
    let mut z_from: Vec<Origin> = Vec::with_capacity(nx.max(ny));
    let mut in_z = vec![false; ny];
    in_z[..y.num_leaves()].fill(true);

    // Renumbering: merge scan of both node sequences in extended order.
    let (mut i, mut j) = (0, 0);
    while i < nx || j < ny {
        ops.tick();
        let kx = (i < nx).then(|| x.node_key(i));
        let ky = (j < ny).then(|| y.node_key(j));
        match (kx, ky) {
            (Some(a), Some(b)) if a == b => {
                x_to_z[i] = z_from.len();
                y_to_z[j] = z_from.len();
                z_from.push(Origin::X(i));
                i += 1;
                j += 1;
            }
            (a, Some(b)) if a.is_none_or(|a| b < a) => {
                if in_z[j] {
                    in_z[y.parent(j)] = true;
                    y_to_z[j] = z_from.len();
                    z_from.push(Origin::Y(j));
                }
                j += 1;
            }
            _ => {
                if x.is_leaf(i) {
                    return Err(Error::Precondition(format!(
                        "leaf {} of the inserted hierarchy is not a leaf of the target",
                        x.leaves()[i]
                    )));
                }
                x_to_z[i] = z_from.len();
                z_from.push(Origin::X(i));
                i += 1;
            }
        }
    }

    // Rebuild parents, map and weights through the correspondences.
    let num_leaves = y.num_leaves();
    let mut leaves = Vec::with_capacity(num_leaves);
    let mut parent = Vec::with_capacity(z_from.len());
    let mut edges = Vec::with_capacity(z_from.len().saturating_sub(num_leaves));
    let mut weights = Vec::with_capacity(z_from.len().saturating_sub(num_leaves));
    for (z, origin) in z_from.iter().enumerate() {
        ops.tick();
        let (h, n, to_z) = match *origin {
            Origin::X(n) => (x, n, &x_to_z),
            Origin::Y(n) => (y, n, &y_to_z),
        };
        let p = if h.is_root(n) { z } else { to_z[h.parent(n)] };
        if p == DROPPED {
            return Err(Error::Precondition(format!(
                "parent of node {n} was dropped; the hierarchies are not insertable"
            )));
        }
        parent.push(p);
        match h.building_edge(n) {
            None => leaves.push(h.leaves()[n]),
            Some(e) => {
                edges.push((e.u, e.v));
                weights.push(e.weight);
            }
        }
    }
    debug_assert_eq!(leaves.len(), num_leaves);
    LocalHierarchy::from_parts(leaves, parent, edges, weights)
}
