//! Join of two hierarchies over the edges linking their grounds.
//!
//! The join replays Kruskal on three sorted streams: the sorted linking edges
//! `F`, the non-leaves of `x` and the non-leaves of `y`. A non-leaf of `x` or
//! `y` is submitted as the pair of representative leaves recorded in its
//! [`Desc`]; a node with a single represented child (one produced by select)
//! re-roots its component under a fresh node instead of merging two.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::grid::{Edge, VertexId};
use crate::hierarchy::LocalHierarchy;
use crate::kruskal::KruskalForest;
use crate::weight::{OpCounter, Weight};

/// Representative leaves below the (at most two) children of a node, as
/// indices in the concatenated leaf space of a join.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Desc {
    pub first: Option<usize>,
    pub second: Option<usize>,
}

/// Computes [`Desc`] for every node of `h`, numbering leaf `i` as `i + shift`.
pub fn a_descendent<W: Weight>(h: &LocalHierarchy<W>, shift: usize) -> Vec<Desc> {
    let mut desc = vec![Desc::default(); h.len()];
    for (n, d) in desc.iter_mut().enumerate().take(h.num_leaves()) {
        d.first = Some(n + shift);
    }
    // Children have smaller indices than their parent, so each node's own
    // representative is final before it is passed up.
    for n in 0..h.len() {
        let p = h.parent(n);
        if p == n {
            continue;
        }
        let rep = desc[n].first;
        if desc[p].first.is_none() {
            desc[p].first = rep;
        } else {
            desc[p].second = rep;
        }
    }
    desc
}

/// Joins `x` and `y` over the linking edges `f`.
///
/// The result has the leaves of `x` followed by the leaves of `y`; every leaf
/// of `x` must precede every leaf of `y` in raster order. Each endpoint of an
/// edge of `f` must be a leaf of `x` or `y`.
pub fn join<W: Weight>(x: &LocalHierarchy<W>, y: &LocalHierarchy<W>, f: &[Edge<W>]) -> Result<LocalHierarchy<W>> {
    join_counted(x, y, f, &mut OpCounter::default())
}

pub fn join_counted<W: Weight>(
    x: &LocalHierarchy<W>,
    y: &LocalHierarchy<W>,
    f: &[Edge<W>],
    ops: &mut OpCounter,
) -> Result<LocalHierarchy<W>> {
    if let (Some(last), Some(first)) = (x.leaves().last(), y.leaves().first()) {
        if last >= first {
            return Err(Error::Precondition(format!(
                "leaves of the first hierarchy must precede those of the second ({last} >= {first})"
            )));
        }
    }
    let nx = x.num_leaves();
    let leaves: Vec<VertexId> = x.leaves().iter().chain(y.leaves()).copied().collect();
    let capacity = leaves.len() + x.num_non_leaves() + y.num_non_leaves() + f.len();
    let mut forest = KruskalForest::new(leaves, capacity);

    ops.add((x.len() + y.len()) as u64);
    let desc_x = a_descendent(x, 0);
    let desc_y = a_descendent(y, nx);

    let mut sorted = f.to_vec();
    sorted.sort_unstable_by(|a, b| {
        ops.tick();
        a.cmp(b)
    });

    let locate = |v: VertexId| -> Result<usize> {
        x.leaf_index(v)
            .or_else(|| y.leaf_index(v).map(|i| i + nx))
            .ok_or(Error::UnknownVertex(v.0))
    };
    let representatives = |d: &Desc, n: usize| -> Result<(usize, Option<usize>)> {
        let a = d
            .first
            .ok_or_else(|| Error::Malformed(format!("non-leaf {n} has no child")))?;
        Ok((a, d.second))
    };

    let (mut i1, mut i2, mut i3) = (nx, y.num_leaves(), 0);
    let mut previous: Option<Edge<W>> = None;
    loop {
        ops.tick();
        // An exhausted stream compares as +infinity.
        let fx = x.building_edge(i1);
        let fy = y.building_edge(i2);
        let ff = sorted.get(i3).copied();
        let (edge, pair) = match pick_smallest(ff, fx, fy)? {
            None => break,
            Some(Stream::F) => {
                let e = ff.unwrap();
                i3 += 1;
                (e, (locate(e.u)?, Some(locate(e.v)?)))
            }
            Some(Stream::X) => {
                let pair = representatives(&desc_x[i1], i1)?;
                i1 += 1;
                (fx.unwrap(), pair)
            }
            Some(Stream::Y) => {
                let pair = representatives(&desc_y[i2], i2)?;
                i2 += 1;
                (fy.unwrap(), pair)
            }
        };
        debug_assert!(previous.is_none_or(|p| p < edge), "join streams out of order");
        previous = Some(edge);

        let cx = forest.find(pair.0, ops);
        let cy = pair.1.map(|b| forest.find(b, ops));
        if cy != Some(cx) {
            forest.union(cx, cy, &edge);
        }
    }
    Ok(forest.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stream {
    F,
    X,
    Y,
}

fn pick_smallest<W: Weight>(f: Option<Edge<W>>, x: Option<Edge<W>>, y: Option<Edge<W>>) -> Result<Option<Stream>> {
    let mut best: Option<(Edge<W>, Stream)> = None;
    for (e, s) in [(f, Stream::F), (x, Stream::X), (y, Stream::Y)] {
        let Some(e) = e else { continue };
        match best {
            None => best = Some((e, s)),
            Some((b, _)) => match e.cmp(&b) {
                Ordering::Less => best = Some((e, s)),
                Ordering::Equal => {
                    return Err(Error::Precondition(format!(
                        "edge {:?} occurs in two join inputs",
                        e.endpoints()
                    )))
                }
                Ordering::Greater => {}
            },
        }
    }
    Ok(best.map(|(_, s)| s))
}
