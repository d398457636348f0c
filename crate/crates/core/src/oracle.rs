//! Definition-level hierarchies: explicit sequences of partitions, one per
//! scale, with scale `λ` matching the edge of rank `λ` in the global order.
//!
//! Everything here is deliberately naive (sets of sets, no union-find) and
//! only meant to serve as ground truth for the array-based operations on
//! small grids.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::grid::{CausalPartition, Edge, EdgeRanking, GridGraph, OrderKey, VertexId};
use crate::hierarchy::LocalHierarchy;
use crate::weight::Weight;

pub type Region = BTreeSet<VertexId>;
pub type Partition = BTreeSet<Region>;

/// A hierarchy given by all of its scales `P_0, ..., P_depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitHierarchy {
    scales: Vec<Partition>,
}

impl ExplicitHierarchy {
    /// The hierarchy with no region at any scale.
    pub fn empty(depth: usize) -> Self {
        ExplicitHierarchy {
            scales: vec![Partition::new(); depth + 1],
        }
    }

    /// `⊥_X`: the singletons of `xs` at every scale.
    pub fn bottom(xs: impl IntoIterator<Item = VertexId>, depth: usize) -> Self {
        let p: Partition = xs.into_iter().map(|x| Region::from([x])).collect();
        ExplicitHierarchy {
            scales: vec![p; depth + 1],
        }
    }

    pub fn from_scales(scales: Vec<Partition>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::Precondition("a hierarchy has at least one scale".into()));
        }
        Ok(ExplicitHierarchy { scales })
    }

    pub fn depth(&self) -> usize {
        self.scales.len() - 1
    }

    pub fn scale(&self, lambda: usize) -> &Partition {
        &self.scales[lambda]
    }

    pub fn scales(&self) -> &[Partition] {
        &self.scales
    }

    pub fn ground(&self, lambda: usize) -> Region {
        self.scales[lambda].iter().flatten().copied().collect()
    }

    /// Checks that each scale refines the next one.
    pub fn is_hierarchy(&self) -> bool {
        self.scales
            .windows(2)
            .all(|w| w[0].iter().all(|r| w[1].iter().any(|s| r.is_subset(s))))
    }
}

fn region_of(p: &Partition, x: VertexId) -> Option<&Region> {
    p.iter().find(|r| r.contains(&x))
}

/// `h ⊕ e`: scales below the rank of `e` unchanged, and from that rank on the
/// regions of both endpoints merged.
pub fn update<W: Weight>(h: &ExplicitHierarchy, e: &Edge<W>, ranking: &EdgeRanking<W>) -> Result<ExplicitHierarchy> {
    let k = ranking
        .rank(e)
        .ok_or_else(|| Error::Precondition(format!("edge {:?} is not ranked", e.endpoints())))?;
    if k > h.depth() {
        return Err(Error::Precondition(format!("rank {k} exceeds depth {}", h.depth())));
    }
    let mut out = h.clone();
    for p in &mut out.scales[k..] {
        let rx = region_of(p, e.u).cloned().ok_or(Error::UnknownVertex(e.u.0))?;
        let ry = region_of(p, e.v).cloned().ok_or(Error::UnknownVertex(e.v.0))?;
        if rx == ry {
            continue;
        }
        p.remove(&rx);
        p.remove(&ry);
        p.insert(rx.union(&ry).copied().collect());
    }
    Ok(out)
}

/// `h ⊞ edges`: successive updates.
pub fn edge_addition<W: Weight>(
    h: &ExplicitHierarchy,
    edges: &[Edge<W>],
    ranking: &EdgeRanking<W>,
) -> Result<ExplicitHierarchy> {
    edges.iter().try_fold(h.clone(), |acc, e| update(&acc, e, ranking))
}

/// `⊥_V ⊞ E` for the whole graph.
pub fn bph_by_edge_addition<W: Weight>(g: &GridGraph<W>) -> ExplicitHierarchy {
    let ranking = EdgeRanking::new(g);
    let bottom = ExplicitHierarchy::bottom((0..g.num_vertices()).map(VertexId::from), ranking.len());
    let edges: Vec<_> = g.edges().collect();
    edge_addition(&bottom, &edges, &ranking).expect("grid edges join grid vertices")
}

/// Regions of `p` containing an element of `xs`.
pub fn sel_partition(xs: &Region, p: &Partition) -> Partition {
    p.iter().filter(|r| !r.is_disjoint(xs)).cloned().collect()
}

/// `select(X, h)`, scale by scale.
pub fn select_by_definition(xs: &Region, h: &ExplicitHierarchy) -> ExplicitHierarchy {
    ExplicitHierarchy {
        scales: h.scales.iter().map(|p| sel_partition(xs, p)).collect(),
    }
}

/// Local hierarchies of `h` on every slice of `p`.
pub fn distribution(h: &ExplicitHierarchy, p: &CausalPartition) -> Result<Vec<ExplicitHierarchy>> {
    (0..p.num_slices())
        .map(|t| {
            let xs: Region = p.vertices(t)?.into_iter().collect();
            Ok(select_by_definition(&xs, h))
        })
        .collect()
}

/// `Z[λ] = X[λ] ∪ {R ∈ Y[λ] : R ∩ gr(X[λ]) = ∅}`.
pub fn insert_by_definition(x: &ExplicitHierarchy, y: &ExplicitHierarchy) -> Result<ExplicitHierarchy> {
    if x.depth() != y.depth() {
        return Err(Error::Precondition(format!(
            "depths differ: {} vs {}",
            x.depth(),
            y.depth()
        )));
    }
    let scales = x
        .scales
        .iter()
        .zip(&y.scales)
        .map(|(px, py)| {
            let ground: Region = px.iter().flatten().copied().collect();
            px.iter()
                .chain(py.iter().filter(|r| r.is_disjoint(&ground)))
                .cloned()
                .collect()
        })
        .collect();
    Ok(ExplicitHierarchy { scales })
}

/// Whether every region of `y` is, at its scale, inside a region of `x` or
/// outside the ground of `x`.
pub fn is_insertable(x: &ExplicitHierarchy, y: &ExplicitHierarchy) -> bool {
    x.scales.iter().zip(&y.scales).all(|(px, py)| {
        let ground: Region = px.iter().flatten().copied().collect();
        py.iter()
            .all(|r| r.is_disjoint(&ground) || px.iter().any(|q| r.is_subset(q)))
    })
}

/// Converts an explicit hierarchy to the array encoding. A node is created for
/// every region at the first scale where it appears; non-leaves take the edge
/// of that rank as their building edge.
pub fn to_local<W: Weight>(h: &ExplicitHierarchy, ranking: &EdgeRanking<W>) -> Result<LocalHierarchy<W>> {
    if h.depth() != ranking.len() {
        return Err(Error::Precondition(format!(
            "depth {} but {} ranked edges",
            h.depth(),
            ranking.len()
        )));
    }
    // (birth, region) for every distinct region, plus its death scale.
    struct Node<'a> {
        birth: usize,
        death: Option<usize>,
        region: &'a Region,
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut alive: HashMap<&Region, usize> = HashMap::new();
    for (lambda, p) in h.scales.iter().enumerate() {
        let mut next = HashMap::new();
        for r in p {
            let id = match alive.remove(r) {
                Some(id) => id,
                None => {
                    nodes.push(Node {
                        birth: lambda,
                        death: None,
                        region: r,
                    });
                    nodes.len() - 1
                }
            };
            next.insert(r, id);
        }
        for (_, id) in alive.drain() {
            nodes[id].death = Some(lambda);
        }
        alive = next;
    }

    let mut order: Vec<usize> = (0..nodes.len()).collect();
    let key = |n: &Node| -> Result<OrderKey<W>> {
        if n.birth == 0 {
            if n.region.len() != 1 {
                return Err(Error::Malformed(format!("scale-0 region of size {}", n.region.len())));
            }
            Ok(OrderKey::Vertex(*n.region.first().unwrap()))
        } else {
            Ok(OrderKey::Edge(ranking.edge(n.birth).unwrap()))
        }
    };
    let keys = nodes.iter().map(key).collect::<Result<Vec<_>>>()?;
    order.sort_by_key(|&i| keys[i]);
    let mut index = vec![0; nodes.len()];
    for (pos, &i) in order.iter().enumerate() {
        index[i] = pos;
    }

    let mut leaves = Vec::new();
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut parent = Vec::with_capacity(nodes.len());
    for (pos, &i) in order.iter().enumerate() {
        let n = &nodes[i];
        match keys[i] {
            OrderKey::Vertex(v) => leaves.push(v),
            OrderKey::Edge(e) => {
                edges.push((e.u, e.v));
                weights.push(e.weight);
            }
        }
        let p = match n.death {
            None => pos,
            Some(d) => {
                let any = n.region.first().unwrap();
                let container = h.scales[d]
                    .iter()
                    .find(|r| r.contains(any))
                    .ok_or_else(|| Error::Malformed(format!("region born at {} vanishes at {d}", n.birth)))?;
                let id = nodes
                    .iter()
                    .position(|m| m.region == container && m.birth <= d && m.death.is_none_or(|x| x > d))
                    .unwrap();
                index[id]
            }
        };
        parent.push(p);
    }
    LocalHierarchy::from_parts(leaves, parent, edges, weights)
}

/// Converts an array hierarchy to explicit scales.
///
/// A node's region is taken from `reference` (the node with the same map
/// entry there) when given, and otherwise is the set of leaves below it. The
/// reference is needed for local hierarchies whose regions extend beyond
/// their ground.
pub fn from_local<W: Weight>(
    h: &LocalHierarchy<W>,
    ranking: &EdgeRanking<W>,
    reference: Option<&LocalHierarchy<W>>,
) -> Result<ExplicitHierarchy> {
    let depth = ranking.len();
    let own = h.regions();
    let full: Vec<Region> = match reference {
        None => own.into_iter().map(|r| r.into_iter().collect()).collect(),
        Some(reference) => {
            let regions = reference.regions();
            let by_key: HashMap<OrderKey<W>, usize> =
                (0..reference.len()).map(|n| (reference.node_key(n), n)).collect();
            (0..h.len())
                .map(|n| {
                    let m = by_key.get(&h.node_key(n)).ok_or_else(|| {
                        Error::Precondition(format!("node {n} of the hierarchy is not in the reference"))
                    })?;
                    Ok(regions[*m].iter().copied().collect())
                })
                .collect::<Result<_>>()?
        }
    };
    let birth = |n: usize| -> Result<usize> {
        if h.is_leaf(n) {
            Ok(0)
        } else {
            h.rank_of(n, ranking)
        }
    };
    let mut scales = vec![Partition::new(); depth + 1];
    for n in 0..h.len() {
        let start = birth(n)?;
        let end = if h.is_root(n) { depth + 1 } else { birth(h.parent(n))? };
        for p in &mut scales[start..end] {
            p.insert(full[n].clone());
        }
    }
    Ok(ExplicitHierarchy { scales })
}
