//! Implicit 4-adjacency grid graph, its edge order and the causal slicing.

use std::fmt;
use std::ops::Range;

use num_traits::PrimInt;

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Raster index of a grid vertex: `row * width + col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexId(pub u64);

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

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i as u64)
    }
}

/// A weighted edge `{u, v}` with `u < v` in raster order.
///
/// The derived ordering is the edge order used everywhere: by weight, then
/// lexicographically on `(u, v)`. Field order matters for the derive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge<W> {
    pub weight: W,
    pub u: VertexId,
    pub v: VertexId,
}

impl<W: Weight> Edge<W> {
    /// Builds an edge, swapping the endpoints if needed so that `u < v`.
    pub fn new(a: VertexId, b: VertexId, weight: W) -> Self {
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        Edge { weight, u, v }
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }
}

/// Key of the extended order on vertices and edges: every vertex precedes
/// every edge, vertices compare by raster index and edges by the edge order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderKey<W> {
    Vertex(VertexId),
    Edge(Edge<W>),
}

/// `u ≺ v` on edges.
pub fn edge_less<W: Weight>(u: &Edge<W>, v: &Edge<W>) -> bool {
    u < v
}

/// `x ≺ y` on the extended order over vertices and edges.
pub fn extended_less<W: Weight>(x: &OrderKey<W>, y: &OrderKey<W>) -> bool {
    x < y
}

/// Global ranks of all edges of a graph: `rank(e) = k` when `e` is the k-th
/// smallest edge (1-based).
#[derive(Debug, Clone)]
pub struct EdgeRanking<W> {
    sorted: Vec<Edge<W>>,
}

impl<W: Weight> EdgeRanking<W> {
    pub fn new(g: &GridGraph<W>) -> Self {
        Self::from_edges(g.edges().collect())
    }

    pub fn from_edges(mut edges: Vec<Edge<W>>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        EdgeRanking { sorted: edges }
    }

    pub fn rank(&self, e: &Edge<W>) -> Option<usize> {
        self.sorted.binary_search(e).ok().map(|i| i + 1)
    }

    /// The edge of rank `k`.
    pub fn edge(&self, k: usize) -> Option<Edge<W>> {
        k.checked_sub(1).and_then(|i| self.sorted.get(i)).copied()
    }

    /// Number of ranked edges, which is also the depth of the hierarchies
    /// built over them.
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

/// How edge weights are derived from pixel intensities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightRule {
    /// `|I(x) - I(y)|`
    #[default]
    AbsDiff,
    /// `max(I(x), I(y))`
    MaxVal,
}

/// 4-adjacency grid graph of `height x width` vertices with explicit edge
/// weights stored per direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGraph<W> {
    height: usize,
    width: usize,
    // weight of {(i, j), (i, j + 1)} at i * (width - 1) + j
    horizontal: Vec<W>,
    // weight of {(i, j), (i + 1, j)} at i * width + j
    vertical: Vec<W>,
}

impl<W: Weight> GridGraph<W> {
    /// Builds a grid whose edge weights are given by `weight(u, v)` with `u < v`.
    pub fn from_fn(height: usize, width: usize, mut weight: impl FnMut(VertexId, VertexId) -> W) -> Self {
        let mut horizontal = Vec::with_capacity(height * width.saturating_sub(1));
        let mut vertical = Vec::with_capacity(height.saturating_sub(1) * width);
        for i in 0..height {
            for j in 0..width.saturating_sub(1) {
                let u = i * width + j;
                horizontal.push(weight(u.into(), (u + 1).into()));
            }
        }
        for i in 0..height.saturating_sub(1) {
            for j in 0..width {
                let u = i * width + j;
                vertical.push(weight(u.into(), (u + width).into()));
            }
        }
        GridGraph {
            height,
            width,
            horizontal,
            vertical,
        }
    }

    /// Builds a grid from row-major pixel intensities.
    pub fn from_pixels<P: PrimInt>(height: usize, width: usize, pixels: &[P], rule: WeightRule) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(Error::Precondition(format!(
                "{} pixels for a {height}x{width} grid",
                pixels.len()
            )));
        }
        let mut overflow = false;
        let g = Self::from_fn(height, width, |u, v| {
            let (a, b) = (pixels[u.index()], pixels[v.index()]);
            let w = match rule {
                WeightRule::AbsDiff => {
                    if a > b {
                        a - b
                    } else {
                        b - a
                    }
                }
                WeightRule::MaxVal => a.max(b),
            };
            W::from(w).unwrap_or_else(|| {
                overflow = true;
                W::zero()
            })
        });
        if overflow {
            return Err(Error::Precondition(
                "pixel-derived weight does not fit the weight type".into(),
            ));
        }
        Ok(g)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_vertices(&self) -> usize {
        self.height * self.width
    }

    pub fn num_edges(&self) -> usize {
        self.horizontal.len() + self.vertical.len()
    }

    pub fn vertex(&self, row: usize, col: usize) -> VertexId {
        debug_assert!(row < self.height && col < self.width);
        VertexId((row * self.width + col) as u64)
    }

    pub fn coords(&self, v: VertexId) -> (usize, usize) {
        (v.index() / self.width, v.index() % self.width)
    }

    /// Weight of the edge `{a, b}`, or `None` if `a` and `b` are not 4-adjacent.
    pub fn weight(&self, a: VertexId, b: VertexId) -> Option<W> {
        let n = self.num_vertices();
        if a.index() >= n || b.index() >= n {
            return None;
        }
        let (u, v) = if a < b {
            (a.index(), b.index())
        } else {
            (b.index(), a.index())
        };
        let (i, j) = (u / self.width, u % self.width);
        if v == u + 1 && j + 1 < self.width {
            Some(self.horizontal[i * (self.width - 1) + j])
        } else if v == u + self.width {
            Some(self.vertical[u])
        } else {
            None
        }
    }

    pub fn edge(&self, a: VertexId, b: VertexId) -> Option<Edge<W>> {
        self.weight(a, b).map(|w| Edge::new(a, b, w))
    }

    /// All edges of rows `rows`, including vertical edges whose both ends lie
    /// in `rows`, in raster order of their first endpoint.
    fn band_edges(&self, rows: Range<usize>) -> impl Iterator<Item = Edge<W>> + '_ {
        let width = self.width;
        let end = rows.end;
        rows.flat_map(move |i| (0..width).map(move |j| (i, j)))
            .flat_map(move |(i, j)| {
                let u = i * width + j;
                let right = (j + 1 < width).then(|| Edge {
                    weight: self.horizontal[i * (width - 1) + j],
                    u: u.into(),
                    v: (u + 1).into(),
                });
                let down = (i + 1 < end).then(|| Edge {
                    weight: self.vertical[u],
                    u: u.into(),
                    v: (u + width).into(),
                });
                right.into_iter().chain(down)
            })
    }

    /// Every edge of the graph, once.
    pub fn edges(&self) -> impl Iterator<Item = Edge<W>> + '_ {
        self.band_edges(0..self.height)
    }

    fn check_partition(&self, p: &CausalPartition) -> Result<()> {
        if p.height != self.height || p.width != self.width {
            return Err(Error::Precondition(format!(
                "partition is {}x{} but graph is {}x{}",
                p.height, p.width, self.height, self.width
            )));
        }
        Ok(())
    }

    /// Edges with both endpoints in slice `t`, each once.
    pub fn slice_edges(&self, p: &CausalPartition, t: usize) -> Result<impl Iterator<Item = Edge<W>> + '_> {
        self.check_partition(p)?;
        let rows = p.rows(t)?;
        Ok(self.band_edges(rows))
    }

    /// Common neighborhood of two adjacent slices: the vertical edges between
    /// their facing boundary rows.
    pub fn common_neighborhood(&self, p: &CausalPartition, a: usize, b: usize) -> Result<Vec<Edge<W>>> {
        self.check_partition(p)?;
        let (upper, _) = p.adjacent_pair(a, b)?;
        let row = p.rows(upper)?.end - 1;
        Ok((0..self.width)
            .map(|j| {
                let u = row * self.width + j;
                Edge {
                    weight: self.vertical[u],
                    u: u.into(),
                    v: (u + self.width).into(),
                }
            })
            .collect())
    }
}

/// Partition of the grid rows into `num_slices` contiguous horizontal bands.
///
/// Band `t` covers rows `[ceil(t*h/n), ceil((t+1)*h/n))`, so every band has at
/// least one row as long as `n <= h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalPartition {
    height: usize,
    width: usize,
    bounds: Vec<usize>,
}

impl CausalPartition {
    pub fn new(height: usize, width: usize, num_slices: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidPartition(format!("empty grid {height}x{width}")));
        }
        if num_slices == 0 || num_slices > height {
            return Err(Error::InvalidPartition(format!(
                "{num_slices} slices requested for {height} rows (need 1..={height})"
            )));
        }
        let bounds = (0..=num_slices).map(|t| (t * height).div_ceil(num_slices)).collect();
        Ok(CausalPartition { height, width, bounds })
    }

    pub fn for_graph<W: Weight>(g: &GridGraph<W>, num_slices: usize) -> Result<Self> {
        Self::new(g.height(), g.width(), num_slices)
    }

    pub fn num_slices(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Half-open row range of slice `t`.
    pub fn rows(&self, t: usize) -> Result<Range<usize>> {
        if t >= self.num_slices() {
            return Err(Error::SliceOutOfRange {
                index: t,
                count: self.num_slices(),
            });
        }
        Ok(self.bounds[t]..self.bounds[t + 1])
    }

    /// Vertices of slice `t` in raster order.
    pub fn vertices(&self, t: usize) -> Result<Vec<VertexId>> {
        let rows = self.rows(t)?;
        Ok(self.row_vertices(rows))
    }

    pub fn slice_of(&self, v: VertexId) -> usize {
        let row = v.index() / self.width;
        self.bounds.partition_point(|&b| b <= row) - 1
    }

    fn row_vertices(&self, rows: Range<usize>) -> Vec<VertexId> {
        (rows.start * self.width..rows.end * self.width)
            .map(VertexId::from)
            .collect()
    }

    /// Returns `(upper, lower)` for two adjacent slice indices.
    fn adjacent_pair(&self, a: usize, b: usize) -> Result<(usize, usize)> {
        let n = self.num_slices();
        for t in [a, b] {
            if t >= n {
                return Err(Error::SliceOutOfRange { index: t, count: n });
            }
        }
        if a.abs_diff(b) != 1 {
            return Err(Error::NonAdjacentSlices { a, b });
        }
        Ok((a.min(b), a.max(b)))
    }

    /// Vertices of slice `a` having a 4-neighbor in slice `b`, in raster order.
    pub fn border_vertices(&self, a: usize, b: usize) -> Result<Vec<VertexId>> {
        self.adjacent_pair(a, b)?;
        let rows = self.rows(a)?;
        let row = if b > a { rows.end - 1 } else { rows.start };
        Ok(self.row_vertices(row..row + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: usize, w: usize) -> GridGraph<u64> {
        GridGraph::from_fn(h, w, |u, v| u.0 * 31 + v.0)
    }

    fn brute_force_edges(w: usize, vertices: &[VertexId]) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for &a in vertices {
            for &b in vertices {
                let (ai, aj) = ((a.0 as usize / w) as i64, (a.0 as usize % w) as i64);
                let (bi, bj) = ((b.0 as usize / w) as i64, (b.0 as usize % w) as i64);
                if a < b && (ai - bi).abs() + (aj - bj).abs() == 1 {
                    out.push((a.0, b.0));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn two_by_two_first_slice_has_one_edge() {
        let g = grid(2, 2);
        let p = CausalPartition::new(2, 2, 2).unwrap();
        let edges: Vec<_> = g.slice_edges(&p, 0).unwrap().map(|e| (e.u.0, e.v.0)).collect();
        assert_eq!(edges, vec![(0, 1)]);
    }

    #[test]
    fn four_by_two_first_band_matches_brute_force() {
        let g = grid(4, 2);
        let p = CausalPartition::new(4, 2, 3).unwrap();
        assert_eq!(p.rows(0).unwrap(), 0..2);
        let mut edges: Vec<_> = g.slice_edges(&p, 0).unwrap().map(|e| (e.u.0, e.v.0)).collect();
        edges.sort();
        let expected = brute_force_edges(2, &p.vertices(0).unwrap());
        assert_eq!(edges, expected);
        assert_eq!(edges.len(), 4);
    }

    #[test]
    fn three_by_three_single_slice_has_twelve_edges() {
        let g = grid(3, 3);
        let p = CausalPartition::new(3, 3, 1).unwrap();
        assert_eq!(g.slice_edges(&p, 0).unwrap().count(), 12);
        let all: Vec<_> = (0..9).map(VertexId::from).collect();
        assert_eq!(brute_force_edges(3, &all).len(), 12);
    }

    #[test]
    fn slice_index_out_of_range() {
        let g = grid(3, 3);
        let p = CausalPartition::new(3, 3, 2).unwrap();
        assert!(matches!(
            g.slice_edges(&p, 2),
            Err(Error::SliceOutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn border_rows() {
        let p = CausalPartition::new(4, 2, 3).unwrap();
        assert_eq!(p.border_vertices(0, 1).unwrap(), vec![VertexId(2), VertexId(3)]);
        assert_eq!(p.border_vertices(1, 0).unwrap(), vec![VertexId(4), VertexId(5)]);
        let p = CausalPartition::new(2, 3, 2).unwrap();
        assert_eq!(
            p.border_vertices(0, 1).unwrap(),
            vec![VertexId(0), VertexId(1), VertexId(2)]
        );
        assert!(matches!(
            CausalPartition::new(4, 2, 3).unwrap().border_vertices(0, 2),
            Err(Error::NonAdjacentSlices { a: 0, b: 2 })
        ));
    }

    #[test]
    fn common_neighborhood_is_one_vertical_edge_per_column() {
        let g = grid(4, 2);
        let p = CausalPartition::new(4, 2, 3).unwrap();
        let f: Vec<_> = g
            .common_neighborhood(&p, 0, 1)
            .unwrap()
            .iter()
            .map(|e| (e.u.0, e.v.0))
            .collect();
        assert_eq!(f, vec![(2, 4), (3, 5)]);
        assert_eq!(g.common_neighborhood(&p, 1, 0).unwrap().len(), 2);

        let g = grid(2, 3);
        let p = CausalPartition::new(2, 3, 2).unwrap();
        assert_eq!(g.common_neighborhood(&p, 0, 1).unwrap().len(), 3);
        assert!(g.common_neighborhood(&p, 1, 1).is_err());
    }

    #[test]
    fn partition_rejects_too_many_slices() {
        assert!(CausalPartition::new(3, 5, 4).is_err());
        assert!(CausalPartition::new(3, 5, 0).is_err());
        assert!(CausalPartition::new(3, 5, 3).is_ok());
    }

    #[test]
    fn uneven_bands_cover_all_rows() {
        let p = CausalPartition::new(7, 1, 3).unwrap();
        let rows: Vec<_> = (0..3).map(|t| p.rows(t).unwrap()).collect();
        assert_eq!(rows, vec![0..3, 3..5, 5..7]);
        for v in 0..7u64 {
            let t = p.slice_of(VertexId(v));
            assert!(p.rows(t).unwrap().contains(&(v as usize)));
        }
    }

    #[test]
    fn edge_order_examples() {
        let a = Edge::new(VertexId(0), VertexId(1), 1u64);
        let b = Edge::new(VertexId(0), VertexId(1), 2u64);
        assert!(edge_less(&a, &b));
        let a = Edge::new(VertexId(0), VertexId(1), 3u64);
        let b = Edge::new(VertexId(0), VertexId(2), 3u64);
        assert!(edge_less(&a, &b));
        assert!(!edge_less(&b, &a));

        let e = OrderKey::Edge(Edge::new(VertexId(0), VertexId(1), 0u64));
        assert!(extended_less(&OrderKey::Vertex(VertexId(5)), &e));
        assert!(extended_less::<u64>(
            &OrderKey::Vertex(VertexId(3)),
            &OrderKey::Vertex(VertexId(7))
        ));
        let f = OrderKey::Edge(Edge::new(VertexId(1), VertexId(2), 0u64));
        assert!(extended_less(&e, &f));
    }

    #[test]
    fn weight_lookup_rejects_non_adjacent() {
        let g = grid(3, 3);
        assert!(g.weight(VertexId(2), VertexId(3)).is_none());
        assert!(g.weight(VertexId(0), VertexId(4)).is_none());
        assert_eq!(g.weight(VertexId(1), VertexId(0)), Some(1));
        assert_eq!(g.weight(VertexId(1), VertexId(4)), Some(31 + 4));
    }

    #[test]
    fn pixel_rules() {
        let px = [3u8, 10, 7, 7];
        let g: GridGraph<u64> = GridGraph::from_pixels(2, 2, &px, WeightRule::AbsDiff).unwrap();
        assert_eq!(g.weight(VertexId(0), VertexId(1)), Some(7));
        assert_eq!(g.weight(VertexId(0), VertexId(2)), Some(4));
        let g: GridGraph<u64> = GridGraph::from_pixels(2, 2, &px, WeightRule::MaxVal).unwrap();
        assert_eq!(g.weight(VertexId(1), VertexId(3)), Some(10));
        assert!(GridGraph::<u64>::from_pixels(2, 3, &px, WeightRule::MaxVal).is_err());
        assert!(GridGraph::<u8>::from_pixels(1, 2, &[0u16, 300], WeightRule::AbsDiff).is_err());
    }
}
