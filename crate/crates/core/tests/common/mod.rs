#![allow(dead_code)]

use bph_core::grid::{Edge, GridGraph, VertexId};
use bph_core::hierarchy::LocalHierarchy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Grid with weights drawn uniformly from `0..max_weight` (small ranges force ties).
pub fn random_grid(rng: &mut impl Rng, h: usize, w: usize, max_weight: u64) -> GridGraph<u64> {
    GridGraph::from_fn(h, w, |_, _| rng.gen_range(0..max_weight))
}

/// Minimum spanning forest by plain Kruskal with component relabelling
/// (no union-find), over arbitrary vertex ids.
pub fn kruskal_oracle(num_vertices: usize, edges: &[(usize, usize, Edge<u64>)]) -> Vec<Edge<u64>> {
    let mut label: Vec<usize> = (0..num_vertices).collect();
    let mut sorted = edges.to_vec();
    sorted.sort_by_key(|e| e.2);
    let mut out = Vec::new();
    for (a, b, e) in sorted {
        let (la, lb) = (label[a], label[b]);
        if la != lb {
            for l in label.iter_mut() {
                if *l == lb {
                    *l = la;
                }
            }
            out.push(e);
        }
    }
    out
}

pub fn building_edges(h: &LocalHierarchy<u64>) -> Vec<Edge<u64>> {
    (h.num_leaves()..h.len()).map(|n| h.building_edge(n).unwrap()).collect()
}

pub fn all_vertices(g: &GridGraph<u64>) -> Vec<VertexId> {
    (0..g.num_vertices()).map(VertexId::from).collect()
}
