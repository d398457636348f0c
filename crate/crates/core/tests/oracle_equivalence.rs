//! Fast array operations against the definition-level oracle.

mod common;

use std::collections::BTreeSet;

use bph_core::driver::{InsertStep, TraceEvent};
use bph_core::grid::{Edge, EdgeRanking, GridGraph, VertexId};
use bph_core::kruskal::{build_bph, build_graph_bph, build_slice_bph};
use bph_core::oracle::{
    bph_by_edge_addition, distribution, from_local, insert_by_definition, is_insertable, select_by_definition,
    to_local, Region,
};
use bph_core::{join, select, CausalPartition, LocalHierarchy, MemoryStore, Run};
use rand::seq::SliceRandom;
use rand::Rng;

fn two_by_two(weights: &[u64; 4]) -> GridGraph<u64> {
    // edges in raster order of (u, v): (0,1), (0,2), (1,3), (2,3)
    GridGraph::from_fn(2, 2, |u, v| match (u.0, v.0) {
        (0, 1) => weights[0],
        (0, 2) => weights[1],
        (1, 3) => weights[2],
        (2, 3) => weights[3],
        _ => unreachable!(),
    })
}

fn assert_build_matches_definition(g: &GridGraph<u64>) {
    let ranking = EdgeRanking::new(g);
    let fast = build_graph_bph(g);
    let slow = bph_by_edge_addition(g);
    assert!(slow.is_hierarchy());
    assert_eq!(to_local(&slow, &ranking).unwrap(), fast);
    assert_eq!(from_local(&fast, &ranking, None).unwrap(), slow);
}

#[test]
fn build_matches_edge_addition_on_every_2x2_ordering() {
    let mut perms = 0;
    let mut w = [0u64, 1, 2, 3];
    // Heap's algorithm over the 24 orderings.
    fn heap(k: usize, w: &mut [u64; 4], visit: &mut dyn FnMut(&[u64; 4])) {
        if k == 1 {
            visit(w);
            return;
        }
        for i in 0..k {
            heap(k - 1, w, visit);
            if k.is_multiple_of(2) {
                w.swap(i, k - 1);
            } else {
                w.swap(0, k - 1);
            }
        }
    }
    heap(4, &mut w, &mut |w| {
        perms += 1;
        assert_build_matches_definition(&two_by_two(w));
    });
    assert_eq!(perms, 24);
}

#[test]
fn build_matches_edge_addition_on_random_3x3() {
    let mut rng = common::rng(11);
    for _ in 0..200 {
        let g = common::random_grid(&mut rng, 3, 3, 4);
        assert_build_matches_definition(&g);
    }
}

#[test]
fn select_matches_region_intersection() {
    let mut rng = common::rng(12);
    for _ in 0..300 {
        let (h, w) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let g = common::random_grid(&mut rng, h, w, 3);
        let ranking = EdgeRanking::new(&g);
        let full = build_graph_bph(&g);
        let explicit = from_local(&full, &ranking, None).unwrap();

        let mut xs: Vec<VertexId> = common::all_vertices(&g)
            .into_iter()
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        xs.sort();
        let region: Region = xs.iter().copied().collect();
        let fast = select(&full, &xs).unwrap();
        let slow = select_by_definition(&region, &explicit);
        assert_eq!(from_local(&fast, &ranking, Some(&full)).unwrap(), slow);
        if !xs.is_empty() {
            assert_eq!(to_local(&slow, &ranking).unwrap(), fast);
        }

        // Selecting again inside the selection.
        let sub: Vec<VertexId> = xs.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let sub_region: Region = sub.iter().copied().collect();
        let fast2 = select(&fast, &sub).unwrap();
        assert_eq!(
            from_local(&fast2, &ranking, Some(&full)).unwrap(),
            select_by_definition(&sub_region, &explicit)
        );
    }
}

/// BPH of the subgraph induced by slices `0..=last`.
fn prefix_bph(g: &GridGraph<u64>, p: &CausalPartition, last: usize) -> LocalHierarchy<u64> {
    let rows = p.rows(last).unwrap().end;
    let vertices: Vec<_> = (0..rows * g.width()).map(VertexId::from).collect();
    let edges: Vec<_> = g.edges().filter(|e| e.v.index() < rows * g.width()).collect();
    build_bph(&vertices, &edges).unwrap()
}

struct InsertCall {
    slice: usize,
    step: InsertStep,
    x: LocalHierarchy<u64>,
    y: LocalHierarchy<u64>,
    z: LocalHierarchy<u64>,
}

#[test]
fn insert_matches_definition_on_driver_traces() {
    let mut rng = common::rng(13);
    let mut checked = 0;
    for case in 0..60 {
        let (h, w) = if case < 4 {
            (12, 12)
        } else {
            (rng.gen_range(2..=12), rng.gen_range(2..=12))
        };
        let slices = rng.gen_range(2..=h.min(6));
        let g = common::random_grid(&mut rng, h, w, 3);
        let p = CausalPartition::for_graph(&g, slices).unwrap();
        let ranking = EdgeRanking::new(&g);

        let mut calls = Vec::new();
        let mut store = MemoryStore::new();
        Run::new(&g, &p, &mut store)
            .unwrap()
            .with_observer(|ev| {
                if let TraceEvent::Insert { slice, step, x, y, z } = ev {
                    calls.push(InsertCall {
                        slice: *slice,
                        step: *step,
                        x: (*x).clone(),
                        y: (*y).clone(),
                        z: (*z).clone(),
                    });
                }
            })
            .run()
            .unwrap();

        let global = build_graph_bph(&g);
        for call in &calls {
            let prefix = prefix_bph(&g, &p, call.slice);
            let slice_bph = build_slice_bph(&g, &p, call.slice).unwrap();
            let (rx, ry, rz) = match call.step {
                InsertStep::CausalSlice => (&prefix, &slice_bph, &prefix),
                InsertStep::AnticausalSlice | InsertStep::AnticausalBorder => (&global, &prefix, &global),
            };
            let x = from_local(&call.x, &ranking, Some(rx)).unwrap();
            let y = from_local(&call.y, &ranking, Some(ry)).unwrap();
            assert!(
                is_insertable(&x, &y),
                "case {case} slice {} {:?}",
                call.slice,
                call.step
            );
            let expected = insert_by_definition(&x, &y).unwrap();
            assert_eq!(from_local(&call.z, &ranking, Some(rz)).unwrap(), expected);
            assert_eq!(to_local(&expected, &ranking).unwrap(), call.z);
            checked += 1;
        }
    }
    assert!(checked > 200, "only {checked} insert calls checked");
}

/// Smallest leaf below each child of every node, computed from regions.
fn child_representatives(h: &LocalHierarchy<u64>) -> Vec<Vec<usize>> {
    let regions = h.regions();
    let mut reps = vec![Vec::new(); h.len()];
    for n in 0..h.len() {
        let p = h.parent(n);
        if p != n {
            let leaf = h.leaf_index(regions[n][0]).unwrap();
            reps[p].push(leaf);
        }
    }
    reps
}

#[test]
fn join_matches_kruskal_on_derived_graph() {
    let mut rng = common::rng(14);
    let mut pairs = 0;
    while pairs < 500 {
        let (h, w) = (rng.gen_range(2..=8), rng.gen_range(1..=8));
        let slices = rng.gen_range(2..=h);
        let g = common::random_grid(&mut rng, h, w, 4);
        let p = CausalPartition::for_graph(&g, slices).unwrap();
        let mut joins = Vec::new();
        let mut store = MemoryStore::new();
        Run::new(&g, &p, &mut store)
            .unwrap()
            .with_observer(|ev| {
                if let TraceEvent::Join { x, y, f, merged, .. } = ev {
                    joins.push(((*x).clone(), (*y).clone(), f.to_vec(), (*merged).clone()));
                }
            })
            .run()
            .unwrap();

        for (x, y, f, merged) in joins {
            assert_eq!(join(&x, &y, &f).unwrap(), merged);
            let nx = x.num_leaves();
            let mut extra = nx + y.num_leaves();
            let mut edges = Vec::new();
            for (h, shift) in [(&x, 0), (&y, nx)] {
                let reps = child_representatives(h);
                for n in h.num_leaves()..h.len() {
                    let e = h.building_edge(n).unwrap();
                    match reps[n].as_slice() {
                        [a] => {
                            edges.push((a + shift, extra, e));
                            extra += 1;
                        }
                        [a, b] => edges.push((a + shift, b + shift, e)),
                        other => panic!("node with {} children", other.len()),
                    }
                }
            }
            for e in &f {
                let a = x.leaf_index(e.u).unwrap();
                let b = y.leaf_index(e.v).unwrap() + nx;
                edges.push((a, b, *e));
            }
            let mst: BTreeSet<Edge<u64>> = common::kruskal_oracle(extra, &edges).into_iter().collect();
            let built: BTreeSet<Edge<u64>> = common::building_edges(&merged).into_iter().collect();
            assert_eq!(built, mst);
            assert!(merged.num_non_leaves() <= x.num_non_leaves() + y.num_non_leaves() + f.len());
            assert!(merged.validate().is_empty());
            pairs += 1;
        }
    }
}

#[test]
fn distribution_matches_definition() {
    let mut rng = common::rng(15);
    for _ in 0..150 {
        let (h, w) = (rng.gen_range(1..=5), rng.gen_range(1..=4));
        let slices = rng.gen_range(1..=h);
        let g = common::random_grid(&mut rng, h, w, 3);
        let p = CausalPartition::for_graph(&g, slices).unwrap();
        let ranking = EdgeRanking::new(&g);
        let expected = distribution(&bph_by_edge_addition(&g), &p).unwrap();

        let mut store = MemoryStore::new();
        let dist = bph_core::run(&g, &p, &mut store).unwrap();
        for (i, local) in dist.load_all::<u64, _>(&store).unwrap().into_iter().enumerate() {
            assert_eq!(to_local(&expected[i], &ranking).unwrap(), local);
            assert_eq!(local.leaves(), p.vertices(i).unwrap().as_slice());
        }
    }
}

#[test]
fn shuffled_edge_input_does_not_change_the_bph() {
    let mut rng = common::rng(16);
    let g = common::random_grid(&mut rng, 5, 5, 2);
    let vertices = common::all_vertices(&g);
    let mut edges: Vec<_> = g.edges().collect();
    let reference = build_bph(&vertices, &edges).unwrap();
    for _ in 0..20 {
        edges.shuffle(&mut rng);
        assert_eq!(build_bph(&vertices, &edges).unwrap(), reference);
    }
}
