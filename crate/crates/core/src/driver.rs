//! Two-pass computation of the distribution of the BPH over the slices.
//!
//! The causal pass walks the slices top to bottom. For slice `i` it builds
//! the slice BPH, joins the border trees of slices `i - 1` and `i` into the
//! merged hierarchy `M↑_i`, and inserts the lower half of `M↑_i` into the
//! slice BPH to get `B↑_i`. Only `B↑_k` is final after this pass.
//!
//! The anti-causal pass walks back up. `B↓_i` is `B↑_i` with the border of
//! `M↓_{i+1}` inserted, and `M↓_i` is `M↑_i` with the border of `B↓_i`
//! inserted.
//!
//! Every intermediate hierarchy goes through a [`TileStore`]. A
//! [`ResidentGauge`] tracks which hierarchies are alive in memory.

use std::cell::RefCell;
use std::ops::Deref;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::grid::{CausalPartition, Edge, GridGraph};
use crate::hierarchy::LocalHierarchy;
use crate::insert::insert;
use crate::join::join;
use crate::kruskal::build_slice_bph;
use crate::select::select;
use crate::store::{Channel, TileStore};
use crate::weight::Weight;

/// Class of a resident hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Residency {
    /// A hierarchy whose ground is a whole slice.
    Slice,
    /// A border tree or a merged hierarchy over two boundary rows.
    Border,
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct GaugeReport {
    pub current_nodes: usize,
    pub peak_nodes: usize,
    pub current_slices: usize,
    pub peak_slices: usize,
    pub current_borders: usize,
    pub peak_borders: usize,
    /// Largest slice hierarchy ever held.
    pub max_slice_nodes: usize,
    /// Largest border hierarchy ever held.
    pub max_border_nodes: usize,
}

impl GaugeReport {
    /// Resident node ceiling for two slice hierarchies plus four border
    /// hierarchies at their observed maximum sizes.
    pub fn ceiling(&self) -> usize {
        2 * self.max_slice_nodes + 4 * self.max_border_nodes
    }
}

/// Shared counter of the hierarchies currently held in memory.
#[derive(Debug, Default, Clone)]
pub struct ResidentGauge(Rc<RefCell<GaugeReport>>);

impl ResidentGauge {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn hold<W: Weight>(&self, kind: Residency, h: LocalHierarchy<W>) -> Resident<W> {
        let nodes = h.len();
        let mut r = self.0.borrow_mut();
        r.current_nodes += nodes;
        r.peak_nodes = r.peak_nodes.max(r.current_nodes);
        match kind {
            Residency::Slice => {
                r.current_slices += 1;
                r.peak_slices = r.peak_slices.max(r.current_slices);
                r.max_slice_nodes = r.max_slice_nodes.max(nodes);
            }
            Residency::Border => {
                r.current_borders += 1;
                r.peak_borders = r.peak_borders.max(r.current_borders);
                r.max_border_nodes = r.max_border_nodes.max(nodes);
            }
        }
        Resident {
            h,
            kind,
            nodes,
            gauge: self.clone(),
        }
    }

    pub fn report(&self) -> GaugeReport {
        self.0.borrow().clone()
    }

    fn release(&self, kind: Residency, nodes: usize) {
        let mut r = self.0.borrow_mut();
        r.current_nodes -= nodes;
        match kind {
            Residency::Slice => r.current_slices -= 1,
            Residency::Border => r.current_borders -= 1,
        }
    }
}

/// A hierarchy accounted for in a [`ResidentGauge`] until dropped.
#[derive(Debug)]
pub struct Resident<W: Weight> {
    h: LocalHierarchy<W>,
    kind: Residency,
    nodes: usize,
    gauge: ResidentGauge,
}

impl<W: Weight> Resident<W> {
    pub fn into_inner(mut self) -> LocalHierarchy<W> {
        std::mem::take(&mut self.h)
    }
}

impl<W: Weight> Deref for Resident<W> {
    type Target = LocalHierarchy<W>;

    fn deref(&self) -> &LocalHierarchy<W> {
        &self.h
    }
}

impl<W: Weight> Drop for Resident<W> {
    fn drop(&mut self) {
        self.gauge.release(self.kind, self.nodes);
    }
}

/// Which insert call of the algorithm produced a [`TraceEvent::Insert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertStep {
    /// `B↑_i := insert(select(γ(S_i, S_{i-1}), M↑_i), B_{S_i})`
    CausalSlice,
    /// `B↓_i := insert(select(γ(S_i, S_{i+1}), M↓_{i+1}), B↑_i)`
    AnticausalSlice,
    /// `M↓_i := insert(select(γ(S_i, S_{i-1}), B↓_i), M↑_i)`
    AnticausalBorder,
}

/// Intermediate results reported to an observer.
#[derive(Debug)]
pub enum TraceEvent<'a, W> {
    SliceBuilt {
        slice: usize,
        bph: &'a LocalHierarchy<W>,
    },
    Join {
        slice: usize,
        x: &'a LocalHierarchy<W>,
        y: &'a LocalHierarchy<W>,
        f: &'a [Edge<W>],
        merged: &'a LocalHierarchy<W>,
    },
    Insert {
        slice: usize,
        step: InsertStep,
        x: &'a LocalHierarchy<W>,
        y: &'a LocalHierarchy<W>,
        z: &'a LocalHierarchy<W>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStats {
    pub gauge: GaugeReport,
    pub causal_visits: Vec<u32>,
    pub anticausal_visits: Vec<u32>,
}

/// Outcome of a run. The local hierarchies themselves stay in the store
/// (channel [`Channel::BDown`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub node_counts: Vec<usize>,
    pub leaf_counts: Vec<usize>,
    pub stats: RunStats,
}

impl Distribution {
    pub fn num_slices(&self) -> usize {
        self.node_counts.len()
    }

    /// Loads the local hierarchy of slice `i`.
    pub fn load<W: Weight, S: TileStore>(&self, store: &S, i: usize) -> Result<LocalHierarchy<W>> {
        store.load(i, Channel::BDown)
    }

    /// Loads every local hierarchy. Only sensible at test scale.
    pub fn load_all<W: Weight, S: TileStore>(&self, store: &S) -> Result<Vec<LocalHierarchy<W>>> {
        (0..self.num_slices()).map(|i| self.load(store, i)).collect()
    }
}

type Observer<'a, W> = Box<dyn FnMut(&TraceEvent<'_, W>) + 'a>;

/// State of one run of the two passes over a graph.
pub struct Run<'a, W: Weight, S> {
    graph: &'a GridGraph<W>,
    partition: &'a CausalPartition,
    store: &'a mut S,
    gauge: ResidentGauge,
    causal_visits: Vec<u32>,
    anticausal_visits: Vec<u32>,
    causal_done: bool,
    observer: Option<Observer<'a, W>>,
}

impl<'a, W: Weight, S: TileStore> Run<'a, W, S> {
    pub fn new(graph: &'a GridGraph<W>, partition: &'a CausalPartition, store: &'a mut S) -> Result<Self> {
        if partition.height() != graph.height() || partition.width() != graph.width() {
            return Err(Error::Precondition(format!(
                "partition is {}x{} but graph is {}x{}",
                partition.height(),
                partition.width(),
                graph.height(),
                graph.width()
            )));
        }
        let n = partition.num_slices();
        Ok(Run {
            graph,
            partition,
            store,
            gauge: ResidentGauge::new(),
            causal_visits: vec![0; n],
            anticausal_visits: vec![0; n],
            causal_done: false,
            observer: None,
        })
    }

    /// Registers a callback receiving every intermediate hierarchy.
    pub fn with_observer(mut self, f: impl FnMut(&TraceEvent<'_, W>) + 'a) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn gauge(&self) -> &ResidentGauge {
        &self.gauge
    }

    fn emit(&mut self, event: TraceEvent<'_, W>) {
        if let Some(obs) = self.observer.as_mut() {
            obs(&event);
        }
    }

    /// Fills channels `bup` and `mup` of the store.
    pub fn causal_pass(&mut self) -> Result<()> {
        let (g, p) = (self.graph, self.partition);
        let gauge = self.gauge.clone();
        let mut previous: Option<Resident<W>> = None;
        for i in 0..p.num_slices() {
            self.causal_visits[i] += 1;
            let slice_bph = gauge.hold(Residency::Slice, build_slice_bph(g, p, i)?);
            self.emit(TraceEvent::SliceBuilt {
                slice: i,
                bph: &slice_bph,
            });
            let Some(prev) = previous.take() else {
                self.store.save(i, Channel::BUp, &slice_bph)?;
                previous = Some(slice_bph);
                continue;
            };

            let upper_border = gauge.hold(Residency::Border, select(&prev, &p.border_vertices(i - 1, i)?)?);
            drop(prev);
            let lower = p.border_vertices(i, i - 1)?;
            let lower_border = gauge.hold(Residency::Border, select(&slice_bph, &lower)?);
            let f = g.common_neighborhood(p, i - 1, i)?;
            let merged = gauge.hold(Residency::Border, join(&upper_border, &lower_border, &f)?);
            self.emit(TraceEvent::Join {
                slice: i,
                x: &upper_border,
                y: &lower_border,
                f: &f,
                merged: &merged,
            });
            drop(upper_border);
            drop(lower_border);
            self.store.save(i, Channel::MUp, &merged)?;

            let merged_lower = gauge.hold(Residency::Border, select(&merged, &lower)?);
            drop(merged);
            let b_up = gauge.hold(Residency::Slice, insert(&merged_lower, &slice_bph)?);
            self.emit(TraceEvent::Insert {
                slice: i,
                step: InsertStep::CausalSlice,
                x: &merged_lower,
                y: &slice_bph,
                z: &b_up,
            });
            drop(merged_lower);
            drop(slice_bph);
            self.store.save(i, Channel::BUp, &b_up)?;
            previous = Some(b_up);
        }
        self.causal_done = true;
        Ok(())
    }

    /// Fills channels `bdown` and `mdown` of the store from `bup` and `mup`.
    pub fn anticausal_pass(&mut self) -> Result<Distribution> {
        if !self.causal_done {
            return Err(Error::Precondition("the causal pass must run first".into()));
        }
        let p = self.partition;
        let gauge = self.gauge.clone();
        let n = p.num_slices();
        let last = n - 1;
        let mut node_counts = vec![0; n];
        let mut leaf_counts = vec![0; n];

        self.anticausal_visits[last] += 1;
        let b_last: Resident<W> = gauge.hold(Residency::Slice, self.store.load(last, Channel::BUp)?);
        self.store.save(last, Channel::BDown, &b_last)?;
        node_counts[last] = b_last.len();
        leaf_counts[last] = b_last.num_leaves();
        drop(b_last);
        let mut merged_below: Option<Resident<W>> = None;
        if last > 0 {
            let m: Resident<W> = gauge.hold(Residency::Border, self.store.load(last, Channel::MUp)?);
            self.store.save(last, Channel::MDown, &m)?;
            merged_below = Some(m);
        }

        for i in (0..last).rev() {
            self.anticausal_visits[i] += 1;
            let m_down = merged_below.take().expect("merged hierarchy of the slice below");
            let border = gauge.hold(Residency::Border, select(&m_down, &p.border_vertices(i, i + 1)?)?);
            drop(m_down);
            let b_up: Resident<W> = gauge.hold(Residency::Slice, self.store.load(i, Channel::BUp)?);
            let b_down = gauge.hold(Residency::Slice, insert(&border, &b_up)?);
            self.emit(TraceEvent::Insert {
                slice: i,
                step: InsertStep::AnticausalSlice,
                x: &border,
                y: &b_up,
                z: &b_down,
            });
            drop(border);
            drop(b_up);
            self.store.save(i, Channel::BDown, &b_down)?;
            node_counts[i] = b_down.len();
            leaf_counts[i] = b_down.num_leaves();

            if i > 0 {
                let border = gauge.hold(Residency::Border, select(&b_down, &p.border_vertices(i, i - 1)?)?);
                drop(b_down);
                let m_up: Resident<W> = gauge.hold(Residency::Border, self.store.load(i, Channel::MUp)?);
                let m_down = gauge.hold(Residency::Border, insert(&border, &m_up)?);
                self.emit(TraceEvent::Insert {
                    slice: i,
                    step: InsertStep::AnticausalBorder,
                    x: &border,
                    y: &m_up,
                    z: &m_down,
                });
                drop(border);
                drop(m_up);
                self.store.save(i, Channel::MDown, &m_down)?;
                merged_below = Some(m_down);
            }
        }

        Ok(Distribution {
            node_counts,
            leaf_counts,
            stats: RunStats {
                gauge: self.gauge.report(),
                causal_visits: self.causal_visits.clone(),
                anticausal_visits: self.anticausal_visits.clone(),
            },
        })
    }

    /// Both passes.
    pub fn run(mut self) -> Result<Distribution> {
        self.causal_pass()?;
        self.anticausal_pass()
    }
}

pub fn causal_pass<W: Weight, S: TileStore>(g: &GridGraph<W>, p: &CausalPartition, store: &mut S) -> Result<()> {
    Run::new(g, p, store)?.causal_pass()
}

/// Anti-causal pass over a store already filled by [`causal_pass`].
pub fn anticausal_pass<W: Weight, S: TileStore>(
    g: &GridGraph<W>,
    p: &CausalPartition,
    store: &mut S,
) -> Result<Distribution> {
    let mut run = Run::new(g, p, store)?;
    run.causal_done = true;
    run.anticausal_pass()
}

pub fn run<W: Weight, S: TileStore>(g: &GridGraph<W>, p: &CausalPartition, store: &mut S) -> Result<Distribution> {
    Run::new(g, p, store)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kruskal::build_graph_bph;
    use crate::store::MemoryStore;

    fn check(g: &GridGraph<u64>, slices: usize) {
        let p = CausalPartition::for_graph(g, slices).unwrap();
        let mut store = MemoryStore::new();
        let dist = run(g, &p, &mut store).unwrap();
        let global = build_graph_bph(g);
        for (i, local) in dist.load_all::<u64, _>(&store).unwrap().iter().enumerate() {
            let expected = select(&global, &p.vertices(i).unwrap()).unwrap();
            assert_eq!(local, &expected, "slice {i} of {slices}");
        }
    }

    #[test]
    fn single_slice_is_the_global_bph() {
        let g = GridGraph::from_fn(3, 4, |a, b| (a.0 * 3 + b.0) % 5);
        let p = CausalPartition::for_graph(&g, 1).unwrap();
        let mut store = MemoryStore::new();
        let dist = run(&g, &p, &mut store).unwrap();
        assert_eq!(store.load::<u64>(0, Channel::BUp).unwrap(), build_graph_bph(&g));
        assert_eq!(dist.load::<u64, _>(&store, 0).unwrap(), build_graph_bph(&g));
        assert_eq!(dist.stats.causal_visits, vec![1]);
    }

    #[test]
    fn small_grids_match_global_selection() {
        for slices in 1..=4 {
            let g = GridGraph::from_fn(4, 3, |a, b| (a.0 * 7 + b.0 * 11) % 4);
            check(&g, slices);
        }
    }

    #[test]
    fn gauge_returns_to_zero() {
        let g = GridGraph::from_fn(6, 5, |a, b| (a.0 * 5 + b.0 * 3) % 6);
        let p = CausalPartition::for_graph(&g, 3).unwrap();
        let mut store = MemoryStore::new();
        let dist = run(&g, &p, &mut store).unwrap();
        let r = &dist.stats.gauge;
        assert_eq!(r.current_nodes, 0);
        assert!(r.peak_slices <= 2);
        assert!(r.peak_nodes <= r.ceiling());
        assert_eq!(dist.stats.anticausal_visits, vec![1, 1, 1]);
    }

    #[test]
    fn anticausal_needs_causal() {
        let g = GridGraph::from_fn(2, 2, |_, _| 1u64);
        let p = CausalPartition::for_graph(&g, 2).unwrap();
        let mut store = MemoryStore::new();
        assert!(Run::new(&g, &p, &mut store).unwrap().anticausal_pass().is_err());
        assert!(matches!(
            anticausal_pass(&g, &p, &mut store),
            Err(Error::MissingTile { .. })
        ));
    }
}
