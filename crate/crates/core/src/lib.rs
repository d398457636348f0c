//! Out-of-core binary partition hierarchies (BPH) on 4-adjacency grid graphs.
//!
//! The grid is cut into horizontal bands of rows ("slices"). Each slice gets
//! its own hierarchy, and the three operations [`select`], [`join`] and
//! [`insert`] propagate border information forward then backward across the
//! slices, so that every slice ends up holding exactly the part of the global
//! hierarchy whose regions meet it. No more than two slices' worth of
//! hierarchy data has to be in memory at once.
//!
//! The core is generic over the unsigned integer type used for edge weights
//! (see [`Weight`]); the aliases below fix it to the common choices.

pub mod driver;
pub mod error;
pub mod grid;
pub mod hierarchy;
pub mod insert;
pub mod join;
pub mod kruskal;
pub mod oracle;
pub mod select;
pub mod store;
pub mod union_find;
pub mod weight;

pub use driver::{anticausal_pass, causal_pass, run, Distribution, ResidentGauge, Run, TraceEvent};
pub use error::{Error, Result};
pub use grid::{
    edge_less, extended_less, CausalPartition, Edge, EdgeRanking, GridGraph, OrderKey, VertexId, WeightRule,
};
pub use hierarchy::{LocalHierarchy, MapEntry, Violation};
pub use insert::insert;
pub use join::{a_descendent, join, Desc};
pub use kruskal::{build_bph, mst_edges};
pub use select::select;
pub use store::{Channel, DirectoryStore, MemoryStore, TileStore};
pub use weight::{OpCounter, Weight};

/// Grid graph with 64-bit weights, the default used by the CLI.
pub type Grid = GridGraph<u64>;
/// Grid graph with 16-bit weights (enough for 8/16-bit image gradients).
pub type Grid16 = GridGraph<u16>;
/// Grid graph with 32-bit weights.
pub type Grid32 = GridGraph<u32>;

/// Local hierarchy with 64-bit weights.
pub type Hierarchy = LocalHierarchy<u64>;
/// Local hierarchy with 16-bit weights.
pub type Hierarchy16 = LocalHierarchy<u16>;
/// Local hierarchy with 32-bit weights.
pub type Hierarchy32 = LocalHierarchy<u32>;

/// Weighted grid edge with 64-bit weight.
pub type Edge64 = Edge<u64>;
