//! Grain intersection graphs and the finite-box connection event.
//!
//! The event `J_L^n` holds when some chain of pairwise intersecting grains
//! joins the compact target `L` to the complement of the closed ball `B_n`.
//! It is decided on an [`IntersectionGraph`] with two virtual terminals:
//! TARGET (adjacent to grains meeting `L`) and OUTSIDE (adjacent to grains
//! with `|x| + r > n`).

mod bridge;
mod cover;
mod graph;
mod grid;
mod pivotal;
mod stab;
mod target;
mod union_find;

pub use bridge::{bridge_test, BridgeOracle};
pub use cover::ball_covered;
pub use graph::{
    build_adjacency, build_graph, cluster_of_target, connects_j, grains_touch, Adjacency,
    ClusterIndex, IntersectionGraph,
};
pub use grid::SpatialGrid;
pub use pivotal::{pivotal_report, PivotalReport};
pub use stab::{finite_clusters_of, stabilization_radius, StabRadius};
pub use target::TargetSet;
pub use union_find::UnionFind;
