//! Finite models of the curve complex: the Farey graph and free-group trees.

mod corridor;
mod measure;
mod slope;
mod truncated;
mod universe;
mod vertex;

pub use corridor::{farey_corridor, ladder_triangles, tree_corridor, tree_geodesic};
pub use measure::{
    additive_constant, coarse_projection, orbit_subset, project, quasi_geodesic_constants,
    quasiconvexity_audit, subgroup_ball, subgroup_words, DiskSetSpec, OrbitSet,
    QuasiGeodesicConstants,
};
pub use slope::{farey_adjacent, Slope};
pub use truncated::{
    cone_off, farey_height, farey_neighbors_within, tree_ball, tree_neighbors, GraphKind,
    GraphPath, TruncatedGraph, UNREACHED,
};
pub use universe::{
    distance_stable, stabilize, too_small_as_none, DistanceCache, Schedule, Stabilized,
    Truncation, Universe,
};
pub use vertex::{ActingGroup, Element, Model, Vertex, MAX_TREE_RANK};
