//! Oblivious buy-at-bulk routing on weighted planar graphs.
//!
//! The toolkit builds hierarchical sparse covers of a weighted planar graph,
//! synthesises one fixed routing path per node pair from the cover hierarchy,
//! and evaluates the cost of routing a demand set along those fixed paths
//! under concave fusion functions. Exhaustive desk-scale oracles certify the
//! structural and cost guarantees on small instances.
//!
//! Modules, bottom up:
//!
//! * [`graph`] — weighted planar graphs, deterministic shortest paths,
//!   neighborhoods, depth, and the region machinery used by the covers.
//! * [`cover`] — sparse cover constructions (path clustering, bounded-depth
//!   covers, the general planar cover) and their validator.
//! * [`hierarchy`] — the cover hierarchy, leader election, auxiliary paths,
//!   and the fixed path synthesis for node pairs.
//! * [`cost`] — fusion functions, edge loads, total and per-level costs, and
//!   the upper/lower bound diagnostics for the routing scheme.
//! * [`oracle`] — exhaustive optimal-cost and Steiner baselines for small
//!   instances, plus approximation-ratio reports.
//! * [`generate`] — seeded instance generators (grids, triangulations).
//! * [`experiment`] — the end-to-end pipeline behind the CLI: demand
//!   sampling, evaluation, CSV reports, and whole-instance validation.

pub mod cost;
pub mod cover;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod hierarchy;
pub mod oracle;



pub use cover::{Cluster, Cover, CoverError, CoverValidation};
pub use graph::{GraphError, NodeId, NodeSet, Path, Region, Weight, WeightedPlanarGraph};
pub use hierarchy::{
    AuxiliaryPaths, CoverHierarchy, HierarchyError, HierarchyParams, LevelRule, ParamOverrides,
    PathEntry, PathTable,
};
pub use cost::{
    CanonicalReport, CostError, CostReport, Demand, EdgeCosts, FusionFunction, LevelCosts,
    LoadMap, RBounds,
};
pub use oracle::{OracleBudget, OracleError, RatioReport};
pub use experiment::{
    ExperimentError, ExperimentSpec, GraphSource, PipelineOutput, ValidationOutcome,
};
pub use generate::WeightRule;

