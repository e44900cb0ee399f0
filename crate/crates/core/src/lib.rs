//! Multilayered random geometric graphs and rainbow connectivity.
//!
//! A multilayered geometric graph places the same `n` vertices
//! independently in `h` copies of the unit square and joins two vertices in
//! layer `k` when their layer-`k` positions are within distance `r`. Edges
//! are colored by layer. The graph is rainbow connected when every pair of
//! vertices is joined by a path whose edges have pairwise distinct colors.
//!
//! Modules:
//! - [`geometry`]: uniform sampling, grid neighbor queries, exact pair
//!   adjacency probability.
//! - [`graph`] and [`document`]: graph construction and JSON documents.
//! - [`rainbow`]: subset-DP rainbow reachability, witnesses, σ-ordered
//!   frontiers and a brute-force oracle.
//! - [`analysis`]: threshold formulas and seeded Monte Carlo experiments.

pub mod analysis;
pub mod bitset;
pub mod document;
pub mod error;
pub mod fixture;
pub mod geometry;
pub mod graph;
pub mod rainbow;
pub mod rng;

pub use error::{Error, Result};
pub use geometry::{
    pair_adjacency_probability, radius_neighbors, sample_positions, GridIndex, Point,
};
pub use graph::{GraphParams, LayerAdjacency, MultilayerGraph, PositionAssignment};
pub use rainbow::{
    brute_force_rainbow_reachable, is_rainbow_connected, rainbow_reachable, rainbow_report,
    rainbow_verdict, rainbow_witness, sigma_neighborhoods, ColorPermutation, ColorSet,
    ExpansionProfile, RainbowReport, WitnessPath,
};
pub use rng::StreamKey;
