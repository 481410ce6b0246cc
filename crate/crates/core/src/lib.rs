//! Simulation laboratory for the frog model on finite graphs.
//!
//! Sleeping particles sit on the vertices of a graph, Poisson(λ) per site,
//! plus one extra particle at the origin which starts awake. Every awake
//! particle performs a simple random walk for a fixed lifetime and wakes the
//! particles at each vertex it visits. The crate computes, per realization
//! and exactly, the activation time of every vertex, the susceptibility
//! (smallest lifetime for which every vertex is visited) and the cover time,
//! together with the cover-time machinery for independent walkers, numerical
//! estimators and an experiment runner.
//!
//! Module map:
//! - [`graph`]: graph families, edge-list IO, box partitions and exact
//!   small-graph linear algebra.
//! - [`sampling`]: reproducible Poisson particle fields, walk streams and
//!   first-hit maps.
//! - [`frog`]: activation times, susceptibility, cover time, restricted
//!   variants and the event-driven oracle.
//! - [`multiwalk`]: cover by independent walkers, threshold statistics and
//!   Matthews bounds.
//! - [`estimators`]: escape probability, range statistics, hitting
//!   probabilities, binomial large deviations and site percolation.
//! - [`experiments`]: theory formulas, recipes, statistics and output.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod frog;
pub mod graph;
pub mod multiwalk;
pub mod rng;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Family, Graph, Vertex};
