//! Flow-dependent quadratic Steiner trees in the Euclidean plane.
//!
//! Sources with supplies send flow to a single sink along a directed tree,
//! possibly through added Steiner points. Flows add up at every node and an
//! edge `e` costs `f(e)·|e|²`. The crate provides:
//!
//! - [`geo::solve_full_topology`]: the linear-time mass-merging construction
//!   for full topologies with degree-three Steiner points;
//! - [`algebraic::solve_topology`]: the stationarity linear system for any
//!   topology and any positive supplies;
//! - [`analysis`]: optimality certificates, splits, bead counts and bounds;
//! - [`search::solve_exact`]: exhaustive search under the degree, explicit and
//!   node-weighted bounds on Steiner points;
//! - [`document`] and [`svg`]: the JSON exchange format and figure output.
//!
//! ```
//! use fqst::{fixtures, geo};
//!
//! let (instance, topology) = fixtures::worked_example();
//! let solution = geo::solve_full_topology(&instance, &topology).unwrap();
//! assert!((solution.tree.cost() - 102.0).abs() < 1e-9);
//! ```

// Node ids index several parallel arrays, and `!(x <= tol)` is how NaN is rejected.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod algebraic;
pub mod analysis;
pub mod document;
pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod geo;
pub mod geometry;
pub mod search;
pub mod strategy;
pub mod svg;
pub mod topology;
pub mod tree;

pub use error::{Error, Result};
pub use geometry::{MassPoint, Point};
pub use strategy::BoundStrategy;
pub use topology::{Instance, NodeKind, Topology};
pub use tree::SolvedTree;
