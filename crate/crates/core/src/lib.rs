//! Explicit low-discrepancy colorings of k-subsets of `[N]`.
//!
//! A proper coloring `κ` of the shift graph `Sh(N, l)` ([`shift_graph`]) is
//! lifted to k-sets in two ways ([`colorings`]): the vector of `κ`-colors of
//! the sliding length-`l` windows hashed to a sign, and the sum of the colors
//! of the `k/l` disjoint blocks modulo an odd `c`. The family of k-subsets of
//! a ground set decomposes into cubes ([`cubes`]) on which the window vectors
//! are injective, and [`discrepancy`] measures relative discrepancy exactly
//! or by Monte Carlo, per cube and overall.

pub mod colorings;
pub mod cubes;
pub mod discrepancy;
pub mod error;
pub mod parity;
pub mod shift_graph;
pub mod sorted_set;
pub mod subsets;
pub mod towers;

pub use error::{Error, Result};
pub use shift_graph::ColoringPipeline;
pub use sorted_set::SortedSet;

/// Version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
