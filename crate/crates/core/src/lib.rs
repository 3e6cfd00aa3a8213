//! Exact-arithmetic engine for the triangle map and its n-dimensional simplex
//! generalization, a multidimensional continued-fraction algorithm.
//!
//! * [`triangle`]: the map on pairs `1 >= alpha >= beta > 0` and its symbol sequences.
//! * [`matrices`]: unimodular step matrices, convergent products and recovery of the pair.
//! * [`realization`]: nested triangles realizing any finite symbol prefix.
//! * [`periodicity`]: period detection, period-one cubics and the eigen-elimination.
//! * [`simplex`]: the general n-tuple map with its `(i, j)` regions.
//! * [`verify`]: sweep suites used by the CLI and the acceptance tests.

pub mod error;
pub mod input;
pub mod matrices;
pub mod numeric;
pub mod periodicity;
pub mod realization;
pub mod simplex;
pub mod triangle;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::{ExactNumber, IntPolynomial, RootSpec, Sign};
