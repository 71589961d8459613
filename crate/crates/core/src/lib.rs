//! Differential evolution for dynamic constrained optimization.
//!
//! The crate bundles everything needed to compare DE/rand/1/bin with a set
//! of diversity mechanisms against the same mechanisms augmented by a small
//! feed-forward optimum predictor, under a shared time budget per
//! environment period:
//!
//! - [`types`] and [`rng`]: positions, evaluations, feasibility rules and
//!   the seeded random streams.
//! - [`problems`]: base landscapes, the dynamic linear constraint, the four
//!   environment-change rules and best-known reference tables.
//! - [`engine`]: the evolution loop, change detection and reaction,
//!   diversity mechanisms and the wall/virtual clock.
//! - [`predictor`]: sample collection and the two-layer network.
//! - [`metrics`]: MOF, BEBC, ARR, SR and mean-rank aggregation.
//! - [`harness`]: suite configuration, the grid runner and CSV output.

pub mod engine;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod predictor;
pub mod problems;
pub mod rng;
pub mod types;

pub use error::{Error, Result};
pub use types::{Bounds, Evaluation, Individual, Population, Position};
