//! Simulation core for the spherical Boolean model.
//!
//! Grains are closed balls `B_r(x)` whose centers form a Poisson process of
//! intensity `t` in `R^d` and whose radii are drawn from a finite measure `F`
//! with bounded support. This crate samples such configurations in finite
//! windows, builds their intersection graphs, decides the finite-box
//! connection event "`L` is joined to the complement of `B_n`", finds pivotal
//! grains, and provides Monte Carlo estimators for the capacity functional and
//! its intensity derivatives.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is
//! abstracted behind [`estimate::Replicator`]; the default
//! [`estimate::Sequential`] runner executes replications in index order.

#![no_std]
// estimator signatures take the sampling parameters positionally; negated
// float comparisons are deliberate so that NaN falls into the rejecting branch;
// coordinate loops index several per-axis arrays at once
#![allow(
    clippy::too_many_arguments,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop
)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod estimate;
pub mod geom;
pub mod math;
pub mod measure;
pub mod pointproc;
pub mod threshold;

pub use error::{Error, Result};
pub use estimate::{Estimate, Replicator, Sequential};
pub use geom::{IntersectionGraph, PivotalReport, StabRadius, TargetSet};
pub use measure::{RadiusMeasure, SignedRadiusMeasure};
pub use pointproc::{Configuration, SeedSpec, Window};
