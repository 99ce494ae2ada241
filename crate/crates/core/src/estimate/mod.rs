//! Monte Carlo estimators.
//!
//! Every estimator runs `reps` independent replications through a
//! [`Replicator`]. Replication `i` draws all of its randomness from streams
//! keyed by `(master_seed, i, label)`, and the results are reduced in index
//! order, so the output does not depend on how replications are scheduled.

mod derivative;
mod difference;
mod mecke;
mod rate;
mod stab;
mod theta;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::TargetSet;
use crate::math::CompensatedSum;
use crate::measure::RadiusMeasure;
use crate::pointproc::{SeedSpec, Window};

pub use derivative::{
    added_grain_derivative, derivative_report, directional_derivative,
    directional_derivative_parts, directional_finite_difference, finite_difference_derivative,
    russo_derivative, DerivativeReport,
};
pub use difference::difference_operator;
pub use mecke::{mecke_check, MeckeReport};
pub use rate::{rate_bound_report, RateBoundReport};
pub use stab::{stabilization_survey, StabSurvey};
pub use theta::{
    estimate_alpha, estimate_theta, estimate_volume_fraction, theta_curve, theta_over_n,
};

/// Runs replications `0..reps` and returns their results in index order.
pub trait Replicator {
    fn run<T, F>(&self, reps: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs replications one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Replicator for Sequential {
    fn run<T, F>(&self, reps: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..reps).map(f).collect()
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(reps)`.
    pub stderr: f64,
    pub reps: u64,
    /// Stream of replication 0; replication `i` uses the same spec with
    /// `replication_index = i`.
    pub seed: SeedSpec,
}

impl Estimate {
    /// Mean and standard error of `samples`, accumulated in order with
    /// compensated sums.
    pub fn from_samples(samples: &[f64], seed: SeedSpec) -> Result<Self> {
        let reps = samples.len() as u64;
        if reps < 2 {
            return Err(Error::param("reps", "at least 2 replications are needed"));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().copied().collect::<CompensatedSum>().value() / n;
        let ss = samples
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .collect::<CompensatedSum>()
            .value();
        let var = ss / (n - 1.0);
        Ok(Self {
            mean,
            stderr: libm::sqrt(var / n),
            reps,
            seed,
        })
    }

    /// `sqrt(se_a^2 + se_b^2)`, the standard error of a difference of
    /// independent estimates.
    pub fn combined_stderr(&self, other: &Estimate) -> f64 {
        libm::hypot(self.stderr, other.stderr)
    }

    /// `|mean_a - mean_b| < k * combined stderr`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        libm::fabs(self.mean - other.mean) < k * self.combined_stderr(other)
    }
}

/// Model parameters shared by the connection-event estimators: radius
/// measure `F`, target set `L`, box radius `n`, dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub measure: RadiusMeasure,
    pub target: TargetSet,
    pub n: f64,
    pub dim: usize,
}

impl Problem {
    pub fn new(measure: RadiusMeasure, target: TargetSet, n: f64, dim: usize) -> Result<Self> {
        let p = Self {
            measure,
            target,
            n,
            dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > 8 {
            return Err(Error::DimensionError {
                min: 1,
                got: self.dim,
            });
        }
        if self.measure.is_zero() {
            return Err(Error::InvalidMeasure("radius measure must be non-zero"));
        }
        self.target.validate(self.dim)?;
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(Error::param("n", "must be positive and finite"));
        }
        let limit = self.n - 2.0 * self.b();
        let extent = self.target.max_norm();
        if extent > limit {
            return Err(Error::TargetTooLarge { extent, limit });
        }
        Ok(())
    }

    /// Support bound `b` of the radius measure.
    pub fn b(&self) -> f64 {
        self.measure.support_bound()
    }

    /// Sampling window `[-(n + b), n + b]^d`.
    pub fn window(&self) -> Window {
        Window::Box {
            dim: self.dim,
            half_width: self.n + self.b(),
        }
    }

    pub fn with_n(&self, n: f64) -> Result<Self> {
        Self::new(self.measure.clone(), self.target.clone(), n, self.dim)
    }
}

pub(crate) fn check_intensity(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidIntensity(t))
    }
}

/// Collects per-replication results, failing on the first error in index
/// order.
pub(crate) fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}
