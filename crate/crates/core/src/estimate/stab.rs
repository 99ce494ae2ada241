use alloc::vec::Vec;

use super::{check_intensity, collect, Replicator};
use crate::error::{Error, Result};
use crate::geom::{stabilization_radius, StabRadius, TargetSet};
use crate::measure::RadiusMeasure;
use crate::pointproc::{sample_poisson, SeedSpec, Window};

/// Empirical distribution of the stabilization radius `R_{L,b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabSurvey {
    pub b: f64,
    /// Multiplier `n` of `R = n b` per replication; `None` when unbounded.
    pub radii: Vec<Option<u64>>,
}

impl StabSurvey {
    pub fn censored(&self) -> usize {
        self.radii.iter().filter(|r| r.is_none()).count()
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored() as f64 / self.radii.len() as f64
    }

    /// Number of uncensored observations with `R > k b`, for `k = 1..=k_max`.
    pub fn survival_counts(&self, k_max: u64) -> Vec<u64> {
        (1..=k_max)
            .map(|k| {
                self.radii
                    .iter()
                    .filter(|r| matches!(r, Some(n) if *n > k))
                    .count() as u64
            })
            .collect()
    }

    pub fn uncensored(&self) -> usize {
        self.radii.len() - self.censored()
    }
}

/// Samples `R_{L,b}` in `[-half_width, half_width]^d` dilated by `b`.
pub fn stabilization_survey<R: Replicator>(
    f: &RadiusMeasure,
    t: f64,
    target: &TargetSet,
    dim: usize,
    half_width: f64,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<StabSurvey> {
    check_intensity(t)?;
    if f.is_zero() {
        return Err(Error::InvalidMeasure("radius measure must be non-zero"));
    }
    target.validate(dim)?;
    let b = f.support_bound();
    let window = Window::cube(dim, half_width)?;
    let seed = SeedSpec::new(master_seed, 0, "stabilization");
    let radii = collect(runner.run(reps, |i| {
        let c = sample_poisson(f, t, &window, seed.with_replication(i))?;
        Ok(match stabilization_radius(&c, target, b)? {
            StabRadius::Finite { n, .. } => Some(n),
            StabRadius::Unbounded => None,
        })
    }))?;
    Ok(StabSurvey { b, radii })
}
