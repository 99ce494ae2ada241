use super::{check_intensity, collect, Estimate, Replicator};
use crate::error::{Error, Result};
use crate::math::{ball_volume, norm};
use crate::measure::RadiusMeasure;
use crate::pointproc::{sample_poisson, SeedSpec, Window};

/// Both sides of the Mecke identity for
/// `f((x, r), φ) = 1{x ∈ D, φ(D × R+) <= m}` with `D = B_region_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeckeReport {
    /// `E Σ_{z ∈ Φ} f(z, Φ)`.
    pub lhs: Estimate,
    /// `E ∫ f(z, Φ + δ_z) μ(dz)`, with the integral over `D` and `F` done in
    /// closed form.
    pub rhs: Estimate,
    /// `t |F| vol(D)`, the common value when `m` is unbounded.
    pub first_moment: f64,
}

impl MeckeReport {
    pub fn agrees(&self, k: f64) -> bool {
        self.lhs.agrees_with(&self.rhs, k) || (self.lhs.mean == self.rhs.mean)
    }
}

/// Estimates both sides on independent streams. `max_count = u64::MAX`
/// gives the first-moment case.
pub fn mecke_check<R: Replicator>(
    f: &RadiusMeasure,
    t: f64,
    dim: usize,
    region_radius: f64,
    max_count: u64,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<MeckeReport> {
    check_intensity(t)?;
    if f.is_zero() {
        return Err(Error::InvalidMeasure("radius measure must be non-zero"));
    }
    if !(region_radius.is_finite() && region_radius > 0.0) {
        return Err(Error::param("region_radius", "must be positive and finite"));
    }
    let window = Window::cube(dim, region_radius)?;
    let first_moment = t * f.total_mass() * ball_volume(dim, region_radius);
    let count_in_region = |seed: SeedSpec| -> Result<u64> {
        let c = sample_poisson(f, t, &window, seed)?;
        Ok(c.iter().filter(|(x, _)| norm(x) <= region_radius).count() as u64)
    };
    let lhs_seed = SeedSpec::new(master_seed, 0, "mecke-lhs");
    let rhs_seed = SeedSpec::new(master_seed, 0, "mecke-rhs");
    let lhs = collect(runner.run(reps, |i| {
        let k = count_in_region(lhs_seed.with_replication(i))?;
        Ok(if k <= max_count { k as f64 } else { 0.0 })
    }))?;
    let rhs = collect(runner.run(reps, |i| {
        let k = count_in_region(rhs_seed.with_replication(i))?;
        // adding z itself raises the count by one
        Ok(if k < max_count { first_moment } else { 0.0 })
    }))?;
    Ok(MeckeReport {
        lhs: Estimate::from_samples(&lhs, lhs_seed)?,
        rhs: Estimate::from_samples(&rhs, rhs_seed)?,
        first_moment,
    })
}
