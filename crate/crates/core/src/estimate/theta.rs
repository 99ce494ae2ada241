use alloc::vec::Vec;

use super::{check_intensity, collect, Estimate, Problem, Replicator};
use crate::error::{Error, Result};
use crate::geom::{ball_covered, build_graph};
use crate::math::norm;
use crate::measure::RadiusMeasure;
use crate::pointproc::{sample_poisson, LayeredConfiguration, SeedSpec, Window, DEFAULT_POINT_CAP};

/// `θ_L^n(t)`: fraction of replications in which `L` is joined to the
/// complement of `B_n`.
pub fn estimate_theta<R: Replicator>(
    p: &Problem,
    t: f64,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    p.validate()?;
    check_intensity(t)?;
    let window = p.window();
    let seed = SeedSpec::new(master_seed, 0, "theta");
    let samples = collect(runner.run(reps, |i| {
        let c = sample_poisson(&p.measure, t, &window, seed.with_replication(i))?;
        let g = build_graph(&c, &p.target, p.n)?;
        Ok(if g.connects() { 1.0 } else { 0.0 })
    }))?;
    Estimate::from_samples(&samples, seed)
}

/// `θ_L^n` along an increasing grid of intensities, all evaluated on one
/// monotone coupling per replication. Under a fixed seed every replication's
/// indicator is nondecreasing along the grid, hence so are the means.
pub fn theta_curve<R: Replicator>(
    p: &Problem,
    t_grid: &[f64],
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Vec<Estimate>> {
    p.validate()?;
    check_grid(t_grid)?;
    let window = p.window();
    let b = p.b();
    let t_max = t_grid[t_grid.len() - 1];
    let width = t_grid[0] / 4.0;
    let seed = SeedSpec::new(master_seed, 0, "theta-curve");
    let rows = collect(runner.run(reps, |i| {
        let layered = LayeredConfiguration::sample(
            &p.measure,
            t_max,
            width,
            &window,
            b,
            seed.with_replication(i),
            DEFAULT_POINT_CAP,
        )?;
        t_grid
            .iter()
            .map(|&t| {
                let g = build_graph(&layered.at(t), &p.target, p.n)?;
                Ok(if g.connects() { 1.0 } else { 0.0 })
            })
            .collect::<Result<Vec<f64>>>()
    }))?;
    (0..t_grid.len())
        .map(|k| {
            let column: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            Estimate::from_samples(&column, seed)
        })
        .collect()
}

/// `θ_L^n` for every box radius in `n_grid`, all evaluated on one sample per
/// replication drawn for the largest radius. Since `J_L^n` shrinks as `n`
/// grows, every replication's indicator is nonincreasing along the grid.
pub fn theta_over_n<R: Replicator>(
    p: &Problem,
    t: f64,
    n_grid: &[f64],
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Vec<Estimate>> {
    check_intensity(t)?;
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "n_grid",
            "must be non-empty and strictly increasing",
        ));
    }
    let problems = n_grid
        .iter()
        .map(|&n| p.with_n(n))
        .collect::<Result<Vec<_>>>()?;
    let window = problems[problems.len() - 1].window();
    let seed = SeedSpec::new(master_seed, 0, "theta-n");
    let rows = collect(runner.run(reps, |i| {
        let c = sample_poisson(&p.measure, t, &window, seed.with_replication(i))?;
        problems
            .iter()
            .map(|q| Ok(build_graph(&c, &q.target, q.n)?.connects() as u8 as f64))
            .collect::<Result<Vec<f64>>>()
    }))?;
    (0..n_grid.len())
        .map(|k| {
            let column: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            Estimate::from_samples(&column, seed)
        })
        .collect()
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::param("t_grid", "must not be empty"));
    }
    for &t in t_grid {
        check_intensity(t)?;
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("t_grid", "must be strictly increasing"));
    }
    Ok(())
}

/// Fraction of replications in which the origin lies in some grain; the
/// expectation is `1 - exp(-t κ_d ∫ r^d F(dr))`.
pub fn estimate_volume_fraction<R: Replicator>(
    f: &RadiusMeasure,
    t: f64,
    dim: usize,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    check_intensity(t)?;
    if f.is_zero() {
        return Err(Error::InvalidMeasure("radius measure must be non-zero"));
    }
    let b = f.support_bound();
    let window = Window::cube(dim, b)?;
    let seed = SeedSpec::new(master_seed, 0, "volume");
    let samples = collect(runner.run(reps, |i| {
        let c = sample_poisson(f, t, &window, seed.with_replication(i))?;
        Ok(if c.iter().any(|(x, r)| norm(x) <= r) {
            1.0
        } else {
            0.0
        })
    }))?;
    Estimate::from_samples(&samples, seed)
}

/// `α = P{B_b ⊂ Z}` at intensity `t`, with coverage tested on a lattice of
/// spacing `delta`.
pub fn estimate_alpha<R: Replicator>(
    f: &RadiusMeasure,
    t: f64,
    b: f64,
    dim: usize,
    reps: u64,
    delta: f64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidIntensity(t));
    }
    if f.is_zero() {
        return Err(Error::InvalidMeasure("radius measure must be non-zero"));
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::param("b", "must be positive and finite"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::param("delta", "must be positive and finite"));
    }
    let window = Window::cube(dim, b)?;
    let origin = alloc::vec![0.0; dim];
    let seed = SeedSpec::new(master_seed, 0, "alpha");
    let samples = collect(runner.run(reps, |i| {
        let c = sample_poisson(f, t, &window, seed.with_replication(i))?;
        Ok(if ball_covered(&c, &origin, b, delta)? {
            1.0
        } else {
            0.0
        })
    }))?;
    Estimate::from_samples(&samples, seed)
}
