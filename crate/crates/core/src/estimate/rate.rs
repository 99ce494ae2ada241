use alloc::vec::Vec;

use super::theta::check_grid;
use super::{check_intensity, collect, estimate_alpha, Estimate, Problem, Replicator};
use crate::error::{Error, Result};
use crate::geom::build_graph;
use crate::pointproc::{LayeredConfiguration, SeedSpec, DEFAULT_POINT_CAP};

/// Check of `θ_L(t) - θ_L(t_c) >= α (t - t_c)(1 - θ_L(t)) / t` on a grid above
/// the estimated critical intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBoundReport {
    pub tc_hat: f64,
    pub t_grid: Vec<f64>,
    pub theta: Vec<Estimate>,
    pub theta_at_tc: Estimate,
    /// `θ(t) - θ(t_c)` per grid point, estimated from paired replications.
    pub increment: Vec<Estimate>,
    pub alpha_hat: Estimate,
    /// Tolerance in combined standard errors.
    pub k_sigma: f64,
    pub violations: usize,
}

/// Right-hand side of the bound and its standard error for one grid point.
fn bound(alpha: f64, alpha_se: f64, t: f64, tc: f64, theta: &Estimate) -> (f64, f64) {
    let c = (t - tc) / t;
    let q = 1.0 - theta.mean;
    let value = alpha * c * q;
    let se = libm::hypot(c * q * alpha_se, alpha * c * theta.stderr);
    (value, se)
}

impl RateBoundReport {
    /// `(lhs, rhs, combined stderr, violated)` per grid point for a given `α`
    /// (with standard error `alpha_se`).
    pub fn rows_with(&self, alpha: f64, alpha_se: f64) -> Vec<(f64, f64, f64, bool)> {
        self.t_grid
            .iter()
            .zip(&self.theta)
            .zip(&self.increment)
            .map(|((&t, th), inc)| {
                let (rhs, rhs_se) = bound(alpha, alpha_se, t, self.tc_hat, th);
                let se = libm::hypot(inc.stderr, rhs_se);
                (inc.mean, rhs, se, inc.mean - rhs < -self.k_sigma * se)
            })
            .collect()
    }

    pub fn rows(&self) -> Vec<(f64, f64, f64, bool)> {
        self.rows_with(self.alpha_hat.mean, self.alpha_hat.stderr)
    }

    /// Violations when `α̂` is replaced by the exact constant `alpha`.
    pub fn violations_with(&self, alpha: f64) -> usize {
        self.rows_with(alpha, 0.0).iter().filter(|r| r.3).count()
    }
}

/// Estimates `θ_L^n` at `tc_hat` and along `t_grid` on one monotone coupling
/// per replication, and `α = P_{t_c F}{B_b ⊂ Z}` with lattice spacing `delta`.
pub fn rate_bound_report<R: Replicator>(
    p: &Problem,
    t_grid: &[f64],
    tc_hat: f64,
    b: f64,
    reps: u64,
    delta: f64,
    k_sigma: f64,
    master_seed: u64,
    runner: &R,
) -> Result<RateBoundReport> {
    p.validate()?;
    check_intensity(tc_hat)?;
    check_grid(t_grid)?;
    if t_grid[0] <= tc_hat {
        return Err(Error::param(
            "t_grid",
            "every grid point must exceed tc_hat",
        ));
    }
    let window = p.window();
    let t_max = t_grid[t_grid.len() - 1];
    let width = tc_hat / 8.0;
    let seed = SeedSpec::new(master_seed, 0, "rate-bound");
    let rows = collect(runner.run(reps, |i| {
        let layered = LayeredConfiguration::sample(
            &p.measure,
            t_max,
            width,
            &window,
            p.b(),
            seed.with_replication(i),
            DEFAULT_POINT_CAP,
        )?;
        let j = |t: f64| -> Result<f64> {
            Ok(build_graph(&layered.at(t), &p.target, p.n)?.connects() as u8 as f64)
        };
        let mut row = Vec::with_capacity(t_grid.len() + 1);
        row.push(j(tc_hat)?);
        for &t in t_grid {
            row.push(j(t)?);
        }
        Ok(row)
    }))?;
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let theta_at_tc = Estimate::from_samples(&column(0), seed)?;
    let mut theta = Vec::new();
    let mut increment = Vec::new();
    for k in 1..=t_grid.len() {
        theta.push(Estimate::from_samples(&column(k), seed)?);
        let diff: Vec<f64> = rows.iter().map(|r| r[k] - r[0]).collect();
        increment.push(Estimate::from_samples(&diff, seed)?);
    }
    let alpha_hat = estimate_alpha(
        &p.measure,
        tc_hat,
        b,
        p.dim,
        reps,
        delta,
        master_seed,
        runner,
    )?;
    let mut report = RateBoundReport {
        tc_hat,
        t_grid: t_grid.to_vec(),
        theta,
        theta_at_tc,
        increment,
        alpha_hat,
        k_sigma,
        violations: 0,
    };
    report.violations = report.rows().iter().filter(|r| r.3).count();
    Ok(report)
}
