use alloc::vec::Vec;

use rand::Rng;

use super::{check_intensity, collect, Estimate, Problem, Replicator};
use crate::error::{Error, Result};
use crate::geom::{build_graph, pivotal_report, BridgeOracle};
use crate::measure::{QuantileTable, RadiusMeasure, SignedRadiusMeasure};
use crate::pointproc::{
    coupled_pair, sample_poisson, sample_poisson_in, SeedSpec, DEFAULT_POINT_CAP,
};

/// Step used to check that `F + a G` is a measure for some small `a > 0`.
const PROBE_STEP: f64 = 1e-6;

/// The three estimates of `d θ_L^n / dt` at one intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    pub t: f64,
    pub finite_difference: Estimate,
    pub russo: Estimate,
    pub added_grain: Estimate,
}

impl DerivativeReport {
    pub fn estimates(&self) -> [(&'static str, &Estimate); 3] {
        [
            ("finite_difference", &self.finite_difference),
            ("russo", &self.russo),
            ("added_grain", &self.added_grain),
        ]
    }

    /// `(name_a, name_b, |mean_a - mean_b|, combined stderr)` for each pair.
    pub fn pairwise(&self) -> Vec<(&'static str, &'static str, f64, f64)> {
        let e = self.estimates();
        let mut out = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = (e[i].1, e[j].1);
                out.push((
                    e[i].0,
                    e[j].0,
                    libm::fabs(a.mean - b.mean),
                    a.combined_stderr(b),
                ));
            }
        }
        out
    }

    /// Every pair differs by less than `k` combined standard errors.
    pub fn agrees(&self, k: f64) -> bool {
        self.pairwise().iter().all(|(_, _, d, se)| *d < k * se)
    }
}

/// Mean number of pivotal grains divided by `t`.
pub fn russo_derivative<R: Replicator>(
    p: &Problem,
    t: f64,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    p.validate()?;
    check_intensity(t)?;
    let window = p.window();
    let seed = SeedSpec::new(master_seed, 0, "russo");
    let samples = collect(runner.run(reps, |i| {
        let c = sample_poisson(&p.measure, t, &window, seed.with_replication(i))?;
        let g = build_graph(&c, &p.target, p.n)?;
        Ok(pivotal_report(&g).pivotal.len() as f64 / t)
    }))?;
    Estimate::from_samples(&samples, seed)
}

/// Centered difference quotient `(1{J in C_(t+dt/2)} - 1{J in C_(t-dt/2)}) / dt`
/// on a monotone coupling, so every summand is `0` or `1/dt`.
pub fn finite_difference_derivative<R: Replicator>(
    p: &Problem,
    t: f64,
    dt: f64,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    p.validate()?;
    check_intensity(t)?;
    if !(dt > 0.0 && dt <= t / 10.0) {
        return Err(Error::param("dt", "must satisfy 0 < dt <= t/10"));
    }
    let window = p.window();
    let seed = SeedSpec::new(master_seed, 0, "finite-difference");
    let samples = collect(runner.run(reps, |i| {
        let (lo, hi) = coupled_pair(
            &p.measure,
            t - dt / 2.0,
            dt,
            &window,
            seed.with_replication(i),
        )?;
        let j_lo = build_graph(&lo, &p.target, p.n)?.connects();
        let j_hi = build_graph(&hi, &p.target, p.n)?.connects();
        Ok((j_hi as u8 as f64 - j_lo as u8 as f64) / dt)
    }))?;
    Estimate::from_samples(&samples, seed)
}

/// Radius law `m / |m|` with weight `|m|`.
struct RadiusSampler {
    table: Option<QuantileTable>,
    mass: f64,
}

impl RadiusSampler {
    fn new(m: &RadiusMeasure) -> Self {
        Self {
            table: (!m.is_zero()).then(|| m.quantile_table()),
            mass: m.total_mass(),
        }
    }
}

/// Monte Carlo estimate of `∫∫ 1{adding (x, r) creates J} dx m_k(dr)` for each
/// sampler `m_k`, using the same `x` for every sampler. The integrand vanishes
/// unless `B_r(x)` meets the cluster of `L`, so `x` is drawn from the bounding
/// box of that cluster dilated by `reach`.
fn bridge_integrals<G: Rng>(
    oracle: &BridgeOracle,
    samplers: &[RadiusSampler],
    reach: f64,
    mc_points: u64,
    rng: &mut G,
) -> Vec<f64> {
    if oracle.connected() {
        return alloc::vec![0.0; samplers.len()];
    }
    let (mut lo, mut hi) = oracle.target_region_bounds();
    for (l, h) in lo.iter_mut().zip(hi.iter_mut()) {
        *l -= reach;
        *h += reach;
    }
    let vol: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let mut hits = alloc::vec![0u64; samplers.len()];
    let mut x = alloc::vec![0.0; lo.len()];
    for _ in 0..mc_points {
        for k in 0..x.len() {
            let u: f64 = rng.random();
            x[k] = lo[k] + (hi[k] - lo[k]) * u;
        }
        for (s, hit) in samplers.iter().zip(hits.iter_mut()) {
            let u: f64 = rng.random();
            if let Some(table) = &s.table {
                if oracle.query(&x, table.quantile(u)) {
                    *hit += 1;
                }
            }
        }
    }
    samplers
        .iter()
        .zip(&hits)
        .map(|(s, &h)| s.mass * vol * h as f64 / mc_points as f64)
        .collect()
}

fn check_mc_points(mc_points: u64) -> Result<()> {
    if mc_points == 0 {
        return Err(Error::param("mc_points", "must be positive"));
    }
    Ok(())
}

/// `∫∫ P{Φ ∉ J, Φ + δ_(x,r) ∈ J} dx F(dr)` at intensity `t`, estimated per
/// configuration with `mc_points` uniform grain insertions.
pub fn added_grain_derivative<R: Replicator>(
    p: &Problem,
    t: f64,
    reps: u64,
    mc_points: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    p.validate()?;
    check_intensity(t)?;
    check_mc_points(mc_points)?;
    let window = p.window();
    let samplers = [RadiusSampler::new(&p.measure)];
    let reach = 2.0 * p.b();
    let seed = SeedSpec::new(master_seed, 0, "added-grain");
    let samples = collect(runner.run(reps, |i| {
        let s = seed.with_replication(i);
        let c = sample_poisson(&p.measure, t, &window, s)?;
        let oracle = BridgeOracle::new(&c, &p.target, p.n)?;
        let mut rng = s.with_lane(1).rng();
        Ok(bridge_integrals(&oracle, &samplers, reach, mc_points, &mut rng)[0])
    }))?;
    Estimate::from_samples(&samples, seed)
}

/// Derivative of `h ↦ θ_L^n(F + h G)` at `h = 0`, where the intensity measure
/// is `F` itself. Estimated as the added-grain integral against `G+` minus the
/// one against `G-`, with shared configurations and insertion points.
pub fn directional_derivative<R: Replicator>(
    p: &Problem,
    g: &SignedRadiusMeasure,
    reps: u64,
    mc_points: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    p.measure.combine(PROBE_STEP, g)?;
    directional_derivative_parts(p, g.pos(), g.neg(), reps, mc_points, master_seed, runner)
}

/// [`directional_derivative`] for `G = pos - neg` with arbitrary positive
/// parts, not necessarily mutually singular.
pub fn directional_derivative_parts<R: Replicator>(
    p: &Problem,
    pos: &RadiusMeasure,
    neg: &RadiusMeasure,
    reps: u64,
    mc_points: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    p.validate()?;
    check_mc_points(mc_points)?;
    let window = p.window();
    let samplers = [RadiusSampler::new(pos), RadiusSampler::new(neg)];
    let reach = 2.0 * p.b().max(pos.support_bound()).max(neg.support_bound());
    let seed = SeedSpec::new(master_seed, 0, "directional");
    let samples = collect(runner.run(reps, |i| {
        let s = seed.with_replication(i);
        let c = sample_poisson(&p.measure, 1.0, &window, s)?;
        let oracle = BridgeOracle::new(&c, &p.target, p.n)?;
        let mut rng = s.with_lane(1).rng();
        let v = bridge_integrals(&oracle, &samplers, reach, mc_points, &mut rng);
        Ok(v[0] - v[1])
    }))?;
    Estimate::from_samples(&samples, seed)
}

/// `(θ_L^n(F + h G) - θ_L^n(F)) / h` on the coupling
/// `Φ_(F - h G-) + Ψ_(h G+)` versus `Φ_(F - h G-) + Ψ_(h G-)`.
pub fn directional_finite_difference<R: Replicator>(
    p: &Problem,
    g: &SignedRadiusMeasure,
    h: f64,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    p.validate()?;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param("h", "must be positive and finite"));
    }
    let neg_only = SignedRadiusMeasure::new(RadiusMeasure::zero(), g.neg().clone())?;
    let base = p.measure.combine(h, &neg_only)?;
    p.measure.combine(h, g)?;
    let up = scaled(g.pos(), h)?;
    let down = scaled(g.neg(), h)?;
    let margin = p.b().max(g.support_bound());
    let window = p.window();
    let seed = SeedSpec::new(master_seed, 0, "directional-difference");
    let samples = collect(runner.run(reps, |i| {
        let s = seed.with_replication(i);
        let sample = |m: &RadiusMeasure, lane| {
            sample_poisson_in(
                m,
                1.0,
                &window,
                margin,
                s.with_lane(lane),
                DEFAULT_POINT_CAP,
            )
        };
        let c = sample(&base, 0)?;
        let with_up = c.superpose(&sample(&up, 1)?)?;
        let with_down = c.superpose(&sample(&down, 2)?)?;
        let j_up = build_graph(&with_up, &p.target, p.n)?.connects();
        let j_down = build_graph(&with_down, &p.target, p.n)?.connects();
        Ok((j_up as u8 as f64 - j_down as u8 as f64) / h)
    }))?;
    Estimate::from_samples(&samples, seed)
}

fn scaled(m: &RadiusMeasure, h: f64) -> Result<RadiusMeasure> {
    if m.is_zero() {
        Ok(RadiusMeasure::zero())
    } else {
        m.scale(h)
    }
}

/// Runs the three derivative estimators at `t` on independent streams.
pub fn derivative_report<R: Replicator>(
    p: &Problem,
    t: f64,
    dt: f64,
    reps: u64,
    mc_points: u64,
    master_seed: u64,
    runner: &R,
) -> Result<DerivativeReport> {
    Ok(DerivativeReport {
        t,
        finite_difference: finite_difference_derivative(p, t, dt, reps, master_seed, runner)?,
        russo: russo_derivative(p, t, reps, master_seed, runner)?,
        added_grain: added_grain_derivative(p, t, reps, mc_points, master_seed, runner)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::Sequential;
    use crate::geom::TargetSet;

    fn problem() -> Problem {
        Problem::new(
            RadiusMeasure::dirac(1.0).unwrap(),
            TargetSet::centered_ball(2, 0.5),
            5.0,
            2,
        )
        .unwrap()
    }

    #[test]
    fn finite_difference_summands_are_nonnegative() {
        let e = finite_difference_derivative(&problem(), 0.6, 0.05, 200, 2, &Sequential).unwrap();
        assert!(e.mean >= 0.0);
    }

    #[test]
    fn finite_difference_rejects_large_step() {
        assert!(finite_difference_derivative(&problem(), 0.6, 0.07, 10, 2, &Sequential).is_err());
    }

    #[test]
    fn saturated_event_has_zero_derivative() {
        let e = russo_derivative(&problem(), 20.0, 20, 1, &Sequential).unwrap();
        assert_eq!(e.mean, 0.0);
        let a = added_grain_derivative(&problem(), 20.0, 20, 50, 1, &Sequential).unwrap();
        assert_eq!(a.mean, 0.0);
    }

    #[test]
    fn equal_parts_give_zero_direction() {
        let m = RadiusMeasure::dirac(0.8).unwrap();
        let e = directional_derivative_parts(&problem(), &m, &m, 50, 50, 4, &Sequential).unwrap();
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn inadmissible_direction_is_rejected() {
        let g = SignedRadiusMeasure::new(RadiusMeasure::zero(), RadiusMeasure::dirac(0.5).unwrap())
            .unwrap();
        let err = directional_derivative(&problem(), &g, 10, 10, 1, &Sequential).unwrap_err();
        assert!(matches!(err, Error::NotAMeasure { .. }));
    }
}
