//! Marked Poisson configurations in finite windows.
//!
//! Centers are sampled in the window dilated by the margin ("plus sampling"),
//! so with margin `b` every grain that can meet the window has its center in
//! the sample. Random streams are a pure function of a [`SeedSpec`], which
//! makes every replication independent of scheduling.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::measure::{QuantileTable, RadiusMeasure};

/// Default hard cap on the expected point count of a single sample.
pub const DEFAULT_POINT_CAP: u64 = 100_000_000;

/// Sampling domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    /// `[-a, a]^d`.
    Box { dim: usize, half_width: f64 },
    /// `[0, K] x [-A, A]^(d-1)`. Centers are restricted to the slab itself;
    /// only the lateral coordinates are dilated by the margin.
    Slab {
        dim: usize,
        thickness: f64,
        half_width: f64,
    },
    /// Axis-aligned box `[lo, hi]`, dilated by the margin in every coordinate.
    Cuboid { lo: Vec<f64>, hi: Vec<f64> },
}

impl Window {
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        let w = Window::Box { dim, half_width };
        w.validate()?;
        Ok(w)
    }

    pub fn slab(dim: usize, thickness: f64, half_width: f64) -> Result<Self> {
        let w = Window::Slab {
            dim,
            thickness,
            half_width,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let w = Window::Cuboid { lo, hi };
        w.validate()?;
        Ok(w)
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Box { dim, .. } | Window::Slab { dim, .. } => *dim,
            Window::Cuboid { lo, .. } => lo.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        match self {
            Window::Box { dim, half_width } => {
                if *dim == 0 {
                    return Err(Error::InvalidWindow("dimension must be positive"));
                }
                if !positive(*half_width) {
                    return Err(Error::InvalidWindow("box half-width must be > 0"));
                }
            }
            Window::Slab {
                dim,
                thickness,
                half_width,
            } => {
                if *dim < 2 {
                    return Err(Error::InvalidWindow("slab needs dimension >= 2"));
                }
                if !positive(*thickness) || !positive(*half_width) {
                    return Err(Error::InvalidWindow(
                        "slab thickness and half-width must be > 0",
                    ));
                }
            }
            Window::Cuboid { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidWindow(
                        "cuboid corners must share a dimension",
                    ));
                }
                if lo
                    .iter()
                    .zip(hi)
                    .any(|(l, h)| !(l.is_finite() && h.is_finite() && h > l))
                {
                    return Err(Error::InvalidWindow(
                        "cuboid needs lo < hi in every coordinate",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Bounds of the region in which centers are sampled.
    pub fn sampling_bounds(&self, margin: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Window::Box { dim, half_width } => {
                let a = half_width + margin;
                (alloc::vec![-a; *dim], alloc::vec![a; *dim])
            }
            Window::Slab {
                dim,
                thickness,
                half_width,
            } => {
                let a = half_width + margin;
                let mut lo = alloc::vec![-a; *dim];
                let mut hi = alloc::vec![a; *dim];
                lo[0] = 0.0;
                hi[0] = *thickness;
                (lo, hi)
            }
            Window::Cuboid { lo, hi } => (
                lo.iter().map(|l| l - margin).collect(),
                hi.iter().map(|h| h + margin).collect(),
            ),
        }
    }

    pub fn sampling_volume(&self, margin: f64) -> f64 {
        let (lo, hi) = self.sampling_bounds(margin);
        lo.iter().zip(&hi).map(|(l, h)| h - l).product()
    }

    pub fn in_sampling_region(&self, x: &[f64], margin: f64) -> bool {
        let (lo, hi) = self.sampling_bounds(margin);
        x.iter()
            .zip(lo.iter().zip(&hi))
            .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    /// Radius of the largest closed ball about the origin inside the
    /// undilated window (zero when the origin is on or outside its boundary).
    pub fn inscribed_radius(&self) -> f64 {
        match self {
            Window::Box { half_width, .. } => *half_width,
            Window::Slab { .. } => 0.0,
            Window::Cuboid { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| (-l).min(*h))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
        }
    }
}

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Identifies one reproducible random stream.
///
/// The stream is a pure function of `(master_seed, replication_index,
/// stream_label, lane)`. `lane` subdivides a label into numbered substreams
/// (layers of a coupling, Monte Carlo points, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub replication_index: u64,
    pub stream_label: &'static str,
    pub lane: u32,
}

impl SeedSpec {
    pub fn new(master_seed: u64, replication_index: u64, stream_label: &'static str) -> Self {
        Self {
            master_seed,
            replication_index,
            stream_label,
            lane: 0,
        }
    }

    pub fn with_lane(self, lane: u32) -> Self {
        Self { lane, ..self }
    }

    pub fn with_label(self, stream_label: &'static str) -> Self {
        Self {
            stream_label,
            lane: 0,
            ..self
        }
    }

    pub fn with_replication(self, replication_index: u64) -> Self {
        Self {
            replication_index,
            ..self
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.replication_index.to_le_bytes());
        key[16..24].copy_from_slice(&fnv1a(self.stream_label).to_le_bytes());
        key[24..28].copy_from_slice(&self.lane.to_le_bytes());
        key[28..32].copy_from_slice(b"bpc1");
        ChaCha8Rng::from_seed(key)
    }
}

/// Finite marked point pattern `{(x_i, r_i)}` with its sampling window.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim: usize,
    coords: Vec<f64>,
    radii: Vec<f64>,
    window: Window,
    margin: f64,
}

impl Configuration {
    pub fn empty(window: Window, margin: f64) -> Self {
        Self {
            dim: window.dim(),
            coords: Vec::new(),
            radii: Vec::new(),
            window,
            margin,
        }
    }

    /// Builds a configuration from explicit points. Every radius must lie in
    /// `(0, margin]`.
    pub fn from_points<'a, I>(window: Window, margin: f64, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [f64], f64)>,
    {
        let mut c = Self::empty(window, margin);
        for (x, r) in points {
            c.push(x, r)?;
        }
        Ok(c)
    }

    fn push(&mut self, x: &[f64], r: f64) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !(r > 0.0 && r <= self.margin) {
            return Err(Error::InvalidMark {
                radius: r,
                bound: self.margin,
            });
        }
        self.coords.extend_from_slice(x);
        self.radii.push(r);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Dilation applied to the window when sampling; also the largest
    /// admissible radius.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.coords
            .chunks_exact(self.dim.max(1))
            .zip(self.radii.iter().copied())
    }

    /// `φ + δ_(x,r)`; the input is left untouched.
    pub fn add_point(&self, x: &[f64], r: f64) -> Result<Self> {
        let mut c = self.clone();
        c.push(x, r)?;
        Ok(c)
    }

    /// Drops trailing points so that `len() == n`.
    pub fn truncated(&self, n: usize) -> Self {
        let mut c = self.clone();
        c.radii.truncate(n);
        c.coords.truncate(n * self.dim);
        c
    }

    /// Concatenation of the two point sequences.
    pub fn superpose(&self, other: &Configuration) -> Result<Self> {
        if self.window != other.window || self.margin.to_bits() != other.margin.to_bits() {
            return Err(Error::WindowMismatch);
        }
        let mut c = self.clone();
        c.coords.extend_from_slice(&other.coords);
        c.radii.extend_from_slice(&other.radii);
        Ok(c)
    }

    /// Keeps the points satisfying `keep`, in order.
    pub fn filter<P>(&self, mut keep: P) -> Self
    where
        P: FnMut(&[f64], f64) -> bool,
    {
        let mut c = Self::empty(self.window.clone(), self.margin);
        for (x, r) in self.iter() {
            if keep(x, r) {
                c.coords.extend_from_slice(x);
                c.radii.push(r);
            }
        }
        c
    }
}

fn draw_count<R: Rng>(rng: &mut R, mean: f64, cap: u64) -> Result<u64> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(Error::InvalidIntensity(mean));
    }
    if mean > cap as f64 {
        return Err(Error::TooManyPoints {
            expected: mean,
            cap,
        });
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let poisson = Poisson::new(mean).map_err(|_| Error::InvalidIntensity(mean))?;
    let n: f64 = poisson.sample(rng);
    Ok(n as u64)
}

/// Draws `N ~ Poisson(t |F| vol)` points into `out`, each with `d` uniform
/// coordinates followed by one uniform for the radius and, when `arrival` is
/// given, one uniform for the arrival level.
fn fill<R: Rng>(
    rng: &mut R,
    measure: &RadiusMeasure,
    table: &QuantileTable,
    t: f64,
    out: &mut Configuration,
    cap: u64,
    mut arrival: Option<(&mut Vec<f64>, f64, f64)>,
) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidIntensity(t));
    }
    if measure.is_zero() || t == 0.0 {
        return Ok(());
    }
    let (lo, hi) = out.window.sampling_bounds(out.margin);
    let vol: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let n = draw_count(rng, t * measure.total_mass() * vol, cap)?;
    out.coords.reserve(n as usize * out.dim);
    out.radii.reserve(n as usize);
    for _ in 0..n {
        for k in 0..out.dim {
            let u: f64 = rng.random();
            out.coords.push(lo[k] + (hi[k] - lo[k]) * u);
        }
        out.radii.push(table.quantile(rng.random()));
        if let Some((levels, base, width)) = arrival.as_mut() {
            let u: f64 = rng.random();
            levels.push(*base + *width * u);
        }
    }
    Ok(())
}

/// Poisson process of intensity `t · dx F(dr)` in `w` dilated by `|F|`'s
/// support bound.
pub fn sample_poisson(
    measure: &RadiusMeasure,
    t: f64,
    window: &Window,
    seed: SeedSpec,
) -> Result<Configuration> {
    sample_poisson_in(
        measure,
        t,
        window,
        measure.support_bound(),
        seed,
        DEFAULT_POINT_CAP,
    )
}

/// [`sample_poisson`] with an explicit margin and point cap. The margin must
/// be at least the support bound of `measure`.
pub fn sample_poisson_in(
    measure: &RadiusMeasure,
    t: f64,
    window: &Window,
    margin: f64,
    seed: SeedSpec,
    cap: u64,
) -> Result<Configuration> {
    window.validate()?;
    if measure.support_bound() > margin {
        return Err(Error::param("margin", "must cover the radius support"));
    }
    let mut out = Configuration::empty(window.clone(), margin);
    let table = measure.quantile_table();
    fill(&mut seed.rng(), measure, &table, t, &mut out, cap, None)?;
    Ok(out)
}

/// Monotone pair `(C_t, C_(t+dt))` with `C_(t+dt) = C_t + fresh(dt F)`.
pub fn coupled_pair(
    measure: &RadiusMeasure,
    t: f64,
    dt: f64,
    window: &Window,
    seed: SeedSpec,
) -> Result<(Configuration, Configuration)> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(Error::InvalidIntensity(dt));
    }
    let b = measure.support_bound();
    let base = sample_poisson_in(measure, t, window, b, seed.with_lane(0), DEFAULT_POINT_CAP)?;
    let extra = sample_poisson_in(measure, dt, window, b, seed.with_lane(1), DEFAULT_POINT_CAP)?;
    let top = base.superpose(&extra)?;
    Ok((base, top))
}

/// Layer `k` of a [`LayeredConfiguration`]: the points with arrival level in
/// `[k w, (k + 1) w)` and their levels, drawn from lane `k` of `seed`.
pub fn sample_layer(
    measure: &RadiusMeasure,
    k: u32,
    layer_width: f64,
    window: &Window,
    margin: f64,
    seed: SeedSpec,
) -> Result<(Configuration, Vec<f64>)> {
    window.validate()?;
    if !(layer_width.is_finite() && layer_width > 0.0) {
        return Err(Error::param("layer_width", "must be finite and > 0"));
    }
    if measure.support_bound() > margin {
        return Err(Error::param("margin", "must cover the radius support"));
    }
    let table = measure.quantile_table();
    let mut points = Configuration::empty(window.clone(), margin);
    let mut levels = Vec::new();
    fill(
        &mut seed.with_lane(k).rng(),
        measure,
        &table,
        layer_width,
        &mut points,
        DEFAULT_POINT_CAP,
        Some((&mut levels, k as f64 * layer_width, layer_width)),
    )?;
    Ok((points, levels))
}

/// Configuration realized simultaneously at every intensity: each point
/// carries an arrival level `s`, and the Poisson process at intensity `t` is
/// the set of points with `s <= t`.
///
/// Levels are generated in layers of fixed width, each layer from its own
/// lane of the seed, so the process at `t` does not depend on the largest
/// intensity requested.
#[derive(Debug, Clone)]
pub struct LayeredConfiguration {
    points: Configuration,
    levels: Vec<f64>,
}

impl LayeredConfiguration {
    pub fn sample(
        measure: &RadiusMeasure,
        t_max: f64,
        layer_width: f64,
        window: &Window,
        margin: f64,
        seed: SeedSpec,
        cap: u64,
    ) -> Result<Self> {
        window.validate()?;
        if !(layer_width.is_finite() && layer_width > 0.0) {
            return Err(Error::param("layer_width", "must be finite and > 0"));
        }
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::InvalidIntensity(t_max));
        }
        if measure.support_bound() > margin {
            return Err(Error::param("margin", "must cover the radius support"));
        }
        let layers = libm::ceil(t_max / layer_width) as u64;
        let expected = t_max * measure.total_mass() * window.sampling_volume(margin);
        if expected > cap as f64 {
            return Err(Error::TooManyPoints { expected, cap });
        }
        let table = measure.quantile_table();
        let mut points = Configuration::empty(window.clone(), margin);
        let mut levels = Vec::new();
        for k in 0..layers {
            let base = k as f64 * layer_width;
            let mut rng = seed.with_lane(k as u32).rng();
            fill(
                &mut rng,
                measure,
                &table,
                layer_width,
                &mut points,
                cap,
                Some((&mut levels, base, layer_width)),
            )?;
        }
        let c = Self { points, levels };
        Ok(c.at_level(t_max))
    }

    fn at_level(&self, t: f64) -> Self {
        let keep: Vec<bool> = self.levels.iter().map(|&s| s <= t).collect();
        let mut idx = 0;
        let points = self.points.filter(|_, _| {
            let k = keep[idx];
            idx += 1;
            k
        });
        let levels = self.levels.iter().copied().filter(|&s| s <= t).collect();
        Self { points, levels }
    }

    /// The process at intensity `t`.
    pub fn at(&self, t: f64) -> Configuration {
        self.at_level(t).points
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn all(&self) -> &Configuration {
        &self.points
    }
}
