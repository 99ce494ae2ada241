//! Critical-intensity estimation from rectangle crossings, and slab
//! crossings for `d >= 3`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimate::{Estimate, Replicator};
use crate::geom::{build_adjacency, grains_touch, ClusterIndex, UnionFind};
use crate::math::unit_ball_volume;
use crate::measure::RadiusMeasure;
use crate::pointproc::{sample_layer, sample_poisson_in, SeedSpec, Window, DEFAULT_POINT_CAP};

/// Default bisection bracket as multiples of `(κ_d ∫ r^d F(dr))^(-1)`.
pub const BRACKET: (f64, f64) = (0.05, 20.0);

/// Half-crossing intensity at one system size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeThreshold {
    pub size: f64,
    pub t_half: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub tc_hat: f64,
    pub ci_half_width: f64,
    pub sizes_used: Vec<f64>,
    pub per_size: Vec<SizeThreshold>,
}

/// Squared distance from `x` to the axis-aligned box `[lo, hi]`.
fn box_dist_sq(x: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(v, (l, h))| {
            let d = if v < l {
                l - v
            } else if v > h {
                v - h
            } else {
                0.0
            };
            d * d
        })
        .sum()
}

/// Box `[lo, hi]` with the two faces orthogonal to `axis`.
struct CrossingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    axis: usize,
}

impl CrossingBox {
    fn meets(&self, x: &[f64], r: f64) -> bool {
        box_dist_sq(x, &self.lo, &self.hi) <= r * r
    }

    fn face_dist_sq(&self, x: &[f64], at: f64) -> f64 {
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        lo[self.axis] = at;
        hi[self.axis] = at;
        box_dist_sq(x, &lo, &hi)
    }

    /// `(touches low face, touches high face)`.
    fn faces(&self, x: &[f64], r: f64) -> (bool, bool) {
        let r2 = r * r;
        (
            self.face_dist_sq(x, self.lo[self.axis]) <= r2,
            self.face_dist_sq(x, self.hi[self.axis]) <= r2,
        )
    }

    /// Whether grains meeting the box connect its two faces.
    fn crossed<'a, I: Iterator<Item = (&'a [f64], f64)>>(
        &self,
        grains: I,
        max_radius: f64,
    ) -> bool {
        let dim = self.lo.len();
        let mut coords = Vec::new();
        let mut radii = Vec::new();
        for (x, r) in grains {
            if self.meets(x, r) {
                coords.extend_from_slice(x);
                radii.push(r);
            }
        }
        let adj = build_adjacency(dim, &coords, &radii, max_radius);
        let clusters = ClusterIndex::new(&adj);
        let mut low = alloc::vec![false; clusters.count()];
        let mut high = alloc::vec![false; clusters.count()];
        for (v, x) in coords.chunks_exact(dim).enumerate() {
            let (a, b) = self.faces(x, radii[v]);
            let l = clusters.label(v);
            low[l] |= a;
            high[l] |= b;
        }
        low.iter().zip(&high).any(|(a, b)| *a && *b)
    }
}

fn rectangle(a: f64, dim: usize) -> CrossingBox {
    let mut hi = alloc::vec![a; dim];
    hi[0] = 3.0 * a;
    CrossingBox {
        lo: alloc::vec![0.0; dim],
        hi,
        axis: 0,
    }
}

fn check_rectangle(f: &RadiusMeasure, a: f64, dim: usize) -> Result<()> {
    if f.is_zero() {
        return Err(Error::InvalidMeasure("radius measure must be non-zero"));
    }
    if dim < 2 {
        return Err(Error::DimensionError { min: 2, got: dim });
    }
    if !(a.is_finite() && a >= 4.0 * f.support_bound()) {
        return Err(Error::param("a", "rectangle width must be at least 4b"));
    }
    Ok(())
}

fn rectangle_window(a: f64, dim: usize) -> Result<Window> {
    let r = rectangle(a, dim);
    Window::cuboid(r.lo, r.hi)
}

/// Probability that grains meeting `[0, 3a] x [0, a]^(d-1)` join its two faces
/// orthogonal to the first axis.
pub fn crossing_probability<R: Replicator>(
    f: &RadiusMeasure,
    t: f64,
    a: f64,
    dim: usize,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    check_rectangle(f, a, dim)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidIntensity(t));
    }
    let b = f.support_bound();
    let window = rectangle_window(a, dim)?;
    let rect = rectangle(a, dim);
    let seed = SeedSpec::new(master_seed, 0, "crossing");
    let samples: Result<Vec<f64>> = runner
        .run(reps, |i| {
            let c = sample_poisson_in(
                f,
                t,
                &window,
                b,
                seed.with_replication(i),
                DEFAULT_POINT_CAP,
            )?;
            Ok(rect.crossed(c.iter(), b) as u8 as f64)
        })
        .into_iter()
        .collect();
    Estimate::from_samples(&samples?, seed)
}

/// Growing set of grains with an incremental union-find; nodes 0 and 1 are
/// the two faces.
struct Incremental<'a> {
    rect: &'a CrossingBox,
    dim: usize,
    b: f64,
    origin: Vec<f64>,
    shape: Vec<usize>,
    cells: Vec<Vec<u32>>,
    coords: Vec<f64>,
    radii: Vec<f64>,
    uf: UnionFind,
}

impl<'a> Incremental<'a> {
    fn new(rect: &'a CrossingBox, b: f64) -> Self {
        let dim = rect.lo.len();
        let cell = 2.0 * b;
        let origin: Vec<f64> = rect.lo.iter().map(|l| l - b).collect();
        let shape: Vec<usize> = rect
            .lo
            .iter()
            .zip(&rect.hi)
            .map(|(l, h)| (libm::floor((h - l + 2.0 * b) / cell) as usize) + 1)
            .collect();
        let total = shape.iter().product();
        Self {
            rect,
            dim,
            b,
            origin,
            shape,
            cells: alloc::vec![Vec::new(); total],
            coords: Vec::new(),
            radii: Vec::new(),
            uf: UnionFind::new(2),
        }
    }

    fn cell_coord(&self, k: usize, v: f64) -> usize {
        let c = libm::floor((v - self.origin[k]) / (2.0 * self.b)) as isize;
        c.clamp(0, self.shape[k] as isize - 1) as usize
    }

    /// Adds a grain; returns whether the faces are now joined.
    fn insert(&mut self, x: &[f64], r: f64) -> bool {
        if !self.rect.meets(x, r) {
            return false;
        }
        let id = self.radii.len();
        let node = self.uf.push();
        let dim = self.dim;
        let mut lo = [0usize; 8];
        let mut hi = [0usize; 8];
        let mut cur = [0usize; 8];
        let mut home = 0;
        for k in 0..dim {
            let c = self.cell_coord(k, x[k]);
            lo[k] = c.saturating_sub(1);
            hi[k] = (c + 1).min(self.shape[k] - 1);
            cur[k] = lo[k];
            home = home * self.shape[k] + c;
        }
        loop {
            let mut idx = 0;
            for k in 0..dim {
                idx = idx * self.shape[k] + cur[k];
            }
            for &j in &self.cells[idx] {
                let j = j as usize;
                if grains_touch(x, r, &self.coords[j * dim..(j + 1) * dim], self.radii[j]) {
                    self.uf.union(node, j + 2);
                }
            }
            let mut k = dim;
            let mut done = true;
            while k > 0 {
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    done = false;
                    break;
                }
                cur[k] = lo[k];
            }
            if done {
                break;
            }
        }
        let (l, h) = self.rect.faces(x, r);
        if l {
            self.uf.union(node, 0);
        }
        if h {
            self.uf.union(node, 1);
        }
        self.cells[home].push(id as u32);
        self.coords.extend_from_slice(x);
        self.radii.push(r);
        self.uf.same(0, 1)
    }
}

/// Lowest arrival level at which the rectangle of width `a` is crossed, or
/// infinity if it is not crossed below `t_max`. Layers of width
/// `layer_width` are drawn until the crossing appears.
fn crossing_level(
    f: &RadiusMeasure,
    a: f64,
    dim: usize,
    t_max: f64,
    layer_width: f64,
    seed: SeedSpec,
) -> Result<f64> {
    let b = f.support_bound();
    let rect = rectangle(a, dim);
    let window = rectangle_window(a, dim)?;
    let mut grains = Incremental::new(&rect, b);
    let mut k = 0u32;
    while (k as f64) * layer_width < t_max {
        let (layer, levels) = sample_layer(f, k, layer_width, &window, b, seed)?;
        let mut order: Vec<usize> = (0..layer.len()).collect();
        order.sort_by(|&i, &j| levels[i].total_cmp(&levels[j]));
        for i in order {
            if levels[i] > t_max {
                return Ok(f64::INFINITY);
            }
            if grains.insert(layer.position(i), layer.radius(i)) {
                return Ok(levels[i]);
            }
        }
        k += 1;
    }
    Ok(f64::INFINITY)
}

/// Empirical quantile of sorted data (nearest rank).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let k = libm::ceil(q * n as f64) as usize;
    sorted[k.clamp(1, n) - 1]
}

/// Bisection bracket `[lo, hi]` for measure `f` in dimension `dim`.
pub fn default_bracket(f: &RadiusMeasure, dim: usize) -> (f64, f64) {
    let scale = 1.0 / (unit_ball_volume(dim) * f.moment(dim as u32));
    (BRACKET.0 * scale, BRACKET.1 * scale)
}

/// Half-crossing intensity per size by bisection on the coupled crossing
/// probability, and `t̂_c` as the value at the largest size.
///
/// Each replication realizes all intensities at once: arrival levels make the
/// crossing event monotone in `t`, so the estimated crossing probability is
/// nondecreasing and the bisection is well defined.
pub fn estimate_tc<R: Replicator>(
    f: &RadiusMeasure,
    sizes: &[f64],
    dim: usize,
    reps: u64,
    tol: f64,
    master_seed: u64,
    runner: &R,
) -> Result<ThresholdResult> {
    if sizes.len() < 3 {
        return Err(Error::param("sizes", "at least three sizes are needed"));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("sizes", "must be strictly increasing"));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::param("tol", "must lie in (0, 1)"));
    }
    if reps < 2 {
        return Err(Error::param("reps", "at least 2 replications are needed"));
    }
    for &a in sizes {
        check_rectangle(f, a, dim)?;
    }
    let (t_lo, t_hi) = default_bracket(f, dim);
    let seed = SeedSpec::new(master_seed, 0, "crossing-level");
    let mut per_size = Vec::new();
    for (s, &a) in sizes.iter().enumerate() {
        // size index in the high bits keeps the streams of different sizes apart
        let base = (s as u64) << 40;
        let mut levels = runner
            .run(reps, |i| {
                crossing_level(f, a, dim, t_hi, t_lo, seed.with_replication(base + i))
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        levels.sort_by(f64::total_cmp);
        let p = |t: f64| levels.partition_point(|&l| l <= t) as f64 / reps as f64;
        let (p_lo, p_hi) = (p(t_lo), p(t_hi));
        if p_lo >= 0.5 || p_hi < 0.5 {
            return Err(Error::NoBracket {
                size: a,
                lo: t_lo,
                hi: t_hi,
                p_lo,
                p_hi,
            });
        }
        let (mut lo, mut hi) = (t_lo, t_hi);
        while hi / lo - 1.0 > tol {
            let mid = libm::sqrt(lo * hi);
            if p(mid) >= 0.5 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t_half = libm::sqrt(lo * hi);
        // slope of the crossing curve from the central quantile spread
        let spread = quantile(&levels, 0.6) - quantile(&levels, 0.4);
        let stderr = spread / 0.2 * libm::sqrt(0.25 / reps as f64);
        per_size.push(SizeThreshold {
            size: a,
            t_half,
            stderr,
        });
    }
    let last = per_size[per_size.len() - 1];
    let prev = per_size[per_size.len() - 2];
    let ci_half_width =
        libm::fabs(last.t_half - prev.t_half).max(tol * last.t_half + 3.0 * last.stderr);
    Ok(ThresholdResult {
        tc_hat: last.t_half,
        ci_half_width,
        sizes_used: sizes.to_vec(),
        per_size,
    })
}

fn slab_box(thickness: f64, a: f64, dim: usize) -> CrossingBox {
    let mut lo = alloc::vec![-a; dim];
    let mut hi = alloc::vec![a; dim];
    lo[0] = 0.0;
    hi[0] = thickness;
    lo[1] = 0.0;
    CrossingBox {
        lo,
        hi,
        axis: dim - 1,
    }
}

/// Crossing probabilities of `[0, K] x [0, a] x [-a, a]^(d-2)` along the last
/// axis, for every `K` in `thicknesses`, by grains with centers in the slab
/// `[0, K] x R^(d-1)`. All thicknesses share one sample per replication,
/// taken at the largest `K` and restricted, so the estimates are monotone in
/// `K`.
pub fn slab_crossing_profile<R: Replicator>(
    f: &RadiusMeasure,
    t: f64,
    thicknesses: &[f64],
    a: f64,
    dim: usize,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Vec<Estimate>> {
    if dim < 3 {
        return Err(Error::DimensionError { min: 3, got: dim });
    }
    if f.is_zero() {
        return Err(Error::InvalidMeasure("radius measure must be non-zero"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidIntensity(t));
    }
    let b = f.support_bound();
    if thicknesses.is_empty()
        || thicknesses
            .iter()
            .any(|&k| !(k.is_finite() && k >= 2.0 * b))
    {
        return Err(Error::param("K", "slab thickness must be at least 2b"));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::param("length_a", "must be positive and finite"));
    }
    let k_max = thicknesses.iter().copied().fold(0.0, f64::max);
    let window = Window::slab(dim, k_max, a)?;
    let seed = SeedSpec::new(master_seed, 0, "slab");
    let rows = runner
        .run(reps, |i| {
            let c = sample_poisson_in(
                f,
                t,
                &window,
                b,
                seed.with_replication(i),
                DEFAULT_POINT_CAP,
            )?;
            Ok(thicknesses
                .iter()
                .map(|&k| {
                    let grains = c.iter().filter(|(x, _)| x[0] <= k);
                    slab_box(k, a, dim).crossed(grains, b) as u8 as f64
                })
                .collect::<Vec<f64>>())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    (0..thicknesses.len())
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            Estimate::from_samples(&col, seed)
        })
        .collect()
}

/// [`slab_crossing_profile`] for a single thickness.
pub fn slab_crossing<R: Replicator>(
    f: &RadiusMeasure,
    t: f64,
    thickness: f64,
    a: f64,
    dim: usize,
    reps: u64,
    master_seed: u64,
    runner: &R,
) -> Result<Estimate> {
    Ok(slab_crossing_profile(f, t, &[thickness], a, dim, reps, master_seed, runner)?[0])
}
