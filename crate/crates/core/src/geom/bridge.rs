use alloc::vec::Vec;

use super::graph::{build_graph, grains_touch, ClusterIndex, IntersectionGraph};
use super::grid::SpatialGrid;
use super::target::TargetSet;
use crate::error::{Error, Result};
use crate::math::norm;
use crate::pointproc::Configuration;

/// Answers "does adding the grain `B_r(x)` create `J_L^n`?" for one fixed
/// configuration in `O(1)` expected time per query.
///
/// A new grain switches the event on exactly when the event is off and the
/// grain meets both a TARGET-side region (`L` or a cluster touching `L`) and an
/// OUTSIDE-side region (the complement of `B_n` or a cluster reaching it).
#[derive(Debug, Clone)]
pub struct BridgeOracle {
    dim: usize,
    target: TargetSet,
    box_radius: f64,
    max_radius: f64,
    connected: bool,
    coords: Vec<f64>,
    radii: Vec<f64>,
    target_side: Vec<bool>,
    outside_side: Vec<bool>,
    grid: SpatialGrid,
}

impl BridgeOracle {
    pub fn new(c: &Configuration, target: &TargetSet, n: f64) -> Result<Self> {
        let g = build_graph(c, target, n)?;
        Ok(Self::from_graph(c, target, &g))
    }

    pub fn from_graph(c: &Configuration, target: &TargetSet, g: &IntersectionGraph) -> Self {
        let clusters = ClusterIndex::new(g.adjacency());
        let mut t_label = alloc::vec![false; clusters.count()];
        let mut o_label = alloc::vec![false; clusters.count()];
        for &v in g.target_links() {
            t_label[clusters.label(v as usize)] = true;
        }
        for v in g.outside_links() {
            o_label[clusters.label(v)] = true;
        }
        let connected = t_label.iter().zip(&o_label).any(|(a, b)| *a && *b);
        let dim = c.dim();
        let mut coords = Vec::with_capacity(g.n_grains() * dim);
        let mut radii = Vec::with_capacity(g.n_grains());
        let mut target_side = Vec::with_capacity(g.n_grains());
        let mut outside_side = Vec::with_capacity(g.n_grains());
        for v in 0..g.n_grains() {
            let i = g.grain_index(v);
            coords.extend_from_slice(c.position(i));
            radii.push(c.radius(i));
            target_side.push(t_label[clusters.label(v)]);
            outside_side.push(o_label[clusters.label(v)]);
        }
        let max_radius = c.margin();
        let grid = SpatialGrid::new(dim, &coords, (2.0 * max_radius).max(f64::MIN_POSITIVE));
        Self {
            dim,
            target: target.clone(),
            box_radius: g.box_radius(),
            max_radius,
            connected,
            coords,
            radii,
            target_side,
            outside_side,
            grid,
        }
    }

    /// Whether the configuration already has `J_L^n`.
    pub fn connected(&self) -> bool {
        self.connected
    }

    /// Bounding box of `L` together with every grain of the clusters meeting
    /// `L` (grains taken as their own bounding boxes).
    pub fn target_region_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let (mut lo, mut hi) = self.target.bounds();
        for (v, x) in self.coords.chunks_exact(self.dim).enumerate() {
            if self.target_side[v] {
                let r = self.radii[v];
                for k in 0..self.dim {
                    lo[k] = lo[k].min(x[k] - r);
                    hi[k] = hi[k].max(x[k] + r);
                }
            }
        }
        (lo, hi)
    }

    /// `1{J in φ + δ_(x,r)} - 1{J in φ}` for a positive radius; the
    /// difference is never negative because `J_L^n` is increasing.
    pub fn query(&self, x: &[f64], r: f64) -> bool {
        if self.connected {
            return false;
        }
        let nx = norm(x);
        if nx - r > self.box_radius {
            return false;
        }
        let mut hits_target = self.target.distance(x) <= r;
        let mut hits_outside = nx + r > self.box_radius;
        if hits_target && hits_outside {
            return true;
        }
        self.grid.for_each_candidate(x, r + self.max_radius, |j| {
            if hits_target && hits_outside {
                return;
            }
            let side_t = self.target_side[j] && !hits_target;
            let side_o = self.outside_side[j] && !hits_outside;
            if (side_t || side_o)
                && grains_touch(
                    x,
                    r,
                    &self.coords[j * self.dim..(j + 1) * self.dim],
                    self.radii[j],
                )
            {
                hits_target |= self.target_side[j];
                hits_outside |= self.outside_side[j];
            }
        });
        hits_target && hits_outside
    }
}

/// True iff `J_L^n` holds in `c + δ_(x,r)` but not in `c`.
pub fn bridge_test(
    c: &Configuration,
    target: &TargetSet,
    n: f64,
    x: &[f64],
    r: f64,
) -> Result<bool> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidMark {
            radius: r,
            bound: f64::INFINITY,
        });
    }
    if x.len() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: x.len(),
        });
    }
    Ok(BridgeOracle::new(c, target, n)?.query(x, r))
}
