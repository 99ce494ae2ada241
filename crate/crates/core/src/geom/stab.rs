use alloc::vec::Vec;

use super::graph::{configuration_adjacency, ClusterIndex};
use super::target::TargetSet;
use crate::error::{Error, Result};
use crate::math::norm;
use crate::pointproc::Configuration;

/// Radius of stabilization `R_{K,b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabRadius {
    /// `radius = n * b`.
    Finite { n: u64, radius: f64 },
    /// Containment cannot be certified inside the sampled window.
    Unbounded,
}

impl StabRadius {
    pub fn radius(&self) -> Option<f64> {
        match self {
            StabRadius::Finite { radius, .. } => Some(*radius),
            StabRadius::Unbounded => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, StabRadius::Unbounded)
    }
}

/// Grains of the finite clusters meeting `K`, as configuration indices.
///
/// A cluster is treated as part of the infinite cluster when one of its
/// grains leaves the ball of radius `window.inscribed_radius()`; every other
/// cluster lies in a region where the sample is complete and is therefore
/// certifiably finite.
pub fn finite_clusters_of(c: &Configuration, k: &TargetSet) -> Result<Vec<usize>> {
    k.validate(c.dim())?;
    let rho = c.window().inscribed_radius();
    let adj = configuration_adjacency(c);
    let clusters = ClusterIndex::new(&adj);
    let mut touches = alloc::vec![false; clusters.count()];
    let mut escapes = alloc::vec![false; clusters.count()];
    for (i, (x, r)) in c.iter().enumerate() {
        let l = clusters.label(i);
        if k.distance(x) <= r {
            touches[l] = true;
        }
        if norm(x) + r > rho {
            escapes[l] = true;
        }
    }
    Ok((0..c.len())
        .filter(|&i| {
            let l = clusters.label(i);
            touches[l] && !escapes[l]
        })
        .collect())
}

/// Smallest `n b` (`n >= 1`) with `K ∪ Z_K ⊂ B_{(n-1) b}`, where `Z_K` is the
/// union of the finite clusters meeting `K` and `B_0 = {0}`.
///
/// Returns [`StabRadius::Unbounded`] when `n b` exceeds the inscribed radius
/// of the sampling window.
pub fn stabilization_radius(c: &Configuration, k: &TargetSet, b: f64) -> Result<StabRadius> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::param("b", "must be positive and finite"));
    }
    if c.margin() < b {
        return Err(Error::param("b", "sampling margin must be at least b"));
    }
    let z = finite_clusters_of(c, k)?;
    let mut s = k.max_norm();
    for &i in &z {
        s = s.max(norm(c.position(i)) + c.radius(i));
    }
    let mut m = libm::ceil(s / b);
    if m > 0.0 && (m - 1.0) * b >= s {
        m -= 1.0;
    }
    if m * b < s {
        m += 1.0;
    }
    let radius = (m + 1.0) * b;
    if radius > c.window().inscribed_radius() {
        return Ok(StabRadius::Unbounded);
    }
    Ok(StabRadius::Finite {
        n: m as u64 + 1,
        radius,
    })
}
