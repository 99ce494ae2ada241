use alloc::vec::Vec;

use super::grid::SpatialGrid;
use crate::error::{Error, Result};
use crate::math::{dist, dist_sq};
use crate::pointproc::Configuration;

/// Grid approximation of `B_rho(center) ⊂ Z`: every point `center + delta k`
/// (`k` integer) within distance `rho` of `center` must lie in some grain, and
/// so must the radial projections onto the sphere `|y - center| = rho` of the
/// lattice points within `delta` of it.
pub fn ball_covered(c: &Configuration, center: &[f64], rho: f64, delta: f64) -> Result<bool> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::param("delta", "must be positive and finite"));
    }
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::param("rho", "must be non-negative and finite"));
    }
    let dim = c.dim();
    if center.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: center.len(),
        });
    }
    let mut coords = Vec::new();
    let mut radii = Vec::new();
    let mut max_r: f64 = 0.0;
    for (x, r) in c.iter() {
        if dist(x, center) <= r + rho {
            coords.extend_from_slice(x);
            radii.push(r);
            max_r = max_r.max(r);
        }
    }
    if radii.is_empty() {
        return Ok(false);
    }
    let grid = SpatialGrid::new(dim, &coords, max_r.max(delta));
    let m = libm::floor(rho / delta) as i64;
    let mut k = alloc::vec![-m; dim];
    let mut p = alloc::vec![0.0; dim];
    let mut q = alloc::vec![0.0; dim];
    let covered = |y: &[f64]| {
        let mut inside = false;
        grid.for_each_candidate(y, max_r, |i| {
            if !inside {
                let r = radii[i];
                inside = dist_sq(y, &coords[i * dim..(i + 1) * dim]) <= r * r;
            }
        });
        inside
    };
    let rho_sq = rho * rho;
    loop {
        let mut off = 0.0;
        for j in 0..dim {
            let o = delta * k[j] as f64;
            p[j] = center[j] + o;
            off += o * o;
        }
        if off <= rho_sq && !covered(&p) {
            return Ok(false);
        }
        // radial projection of the outer lattice layer onto the sphere
        if off > 0.0 && libm::fabs(libm::sqrt(off) - rho) < delta {
            let s = rho / libm::sqrt(off);
            for j in 0..dim {
                q[j] = center[j] + (p[j] - center[j]) * s;
            }
            if !covered(&q) {
                return Ok(false);
            }
        }
        let mut j = dim;
        loop {
            if j == 0 {
                return Ok(true);
            }
            j -= 1;
            if k[j] < m {
                k[j] += 1;
                break;
            }
            k[j] = -m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::Window;

    #[test]
    fn containing_grain_covers() {
        let c = Configuration::from_points(
            Window::cube(2, 3.0).unwrap(),
            2.0,
            [(&[0.3, -0.2][..], 2.0)],
        )
        .unwrap();
        for delta in [0.5, 0.1, 0.013] {
            assert!(ball_covered(&c, &[0.3, -0.2], 1.0, delta).unwrap());
        }
    }

    #[test]
    fn empty_configuration_does_not_cover() {
        let c = Configuration::empty(Window::cube(2, 3.0).unwrap(), 1.0);
        assert!(!ball_covered(&c, &[0.0, 0.0], 1.0, 0.1).unwrap());
    }

    #[test]
    fn two_half_covers() {
        let c = Configuration::from_points(
            Window::cube(2, 3.0).unwrap(),
            1.5,
            [(&[0.6, 0.0][..], 1.5), (&[-0.6, 0.0][..], 1.5)],
        )
        .unwrap();
        assert!(ball_covered(&c, &[0.0, 0.0], 0.5, 0.05).unwrap());
        assert!(!ball_covered(&c, &[0.0, 0.0], 1.45, 0.05).unwrap());
    }

    #[test]
    fn rejects_bad_delta() {
        let c = Configuration::empty(Window::cube(2, 3.0).unwrap(), 1.0);
        assert!(ball_covered(&c, &[0.0, 0.0], 1.0, 0.0).is_err());
    }
}
