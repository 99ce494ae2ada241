use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{dist, norm};

/// Compact target set `L`.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSet {
    Point(Vec<f64>),
    /// Closed ball; radius zero is a point.
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Closed axis-aligned box `[lo, hi]`.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Finite union of closed balls.
    Balls(Vec<(Vec<f64>, f64)>),
}

impl TargetSet {
    pub fn origin(dim: usize) -> Self {
        TargetSet::Point(alloc::vec![0.0; dim])
    }

    pub fn centered_ball(dim: usize, radius: f64) -> Self {
        TargetSet::Ball {
            center: alloc::vec![0.0; dim],
            radius,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TargetSet::Point(p) => p.len(),
            TargetSet::Ball { center, .. } => center.len(),
            TargetSet::Box { lo, .. } => lo.len(),
            TargetSet::Balls(balls) => balls.first().map_or(0, |(c, _)| c.len()),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok_ball = |c: &[f64], r: f64| c.len() == dim && finite(c) && r.is_finite() && r >= 0.0;
        let ok = match self {
            TargetSet::Point(p) => p.len() == dim && finite(p),
            TargetSet::Ball { center, radius } => ok_ball(center, *radius),
            TargetSet::Box { lo, hi } => {
                lo.len() == dim
                    && hi.len() == dim
                    && finite(lo)
                    && finite(hi)
                    && lo.iter().zip(hi).all(|(l, h)| l <= h)
            }
            TargetSet::Balls(balls) => {
                !balls.is_empty() && balls.iter().all(|(c, r)| ok_ball(c, *r))
            }
        };
        if ok {
            Ok(())
        } else if self.dim() != dim {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            })
        } else {
            Err(Error::param(
                "target",
                "must be a non-empty compact set with finite coordinates",
            ))
        }
    }

    /// Euclidean distance from `x` to the set (zero inside).
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            TargetSet::Point(p) => dist(x, p),
            TargetSet::Ball { center, radius } => (dist(x, center) - radius).max(0.0),
            TargetSet::Box { lo, hi } => {
                let s: f64 = x
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| {
                        let e = (l - v).max(v - h).max(0.0);
                        e * e
                    })
                    .sum();
                libm::sqrt(s)
            }
            TargetSet::Balls(balls) => balls
                .iter()
                .map(|(c, r)| (dist(x, c) - r).max(0.0))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `sup { |y| : y ∈ L }`.
    pub fn max_norm(&self) -> f64 {
        match self {
            TargetSet::Point(p) => norm(p),
            TargetSet::Ball { center, radius } => norm(center) + radius,
            TargetSet::Box { lo, hi } => {
                libm::sqrt(lo.iter().zip(hi).map(|(l, h)| (l * l).max(h * h)).sum())
            }
            TargetSet::Balls(balls) => balls.iter().map(|(c, r)| norm(c) + r).fold(0.0, f64::max),
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            TargetSet::Point(p) => (p.clone(), p.clone()),
            TargetSet::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            TargetSet::Box { lo, hi } => (lo.clone(), hi.clone()),
            TargetSet::Balls(balls) => {
                let d = self.dim();
                let mut lo = alloc::vec![f64::INFINITY; d];
                let mut hi = alloc::vec![f64::NEG_INFINITY; d];
                for (c, r) in balls {
                    for k in 0..d {
                        lo[k] = lo[k].min(c[k] - r);
                        hi[k] = hi[k].max(c[k] + r);
                    }
                }
                (lo, hi)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn distances() {
        let p = TargetSet::origin(2);
        assert_eq!(p.distance(&[3.0, 4.0]), 5.0);
        let b = TargetSet::centered_ball(2, 1.0);
        assert_eq!(b.distance(&[3.0, 4.0]), 4.0);
        assert_eq!(b.distance(&[0.5, 0.0]), 0.0);
        let bx = TargetSet::Box {
            lo: vec![-1.0, -1.0],
            hi: vec![1.0, 1.0],
        };
        assert_eq!(bx.distance(&[4.0, 5.0]), 5.0);
        assert_eq!(bx.distance(&[0.0, 3.0]), 2.0);
        let u = TargetSet::Balls(vec![(vec![0.0, 0.0], 1.0), (vec![10.0, 0.0], 2.0)]);
        assert_eq!(u.distance(&[7.0, 0.0]), 1.0);
    }

    #[test]
    fn extents() {
        assert_eq!(TargetSet::centered_ball(3, 0.5).max_norm(), 0.5);
        let bx = TargetSet::Box {
            lo: vec![-3.0, 0.0],
            hi: vec![1.0, 4.0],
        };
        assert_eq!(bx.max_norm(), 5.0);
        assert!(TargetSet::origin(2).validate(3).is_err());
        assert!(TargetSet::Balls(vec![]).validate(2).is_err());
    }
}
