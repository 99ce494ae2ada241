use crate::error::{Error, Result};
use crate::geom::{build_graph, TargetSet};
use crate::pointproc::Configuration;

/// `D^k f(c) = Σ_{I ⊆ {1..k}} (-1)^(k - |I|) f(c + Σ_{i in I} δ_(z_i))` for
/// `f = 1{J_L^n}`, evaluated exactly with `2^k` graph builds.
pub fn difference_operator(
    c: &Configuration,
    target: &TargetSet,
    n: f64,
    points: &[(&[f64], f64)],
) -> Result<i64> {
    let k = points.len();
    if k == 0 || k > 3 {
        return Err(Error::param(
            "points",
            "between 1 and 3 points are supported",
        ));
    }
    let mut total = 0i64;
    for mask in 0u32..(1 << k) {
        let mut cur = c.clone();
        for (i, (x, r)) in points.iter().enumerate() {
            if mask & (1 << i) != 0 {
                cur = cur.add_point(x, *r)?;
            }
        }
        let f = build_graph(&cur, target, n)?.connects() as i64;
        let sign = if (k as u32 - mask.count_ones()).is_multiple_of(2) {
            1
        } else {
            -1
        };
        total += sign * f;
    }
    Ok(total)
}
