//! Least-squares fits used by the decay diagnostics.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Half-width of the two-sided 95% confidence interval of the slope.
    pub slope_ci95: f64,
    pub points: usize,
}

impl LinearFit {
    /// Whether the 95% interval of the slope lies strictly below zero.
    pub fn slope_negative(&self) -> bool {
        self.slope + self.slope_ci95 < 0.0
    }
}

/// Fits a line through at least three points; `None` for fewer points or a
/// degenerate abscissa.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let dof = nf - 2.0;
    let slope_stderr = (rss / dof / sxx).sqrt();
    let q = StudentsT::new(0.0, 1.0, dof).ok()?.inverse_cdf(0.975);
    Some(LinearFit {
        slope,
        intercept,
        slope_stderr,
        slope_ci95: q * slope_stderr,
        points: n,
    })
}
