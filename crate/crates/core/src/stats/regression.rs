use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::log;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares y = slope x + intercept.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InsufficientSamples { needed: 2, got: n.min(y.len()) });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("x values are all equal"));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit { slope, intercept: my - slope * mx, r_squared, points: n })
}

/// Fit log P(X >= m) against m for integer samples, over m >= `start` while
/// the empirical survival count stays at least `min_count`.
pub fn log_survival_fit(samples: &[u64], start: u64, min_count: usize) -> Result<LinearFit> {
    let mut s = samples.to_vec();
    s.sort_unstable();
    let n = s.len() as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let max = s.last().copied().unwrap_or(0);
    for m in start.max(1)..=max {
        let count = s.len() - s.partition_point(|&v| v < m);
        if count < min_count {
            break;
        }
        xs.push(m as f64);
        ys.push(log(count as f64 / n));
    }
    linear_fit(&xs, &ys)
}
