use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{log, pow, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport {
    /// Hill estimate of the tail index.
    pub index: f64,
    /// Asymptotic standard error index / sqrt(top_k).
    pub stderr: f64,
    pub top_k: usize,
    pub sample_size: usize,
    /// The (top_k + 1)-th largest sample.
    pub threshold: f64,
}

impl TailReport {
    /// Symmetric band of `z` standard errors.
    pub fn band(&self, z: f64) -> (f64, f64) {
        (self.index - z * self.stderr, self.index + z * self.stderr)
    }
}

fn sorted_desc(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument("samples must be finite and positive"));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

fn hill_sorted(s: &[f64], top_k: usize) -> Result<TailReport> {
    if top_k < 50 || s.len() <= top_k {
        return Err(Error::InsufficientSamples { needed: top_k.max(50) + 1, got: s.len() });
    }
    let threshold = s[top_k];
    let lt = log(threshold);
    let sum: f64 = s[..top_k].iter().map(|&x| log(x) - lt).sum();
    if !(sum > 0.0) {
        return Err(Error::InsufficientSamples { needed: top_k + 1, got: 0 });
    }
    let index = top_k as f64 / sum;
    Ok(TailReport { index, stderr: index / sqrt(top_k as f64), top_k, sample_size: s.len(), threshold })
}

/// Hill estimator of the tail index from the `top_k` largest samples.
/// Degenerate (tied) tails give `InsufficientSamples`.
pub fn hill_tail_index(samples: &[f64], top_k: usize) -> Result<TailReport> {
    hill_sorted(&sorted_desc(samples)?, top_k)
}

/// Hill estimates for several choices of `top_k`.
pub fn hill_plot(samples: &[f64], ks: &[usize]) -> Result<Vec<TailReport>> {
    let s = sorted_desc(samples)?;
    ks.iter().map(|&k| hill_sorted(&s, k)).collect()
}

/// Estimate C in P(X > x) ~ C x^{−κ}: (k/N) X_(k+1)^κ, with relative
/// standard error 1/sqrt(k). Returns (C, stderr).
pub fn tail_constant(samples: &[f64], kappa: f64, top_k: usize) -> Result<(f64, f64)> {
    let s = sorted_desc(samples)?;
    if top_k == 0 || s.len() <= top_k {
        return Err(Error::InsufficientSamples { needed: top_k + 1, got: s.len() });
    }
    let c = top_k as f64 / s.len() as f64 * pow(s[top_k], kappa);
    Ok((c, c / sqrt(top_k as f64)))
}
