use alloc::vec::Vec;

use crate::math::sqrt;

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// sup_x |F_n(x) − F(x)|. Returns 0 for an empty sample.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let s = sorted(samples);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// sup_x |F_a(x) − F_b(x)| between two empirical distributions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { 1.0 };
    }
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

fn c_alpha(alpha: f64) -> f64 {
    use crate::math::log;
    sqrt(-0.5 * log(alpha / 2.0))
}

/// Asymptotic critical value c(α)/sqrt(n), c(α) = sqrt(−ln(α/2)/2).
pub fn ks_critical_one_sample(alpha: f64, n: usize) -> f64 {
    c_alpha(alpha) / sqrt(n as f64)
}

/// Asymptotic critical value c(α) sqrt((n + m)/(n m)).
pub fn ks_critical_two_sample(alpha: f64, n: usize, m: usize) -> f64 {
    c_alpha(alpha) * sqrt((n + m) as f64 / (n as f64 * m as f64))
}
