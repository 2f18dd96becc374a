use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, expm1, integrate, log, pow, tgamma, Moments};

/// Mean and standard error of e^{−θ X}.
pub fn empirical_laplace(samples: &[f64], theta: f64) -> (f64, f64) {
    let m: Moments = samples.iter().map(|&x| exp(-theta * x)).collect();
    (m.mean, m.stderr())
}

/// λ Γ(1−κ) θ^κ / κ: the Laplace exponent per unit length of σ_W for a
/// Poisson process with intensity λ y^{−κ−1} dx dy.
pub fn levy_laplace_exponent(lambda: f64, kappa: f64, theta: f64) -> f64 {
    lambda * tgamma(1.0 - kappa) * pow(theta, kappa) / kappa
}

/// E exp(−θ σ_W(I)) for an interval I of the given length when atoms with
/// depth below ε are discarded:
/// exp(−λ |I| ∫_ε^∞ (1 − e^{−θy}) y^{−κ−1} dy), by quadrature.
pub fn truncated_levy_laplace(lambda: f64, kappa: f64, eps: f64, theta: f64, length: f64) -> f64 {
    if theta == 0.0 {
        return 1.0;
    }
    // θ^κ ∫_{θε}^∞ (1 − e^{−z}) z^{−κ−1} dz with z = e^s, plus the tail beyond Z
    let big: f64 = 60.0;
    let s0 = log(theta * eps);
    let s1 = log(big);
    let body = if s0 < s1 {
        integrate(|s| -expm1(-exp(s)) * exp(-kappa * s), s0, s1, 256)
    } else {
        0.0
    };
    let tail = pow(big.max(theta * eps), -kappa) / kappa;
    exp(-lambda * length * pow(theta, kappa) * (body + tail))
}

/// c = −ln L̂(θ0)/θ0^κ, the scale of exp(−c θ^κ) matched at θ0.
pub fn fit_stable_scale(samples: &[f64], kappa: f64, theta0: f64) -> Result<f64> {
    let (l, _) = empirical_laplace(samples, theta0);
    if !(l > 0.0 && l < 1.0) {
        return Err(Error::InvalidArgument("empirical transform outside (0, 1) at theta0"));
    }
    Ok(-log(l) / pow(theta0, kappa))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacePoint {
    pub theta: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub model: f64,
    /// |empirical − model| / stderr
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceCheck {
    pub points: Vec<LaplacePoint>,
    pub max_gap: f64,
    pub max_z: f64,
}

/// Compare empirical transforms with a model transform on a θ grid.
pub fn laplace_transform_check<F: Fn(f64) -> f64>(samples: &[f64], thetas: &[f64], model: F) -> LaplaceCheck {
    let points: Vec<LaplacePoint> = thetas
        .iter()
        .map(|&theta| {
            let (empirical, stderr) = empirical_laplace(samples, theta);
            let m = model(theta);
            let gap = (empirical - m).abs();
            let z = if stderr > 0.0 { gap / stderr } else if gap == 0.0 { 0.0 } else { f64::INFINITY };
            LaplacePoint { theta, empirical, stderr, model: m, z }
        })
        .collect();
    let max_gap = points.iter().fold(0.0f64, |m, p| m.max((p.empirical - p.model).abs()));
    let max_z = points.iter().fold(0.0f64, |m, p| m.max(p.z));
    LaplaceCheck { points, max_gap, max_z }
}
