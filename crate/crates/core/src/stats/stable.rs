use rand::distr::Open01;
use rand::Rng;

use crate::math::{erfc, exp1, pow, sin, sqrt};

/// Positive κ-stable draw with E e^{−θS} = e^{−θ^κ}, κ ∈ (0, 1), by the
/// Chambers-Mallows-Stuck construction for the totally skewed case
/// (Kanter's form).
pub fn sample_positive_stable<R: Rng + ?Sized>(kappa: f64, rng: &mut R) -> f64 {
    let u: f64 = core::f64::consts::PI * rng.sample::<f64, _>(Open01);
    let e = exp1(rng);
    let a = pow(
        pow(sin(kappa * u), kappa) * pow(sin((1.0 - kappa) * u), 1.0 - kappa) / sin(u),
        1.0 / (1.0 - kappa),
    );
    pow(a / e, (1.0 - kappa) / kappa)
}

/// Draw of the inverse subordinator E_t = inf{s : S_s > t} when
/// E e^{−θ S_s} = e^{−s c θ^κ}: E_t has the law of t^κ / (c S^κ).
pub fn inverse_stable_sample<R: Rng + ?Sized>(kappa: f64, c: f64, t: f64, rng: &mut R) -> f64 {
    let s = sample_positive_stable(kappa, rng);
    pow(t, kappa) / (c * pow(s, kappa))
}

/// CDF of the Lévy law with scale c (the 1/2-stable law with transform
/// e^{−sqrt(2 c θ)}).
pub fn levy_cdf(x: f64, c: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        erfc(sqrt(c / (2.0 * x)))
    }
}
