use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math::{exp, log, pow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPoint {
    pub omega: f64,
    pub prob: f64,
}

impl SupportPoint {
    pub fn rho(&self) -> f64 {
        (1.0 - self.omega) / self.omega
    }
}

/// Law of a single ω_x with finite support. Construction enforces E[log ρ] < 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvDistribution {
    support: Vec<SupportPoint>,
    cumulative: Vec<f64>,
    mean_log_rho: f64,
    mean_rho: f64,
}

impl EnvDistribution {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDistribution("empty support"));
        }
        let mut total = 0.0;
        for &(w, p) in points {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::InvalidDistribution("omega must lie strictly inside (0, 1)"));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidDistribution("probabilities must lie in (0, 1]"));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution("probabilities must sum to 1"));
        }
        let support: Vec<SupportPoint> =
            points.iter().map(|&(omega, prob)| SupportPoint { omega, prob }).collect();
        let mean_log_rho: f64 = support.iter().map(|s| s.prob * log(s.rho())).sum();
        let mean_rho: f64 = support.iter().map(|s| s.prob * s.rho()).sum();
        // a few ulps of rounding must not turn E log ρ = 0 into a transient law
        if !(mean_log_rho < -MEAN_LOG_RHO_SLACK) {
            return Err(Error::AssumptionViolated { mean_log_rho });
        }
        let mut acc = 0.0;
        let cumulative = support
            .iter()
            .map(|s| {
                acc += s.prob;
                acc
            })
            .collect();
        Ok(Self { support, cumulative, mean_log_rho, mean_rho })
    }

    /// Same law given through ρ values instead of ω.
    pub fn from_rho(points: &[(f64, f64)]) -> Result<Self> {
        let pts: Vec<(f64, f64)> = points.iter().map(|&(r, p)| (1.0 / (1.0 + r), p)).collect();
        Self::new(&pts)
    }

    pub fn constant(omega: f64) -> Result<Self> {
        Self::new(&[(omega, 1.0)])
    }

    pub fn support(&self) -> &[SupportPoint] {
        &self.support
    }

    pub fn mean_log_rho(&self) -> f64 {
        self.mean_log_rho
    }

    pub fn mean_rho(&self) -> f64 {
        self.mean_rho
    }

    /// E[ρ^s].
    pub fn rho_moment(&self, s: f64) -> f64 {
        self.support.iter().map(|p| p.prob * pow(p.rho(), s)).sum()
    }

    /// exp(E log ρ), the typical per-site contraction of the series.
    pub fn typical_ratio(&self) -> f64 {
        exp(self.mean_log_rho)
    }

    pub fn max_rho(&self) -> f64 {
        self.support.iter().fold(0.0, |m, p| m.max(p.rho()))
    }

    /// Limiting speed of the walk: (1 - Eρ)/(1 + Eρ) if Eρ < 1, else 0.
    pub fn speed(&self) -> f64 {
        if self.mean_rho < 1.0 {
            (1.0 - self.mean_rho) / (1.0 + self.mean_rho)
        } else {
            0.0
        }
    }

    pub fn sample_omega<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.support.len() == 1 {
            return self.support[0].omega;
        }
        let u: f64 = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.support[i.min(self.support.len() - 1)].omega
    }
}

/// Root of E[ρ^κ] = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    /// κ ∈ (0, 1]: zero speed.
    SubBallistic(f64),
    /// κ > 1: positive speed, the sub-ballistic machinery does not apply.
    Ballistic(f64),
}

impl Kappa {
    pub fn value(&self) -> f64 {
        match *self {
            Kappa::SubBallistic(k) | Kappa::Ballistic(k) => k,
        }
    }

    pub fn is_ballistic(&self) -> bool {
        matches!(self, Kappa::Ballistic(_))
    }
}

const MEAN_LOG_RHO_SLACK: f64 = 1e-12;
const KAPPA_LO: f64 = 1e-6;
const KAPPA_HI: f64 = 4.0;

/// Bisection for the positive root of κ ↦ E[ρ^κ] − 1 on [1e-6, 4].
pub fn solve_kappa(dist: &EnvDistribution) -> Result<Kappa> {
    if !(dist.mean_log_rho() < -MEAN_LOG_RHO_SLACK) {
        return Err(Error::AssumptionViolated { mean_log_rho: dist.mean_log_rho() });
    }
    let f = |k: f64| dist.rho_moment(k) - 1.0;
    let (mut lo, mut hi) = (KAPPA_LO, KAPPA_HI);
    if f(hi) < 0.0 {
        return Err(Error::NoRoot { kappa_max: KAPPA_HI });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let k = 0.5 * (lo + hi);
    if dist.mean_rho() < 1.0 {
        Ok(Kappa::Ballistic(k))
    } else {
        Ok(Kappa::SubBallistic(k))
    }
}

/// Given r > 1 and κ, the s < 1 with r^κ + s^κ = 2, so that ρ ∈ {r, s} with
/// equal weights has root κ.
pub fn two_point_rho_for_kappa(r: f64, kappa: f64) -> Result<f64> {
    let rk = pow(r, kappa);
    if !(r > 1.0) || !(kappa > 0.0) || !(rk < 2.0) {
        return Err(Error::InvalidArgument("need r > 1 and r^kappa < 2"));
    }
    Ok(pow(2.0 - rk, 1.0 / kappa))
}
