use alloc::vec::Vec;

use rand::Rng;

use super::distribution::EnvDistribution;
use crate::error::{Error, Result};
use crate::math::log;
use crate::rng::{label, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Law {
    /// i.i.d. sites.
    P,
    /// i.i.d. blocks, conditioned on 0 being a ladder location.
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    /// Largest admissible single block under Q.
    pub block_cap: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self { block_cap: 1_000_000 }
    }
}

/// Finite window [x_min, x_max] of an environment, with its potential.
///
/// `potential` holds V on [x_min, x_max + 1], V(0) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    x_min: i64,
    omega: Vec<f64>,
    rho: Vec<f64>,
    log_rho: Vec<f64>,
    potential: Vec<f64>,
    mean_log_rho: f64,
    law: Law,
    seed: Option<u64>,
}

impl Environment {
    pub fn from_omega(x_min: i64, omega: Vec<f64>, law: Law) -> Result<Self> {
        let x_max = x_min + omega.len() as i64 - 1;
        if omega.is_empty() || x_min > 0 || x_max < 0 {
            return Err(Error::InvalidWindow { lo: x_min as f64, hi: x_max as f64 });
        }
        if omega.iter().any(|&w| !(w > 0.0 && w < 1.0)) {
            return Err(Error::InvalidDistribution("omega must lie strictly inside (0, 1)"));
        }
        let rho: Vec<f64> = omega.iter().map(|&w| (1.0 - w) / w).collect();
        let log_rho: Vec<f64> = rho.iter().map(|&r| log(r)).collect();
        let n = omega.len();
        let zero = (-x_min) as usize;
        let mut potential = alloc::vec![0.0; n + 1];
        for i in zero..n {
            potential[i + 1] = potential[i] + log_rho[i];
        }
        for i in (0..zero).rev() {
            potential[i] = potential[i + 1] - log_rho[i];
        }
        if law == Law::Q && potential[..zero].iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidArgument("law Q requires V(y) > 0 for y < 0"));
        }
        let mean_log_rho = log_rho.iter().sum::<f64>() / n as f64;
        Ok(Self { x_min, omega, rho, log_rho, potential, mean_log_rho, law, seed: None })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn law(&self) -> Law {
        self.law
    }

    pub fn x_min(&self) -> i64 {
        self.x_min
    }

    pub fn x_max(&self) -> i64 {
        self.x_min + self.omega.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.x_min && x <= self.x_max()
    }

    #[inline]
    fn idx(&self, x: i64) -> usize {
        debug_assert!(self.contains(x), "site {x} outside window");
        (x - self.x_min) as usize
    }

    #[inline]
    pub fn omega(&self, x: i64) -> f64 {
        self.omega[self.idx(x)]
    }

    #[inline]
    pub fn rho(&self, x: i64) -> f64 {
        self.rho[self.idx(x)]
    }

    #[inline]
    pub fn log_rho(&self, x: i64) -> f64 {
        self.log_rho[self.idx(x)]
    }

    /// V(x) for x in [x_min, x_max + 1].
    #[inline]
    pub fn potential(&self, x: i64) -> f64 {
        self.potential[(x - self.x_min) as usize]
    }

    /// Average of log ρ over the window.
    pub fn mean_log_rho(&self) -> f64 {
        self.mean_log_rho
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omega
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rho
    }

    /// V over [x_min, x_max + 1].
    pub fn potentials(&self) -> &[f64] {
        &self.potential
    }
}

/// Sample a window under P or Q, using the stream `seed / "environment"`.
pub fn sample_environment(
    dist: &EnvDistribution,
    law: Law,
    x_min: i64,
    x_max: i64,
    seed: u64,
    opts: SampleOptions,
) -> Result<Environment> {
    let mut rng = stream(seed, &[label("environment")]);
    Ok(sample_environment_with(dist, law, x_min, x_max, &mut rng, opts)?.with_seed(seed))
}

pub fn sample_environment_with<R: Rng + ?Sized>(
    dist: &EnvDistribution,
    law: Law,
    x_min: i64,
    x_max: i64,
    rng: &mut R,
    opts: SampleOptions,
) -> Result<Environment> {
    if x_min > 0 || x_max < 0 {
        return Err(Error::InvalidWindow { lo: x_min as f64, hi: x_max as f64 });
    }
    let right_len = (x_max + 1) as usize;
    let left_len = (-x_min) as usize;
    let omega = match law {
        Law::P => (0..left_len + right_len).map(|_| dist.sample_omega(rng)).collect(),
        Law::Q => {
            let mut left_blocks: Vec<Vec<f64>> = Vec::new();
            let mut have = 0;
            while have < left_len {
                let mut b = Vec::new();
                sample_block(dist, rng, opts.block_cap, &mut b)?;
                have += b.len();
                left_blocks.push(b);
            }
            let mut omega = Vec::with_capacity(have + right_len);
            for b in left_blocks.iter().rev() {
                omega.extend_from_slice(b);
            }
            omega.drain(..have - left_len);
            let mut right = Vec::with_capacity(right_len);
            while right.len() < right_len {
                sample_block(dist, rng, opts.block_cap, &mut right)?;
            }
            right.truncate(right_len);
            omega.extend_from_slice(&right);
            omega
        }
    };
    Environment::from_omega(x_min, omega, law)
}

/// Append one block: draw sites until the potential first drops below its
/// starting value.
pub(crate) fn sample_block<R: Rng + ?Sized>(
    dist: &EnvDistribution,
    rng: &mut R,
    cap: usize,
    out: &mut Vec<f64>,
) -> Result<()> {
    let mut v = 0.0;
    let mut len = 0;
    loop {
        let w = dist.sample_omega(rng);
        v += log((1.0 - w) / w);
        out.push(w);
        len += 1;
        if v < 0.0 {
            return Ok(());
        }
        if len >= cap {
            return Err(Error::BlockOverflow { cap });
        }
    }
}
