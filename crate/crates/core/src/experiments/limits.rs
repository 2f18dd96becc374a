use alloc::vec::Vec;

use crate::env::{sample_environment_with, BlockStream, EnvDistribution, Law, SampleOptions};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::math::{exp1, pow, sqrt, tgamma};
use crate::rng::{label, stream};
use crate::stats::{inverse_stable_sample, tail_constant};
use crate::trap::{sample_poisson_traps, PoissonTrapParams};
use crate::walk::position_after;

const BURN_IN: usize = 200;

/// Consecutive blocks of one long Q-environment.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSample {
    pub lengths: Vec<u64>,
    pub beta: Vec<f64>,
    pub max_increase: Vec<f64>,
}

impl BlockSample {
    pub fn mean_length(&self) -> f64 {
        self.lengths.iter().sum::<u64>() as f64 / self.lengths.len() as f64
    }

    /// max_{k <= m} |ν_k − k ν̄| / m, with ν̄ the sample mean length.
    pub fn ladder_drift(&self, m: usize) -> f64 {
        let nubar = self.mean_length();
        let mut pos = 0u64;
        let mut worst = 0.0f64;
        for (k, &l) in self.lengths.iter().take(m).enumerate() {
            pos += l;
            worst = worst.max((pos as f64 - (k + 1) as f64 * nubar).abs());
        }
        worst / m as f64
    }
}

pub fn block_sample(dist: &EnvDistribution, count: usize, seed: u64) -> Result<BlockSample> {
    let mut s = BlockStream::new(dist, stream(seed, &[label("blocks")]), BURN_IN, SampleOptions::default())?;
    let mut out = BlockSample {
        lengths: Vec::with_capacity(count),
        beta: Vec::with_capacity(count),
        max_increase: Vec::with_capacity(count),
    };
    for _ in 0..count {
        let b = s.next_block()?;
        out.lengths.push(b.length as u64);
        out.beta.push(b.beta);
        out.max_increase.push(b.max_increase);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaFit {
    pub lambda: f64,
    pub stderr: f64,
    /// C_1 in Q(β > x) ~ C_1 x^{−κ}.
    pub tail_constant: f64,
    pub mean_length: f64,
}

/// λ = κ C_1 / ν̄: the intensity of the Poisson limit of the rescaled trap
/// environment, matched to the β tail.
pub fn fit_lambda(sample: &BlockSample, kappa: f64, top_k: usize) -> Result<LambdaFit> {
    let (c1, se) = tail_constant(&sample.beta, kappa, top_k)?;
    let nubar = sample.mean_length();
    Ok(LambdaFit { lambda: kappa * c1 / nubar, stderr: kappa * se / nubar, tail_constant: c1, mean_length: nubar })
}

/// `samples` independent draws of n^{−1/κ} Σ_{k<n} β_k, each from its own
/// stream of blocks.
pub fn beta_sums<E: Executor>(
    dist: &EnvDistribution,
    kappa: f64,
    n: usize,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<f64>> {
    let scale = pow(n as f64, 1.0 / kappa);
    exec.map_indexed(samples, |i| {
        let rng = stream(seed, &[label("beta-sum"), i as u64]);
        let mut s = BlockStream::new(dist, rng, BURN_IN, SampleOptions::default())?;
        let mut total = 0.0;
        for _ in 0..n {
            total += s.next_block()?.beta;
        }
        Ok(total / scale)
    })
    .into_iter()
    .collect()
}

/// σ_W(window) for independent Poisson trap environments.
pub fn poisson_sigma_samples<E: Executor>(
    params: &PoissonTrapParams,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<f64>> {
    exec.map_indexed(samples, |i| {
        let mut rng = stream(seed, &[label("poisson-sigma"), i as u64]);
        Ok(sample_poisson_traps(params, &mut rng)?.sigma_total())
    })
    .into_iter()
    .collect()
}

/// n^{−1} Z(n^{1/κ}) for the directed trap process on the unscaled ladder
/// environment (ν_k, β_k) of independent Q-environments, started at 0.
pub fn trap_walk_positions<E: Executor>(
    dist: &EnvDistribution,
    kappa: f64,
    n: f64,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<f64>> {
    let horizon = pow(n, 1.0 / kappa);
    exec.map_indexed(samples, |i| {
        let env_rng = stream(seed, &[label("trap-walk-env"), i as u64]);
        let mut clock_rng = stream(seed, &[label("trap-walk-clock"), i as u64]);
        let mut s = BlockStream::new(dist, env_rng, BURN_IN, SampleOptions::default())?;
        let mut pos = 0u64;
        let mut clock = 0.0;
        loop {
            let b = s.next_block()?;
            clock += b.beta * exp1(&mut clock_rng);
            if clock > horizon {
                return Ok(pos as f64 / n);
            }
            pos += b.length as u64;
        }
    })
    .into_iter()
    .collect()
}

/// Reference draws of the inverse subordinator at time 1 for τ_W with W
/// Poisson of intensity λ y^{−κ−1}: Laplace exponent c θ^κ per unit length,
/// c = λ Γ(1−κ) Γ(1+κ) / κ.
pub fn inverse_stable_reference(kappa: f64, lambda: f64, samples: usize, seed: u64) -> Vec<f64> {
    let c = lambda * tgamma(1.0 - kappa) * tgamma(1.0 + kappa) / kappa;
    let mut rng = stream(seed, &[label("inverse-stable")]);
    (0..samples).map(|_| inverse_stable_sample(kappa, c, 1.0, &mut rng)).collect()
}

/// X_n for single walks from 0 in independent P-environments.
pub fn walk_displacements<E: Executor>(
    dist: &EnvDistribution,
    steps: u64,
    replicas: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<f64>> {
    let left = -((sqrt(steps as f64) * 10.0) as i64 + 2000);
    exec.map_indexed(replicas, |i| {
        let mut rng = stream(seed, &[label("speed"), i as u64]);
        let env = sample_environment_with(dist, Law::P, left, steps as i64 + 1, &mut rng, SampleOptions::default())?;
        match position_after(&env, 0, steps, &mut rng) {
            Ok(x) => Ok(x as f64),
            Err(Error::WindowExit { .. }) => Err(Error::BufferExhausted { site: env.x_min() }),
            Err(e) => Err(e),
        }
    })
    .into_iter()
    .collect()
}
