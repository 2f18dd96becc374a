use alloc::vec::Vec;

use rand::Rng;

use super::config::ParticleConfiguration;
use super::trap::SpaceTimeIntegral;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::func::{PiecewiseLinear, TestFunction};
use crate::math::pow;
use crate::rng::{label, stream, SimRng};

fn particle_rng(seed: u64, site: i64, j: u64) -> SimRng {
    stream(seed, &[label("rwre-particle"), site as u64, j])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwreSnapshot {
    pub step: u64,
    pub config: ParticleConfiguration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwreTrajectory {
    pub snapshots: Vec<RwreSnapshot>,
    /// Particles that left the window, cumulative at each snapshot.
    pub exits: Vec<u64>,
}

/// Walk every particle and record the configuration at each requested step.
/// Particles leaving the window are dropped and counted.
pub fn evolve_rwre_system(
    env: &Environment,
    config: &ParticleConfiguration,
    snapshot_steps: &[u64],
    seed: u64,
) -> Result<RwreTrajectory> {
    if snapshot_steps.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("snapshot steps must be sorted"));
    }
    let mut snaps: Vec<ParticleConfiguration> =
        snapshot_steps.iter().map(|_| ParticleConfiguration::zeros(env.x_min(), env.len())).collect();
    let mut exits = alloc::vec![0u64; snapshot_steps.len()];
    for (site, c) in config.nonzero() {
        for j in 0..c {
            let mut rng = particle_rng(seed, site, j);
            let mut x = site;
            let mut done = 0u64;
            let mut gone = false;
            for (i, &target) in snapshot_steps.iter().enumerate() {
                while !gone && done < target {
                    if !env.contains(x) {
                        gone = true;
                        break;
                    }
                    x = if rng.random::<f64>() < env.omega(x) { x + 1 } else { x - 1 };
                    done += 1;
                }
                if gone || !env.contains(x) {
                    gone = true;
                    exits[i] += 1;
                } else {
                    snaps[i].counts_mut()[(x - env.x_min()) as usize] += 1;
                }
            }
        }
    }
    let snapshots = snapshot_steps.iter().zip(snaps).map(|(&step, config)| RwreSnapshot { step, config }).collect();
    Ok(RwreTrajectory { snapshots, exits })
}

/// w_s = ∫ ψ over [s Δt, (s + 1) Δt), for s up to the end of supp ψ.
pub fn step_weights(psi: &PiecewiseLinear, dt: f64) -> Vec<f64> {
    let Some((_, end)) = psi.support() else { return Vec::new() };
    let steps = crate::math::ceil(end / dt) as usize;
    (0..steps).map(|s| psi.integral(s as f64 * dt, (s + 1) as f64 * dt)).collect()
}

fn time_scale(n: f64, kappa: f64) -> Result<f64> {
    if !(n >= 1.0) || !(kappa > 0.0) {
        return Err(Error::InvalidArgument("need n >= 1 and kappa > 0"));
    }
    Ok(pow(n, 1.0 / kappa))
}

/// (1/n^{1/κ}) ∫ Σ_x χ_{⌊t n^{1/κ}⌋}(x) φ(t, x/n) dt along independent walks.
/// The configuration after s steps is held on [s Δt, (s+1) Δt), Δt = n^{−1/κ},
/// and ψ is integrated exactly over each step.
pub fn rwre_space_time_integral(
    env: &Environment,
    config: &ParticleConfiguration,
    phi: &TestFunction,
    n: f64,
    kappa: f64,
    seed: u64,
) -> Result<SpaceTimeIntegral> {
    let scale = time_scale(n, kappa)?;
    let weights = step_weights(&phi.time, 1.0 / scale);
    let chi: Vec<f64> = (env.x_min()..=env.x_max()).map(|x| phi.space.eval(x as f64 / n)).collect();
    let mut total = 0.0;
    let mut exits = 0;
    for (site, c) in config.nonzero() {
        for j in 0..c {
            let mut rng = particle_rng(seed, site, j);
            let mut x = site;
            for &w in &weights {
                if !env.contains(x) {
                    exits += 1;
                    break;
                }
                let i = (x - env.x_min()) as usize;
                total += w * chi[i];
                x = if rng.random::<f64>() < env.omega(x) { x + 1 } else { x - 1 };
            }
        }
    }
    Ok(SpaceTimeIntegral { value: total / scale, normalization: scale, exits, discretization_error: 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanIntegral {
    pub integral: SpaceTimeIntegral,
    pub initial_mass: f64,
    /// Expected mass that left the window on each side.
    pub exited_left: f64,
    pub exited_right: f64,
}

/// Quenched expectation of [`rwre_space_time_integral`] when the initial
/// counts are independent with the given means: the mean density is evolved
/// exactly by the transition kernel.
pub fn rwre_mean_integral(
    env: &Environment,
    offset: i64,
    means: &[f64],
    phi: &TestFunction,
    n: f64,
    kappa: f64,
) -> Result<MeanIntegral> {
    if offset != env.x_min() || means.len() != env.len() {
        return Err(Error::InvalidArgument("means must cover the environment window"));
    }
    let scale = time_scale(n, kappa)?;
    let weights = step_weights(&phi.time, 1.0 / scale);
    let len = env.len();
    let chi: Vec<f64> = (env.x_min()..=env.x_max()).map(|x| phi.space.eval(x as f64 / n)).collect();
    let right: Vec<f64> = env.omegas().to_vec();
    let left: Vec<f64> = right.iter().map(|w| 1.0 - w).collect();
    let initial_mass: f64 = means.iter().sum();
    let mut out = MeanIntegral {
        integral: SpaceTimeIntegral { value: 0.0, normalization: scale, exits: 0, discretization_error: 0.0 },
        initial_mass,
        exited_left: 0.0,
        exited_right: 0.0,
    };
    let Some(first) = means.iter().position(|&m| m != 0.0) else { return Ok(out) };
    let last = means.iter().rposition(|&m| m != 0.0).unwrap_or(first);
    // padded buffers: index i + 1 holds site x_min + i
    let mut cur = alloc::vec![0.0; len + 2];
    let mut next = alloc::vec![0.0; len + 2];
    cur[1..=len].copy_from_slice(means);
    let mut pr = alloc::vec![0.0; len + 2];
    let mut pl = alloc::vec![0.0; len + 2];
    pr[1..=len].copy_from_slice(&right);
    pl[1..=len].copy_from_slice(&left);
    let mut ch = alloc::vec![0.0; len + 2];
    ch[1..=len].copy_from_slice(&chi);
    let (mut lo, mut hi) = (first + 1, last + 1);
    // occupation weighted by ψ, summed against χ once at the end
    let mut occ = alloc::vec![0.0; len + 2];
    for &w in &weights {
        for (o, &c) in occ[lo..=hi].iter_mut().zip(&cur[lo..=hi]) {
            *o += w * c;
        }
        out.exited_left += pl[1] * cur[1];
        out.exited_right += pr[len] * cur[len];
        let nlo = (lo - 1).max(1);
        let nhi = (hi + 1).min(len);
        let from_left = pr[nlo - 1..nhi].iter().zip(&cur[nlo - 1..nhi]);
        let from_right = pl[nlo + 1..nhi + 2].iter().zip(&cur[nlo + 1..nhi + 2]);
        for (n, ((a, b), (c, d))) in next[nlo..=nhi].iter_mut().zip(from_left.zip(from_right)) {
            *n = a * b + c * d;
        }
        core::mem::swap(&mut cur, &mut next);
        lo = nlo;
        hi = nhi;
    }
    let total: f64 = ch.iter().zip(&occ).map(|(a, b)| a * b).sum();
    out.integral.value = total / scale;
    Ok(out)
}
