use alloc::vec::Vec;

use super::chunk_ranges;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::math::{poisson, sqrt, Moments};
use crate::particles::{trap_configuration_at, ExitPolicy, ParticleConfiguration};
use crate::rng::{derive_seed, label, stream};
use crate::trap::{draw_holding_times, z_backward, z_forward, BackwardMode, TrapEnvironment};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityPair {
    pub left: usize,
    pub right: usize,
    /// Estimate of P(Z_W(t; x_left) = x_right).
    pub forward: f64,
    /// Estimate of P(Z_W*(t; x_right) = x_left).
    pub backward: f64,
    /// y_left · forward − y_right · backward
    pub gap: f64,
    /// Standard error of `gap`, the two estimates being independent.
    pub stderr: f64,
}

const CHUNKS: u64 = 64;

/// Estimate both sides of y_ℓ P(Z(t; x_ℓ) = x_k) = y_k P(Z*(t; x_k) = x_ℓ)
/// for every pair ℓ <= k, from independent forward and backward draws.
pub fn trap_duality<E: Executor>(
    w: &TrapEnvironment,
    t: f64,
    reps: u64,
    seed: u64,
    exec: &E,
) -> Result<Vec<DualityPair>> {
    let n = w.len();
    if n == 0 || reps == 0 {
        return Err(Error::InvalidArgument("need atoms and replicas"));
    }
    let ranges = chunk_ranges(reps, CHUNKS);
    let parts: Vec<Result<(Vec<u64>, Vec<u64>)>> = exec.map_indexed(ranges.len(), |c| {
        let (a, b) = ranges[c];
        let mut fwd = alloc::vec![0u64; n * n];
        let mut bwd = alloc::vec![0u64; n * n];
        for r in a..b {
            let ht = draw_holding_times(w, &mut stream(seed, &[label("duality-forward"), r]))?;
            for l in 0..n {
                match z_forward(w, &ht, t, w.atoms()[l].x) {
                    Ok(k) => fwd[l * n + k] += 1,
                    Err(Error::WindowExit { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            let ht = draw_holding_times(w, &mut stream(seed, &[label("duality-backward"), r]))?;
            for k in 0..n {
                match z_backward(w, &ht, t, w.atoms()[k].x, BackwardMode::Star) {
                    Ok(l) => bwd[k * n + l] += 1,
                    Err(Error::WindowExit { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok((fwd, bwd))
    });
    let mut fwd = alloc::vec![0u64; n * n];
    let mut bwd = alloc::vec![0u64; n * n];
    for p in parts {
        let (f, b) = p?;
        for i in 0..n * n {
            fwd[i] += f[i];
            bwd[i] += b[i];
        }
    }
    let r = reps as f64;
    let mut out = Vec::new();
    for l in 0..n {
        for k in l..n {
            let pf = fwd[l * n + k] as f64 / r;
            let pb = bwd[k * n + l] as f64 / r;
            let (yl, yk) = (w.atoms()[l].y, w.atoms()[k].y);
            let var = yl * yl * pf * (1.0 - pf) / r + yk * yk * pb * (1.0 - pb) / r;
            out.push(DualityPair { left: l, right: k, forward: pf, backward: pb, gap: yl * pf - yk * pb, stderr: sqrt(var) });
        }
    }
    Ok(out)
}

/// Per-atom count statistics at time t for trap particle systems started
/// from independent Poisson counts with the given means.
pub fn trap_particle_counts<E: Executor>(
    w: &TrapEnvironment,
    means: &[f64],
    t: f64,
    reps: u64,
    seed: u64,
    exec: &E,
) -> Result<Vec<Moments>> {
    let n = w.len();
    if means.len() != n {
        return Err(Error::InvalidArgument("one mean per atom"));
    }
    let ranges = chunk_ranges(reps, CHUNKS);
    let parts: Vec<Result<Vec<Moments>>> = exec.map_indexed(ranges.len(), |c| {
        let (a, b) = ranges[c];
        let mut acc = alloc::vec![Moments::new(); n];
        for r in a..b {
            let mut rng = stream(seed, &[label("particles-init"), r]);
            let counts = means.iter().map(|&m| poisson(&mut rng, m)).collect();
            let config = ParticleConfiguration::new(0, counts);
            let move_seed = derive_seed(seed, &[label("particles-move"), r]);
            let (fin, _) = trap_configuration_at(w, &config, t, move_seed, ExitPolicy::Tally)?;
            for (m, &c) in acc.iter_mut().zip(fin.counts()) {
                m.push(c as f64);
            }
        }
        Ok(acc)
    });
    let mut acc = alloc::vec![Moments::new(); n];
    for p in parts {
        for (m, q) in acc.iter_mut().zip(p?) {
            m.merge(&q);
        }
    }
    Ok(acc)
}
