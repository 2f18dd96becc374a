use alloc::vec::Vec;

use super::solution::{UwMethod, UwSolution};
use crate::error::{Error, Result};
use crate::func::ProfileFunction;
use crate::math::Moments;
use crate::rng::{label, stream};
use crate::trap::{draw_holding_times, z_backward, BackwardMode, HoldingTimes, TrapEnvironment};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub reps: u64,
}

/// Leaving the window on the left is harmless when supp u starts inside it.
fn left_exit_is_zero(w: &TrapEnvironment, u: &ProfileFunction) -> bool {
    !matches!(u.support(), Some((a, _)) if a < w.window().0)
}

fn sample_value(
    w: &TrapEnvironment,
    ht: &HoldingTimes,
    u: &ProfileFunction,
    t: f64,
    x: f64,
    exit_zero: bool,
) -> Result<f64> {
    match z_backward(w, ht, t, x, BackwardMode::Star) {
        Ok(k) => Ok(u.eval(w.atoms()[k].x)),
        Err(Error::WindowExit { .. }) if exit_zero => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn replica_times(w: &TrapEnvironment, seed: u64, r: u64) -> Result<HoldingTimes> {
    let mut rng = stream(seed, &[label("uw-mc"), r]);
    draw_holding_times(w, &mut rng)
}

/// Mean and standard error of u(Z_W*(t; x)) over `n_reps` holding-time draws.
/// Replica r uses the stream `seed / "uw-mc" / r`, shared with
/// [`estimate_uw_mc_grid`].
pub fn estimate_uw_mc(w: &TrapEnvironment, u: &ProfileFunction, t: f64, x: f64, n_reps: u64, seed: u64) -> Result<McEstimate> {
    if n_reps == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let exit_zero = left_exit_is_zero(w, u);
    let mut m = Moments::new();
    for r in 0..n_reps {
        let ht = replica_times(w, seed, r)?;
        m.push(sample_value(w, &ht, u, t, x, exit_zero)?);
    }
    Ok(McEstimate { mean: m.mean, stderr: m.stderr(), reps: n_reps })
}

/// Monte Carlo u_W at every atom and time, reusing each holding-time draw
/// across the whole grid.
pub fn estimate_uw_mc_grid(w: &TrapEnvironment, u: &ProfileFunction, times: &[f64], n_reps: u64, seed: u64) -> Result<UwSolution> {
    if n_reps == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let exit_zero = left_exit_is_zero(w, u);
    let nt = times.len();
    let mut acc: Vec<Moments> = alloc::vec![Moments::new(); w.len() * nt];
    for r in 0..n_reps {
        let ht = replica_times(w, seed, r)?;
        for (k, a) in w.atoms().iter().enumerate() {
            for (j, &t) in times.iter().enumerate() {
                acc[k * nt + j].push(sample_value(w, &ht, u, t, a.x, exit_zero)?);
            }
        }
    }
    let mut sol = UwSolution::empty(w, times, UwMethod::MonteCarlo);
    sol.values = acc.iter().map(|m| m.mean).collect();
    sol.stderr = Some(acc.iter().map(|m| m.stderr()).collect());
    Ok(sol)
}
