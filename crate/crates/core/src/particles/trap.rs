use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::config::ParticleConfiguration;
use crate::error::{Error, Result};
use crate::func::TestFunction;
use crate::math::exp1;
use crate::rng::{label, stream, SimRng};
use crate::trap::TrapEnvironment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitPolicy {
    /// Leaving the window right of the last atom is an error.
    Fail,
    /// Count exits and drop the particle.
    Tally,
}

/// Particle `particle` leaves atom `from` at `time` for atom `from + 1`
/// (which is outside the window when `from` is the last atom).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub particle: u32,
    pub from: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapTrajectory {
    pub initial: ParticleConfiguration,
    pub events: Vec<JumpEvent>,
    pub horizon: f64,
    pub exits: u64,
}

impl TrapTrajectory {
    /// Configuration just after all jumps at times <= t.
    pub fn configuration_at(&self, t: f64) -> ParticleConfiguration {
        let mut c = self.initial.clone();
        let n = c.len();
        for e in self.events.iter().take_while(|e| e.time <= t) {
            let counts = c.counts_mut();
            counts[e.from as usize] -= 1;
            if (e.from as usize) + 1 < n {
                counts[e.from as usize + 1] += 1;
            }
        }
        c
    }
}

fn particle_rng(seed: u64, atom: usize, j: u64) -> SimRng {
    stream(seed, &[label("trap-particle"), atom as u64, j])
}

/// Starting atoms of all particles, in a fixed order, with their index among
/// the particles of that atom.
fn particles(config: &ParticleConfiguration) -> impl Iterator<Item = (usize, u64)> + '_ {
    config.counts().iter().enumerate().flat_map(|(k, &c)| (0..c).map(move |j| (k, j)))
}

#[derive(Clone, Copy)]
struct Pending {
    time: f64,
    particle: u32,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    // reversed so the max-heap pops the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.particle.cmp(&self.particle))
    }
}

/// Exact event-driven evolution up to `horizon`. Every particle carries its
/// own stream keyed by (seed, starting atom, index at that atom).
pub fn evolve_trap_system(
    w: &TrapEnvironment,
    config: &ParticleConfiguration,
    horizon: f64,
    seed: u64,
    policy: ExitPolicy,
) -> Result<TrapTrajectory> {
    if config.len() != w.len() {
        return Err(Error::InvalidArgument("configuration does not match the trap environment"));
    }
    let y: Vec<f64> = w.depths().collect();
    let mut pos: Vec<usize> = Vec::new();
    let mut rngs: Vec<SimRng> = Vec::new();
    let mut heap = BinaryHeap::new();
    for (k, j) in particles(config) {
        let mut rng = particle_rng(seed, k, j);
        let t = y[k] * exp1(&mut rng);
        let id = pos.len() as u32;
        pos.push(k);
        rngs.push(rng);
        if t <= horizon {
            heap.push(Pending { time: t, particle: id });
        }
    }
    let mut events = Vec::new();
    let mut exits = 0;
    while let Some(Pending { time, particle }) = heap.pop() {
        let p = particle as usize;
        let from = pos[p];
        events.push(JumpEvent { time, particle, from: from as u32 });
        let to = from + 1;
        if to >= w.len() {
            if policy == ExitPolicy::Fail {
                return Err(Error::WindowExit { t: time });
            }
            exits += 1;
            continue;
        }
        pos[p] = to;
        let next = time + y[to] * exp1(&mut rngs[p]);
        if next <= horizon {
            heap.push(Pending { time: next, particle });
        }
    }
    Ok(TrapTrajectory { initial: config.clone(), events, horizon, exits })
}

/// Configuration at time t without recording the path. Uses the same
/// particle streams as [`evolve_trap_system`], so the result agrees with
/// `evolve_trap_system(..).configuration_at(t)`.
pub fn trap_configuration_at(
    w: &TrapEnvironment,
    config: &ParticleConfiguration,
    t: f64,
    seed: u64,
    policy: ExitPolicy,
) -> Result<(ParticleConfiguration, u64)> {
    if config.len() != w.len() {
        return Err(Error::InvalidArgument("configuration does not match the trap environment"));
    }
    let atoms = w.atoms();
    let mut out = ParticleConfiguration::zeros(0, w.len());
    let mut exits = 0;
    for (k, j) in particles(config) {
        let mut rng = particle_rng(seed, k, j);
        let mut at = k;
        let mut clock = atoms[k].y * exp1(&mut rng);
        loop {
            if clock > t {
                out.counts_mut()[at] += 1;
                break;
            }
            at += 1;
            if at >= atoms.len() {
                if policy == ExitPolicy::Fail {
                    return Err(Error::WindowExit { t: clock });
                }
                exits += 1;
                break;
            }
            clock += atoms[at].y * exp1(&mut rng);
        }
    }
    Ok((out, exits))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeIntegral {
    pub value: f64,
    pub normalization: f64,
    pub exits: u64,
    /// Bound on the time-discretization error, 0 for exact integrals.
    pub discretization_error: f64,
}

/// (1/a_n) ∫ Σ_k η_t(x_k) φ(t, x_k) dt for a recorded trajectory, exact for
/// separable piecewise-linear φ.
pub fn trap_space_time_integral(
    w: &TrapEnvironment,
    traj: &TrapTrajectory,
    phi: &TestFunction,
    a_n: f64,
) -> SpaceTimeIntegral {
    let n = w.len();
    let chi: Vec<f64> = w.positions().map(|x| phi.space.eval(x)).collect();
    let mut count: Vec<u64> = traj.initial.counts().to_vec();
    let mut since = alloc::vec![0.0; n];
    let mut total = 0.0;
    let close = |k: usize, t: f64, count: &[u64], since: &mut [f64], total: &mut f64| {
        if count[k] > 0 && chi[k] != 0.0 {
            *total += count[k] as f64 * chi[k] * phi.time.integral(since[k], t);
        }
        since[k] = t;
    };
    for e in &traj.events {
        let from = e.from as usize;
        close(from, e.time, &count, &mut since, &mut total);
        count[from] -= 1;
        if from + 1 < n {
            close(from + 1, e.time, &count, &mut since, &mut total);
            count[from + 1] += 1;
        }
    }
    for k in 0..n {
        close(k, traj.horizon, &count, &mut since, &mut total);
    }
    SpaceTimeIntegral { value: total / a_n, normalization: a_n, exits: traj.exits, discretization_error: 0.0 }
}

/// Same integral as [`trap_space_time_integral`] with horizon `phi.horizon()`,
/// accumulated particle by particle without storing events.
pub fn trap_integral_direct(
    w: &TrapEnvironment,
    config: &ParticleConfiguration,
    phi: &TestFunction,
    a_n: f64,
    seed: u64,
    policy: ExitPolicy,
) -> Result<SpaceTimeIntegral> {
    if config.len() != w.len() {
        return Err(Error::InvalidArgument("configuration does not match the trap environment"));
    }
    let horizon = phi.horizon();
    let atoms = w.atoms();
    let chi: Vec<f64> = atoms.iter().map(|a| phi.space.eval(a.x)).collect();
    let mut total = 0.0;
    let mut exits = 0;
    for (k, j) in particles(config) {
        let mut rng = particle_rng(seed, k, j);
        let mut at = k;
        let mut start = 0.0;
        loop {
            let end = start + atoms[at].y * exp1(&mut rng);
            if chi[at] != 0.0 {
                total += chi[at] * phi.time.integral(start, end.min(horizon));
            }
            if end > horizon {
                break;
            }
            at += 1;
            if at >= atoms.len() {
                if policy == ExitPolicy::Fail {
                    return Err(Error::WindowExit { t: end });
                }
                exits += 1;
                break;
            }
            start = end;
        }
    }
    Ok(SpaceTimeIntegral { value: total / a_n, normalization: a_n, exits, discretization_error: 0.0 })
}
