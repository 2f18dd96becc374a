use alloc::vec::Vec;

use rand::Rng;

use crate::env::{g_profile, Environment, LadderStats, SeriesOptions};
use crate::error::{Error, Result};
use crate::func::ProfileFunction;
use crate::math::poisson;
use crate::trap::TrapEnvironment;

/// Particle counts per atom (trap side, `offset` 0) or per lattice site
/// `offset + i` (RWRE side).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticleConfiguration {
    offset: i64,
    counts: Vec<u64>,
}

impl ParticleConfiguration {
    pub fn new(offset: i64, counts: Vec<u64>) -> Self {
        Self { offset, counts }
    }

    pub fn zeros(offset: i64, len: usize) -> Self {
        Self { offset, counts: alloc::vec![0; len] }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn counts_mut(&mut self) -> &mut [u64] {
        &mut self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Count at site (or atom index) `s`, 0 outside the stored range.
    pub fn get(&self, s: i64) -> u64 {
        let i = s - self.offset;
        if i < 0 || i as usize >= self.counts.len() {
            0
        } else {
            self.counts[i as usize]
        }
    }

    /// (site, count) pairs with nonzero count.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (self.offset + i as i64, c))
    }
}

pub enum InitialCondition<'a> {
    /// Poisson(a_n u(x_k) y_k) at each atom.
    Trap { w: &'a TrapEnvironment, a_n: f64 },
    /// Poisson(u(x/n) g(x)) at each site.
    RwreLocal { env: &'a Environment, n: f64, opts: SeriesOptions },
    /// Poisson(u(ν_k/n) β_k) at each ladder location.
    RwreLadder { env: &'a Environment, ladders: &'a LadderStats, n: f64 },
}

/// Expected counts, aligned with the configuration that
/// [`init_configuration`] returns.
pub fn initial_means(cond: &InitialCondition<'_>, u: &ProfileFunction) -> Result<(i64, Vec<f64>)> {
    match *cond {
        InitialCondition::Trap { w, a_n } => {
            if !(a_n > 0.0) {
                return Err(Error::InvalidArgument("a_n must be positive"));
            }
            Ok((0, w.atoms().iter().map(|a| a_n * u.eval(a.x) * a.y).collect()))
        }
        InitialCondition::RwreLocal { env, n, opts } => {
            let g = g_profile(env, opts);
            let mut means = Vec::with_capacity(env.len());
            for (i, gi) in g.iter().enumerate() {
                let x = env.x_min() + i as i64;
                let ux = u.eval(x as f64 / n);
                if ux == 0.0 {
                    means.push(0.0);
                    continue;
                }
                match gi {
                    Some(g) => means.push(ux * g),
                    None => return Err(Error::BufferExhausted { site: x }),
                }
            }
            Ok((env.x_min(), means))
        }
        InitialCondition::RwreLadder { env, ladders, n } => {
            let mut means = alloc::vec![0.0; env.len()];
            for e in ladders.entries() {
                if !env.contains(e.nu) {
                    continue;
                }
                let ux = u.eval(e.nu as f64 / n);
                if ux == 0.0 {
                    continue;
                }
                match e.beta {
                    Some(b) => means[(e.nu - env.x_min()) as usize] = ux * b,
                    None => return Err(Error::BufferExhausted { site: e.nu }),
                }
            }
            Ok((env.x_min(), means))
        }
    }
}

/// Independent Poisson counts with the means of [`initial_means`].
pub fn init_configuration<R: Rng + ?Sized>(
    cond: &InitialCondition<'_>,
    u: &ProfileFunction,
    rng: &mut R,
) -> Result<ParticleConfiguration> {
    let (offset, means) = initial_means(cond, u)?;
    Ok(ParticleConfiguration::new(offset, means.iter().map(|&m| poisson(rng, m)).collect()))
}
