use alloc::vec::Vec;

use rand::Rng;

use super::environment::{Atom, TrapEnvironment};
use crate::error::{Error, Result};
use crate::math::{pow, poisson};
use rand::distr::Open01;

/// Poisson process on [lo, hi] × [eps, ∞) with intensity λ y^{−κ−1} dx dy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonTrapParams {
    pub lambda: f64,
    pub kappa: f64,
    pub lo: f64,
    pub hi: f64,
    pub y_floor: f64,
}

impl PoissonTrapParams {
    fn check(&self) -> Result<()> {
        if !(self.hi > self.lo) {
            return Err(Error::DegenerateWindow);
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::InvalidArgument("kappa must lie in (0, 1)"));
        }
        if !(self.lambda > 0.0) || !(self.y_floor > 0.0) {
            return Err(Error::InvalidArgument("lambda and the depth floor must be positive"));
        }
        Ok(())
    }

    /// Expected number of atoms.
    pub fn mean_count(&self) -> f64 {
        self.lambda * (self.hi - self.lo) * pow(self.y_floor, -self.kappa) / self.kappa
    }
}

pub fn sample_poisson_traps<R: Rng + ?Sized>(p: &PoissonTrapParams, rng: &mut R) -> Result<TrapEnvironment> {
    p.check()?;
    let n = poisson(rng, p.mean_count()) as usize;
    sample_poisson_traps_with_count(p, n, rng)
}

/// The same process conditioned on having exactly `n` atoms.
pub fn sample_poisson_traps_with_count<R: Rng + ?Sized>(
    p: &PoissonTrapParams,
    n: usize,
    rng: &mut R,
) -> Result<TrapEnvironment> {
    p.check()?;
    let mut atoms: Vec<Atom> = (0..n)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            Atom {
                x: p.lo + (p.hi - p.lo) * rng.random::<f64>(),
                y: p.y_floor * pow(u, -1.0 / p.kappa),
            }
        })
        .collect();
    loop {
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut clash = false;
        for i in 1..atoms.len() {
            if atoms[i].x == atoms[i - 1].x {
                atoms[i].x = p.lo + (p.hi - p.lo) * rng.random::<f64>();
                clash = true;
            }
        }
        if !clash {
            break;
        }
    }
    TrapEnvironment::new(atoms, p.lo, p.hi, p.y_floor)
}
