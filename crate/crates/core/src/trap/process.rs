use alloc::vec::Vec;

use rand::Rng;

use super::environment::TrapEnvironment;
use crate::error::{Error, Result};
use crate::math::exp1;

/// One realization of τ_W = Σ y_k ζ_k δ_{x_k}.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldingTimes {
    zeta: Vec<f64>,
    /// prefix[i] = τ_0 + ... + τ_{i-1}
    prefix: Vec<f64>,
}

impl HoldingTimes {
    /// Holding times from given unit-exponential draws.
    pub fn from_zeta(w: &TrapEnvironment, zeta: Vec<f64>) -> Result<Self> {
        if zeta.len() != w.len() || zeta.iter().any(|&z| !(z > 0.0)) {
            return Err(Error::InvalidArgument("need one positive zeta per atom"));
        }
        let mut prefix = Vec::with_capacity(zeta.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for (a, &z) in w.atoms().iter().zip(&zeta) {
            acc += a.y * z;
            prefix.push(acc);
        }
        Ok(Self { zeta, prefix })
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn tau(&self, k: usize) -> f64 {
        self.prefix[k + 1] - self.prefix[k]
    }

    /// τ over atoms with index in [i, j).
    pub fn tau_range(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            0.0
        } else {
            self.prefix[j] - self.prefix[i]
        }
    }

    /// τ_W((a, b]).
    pub fn tau_mass(&self, w: &TrapEnvironment, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.tau_range(w.count_at_or_before(a), w.count_at_or_before(b))
    }
}

pub fn draw_holding_times<R: Rng + ?Sized>(w: &TrapEnvironment, rng: &mut R) -> Result<HoldingTimes> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("trap environment is empty"));
    }
    let zeta = (0..w.len()).map(|_| exp1(rng)).collect();
    HoldingTimes::from_zeta(w, zeta)
}

/// Index of the atom occupied at time t by Z_W started from x:
/// sup{x' : τ([x, x')) ≤ t}.
pub fn z_forward(w: &TrapEnvironment, ht: &HoldingTimes, t: f64, x: f64) -> Result<usize> {
    let i0 = w.first_at_or_after(x);
    if i0 >= w.len() {
        return Err(Error::WindowExit { t });
    }
    let base = ht.prefix[i0];
    // first m >= i0 with prefix[m + 1] - base > t
    let rest = &ht.prefix[i0 + 1..];
    let m = rest.partition_point(|&p| p - base <= t);
    if m >= rest.len() {
        return Err(Error::WindowExit { t });
    }
    Ok(i0 + m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackwardMode {
    /// Z_W*(t; x)
    Star,
    /// Z_W*(τ({x}) + t; x): started just after leaving x.
    Circ,
}

/// Index of the atom occupied at time t by Z_W* started from x:
/// inf{x' : τ((x', x]) ≤ t}.
pub fn z_backward(w: &TrapEnvironment, ht: &HoldingTimes, t: f64, x: f64, mode: BackwardMode) -> Result<usize> {
    let c = w.count_at_or_before(x);
    if c == 0 {
        return Err(Error::WindowExit { t });
    }
    let j0 = c - 1;
    let t = match mode {
        BackwardMode::Circ if w.atoms()[j0].x == x => t + ht.tau(j0),
        _ => t,
    };
    let top = ht.prefix[j0 + 1];
    // largest m <= j0 with top - prefix[m] > t
    let m = ht.prefix[..=j0].partition_point(|&p| top - p > t);
    if m == 0 {
        return Err(Error::WindowExit { t });
    }
    Ok(m - 1)
}
