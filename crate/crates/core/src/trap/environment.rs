use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub y: f64,
}

/// Finite set of traps on the window [lo, hi], positions strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapEnvironment {
    atoms: Vec<Atom>,
    lo: f64,
    hi: f64,
    y_floor: f64,
    /// prefix[i] = y_0 + ... + y_{i-1}
    prefix: Vec<f64>,
}

impl TrapEnvironment {
    pub fn new(atoms: Vec<Atom>, lo: f64, hi: f64, y_floor: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::DegenerateWindow);
        }
        for a in &atoms {
            if !(a.y > 0.0) || !a.y.is_finite() || !a.x.is_finite() {
                return Err(Error::InvalidTrapEnvironment("depths must be finite and positive"));
            }
            if a.x < lo || a.x > hi {
                return Err(Error::InvalidTrapEnvironment("atom outside the window"));
            }
        }
        if atoms.windows(2).any(|w| !(w[0].x < w[1].x)) {
            return Err(Error::InvalidTrapEnvironment("positions must be strictly increasing"));
        }
        let mut prefix = Vec::with_capacity(atoms.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for a in &atoms {
            acc += a.y;
            prefix.push(acc);
        }
        Ok(Self { atoms, lo, hi, y_floor, prefix })
    }

    /// Window exactly covering the atoms, for hand-built environments.
    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        let lo = atoms.first().map_or(0.0, |a| a.x);
        let hi = atoms.last().map_or(1.0, |a| a.x);
        let hi = if hi > lo { hi } else { lo + 1.0 };
        Self::new(atoms, lo, hi, 0.0)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn y_floor(&self) -> f64 {
        self.y_floor
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.x)
    }

    pub fn depths(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.y)
    }

    /// Index of the first atom with position >= x.
    pub fn first_at_or_after(&self, x: f64) -> usize {
        self.atoms.partition_point(|a| a.x < x)
    }

    /// Number of atoms with position <= x; the last such atom has index one less.
    pub fn count_at_or_before(&self, x: f64) -> usize {
        self.atoms.partition_point(|a| a.x <= x)
    }

    /// σ over atoms with index in [i, j).
    pub fn sigma_range(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            0.0
        } else {
            self.prefix[j] - self.prefix[i]
        }
    }

    pub fn sigma_total(&self) -> f64 {
        self.prefix[self.atoms.len()]
    }

    /// Same environment with atom k removed.
    pub fn without_atom(&self, k: usize) -> TrapEnvironment {
        let mut atoms = self.atoms.clone();
        atoms.remove(k);
        Self::new(atoms, self.lo, self.hi, self.y_floor).expect("removing an atom keeps validity")
    }
}

/// σ_W((a, b]).
pub fn sigma_mass(w: &TrapEnvironment, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    w.sigma_range(w.count_at_or_before(a), w.count_at_or_before(b))
}

/// Keep atoms with y >= eps.
pub fn truncate_env(w: &TrapEnvironment, eps: f64) -> TrapEnvironment {
    let atoms = w.atoms.iter().copied().filter(|a| a.y >= eps).collect();
    TrapEnvironment::new(atoms, w.lo, w.hi, w.y_floor.max(eps)).expect("subset of a valid environment")
}

/// Diagnostics for a candidate trap environment.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub atoms: usize,
    pub duplicate_positions: usize,
    pub unsorted_pairs: usize,
    pub nonpositive_depths: usize,
    /// Σ y_k 1{y_k < eps0} per unit window length.
    pub small_trap_mass_per_length: f64,
    /// Atoms with y >= eps0 left and right of 0.
    pub deep_left: usize,
    pub deep_right: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.duplicate_positions == 0 && self.unsorted_pairs == 0 && self.nonpositive_depths == 0
    }
}

/// Check raw atoms against the trap-environment conditions that a finite list
/// can certify.
pub fn validate_env(atoms: &[Atom], lo: f64, hi: f64, eps0: f64) -> ValidationReport {
    let duplicate_positions = atoms.windows(2).filter(|w| w[0].x == w[1].x).count();
    let unsorted_pairs = atoms.windows(2).filter(|w| w[0].x > w[1].x).count();
    let nonpositive_depths = atoms.iter().filter(|a| !(a.y > 0.0) || !a.y.is_finite()).count();
    let small: f64 = atoms.iter().filter(|a| a.y < eps0 && a.y > 0.0).map(|a| a.y).sum();
    let len = (hi - lo).max(f64::MIN_POSITIVE);
    ValidationReport {
        atoms: atoms.len(),
        duplicate_positions,
        unsorted_pairs,
        nonpositive_depths,
        small_trap_mass_per_length: small / len,
        deep_left: atoms.iter().filter(|a| a.y >= eps0 && a.x < 0.0).count(),
        deep_right: atoms.iter().filter(|a| a.y >= eps0 && a.x >= 0.0).count(),
    }
}
