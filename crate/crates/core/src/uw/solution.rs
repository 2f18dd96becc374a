use alloc::vec::Vec;

use crate::trap::TrapEnvironment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UwMethod {
    Ode,
    Convolution,
    MonteCarlo,
}

impl UwMethod {
    pub fn name(&self) -> &'static str {
        match self {
            UwMethod::Ode => "ode",
            UwMethod::Convolution => "convolution",
            UwMethod::MonteCarlo => "mc",
        }
    }
}

/// Values v[k][j] = u_W(t_j, x_k), stored row-major by atom.
#[derive(Debug, Clone, PartialEq)]
pub struct UwSolution {
    pub positions: Vec<f64>,
    pub depths: Vec<f64>,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: UwMethod,
    /// Per-entry standard errors for Monte Carlo solutions.
    pub stderr: Option<Vec<f64>>,
    /// Bound (or estimate, for the convolution route) of the absolute error.
    pub error_bound: f64,
}

impl UwSolution {
    pub(crate) fn empty(w: &TrapEnvironment, times: &[f64], method: UwMethod) -> Self {
        Self {
            positions: w.positions().collect(),
            depths: w.depths().collect(),
            times: times.to_vec(),
            values: alloc::vec![0.0; w.len() * times.len()],
            method,
            stderr: None,
            error_bound: 0.0,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    #[inline]
    pub fn value(&self, k: usize, j: usize) -> f64 {
        self.values[k * self.times.len() + j]
    }

    pub fn stderr_at(&self, k: usize, j: usize) -> Option<f64> {
        self.stderr.as_ref().map(|s| s[k * self.times.len() + j])
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let t = self.times.len();
        &self.values[k * t..(k + 1) * t]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_atoms()).map(|k| self.value(k, j)).collect()
    }

    /// u_W(t_j, x) as a step function: value at the last atom <= x, 0 left of
    /// all atoms.
    pub fn eval(&self, x: f64, j: usize) -> f64 {
        let c = self.positions.partition_point(|&p| p <= x);
        if c == 0 {
            0.0
        } else {
            self.value(c - 1, j)
        }
    }

    /// Jump of u_W(t_j, ·) at atom k.
    pub fn jump(&self, k: usize, j: usize) -> f64 {
        let prev = if k == 0 { 0.0 } else { self.value(k - 1, j) };
        self.value(k, j) - prev
    }

    /// Total variation of u_W(t_j, ·) over the line, taking the profile to be
    /// 0 left of the first atom and right of the window.
    pub fn total_variation(&self, j: usize) -> f64 {
        let col = self.column(j);
        let mut tv = 0.0;
        let mut prev = 0.0;
        for &v in &col {
            tv += (v - prev).abs();
            prev = v;
        }
        tv + prev.abs()
    }
}

/// Σ |f_{i+1} − f_i| over a sampled sequence.
pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// ∂_t u_W(t_j, x_k) = (v_{k-1} − v_k)/y_k, with v_{-1} = 0.
pub fn duw_dt(sol: &UwSolution, k: usize, j: usize) -> f64 {
    let prev = if k == 0 { 0.0 } else { sol.value(k - 1, j) };
    (prev - sol.value(k, j)) / sol.depths[k]
}
