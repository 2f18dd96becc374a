use alloc::vec::Vec;

use super::environment::Environment;
use crate::error::{Error, Result};
use crate::math::{exp, pow};
use crate::trap::{Atom, TrapEnvironment};

/// Truncation rule for the series R_i and W_j: stop once the running product
/// has stayed below `tol` times the partial sum for `patience` consecutive
/// terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub tol: f64,
    pub patience: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { tol: 1e-12, patience: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub sum: f64,
    /// Geometric estimate of the neglected tail, last term × q/(1 − q) with
    /// q = exp(mean log ρ over the window).
    pub tail_estimate: f64,
    pub terms: usize,
}

fn tail_estimate(env: &Environment, last: f64) -> f64 {
    let q = exp(env.mean_log_rho());
    if q < 1.0 {
        last * q / (1.0 - q)
    } else {
        f64::INFINITY
    }
}

/// R_start = Σ_{j ≥ start} Π_{start, j}.
pub fn forward_series(env: &Environment, start: i64, opts: SeriesOptions) -> Result<SeriesSum> {
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut j = start;
    loop {
        if !env.contains(j) {
            return Err(Error::BufferExhausted { site: j });
        }
        term *= env.rho(j);
        sum += term;
        if term < opts.tol * sum {
            quiet += 1;
            if quiet >= opts.patience {
                return Ok(SeriesSum {
                    sum,
                    tail_estimate: tail_estimate(env, term),
                    terms: (j - start + 1) as usize,
                });
            }
        } else {
            quiet = 0;
        }
        j += 1;
    }
}

/// W_end = Σ_{i ≤ end} Π_{i, end}.
pub fn backward_series(env: &Environment, end: i64, opts: SeriesOptions) -> Result<SeriesSum> {
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut i = end;
    loop {
        if !env.contains(i) {
            return Err(Error::BufferExhausted { site: i });
        }
        term *= env.rho(i);
        sum += term;
        if term < opts.tol * sum {
            quiet += 1;
            if quiet >= opts.patience {
                return Ok(SeriesSum {
                    sum,
                    tail_estimate: tail_estimate(env, term),
                    terms: (end - i + 1) as usize,
                });
            }
        } else {
            quiet = 0;
        }
        i -= 1;
    }
}

/// g(x) = 1 + R_x + R_{x+1}, the expected number of visits to x of a walk
/// started at x. The returned tail estimate bounds the truncation error.
pub fn g_function(env: &Environment, x: i64, opts: SeriesOptions) -> Result<SeriesSum> {
    if !env.contains(x) {
        return Err(Error::BufferExhausted { site: x });
    }
    let r1 = forward_series(env, x + 1, opts)?;
    let rho = env.rho(x);
    let r0 = rho * (1.0 + r1.sum);
    Ok(SeriesSum {
        sum: 1.0 + r0 + r1.sum,
        tail_estimate: (1.0 + rho) * r1.tail_estimate,
        terms: r1.terms,
    })
}

/// g over the whole window; `None` where the right buffer is too short.
pub fn g_profile(env: &Environment, opts: SeriesOptions) -> Vec<Option<f64>> {
    let n = env.len();
    let mut out = alloc::vec![None; n];
    let mut x = env.x_max();
    let mut r_next = None;
    while x >= env.x_min() {
        if let Ok(s) = forward_series(env, x + 1, opts) {
            r_next = Some(s.sum);
            break;
        }
        x -= 1;
    }
    let Some(mut r1) = r_next else { return out };
    while x >= env.x_min() {
        let r0 = env.rho(x) * (1.0 + r1);
        out[(x - env.x_min()) as usize] = Some(1.0 + r0 + r1);
        r1 = r0;
        x -= 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderEntry {
    pub k: i64,
    pub nu: i64,
    pub next_nu: Option<i64>,
    /// Quenched expected crossing time of the block [ν_k, ν_{k+1}).
    pub beta: Option<f64>,
    /// max over the block of exp(V(j+1) − V(ν_k)).
    pub max_increase: Option<f64>,
}

impl LadderEntry {
    pub fn block_length(&self) -> Option<i64> {
        self.next_nu.map(|n| n - self.nu)
    }

    /// The block closes inside the window and β could be certified.
    pub fn is_complete(&self) -> bool {
        self.next_nu.is_some() && self.beta.is_some()
    }
}

/// Ladder locations of a window and the per-block statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderStats {
    entries: Vec<LadderEntry>,
    zero: usize,
}

impl LadderStats {
    /// Records of the potential scanned from `x_min`, indexed so that ν_0 is
    /// the last record at or left of 0. The first record in the window is
    /// never complete, because W at its left neighbour is not available.
    pub fn compute(env: &Environment, opts: SeriesOptions) -> Self {
        let mut nus = Vec::new();
        let mut best = f64::INFINITY;
        for x in env.x_min()..=env.x_max() + 1 {
            let v = env.potential(x);
            if v < best {
                best = v;
                nus.push(x);
            }
        }
        let zero = nus.partition_point(|&x| x <= 0) - 1;

        // W_j for j from the first certified ladder onward.
        let mut w_prev: Option<f64> = None;
        let mut entries = Vec::with_capacity(nus.len());
        for (i, &nu) in nus.iter().enumerate() {
            let next_nu = nus.get(i + 1).copied();
            let mut e = LadderEntry { k: i as i64 - zero as i64, nu, next_nu, beta: None, max_increase: None };
            if w_prev.is_none() && nu > env.x_min() {
                w_prev = backward_series(env, nu - 1, opts).ok().map(|s| s.sum);
            }
            if let Some(next) = next_nu {
                let v0 = env.potential(nu);
                let mut m = f64::NEG_INFINITY;
                for j in nu..next {
                    m = m.max(env.potential(j + 1) - v0);
                }
                e.max_increase = Some(exp(m));
                if let Some(mut w) = w_prev {
                    let mut total = 0.0;
                    for j in nu..next {
                        w = env.rho(j) * (1.0 + w);
                        total += w;
                    }
                    w_prev = Some(w);
                    e.beta = Some((next - nu) as f64 + 2.0 * total);
                }
            }
            entries.push(e);
        }
        Self { entries, zero }
    }

    pub fn entries(&self) -> &[LadderEntry] {
        &self.entries
    }

    pub fn get(&self, k: i64) -> Option<&LadderEntry> {
        let i = self.zero as i64 + k;
        if i < 0 {
            None
        } else {
            self.entries.get(i as usize)
        }
    }

    pub fn complete(&self) -> impl Iterator<Item = &LadderEntry> {
        self.entries.iter().filter(|e| e.is_complete())
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.iter().map(|e| e.nu)
    }

    pub fn min_k(&self) -> i64 {
        -(self.zero as i64)
    }

    pub fn max_k(&self) -> i64 {
        self.entries.len() as i64 - 1 - self.zero as i64
    }
}

/// β_k computed on its own: W at ν_k − 1 by the truncated series, then the
/// recursion W_j = ρ_j (1 + W_{j−1}) through the block.
pub fn beta_k(env: &Environment, ladders: &LadderStats, k: i64, opts: SeriesOptions) -> Result<f64> {
    let e = ladders.get(k).ok_or(Error::IncompleteLadder { k })?;
    let next = e.next_nu.ok_or(Error::IncompleteLadder { k })?;
    let mut w = backward_series(env, e.nu - 1, opts)?.sum;
    let mut total = 0.0;
    for j in e.nu..next {
        w = env.rho(j) * (1.0 + w);
        total += w;
    }
    Ok((next - e.nu) as f64 + 2.0 * total)
}

/// Quenched variance of the hitting time of `to` by a walk started at
/// `from` < `to`. The crossing times T_x of the edges x → x + 1 are
/// independent with E T_x² from the recursion
/// ω E T_x² = ω + (1 − ω) E(1 + T_{x−1} + T_x)², run from the left edge of
/// the window.
pub fn crossing_time_variance(env: &Environment, from: i64, to: i64) -> Result<f64> {
    if from >= to || !env.contains(from) || !env.contains(to - 1) {
        return Err(Error::InvalidArgument("need x_min <= from < to <= x_max + 1"));
    }
    let (mut m1, mut m2) = (0.0, 0.0);
    let mut var = 0.0;
    for x in env.x_min()..to {
        let w = env.omega(x);
        let q = 1.0 - w;
        let n1 = (1.0 + q * m1) / w;
        let n2 = (w + q * (1.0 + m2 + 2.0 * m1 + 2.0 * n1 + 2.0 * m1 * n1)) / w;
        if x >= from {
            var += n2 - n1 * n1;
        }
        m1 = n1;
        m2 = n2;
    }
    Ok(var)
}

/// Expected number of visits to x by a walk from ν_k before it hits ν_{k+1}.
pub fn b_coeff(env: &Environment, ladders: &LadderStats, x: i64, k: i64) -> Result<f64> {
    let e = ladders.get(k).ok_or(Error::IncompleteLadder { k })?;
    let end = e.next_nu.ok_or(Error::IncompleteLadder { k })?;
    if x >= end {
        return Err(Error::InvalidArgument("b_coeff needs x < nu_{k+1}"));
    }
    if x < env.x_min() {
        return Err(Error::BufferExhausted { site: x });
    }
    let mut term = 1.0;
    let mut r = 0.0;
    for j in x + 1..end {
        term *= env.rho(j);
        r += term;
    }
    let occupation = (1.0 + r) / env.omega(x);
    let s = e.nu;
    if x >= s {
        return Ok(occupation);
    }
    let shift = (x..end).map(|m| env.potential(m + 1)).fold(f64::NEG_INFINITY, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    for m in x..end {
        let t = exp(env.potential(m + 1) - shift);
        den += t;
        if m >= s {
            num += t;
        }
    }
    Ok(occupation * num / den)
}

/// Atoms (ν_k / n, β_k / n^{1/κ}) for the complete ladders of the window.
pub fn rescaled_trap_env(env: &Environment, ladders: &LadderStats, n: f64, kappa: f64) -> Result<TrapEnvironment> {
    if !(n >= 1.0) || !(kappa > 0.0) {
        return Err(Error::InvalidArgument("need n >= 1 and kappa > 0"));
    }
    let ys = pow(n, 1.0 / kappa);
    let atoms = ladders
        .complete()
        .map(|e| Atom { x: e.nu as f64 / n, y: e.beta.unwrap_or(0.0) / ys })
        .collect();
    TrapEnvironment::new(atoms, env.x_min() as f64 / n, (env.x_max() + 1) as f64 / n, 0.0)
}
