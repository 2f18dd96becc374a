use alloc::vec::Vec;

use super::solution::{UwMethod, UwSolution};
use crate::error::{Error, Result};
use crate::func::ProfileFunction;
use crate::math::{ceil, exp, expm1, floor, ln_poisson_pmf, sqrt};
use crate::trap::TrapEnvironment;

#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub struct SolveOptions {
    /// Proceed even when min y / max y < 1e-9.
    pub allow_stiff: bool,
}


fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite and nonnegative"));
    }
    Ok(())
}

fn check_stiffness(w: &TrapEnvironment, opts: SolveOptions) -> Result<()> {
    if w.is_empty() || opts.allow_stiff {
        return Ok(());
    }
    let (lo, hi) = w.depths().fold((f64::INFINITY, 0.0f64), |(a, b), y| (a.min(y), b.max(y)));
    let ratio = lo / hi;
    if ratio < 1e-9 {
        return Err(Error::StiffnessWarning { ratio });
    }
    Ok(())
}

/// W is known only on its window; a walker leaving it on the left sees u = 0,
/// which is exact when supp u starts inside the window.
fn check_left_cover(w: &TrapEnvironment, u: &ProfileFunction) -> Result<()> {
    match u.support() {
        Some((a, _)) if a < w.window().0 => Err(Error::SupportNotCovered),
        _ => Ok(()),
    }
}

#[derive(Clone, Copy)]
enum Direction {
    /// dv_k/dt = (v_{k-1} - v_k)/y_k, v_{-1} = 0
    Forward,
    /// dF_k/dt = (F_{k+1} - F_k)/y_k, F_N = 0
    Reverse,
}

/// e^{tA} init for every t in `times`, by uniformization. Returns row-major
/// values and the largest omitted Poisson mass.
fn propagate(y: &[f64], init: &[f64], times: &[f64], dir: Direction) -> (Vec<f64>, f64) {
    let n = y.len();
    let nt = times.len();
    let mut out = alloc::vec![0.0; n * nt];
    if n == 0 {
        return (out, 0.0);
    }
    let lam = y.iter().fold(0.0f64, |m, &v| m.max(1.0 / v));
    let a: Vec<f64> = y.iter().map(|&v| (1.0 / v) / lam).collect();
    let ranges: Vec<(u64, u64, f64)> = times
        .iter()
        .map(|&t| {
            let m = lam * t;
            if m == 0.0 {
                return (0, 0, 0.0);
            }
            let s = sqrt(m);
            let lo = floor(m - 10.0 * s - 20.0).max(0.0) as u64;
            let hi = ceil(m + 10.0 * s + 40.0) as u64;
            (lo, hi, m)
        })
        .collect();
    let n_max = ranges.iter().map(|r| r.1).max().unwrap_or(0);
    let mut mass = alloc::vec![0.0; nt];
    let mut cur = init.to_vec();
    for step in 0..=n_max {
        for (j, &(lo, hi, m)) in ranges.iter().enumerate() {
            if step < lo || step > hi {
                continue;
            }
            let wgt = exp(ln_poisson_pmf(m, step));
            if wgt == 0.0 {
                continue;
            }
            mass[j] += wgt;
            for k in 0..n {
                out[k * nt + j] += wgt * cur[k];
            }
        }
        if step == n_max {
            break;
        }
        match dir {
            Direction::Forward => {
                for k in (1..n).rev() {
                    cur[k] = (1.0 - a[k]) * cur[k] + a[k] * cur[k - 1];
                }
                cur[0] *= 1.0 - a[0];
            }
            Direction::Reverse => {
                for k in 0..n - 1 {
                    cur[k] = (1.0 - a[k]) * cur[k] + a[k] * cur[k + 1];
                }
                cur[n - 1] *= 1.0 - a[n - 1];
            }
        }
    }
    let omitted = mass.iter().fold(0.0f64, |m, &s| m.max((1.0 - s).abs()));
    (out, omitted)
}

/// Largest Λ t for which uniformization is used; beyond it (very shallow atoms
/// next to deep ones) the integrating-factor route takes over.
const UNIFORMIZATION_BUDGET: f64 = 2e6;
const STIFF_GRID_STEPS: usize = 4096;

/// 0, a geometric ramp from `y_min`/8 up to `h` for the initial layer of the
/// shallowest atoms, the requested times, and enough points between them that
/// no step exceeds `h`. Also returns where each requested time landed.
fn refined_grid(times: &[f64], h: f64, y_min: f64) -> (Vec<f64>, Vec<usize>) {
    let mut sorted: Vec<f64> = times.to_vec();
    let mut g = y_min / 8.0;
    while g < h {
        sorted.push(g);
        g *= 1.25;
    }
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut grid = alloc::vec![0.0];
    for &t in &sorted {
        let last = *grid.last().unwrap();
        if t <= last {
            continue;
        }
        let pieces = ceil((t - last) / h).max(1.0) as usize;
        for p in 1..pieces {
            grid.push(last + (t - last) * p as f64 / pieces as f64);
        }
        grid.push(t);
    }
    let index = times.iter().map(|t| grid.partition_point(|g| g < t)).collect();
    (grid, index)
}

/// Forward solve by uniformization, or by the refined convolution when Λ t is
/// over budget. Returns row-major values, an absolute error bound and the
/// route taken.
fn forward_values(y: &[f64], init: &[f64], times: &[f64]) -> (Vec<f64>, f64, UwMethod) {
    let sup = init.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let lam = y.iter().fold(0.0f64, |m, &v| m.max(1.0 / v));
    let t_max = times.iter().fold(0.0f64, |m, &t| m.max(t));
    if lam * t_max <= UNIFORMIZATION_BUDGET {
        let (values, omitted) = propagate(y, init, times, Direction::Forward);
        return (values, (omitted + 1e-14) * sup, UwMethod::Ode);
    }
    let y_min = y.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let (grid, index) = refined_grid(times, t_max / STIFF_GRID_STEPS as f64, y_min);
    let (values, err) = convolution_richardson(y, init, &grid);
    let m = grid.len();
    let mut out = alloc::vec![0.0; y.len() * times.len()];
    for k in 0..y.len() {
        for (j, &i) in index.iter().enumerate() {
            out[k * times.len() + j] = values[k * m + i];
        }
    }
    (out, err, UwMethod::Convolution)
}

/// The forward system on raw depths `y` from `init`, row-major by atom, with
/// an absolute error bound.
pub fn solve_atoms(y: &[f64], init: &[f64], times: &[f64]) -> Result<(Vec<f64>, f64)> {
    check_times(times)?;
    if y.len() != init.len() || y.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("depths must be positive and match init"));
    }
    if y.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    let (values, bound, _) = forward_values(y, init, times);
    Ok((values, bound))
}

/// u_W at every atom and time in `times`.
pub fn solve_uw_ode(w: &TrapEnvironment, u: &ProfileFunction, times: &[f64], opts: SolveOptions) -> Result<UwSolution> {
    check_times(times)?;
    check_left_cover(w, u)?;
    check_stiffness(w, opts)?;
    let mut sol = UwSolution::empty(w, times, UwMethod::Ode);
    if u.is_zero() {
        return Ok(sol);
    }
    let y: Vec<f64> = w.depths().collect();
    let init: Vec<f64> = w.positions().map(|x| u.eval(x)).collect();
    let (values, bound, method) = forward_values(&y, &init, times);
    sol.values = values;
    sol.error_bound = bound;
    sol.method = method;
    Ok(sol)
}

/// u_W°(t, x_k): the profile seen by a walker that has just left x_k, computed
/// as u_W at x_k on the environment with that atom removed.
pub fn solve_uw_circ(w: &TrapEnvironment, u: &ProfileFunction, k: usize, times: &[f64]) -> Result<Vec<f64>> {
    if k >= w.len() {
        return Err(Error::InvalidArgument("atom index out of range"));
    }
    if k == 0 {
        check_left_cover(w, u)?;
        return Ok(alloc::vec![0.0; times.len()]);
    }
    let reduced = w.without_atom(k);
    let sol = solve_uw_ode(&reduced, u, times, SolveOptions { allow_stiff: true })?;
    Ok(sol.row(k - 1).to_vec())
}

/// 1 − (1 − e^{−z})/z, accurate for small z.
fn ramp_weight(z: f64) -> f64 {
    if z < 1e-4 {
        z / 2.0 - z * z / 6.0 + z * z * z / 24.0
    } else {
        1.0 + expm1(-z) / z
    }
}

/// Level-by-level integrating-factor solve on the increasing grid `grid`
/// (starting at 0), with the input of each level linear on every step.
fn convolution_pass(y: &[f64], init: &[f64], grid: &[f64]) -> Vec<f64> {
    let n = y.len();
    let m = grid.len();
    let mut out = alloc::vec![0.0; n * m];
    let mut prev_level = alloc::vec![0.0; m];
    let mut level = alloc::vec![0.0; m];
    for k in 0..n {
        level[0] = init[k];
        for i in 0..m - 1 {
            let z = (grid[i + 1] - grid[i]) / y[k];
            let f0 = prev_level[i];
            let f1 = prev_level[i + 1];
            level[i + 1] = exp(-z) * level[i] - expm1(-z) * f0 + ramp_weight(z) * (f1 - f0);
        }
        out[k * m..(k + 1) * m].copy_from_slice(&level);
        core::mem::swap(&mut prev_level, &mut level);
    }
    out
}

/// Convolution on `grid` and on its midpoint refinement, Richardson-combined.
/// Returns values on `grid` and the size of the correction.
fn convolution_richardson(y: &[f64], init: &[f64], grid: &[f64]) -> (Vec<f64>, f64) {
    let m = grid.len();
    let mut fine_grid = Vec::with_capacity(2 * m - 1);
    for i in 0..m {
        if i > 0 {
            fine_grid.push(0.5 * (grid[i - 1] + grid[i]));
        }
        fine_grid.push(grid[i]);
    }
    let coarse = convolution_pass(y, init, grid);
    let fine = convolution_pass(y, init, &fine_grid);
    let mf = fine_grid.len();
    let mut err = 0.0f64;
    let mut out = coarse;
    for k in 0..y.len() {
        for i in 0..m {
            let c = out[k * m + i];
            let f = fine[k * mf + 2 * i];
            let d = (f - c) / 3.0;
            err = err.max(d.abs());
            out[k * m + i] = f + d;
        }
    }
    (out, err)
}

/// Level-by-level integrating-factor solve on the uniform grid
/// {i t_max / steps}, with the input of each level interpolated linearly.
/// The result is Richardson-extrapolated against a run with twice the steps,
/// and `error_bound` holds the size of that correction.
pub fn solve_uw_convolution(w: &TrapEnvironment, u: &ProfileFunction, t_max: f64, steps: usize) -> Result<UwSolution> {
    if !(t_max > 0.0) || steps == 0 {
        return Err(Error::InvalidArgument("need t_max > 0 and steps > 0"));
    }
    check_left_cover(w, u)?;
    let times: Vec<f64> = (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect();
    let mut sol = UwSolution::empty(w, &times, UwMethod::Convolution);
    if w.is_empty() {
        return Ok(sol);
    }
    let y: Vec<f64> = w.depths().collect();
    let init: Vec<f64> = w.positions().map(|x| u.eval(x)).collect();
    let (values, err) = convolution_richardson(&y, &init, &times);
    sol.values = values;
    sol.error_bound = err;
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compare Σ u_W(t, x_k) g(x_k) y_k with Σ u(x_k) f_k(t) y_k, where f solves
/// the reversed system df_k/dt = (f_{k+1} − f_k)/y_k, f_k(0) = g(x_k).
pub fn dual_pairing_check(w: &TrapEnvironment, u: &ProfileFunction, g: &ProfileFunction, t: f64) -> Result<PairingCheck> {
    check_left_cover(w, u)?;
    if let Some((_, b)) = g.support() {
        if b > w.window().1 {
            return Err(Error::SupportNotCovered);
        }
    }
    let sol = solve_uw_ode(w, u, &[t], SolveOptions { allow_stiff: true })?;
    let y: Vec<f64> = w.depths().collect();
    let gi: Vec<f64> = w.positions().map(|x| g.eval(x)).collect();
    let (f, _) = propagate(&y, &gi, &[t], Direction::Reverse);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (k, a) in w.atoms().iter().enumerate() {
        lhs += sol.value(k, 0) * gi[k] * a.y;
        rhs += u.eval(a.x) * f[k] * a.y;
    }
    Ok(PairingCheck { lhs, rhs, gap: (lhs - rhs).abs() })
}
