//! Frames of u_W(t, ·) on one Poisson trap environment.

use rwre_core::uw::{solve_uw_ode, SolveOptions};

use super::sub_seed;
use crate::config::Figure1Params;
use crate::error::Result;
use crate::formats::{frame_csv, frame_name, traps_csv, uw_csv};
use crate::result::{Criterion, ExperimentOutput};

/// Rounding slack on the total variation bound.
const TV_SLACK: f64 = 1e-12;

pub fn run(p: &Figure1Params, seed: u64, out: &mut ExperimentOutput) -> Result<()> {
    let w = p.traps.build(sub_seed(out, seed, "traps"), 0)?;
    let u = p.u.build()?;
    let sol = solve_uw_ode(&w, &u, &p.times, SolveOptions { allow_stiff: true })?;
    out.fit("atoms", w.len());
    out.fit("method", sol.method.name());
    out.fit("error_bound", sol.error_bound);
    out.file("traps.csv", traps_csv(&w)?);
    out.file("uw.csv", uw_csv(&sol)?);
    for (j, &t) in p.times.iter().enumerate() {
        out.file(format!("frames/{}", frame_name(t)), frame_csv(&sol, j)?);
    }

    // The profile must be a step function with steps exactly on the atoms:
    // constant up to the next atom, and a nonzero step at every atom it
    // reaches.
    let xs = &sol.positions;
    let mut misplaced = 0;
    for j in 0..sol.n_times() {
        for k in 0..xs.len() {
            let next = xs.get(k + 1).copied().unwrap_or(w.window().1);
            let probes = [xs[k], 0.5 * (xs[k] + next), xs[k] + 0.999 * (next - xs[k])];
            misplaced += probes.iter().filter(|&&x| sol.eval(x, j) != sol.value(k, j)).count();
            let active = sol.value(k, j) > 0.0 || (k > 0 && sol.value(k - 1, j) > 0.0);
            if active && sol.jump(k, j) == 0.0 {
                misplaced += 1;
            }
        }
    }
    out.check(Criterion::none("figure1.jumps_off_atoms", misplaced));

    let tv = (0..sol.n_times()).map(|j| sol.total_variation(j)).fold(0.0, f64::max);
    out.check(Criterion::at_most("figure1.max_total_variation", tv, u.total_variation() + TV_SLACK));

    let last = sol.n_times() - 1;
    let mass = |j: usize| -> f64 { (0..w.len()).map(|k| sol.value(k, j) * sol.depths[k]).sum() };
    let centre = |j: usize| -> f64 {
        (0..w.len()).map(|k| sol.value(k, j) * sol.depths[k] * xs[k]).sum::<f64>() / mass(j)
    };
    out.check(Criterion::above("figure1.centre_shift", centre(last) - centre(0), 0.0));
    let sup = |j: usize| sol.column(j).into_iter().fold(0.0, f64::max);
    out.check(Criterion::below("figure1.sup_ratio", sup(last) / sup(0), 1.0));
    Ok(())
}
