//! Forward/backward trap duality and the Poisson particle duality.

use rwre_core::exec::Executor;
use rwre_core::experiments::{trap_duality, trap_particle_counts};
use rwre_core::uw::{solve_uw_ode, SolveOptions};

use super::{max_of, sub_seed, z_score};
use crate::config::DualityParams;
use crate::error::Result;
use crate::formats::{fmt_f64, traps_csv, Table};
use crate::result::{Criterion, ExperimentOutput};

pub fn run<E: Executor>(p: &DualityParams, seed: u64, exec: &E, out: &mut ExperimentOutput) -> Result<()> {
    let w = p.traps.build(sub_seed(out, seed, "traps"), 0)?;
    let pairs = trap_duality(&w, p.t, p.reps, sub_seed(out, seed, "holding-times"), exec)?;
    out.file("duality_traps.csv", traps_csv(&w)?);
    let mut t = Table::new(&["left", "right", "forward", "backward", "gap", "stderr", "z"])?;
    let mut worst = 0.0f64;
    for q in &pairs {
        let z = if q.gap == 0.0 { 0.0 } else { q.gap.abs() / q.stderr };
        worst = worst.max(z);
        t.row([
            q.left.to_string(),
            q.right.to_string(),
            fmt_f64(q.forward),
            fmt_f64(q.backward),
            fmt_f64(q.gap),
            fmt_f64(q.stderr),
            fmt_f64(z),
        ])?;
    }
    out.file("duality_pairs.csv", t.into_bytes()?);
    out.check(Criterion::below("duality.max_pair_z", worst, p.z_max));

    let q = &p.particles;
    let w = q.traps.build(sub_seed(out, seed, "particle-traps"), 1)?;
    let u = q.u.build()?;
    let sol = solve_uw_ode(&w, &u, &[0.0, q.t], SolveOptions { allow_stiff: true })?;
    let means: Vec<f64> = (0..w.len()).map(|k| q.scale * sol.value(k, 0) * sol.depths[k]).collect();
    let moments = trap_particle_counts(&w, &means, q.t, q.reps, sub_seed(out, seed, "particles"), exec)?;
    out.file("particle_traps.csv", traps_csv(&w)?);
    let mut t = Table::new(&["x", "y", "expected", "mean", "stderr", "z", "dispersion"])?;
    let mut zs = Vec::new();
    let mut disp = Vec::new();
    for (k, m) in moments.iter().enumerate() {
        let expected = q.scale * sol.value(k, 1) * sol.depths[k];
        let z = z_score(m.mean, expected, m.stderr(), 1.0 / q.reps as f64);
        let d = if m.mean > 0.0 { m.variance() / m.mean } else { f64::NAN };
        zs.push(z);
        if expected >= q.dispersion_min_mean {
            disp.push(d);
        }
        t.row([
            fmt_f64(sol.positions[k]),
            fmt_f64(sol.depths[k]),
            fmt_f64(expected),
            fmt_f64(m.mean),
            fmt_f64(m.stderr()),
            fmt_f64(z),
            fmt_f64(d),
        ])?;
    }
    out.file("particle_counts.csv", t.into_bytes()?);
    out.fit("dispersion_atoms", disp.len());
    out.check(Criterion::at_most("duality.particle_mean_max_z", max_of(zs), q.z_max));
    let (lo, hi) = q.dispersion;
    let dmin = disp.iter().copied().fold(f64::INFINITY, f64::min);
    let dmax = disp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.check(Criterion::within("duality.dispersion_min", dmin, lo, hi));
    out.check(Criterion::within("duality.dispersion_max", dmax, lo, hi));
    Ok(())
}
