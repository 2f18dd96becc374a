//! u_W by the forward solver against the Monte Carlo estimator, the
//! two-atom closed form, and the dual pairing identity.

use rwre_core::func::ProfileFunction;
use rwre_core::trap::{Atom, TrapEnvironment};
use rwre_core::uw::{dual_pairing_check, estimate_uw_mc_grid, solve_uw_ode, SolveOptions};

use super::{sub_seed, z_score};
use crate::config::UwCrosscheckParams;
use crate::error::Result;
use crate::formats::{fmt_f64, traps_csv, uw_csv, uw_stderr_csv, Table};
use crate::result::{Criterion, ExperimentOutput};

/// Two unit-depth atoms at 0 and 1 with u(0) = 1, u(1) = 0: v_2(t) = t e^{−t}.
pub fn two_atom_error() -> Result<f64> {
    let w = TrapEnvironment::new(vec![Atom { x: 0.0, y: 1.0 }, Atom { x: 1.0, y: 1.0 }], -1.0, 2.0, 0.0)?;
    let u = ProfileFunction::hat(-0.5, 0.0, 0.5, 1.0)?;
    let sol = solve_uw_ode(&w, &u, &[1.0], SolveOptions::default())?;
    Ok((sol.value(1, 0) - (-1.0f64).exp()).abs())
}

pub fn run(p: &UwCrosscheckParams, seed: u64, out: &mut ExperimentOutput) -> Result<()> {
    out.check(Criterion::at_most("uw.two_atom_error", two_atom_error()?, p.two_atom_tol));

    let w = p.traps.build(sub_seed(out, seed, "traps"), 0)?;
    let u = p.u.build()?;
    let ode = solve_uw_ode(&w, &u, &p.times, SolveOptions { allow_stiff: true })?;
    let mc = estimate_uw_mc_grid(&w, &u, &p.times, p.reps, sub_seed(out, seed, "uw-mc"))?;
    out.file("traps.csv", traps_csv(&w)?);
    out.file("uw_ode.csv", uw_csv(&ode)?);
    out.file("uw_mc.csv", uw_csv(&mc)?);
    if let Some(se) = uw_stderr_csv(&mc)? {
        out.file("uw_mc_stderr.csv", se);
    }

    // a cell where every replica agreed is judged at the estimator's
    // resolution sup u / reps
    let floor = u.sup_norm() / p.reps as f64;
    let mut cells = Table::new(&["x", "t", "ode", "mc", "stderr", "z"])?;
    let mut worst = 0.0f64;
    for k in 0..ode.n_atoms() {
        for (j, &t) in p.times.iter().enumerate() {
            let se = mc.stderr_at(k, j).unwrap_or(0.0);
            let z = z_score(mc.value(k, j), ode.value(k, j), se, floor);
            worst = worst.max(z);
            cells.row([
                fmt_f64(ode.positions[k]),
                fmt_f64(t),
                fmt_f64(ode.value(k, j)),
                fmt_f64(mc.value(k, j)),
                fmt_f64(se),
                fmt_f64(z),
            ])?;
        }
    }
    out.file("cells.csv", cells.into_bytes()?);
    out.check(Criterion::at_most("uw.mc_vs_ode_max_z", worst, p.z_max));

    let g = p.pairing_g.build()?;
    let pairing = dual_pairing_check(&w, &u, &g, p.pairing_t)?;
    out.fit("pairing_lhs", pairing.lhs);
    out.fit("pairing_rhs", pairing.rhs);
    out.check(Criterion::at_most("uw.pairing_gap", pairing.gap.abs(), p.pairing_tol));
    Ok(())
}
