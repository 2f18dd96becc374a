//! Poisson(α y_k) counts are invariant for the trap particle system away
//! from the left edge of the window.

use rwre_core::exec::Executor;
use rwre_core::experiments::trap_particle_counts;
use rwre_core::math::poisson;
use rwre_core::particles::{trap_configuration_at, ExitPolicy, ParticleConfiguration};
use rwre_core::rng::{derive_seed, label, stream};
use rwre_core::uw::solve_atoms;

use super::{max_of, sub_seed, z_score};
use crate::config::StationarityParams;
use crate::error::Result;
use crate::formats::{fmt_f64, snapshot_csv, traps_csv, Table};
use crate::result::{Criterion, ExperimentOutput};

pub fn run<E: Executor>(p: &StationarityParams, seed: u64, exec: &E, out: &mut ExperimentOutput) -> Result<()> {
    let w = p.traps.build(sub_seed(out, seed, "traps"), 0)?;
    let y: Vec<f64> = w.depths().collect();
    // probability that nothing from left of the window reaches atom k by t
    let (shielded, _) = solve_atoms(&y, &vec![1.0; y.len()], &[p.t])?;
    let means: Vec<f64> = y.iter().map(|&v| p.alpha * v).collect();
    let pseed = sub_seed(out, seed, "particles");
    let moments = trap_particle_counts(&w, &means, p.t, p.reps, pseed, exec)?;

    let mut t = Table::new(&["x", "y", "shielded", "interior", "expected", "mean", "stderr", "z"])?;
    let mut zs = Vec::new();
    for (k, m) in moments.iter().enumerate() {
        let interior = shielded[k] > 1.0 - p.interior_tol;
        let z = z_score(m.mean, means[k], m.stderr(), 1.0 / p.reps as f64);
        if interior {
            zs.push(z);
        }
        t.row([
            fmt_f64(w.atoms()[k].x),
            fmt_f64(y[k]),
            fmt_f64(shielded[k]),
            interior.to_string(),
            fmt_f64(means[k]),
            fmt_f64(m.mean),
            fmt_f64(m.stderr()),
            fmt_f64(z),
        ])?;
    }
    out.file("traps.csv", traps_csv(&w)?);
    out.file("counts.csv", t.into_bytes()?);

    // replica 0, redrawn from its streams
    let mut rng = stream(pseed, &[label("particles-init"), 0]);
    let init = ParticleConfiguration::new(0, means.iter().map(|&m| poisson(&mut rng, m)).collect());
    let (fin, _) = trap_configuration_at(&w, &init, p.t, derive_seed(pseed, &[label("particles-move"), 0]), ExitPolicy::Tally)?;
    out.file("snapshots/replica0_t0.csv", snapshot_csv(&init)?);
    out.file(format!("snapshots/replica0_t{}.csv", fmt_f64(p.t)), snapshot_csv(&fin)?);

    out.fit("interior_atoms", zs.len());
    out.check(Criterion::at_least("stationarity.interior_atoms", zs.len() as f64, 1.0));
    out.check(Criterion::at_most("stationarity.max_z", max_of(zs), p.z_max));
    Ok(())
}
