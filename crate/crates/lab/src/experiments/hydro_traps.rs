//! Rescaled particle integrals on trap environments against the u_W target.

use rwre_core::exec::Executor;
use rwre_core::experiments::hydro_traps;
use rwre_core::stats::linear_fit;

use super::sub_seed;
use crate::config::HydroTrapsParams;
use crate::error::Result;
use crate::formats::{fmt_f64, traps_csv, Table};
use crate::result::{Criterion, ExperimentOutput};

pub fn run<E: Executor>(p: &HydroTrapsParams, seed: u64, exec: &E, out: &mut ExperimentOutput) -> Result<()> {
    let w = p.traps.build(sub_seed(out, seed, "traps"), 0)?;
    let u = p.u.build()?;
    let phi = p.phi.build()?;
    let target = rwre_core::experiments::trap_target(&w, &u, &phi)?;
    let eps = (!p.truncation.is_empty()).then_some(p.truncation.as_slice());
    let delta = p.delta_rel * target;
    let cells = hydro_traps(&w, &u, &phi, &p.a_ns, eps, p.replicas, delta, sub_seed(out, seed, "particles"), exec)?;
    out.fit("target", target);
    out.fit("delta", delta);
    out.file("traps.csv", traps_csv(&w)?);

    let mut summary = Table::new(&["a_n", "target", "mean", "variance", "exceedance", "exits"])?;
    let mut samples = Table::new(&["a_n", "replica", "value"])?;
    for c in &cells {
        summary.row([
            fmt_f64(c.a_n),
            fmt_f64(c.target),
            fmt_f64(c.moments.mean),
            fmt_f64(c.moments.variance()),
            fmt_f64(c.exceedance),
            c.exits.to_string(),
        ])?;
        for (r, v) in c.samples.iter().enumerate() {
            samples.row([fmt_f64(c.a_n), r.to_string(), fmt_f64(*v)])?;
        }
    }
    out.file("cells.csv", summary.into_bytes()?);
    out.file("samples.csv", samples.into_bytes()?);

    let rises = cells.windows(2).filter(|c| c[1].exceedance > c[0].exceedance).count();
    out.check(Criterion::none("hydro_traps.exceedance_increases", rises));
    // a vanishing profile gives zero variance everywhere and no slope to fit
    if cells.iter().all(|c| c.moments.variance() > 0.0) {
        let lx: Vec<f64> = cells.iter().map(|c| c.a_n.ln()).collect();
        let ly: Vec<f64> = cells.iter().map(|c| c.moments.variance().ln()).collect();
        let fit = linear_fit(&lx, &ly)?;
        let (lo, hi) = p.slope_range;
        out.check(Criterion::within("hydro_traps.variance_slope", fit.slope, lo, hi));
    }
    Ok(())
}
