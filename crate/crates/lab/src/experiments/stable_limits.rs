//! Laplace transforms of σ_W for Poisson traps and of rescaled β sums.

use rwre_core::env::solve_kappa;
use rwre_core::exec::Executor;
use rwre_core::experiments::{beta_sums, poisson_sigma_samples};
use rwre_core::stats::{fit_stable_scale, laplace_transform_check, truncated_levy_laplace, LaplaceCheck};
use rwre_core::trap::PoissonTrapParams;

use super::sub_seed;
use crate::config::StableLimitsParams;
use crate::error::Result;
use crate::formats::{fmt_f64, Table};
use crate::result::{Criterion, ExperimentOutput};

fn laplace_rows(t: &mut Table, case: &str, check: &LaplaceCheck) -> Result<()> {
    for q in &check.points {
        t.row([case.to_string(), fmt_f64(q.theta), fmt_f64(q.empirical), fmt_f64(q.stderr), fmt_f64(q.model), fmt_f64(q.z)])?;
    }
    Ok(())
}

fn samples_csv(values: &[f64]) -> Result<Vec<u8>> {
    let mut t = Table::new(&["sample", "value"])?;
    for (i, v) in values.iter().enumerate() {
        t.row([i.to_string(), fmt_f64(*v)])?;
    }
    t.into_bytes()
}

pub fn run<E: Executor>(p: &StableLimitsParams, seed: u64, exec: &E, out: &mut ExperimentOutput) -> Result<()> {
    let mut table = Table::new(&["case", "theta", "empirical", "stderr", "model", "z"])?;

    let q = &p.poisson;
    let params = PoissonTrapParams { lambda: q.lambda, kappa: q.kappa, lo: 0.0, hi: q.length, y_floor: q.eps };
    let sigma = poisson_sigma_samples(&params, q.samples, sub_seed(out, seed, "poisson-sigma"), exec)?;
    let check = laplace_transform_check(&sigma, &q.thetas, |th| truncated_levy_laplace(q.lambda, q.kappa, q.eps, th, q.length));
    laplace_rows(&mut table, "poisson_sigma", &check)?;
    out.file("poisson_sigma_samples.csv", samples_csv(&sigma)?);
    out.check(Criterion::at_most("stable.poisson_sigma_max_z", check.max_z, q.z_max));

    let b = &p.beta_sums;
    let dist = b.dist.build()?;
    let kappa = solve_kappa(&dist)?.value();
    let sums = beta_sums(&dist, kappa, b.n, b.samples, sub_seed(out, seed, "beta-sums"), exec)?;
    let c = fit_stable_scale(&sums, kappa, b.theta0)?;
    out.fit("beta_sum_kappa", kappa);
    out.fit("beta_sum_stable_scale", c);
    let check = laplace_transform_check(&sums, &b.thetas, |th| (-c * th.powf(kappa)).exp());
    laplace_rows(&mut table, "beta_sum", &check)?;
    out.file("beta_sum_samples.csv", samples_csv(&sums)?);
    out.check(Criterion::at_most("stable.beta_sum_max_z", check.max_z, b.z_max));

    out.file("laplace.csv", table.into_bytes()?);
    Ok(())
}
