//! Rescaled RWRE particle integrals across environments against the
//! Poisson trap limit with a fitted intensity.

use rwre_core::env::solve_kappa;
use rwre_core::exec::Executor;
use rwre_core::experiments::{
    block_sample, fit_lambda, reference_integrals, rwre_integral_samples, ReferenceSpec, RwreIntegralSpec, RwreMode,
};
use rwre_core::rng::{derive_seed, label};
use rwre_core::stats::ks_two_sample;

use super::{max_of, sub_seed};
use crate::config::HydroRwreParams;
use crate::error::Result;
use crate::formats::{fmt_f64, integrals_csv, IntegralRow, Table};
use crate::result::{Criterion, ExperimentOutput};

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs
}

pub fn run<E: Executor>(p: &HydroRwreParams, seed: u64, exec: &E, out: &mut ExperimentOutput) -> Result<()> {
    let dist = p.dist.build()?;
    let kappa = solve_kappa(&dist)?.value();
    let u = p.u.build()?;
    let phi = p.phi.build()?;
    let phi_id = format!("{:016x}", label(&serde_json::to_string(&p.phi)?));

    let blocks = block_sample(&dist, p.lambda_fit.blocks, sub_seed(out, seed, "lambda-blocks"))?;
    let fit = fit_lambda(&blocks, kappa, p.lambda_fit.top_k)?;
    out.fit("kappa", kappa);
    out.fit("lambda", fit.lambda);
    out.fit("lambda_stderr", fit.stderr);
    out.fit("tail_constant", fit.tail_constant);
    out.fit("mean_block_length", fit.mean_length);

    let r = &p.reference;
    let spec = ReferenceSpec { lambda: fit.lambda, kappa, eps: r.eps, lo: r.lo, hi: r.hi, compensate: r.compensate };
    let reference = sorted(reference_integrals(&spec, &u, &phi, r.draws, sub_seed(out, seed, "reference"), exec)?);
    let mut t = Table::new(&["draw", "value"])?;
    for (i, v) in reference.iter().enumerate() {
        t.row([i.to_string(), fmt_f64(*v)])?;
    }
    out.file("reference.csv", t.into_bytes()?);

    let env_seed = sub_seed(out, seed, "environments");
    let env_seeds: Vec<u64> = (0..p.envs as u64).map(|e| derive_seed(env_seed, &[label("hydro-rwre"), e])).collect();
    let mut ks_table = Table::new(&["n", "ks", "max_exit_fraction"])?;
    let mut ks = Vec::new();
    let mut exit = 0.0f64;
    for &n in &p.ns {
        let spec = RwreIntegralSpec {
            n,
            kappa,
            left_buffer: p.left_buffer,
            right_buffer: p.right_buffer,
            mode: RwreMode::QuenchedMean,
        };
        let samples = rwre_integral_samples(&dist, &u, &phi, &spec, p.envs, env_seed, exec)?;
        let rows: Vec<IntegralRow> = samples
            .iter()
            .zip(&env_seeds)
            .map(|(s, &es)| IntegralRow { n, seed: es, phi_id: phi_id.clone(), value: s.value, exit_fraction: s.exit_fraction })
            .collect();
        out.file(format!("integrals/n{}.csv", fmt_f64(n)), integrals_csv(&rows)?);
        let d = ks_two_sample(&sorted(samples.iter().map(|s| s.value).collect()), &reference);
        let e = max_of(samples.iter().map(|s| s.exit_fraction));
        ks_table.row([fmt_f64(n), fmt_f64(d), fmt_f64(e)])?;
        ks.push(d);
        exit = exit.max(e);
    }
    out.file("ks.csv", ks_table.into_bytes()?);
    let rises = ks.windows(2).filter(|w| w[1] > w[0]).count();
    out.check(Criterion::none("hydro_rwre.ks_increases", rises));
    out.check(Criterion::at_most("hydro_rwre.max_exit_fraction", exit, p.max_exit_fraction));

    // doubling the particles per environment against the spread between
    // environments
    let q = &p.particles;
    let base = RwreIntegralSpec {
        n: q.n,
        kappa,
        left_buffer: p.left_buffer,
        right_buffer: p.right_buffer,
        mode: RwreMode::Particles { density: q.density },
    };
    let doubled = RwreIntegralSpec { mode: RwreMode::Particles { density: 2 * q.density }, ..base.clone() };
    let pseed = sub_seed(out, seed, "particle-environments");
    let a = rwre_integral_samples(&dist, &u, &phi, &base, q.envs, pseed, exec)?;
    let b = rwre_integral_samples(&dist, &u, &phi, &doubled, q.envs, pseed, exec)?;
    let mut t = Table::new(&["env", "density", "value", "doubled_density", "doubled_value"])?;
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        t.row([i.to_string(), q.density.to_string(), fmt_f64(x.value), (2 * q.density).to_string(), fmt_f64(y.value)])?;
    }
    out.file("particle_noise.csv", t.into_bytes()?);
    let m = a.len() as f64;
    let change = (a.iter().zip(&b).map(|(x, y)| (x.value - y.value).powi(2)).sum::<f64>() / m).sqrt();
    let mean = a.iter().map(|x| x.value).sum::<f64>() / m;
    let spread = (a.iter().map(|x| (x.value - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    out.fit("particle_change_rms", change);
    out.fit("environment_spread", spread);
    out.check(Criterion::below("hydro_rwre.particle_change_over_env_spread", change / spread, 1.0));
    Ok(())
}
