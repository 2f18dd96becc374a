//! Tails of the block statistics under Q, and the quenched formulas for g
//! and β against walks in fixed environments.

use rwre_core::env::{sample_environment, solve_kappa, LadderStats, Law, SampleOptions, SeriesOptions};
use rwre_core::exec::Executor;
use rwre_core::experiments::{block_sample, quenched_formula_check};
use rwre_core::rng::derive_seed;
use rwre_core::stats::{hill_plot, hill_tail_index, log_survival_fit};

use super::{max_of, sub_seed, z_score};
use crate::config::TailsParams;
use crate::error::Result;
use crate::formats::{env_binary, env_csv, fmt_f64, ladder_csv, EnvRecord, Table};
use crate::result::{Criterion, ExperimentOutput};

const HILL_PLOT_KS: [usize; 6] = [100, 200, 500, 1000, 2000, 5000];
/// Window of the example environment written next to the tables.
const EXAMPLE_WINDOW: (i64, i64) = (-1000, 10_000);

pub fn run<E: Executor>(p: &TailsParams, seed: u64, exec: &E, out: &mut ExperimentOutput) -> Result<()> {
    let block_seed = sub_seed(out, seed, "blocks");
    let mut tails = Table::new(&[
        "dist", "kappa", "hill_beta", "hill_beta_stderr", "hill_m", "hill_m_stderr", "nu_start", "nu_slope", "nu_r2",
        "mean_length",
    ])?;
    let mut plot = Table::new(&["dist", "kappa", "top_k", "hill_beta", "stderr"])?;
    let mut drift = Table::new(&["dist", "kappa", "m", "drift"])?;
    for (i, spec) in p.dists.iter().enumerate() {
        let dist = spec.build()?;
        let kappa = solve_kappa(&dist)?.value();
        let bs = block_sample(&dist, p.blocks, derive_seed(block_seed, &[i as u64]))?;
        let hb = hill_tail_index(&bs.beta, p.top_k)?;
        let hm = hill_tail_index(&bs.max_increase, p.top_k)?;
        let mut sorted = bs.lengths.clone();
        sorted.sort_unstable();
        let start = sorted[((p.nu_quantile * sorted.len() as f64) as usize).min(sorted.len() - 1)];
        let fit = log_survival_fit(&bs.lengths, start, p.nu_min_count)?;
        tails.row([
            i.to_string(),
            fmt_f64(kappa),
            fmt_f64(hb.index),
            fmt_f64(hb.stderr),
            fmt_f64(hm.index),
            fmt_f64(hm.stderr),
            start.to_string(),
            fmt_f64(fit.slope),
            fmt_f64(fit.r_squared),
            fmt_f64(bs.mean_length()),
        ])?;
        let ks: Vec<usize> = HILL_PLOT_KS.iter().copied().filter(|&k| k < p.blocks).collect();
        for r in hill_plot(&bs.beta, &ks)? {
            plot.row([i.to_string(), fmt_f64(kappa), r.top_k.to_string(), fmt_f64(r.index), fmt_f64(r.stderr)])?;
        }
        for &m in &p.drift_ms {
            drift.row([i.to_string(), fmt_f64(kappa), m.to_string(), fmt_f64(bs.ladder_drift(m))])?;
        }
        let (lo, hi) = (kappa - p.hill_tol, kappa + p.hill_tol);
        out.check(Criterion::within(&format!("tails.hill_beta[{i}]"), hb.index, lo, hi));
        out.check(Criterion::within(&format!("tails.hill_max_increase[{i}]"), hm.index, lo, hi));
        out.check(Criterion::above(&format!("tails.nu_log_survival_r2[{i}]"), fit.r_squared, p.r2_min));
        out.check(Criterion::below(&format!("tails.nu_log_survival_slope[{i}]"), fit.slope, 0.0));
        if i == 0 {
            let env_seed = sub_seed(out, seed, "example-env");
            let env = sample_environment(&dist, Law::Q, EXAMPLE_WINDOW.0, EXAMPLE_WINDOW.1, env_seed, SampleOptions::default())?;
            out.file("ladder.csv", ladder_csv(&LadderStats::compute(&env, SeriesOptions::default()))?);
            let rec = EnvRecord::new(env, &dist);
            out.file("env.csv", env_csv(&rec)?);
            out.file("env.bin", env_binary(&rec));
        }
    }
    out.file("tails.csv", tails.into_bytes()?);
    out.file("hill_plot.csv", plot.into_bytes()?);
    out.file("ladder_drift.csv", drift.into_bytes()?);

    let q = &p.quenched;
    let dist = q.dist.build()?;
    let qseed = sub_seed(out, seed, "quenched");
    let checks = quenched_formula_check(&dist, q.envs, q.walks, q.step_budget, q.window, qseed, exec)?;
    let mut t = Table::new(&[
        "env_seed", "g_formula", "g_mc", "g_stderr", "g_exact_stderr", "g_walks", "g_z", "beta_formula", "beta_mc",
        "beta_stderr", "beta_exact_stderr", "beta_z", "row_rel_err", "column_rel_err",
    ])?;
    let (mut gz, mut bz) = (Vec::new(), Vec::new());
    for c in &checks {
        // The sample stderr of the crossing time is unreliable (heavy tail), so
        // both z-scores use the exact quenched variance.
        let gse = (c.g_variance / c.g_mc.n as f64).sqrt();
        let bse = (c.beta_variance / c.beta_mc.n as f64).sqrt();
        let g = z_score(c.g_mc.mean, c.g_formula, gse, 0.0);
        let b = z_score(c.beta_mc.mean, c.beta_formula, bse, 0.0);
        gz.push(g);
        bz.push(b);
        t.row([
            c.env_seed.to_string(),
            fmt_f64(c.g_formula),
            fmt_f64(c.g_mc.mean),
            fmt_f64(c.g_mc.stderr()),
            fmt_f64(gse),
            c.g_walks.to_string(),
            fmt_f64(g),
            fmt_f64(c.beta_formula),
            fmt_f64(c.beta_mc.mean),
            fmt_f64(c.beta_mc.stderr()),
            fmt_f64(bse),
            fmt_f64(b),
            fmt_f64(c.row_rel_err),
            fmt_f64(c.column_rel_err),
        ])?;
    }
    out.file("quenched.csv", t.into_bytes()?);
    out.fit("quenched_min_g_walks", checks.iter().map(|c| c.g_walks).min().unwrap_or(0));
    out.check(Criterion::at_most("tails.quenched_g_max_z", max_of(gz), q.z_max));
    out.check(Criterion::at_most("tails.quenched_beta_max_z", max_of(bz), q.z_max));
    out.check(Criterion::at_most("tails.row_identity_rel_err", max_of(checks.iter().map(|c| c.row_rel_err)), q.identity_tol));
    out.check(Criterion::at_most(
        "tails.column_identity_rel_err",
        max_of(checks.iter().map(|c| c.column_rel_err)),
        q.identity_tol,
    ));
    Ok(())
}
