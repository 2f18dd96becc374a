//! Law of large numbers for X_n in the ballistic and sub-ballistic regimes,
//! and the inverse-subordinator marginal of the trap walk on ladder blocks.

use rwre_core::env::solve_kappa;
use rwre_core::exec::Executor;
use rwre_core::experiments::{block_sample, fit_lambda, inverse_stable_reference, trap_walk_positions, walk_displacements};
use rwre_core::math::Moments;
use rwre_core::stats::{ks_critical_two_sample, ks_two_sample};

use super::{sub_seed, z_score};
use crate::config::SpeedParams;
use crate::error::Result;
use crate::formats::{fmt_f64, Table};
use crate::result::{Criterion, ExperimentOutput};

/// Largest admissible ratio between the X_n / n^κ means across n.
const SCALE_SPREAD: f64 = 10.0;

pub fn run<E: Executor>(p: &SpeedParams, seed: u64, exec: &E, out: &mut ExperimentOutput) -> Result<()> {
    let b = &p.ballistic;
    let dist = b.dist.build()?;
    let v = dist.speed();
    let xs = walk_displacements(&dist, b.steps, b.replicas, sub_seed(out, seed, "ballistic"), exec)?;
    let m: Moments = xs.iter().map(|&x| x / b.steps as f64).collect();
    let mut t = Table::new(&["regime", "steps", "replicas", "mean_x_over_n", "stderr", "mean_abs_x_over_n_kappa", "speed"])?;
    t.row(["ballistic".to_string(), b.steps.to_string(), b.replicas.to_string(), fmt_f64(m.mean), fmt_f64(m.stderr()), String::new(), fmt_f64(v)])?;
    out.check(Criterion::at_most("speed.ballistic_z", z_score(m.mean, v, m.stderr(), 0.0), b.z_max));

    let s = &p.sub_ballistic;
    let dist = s.dist.build()?;
    let kappa = solve_kappa(&dist)?.value();
    let sseed = sub_seed(out, seed, "sub-ballistic");
    let mut speeds = Vec::new();
    let mut scaled = Vec::new();
    for &n in &s.steps {
        let xs = walk_displacements(&dist, n, s.replicas, sseed, exec)?;
        let m: Moments = xs.iter().map(|&x| x.abs() / n as f64).collect();
        let k: f64 = xs.iter().map(|&x| x.abs() / (n as f64).powf(kappa)).sum::<f64>() / xs.len() as f64;
        t.row([
            "sub_ballistic".to_string(),
            n.to_string(),
            s.replicas.to_string(),
            fmt_f64(m.mean),
            fmt_f64(m.stderr()),
            fmt_f64(k),
            fmt_f64(dist.speed()),
        ])?;
        speeds.push(m.mean);
        scaled.push(k);
    }
    out.file("speed.csv", t.into_bytes()?);
    let rises = speeds.windows(2).filter(|w| w[1] > w[0]).count();
    out.check(Criterion::none("speed.sub_ballistic_increases", rises));
    let hi = scaled.iter().copied().fold(0.0, f64::max);
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    out.check(Criterion::at_most("speed.scaled_spread", hi / lo, SCALE_SPREAD));

    let q = &p.inverse_stable;
    let dist = q.dist.build()?;
    let kappa = solve_kappa(&dist)?.value();
    let blocks = block_sample(&dist, q.lambda_fit.blocks, sub_seed(out, seed, "lambda-blocks"))?;
    let fit = fit_lambda(&blocks, kappa, q.lambda_fit.top_k)?;
    out.fit("lambda", fit.lambda);
    out.fit("lambda_stderr", fit.stderr);
    let mut walk = trap_walk_positions(&dist, kappa, q.n, q.samples, sub_seed(out, seed, "trap-walk"), exec)?;
    let mut reference =
        inverse_stable_reference(kappa, fit.lambda, q.reference_samples, sub_seed(out, seed, "inverse-stable"));
    walk.sort_by(f64::total_cmp);
    reference.sort_by(f64::total_cmp);
    let d = ks_two_sample(&walk, &reference);
    let crit = ks_critical_two_sample(q.alpha, walk.len(), reference.len());
    let mut t = Table::new(&["source", "index", "value"])?;
    for (i, x) in walk.iter().enumerate() {
        t.row(["trap_walk".to_string(), i.to_string(), fmt_f64(*x)])?;
    }
    for (i, x) in reference.iter().enumerate() {
        t.row(["reference".to_string(), i.to_string(), fmt_f64(*x)])?;
    }
    out.file("inverse_stable.csv", t.into_bytes()?);
    out.check(Criterion::below("speed.inverse_stable_ks", d, crit));
    Ok(())
}
