use alloc::vec::Vec;

use super::chunk_ranges;
use crate::env::{
    b_coeff, crossing_time_variance, g_function, sample_environment, EnvDistribution, Environment, LadderStats, Law, SampleOptions,
    SeriesOptions,
};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::math::Moments;
use crate::rng::{derive_seed, label, stream};
use crate::walk::{hitting_time, visits_before};

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchedCheck {
    pub env_seed: u64,
    pub g_formula: f64,
    pub g_mc: Moments,
    /// Walks behind `g_mc`: the requested count unless the step budget cut it.
    pub g_walks: u64,
    /// Exact variance of the visit count behind `g_mc` (geometric: g² − g).
    pub g_variance: f64,
    pub beta_formula: f64,
    pub beta_mc: Moments,
    /// Exact quenched variance of one crossing time. The crossing time is
    /// heavy-tailed (rare trips into shallow valleys left of 0), so the
    /// sample variance of 10⁵ walks often falls well short of it.
    pub beta_variance: f64,
    /// |Σ_x b_{x,0} − β_0| / β_0
    pub row_rel_err: f64,
    /// max over the checked sites x of |Σ_k b_{x,k} − g(x)| / g(x)
    pub column_rel_err: f64,
}

/// A walk that reaches a site where V sits this far below V(0) returns to 0
/// with probability of order e^{−25} ≈ 1e-11, far below Monte Carlo error.
const RETURN_DEPTH: f64 = 25.0;

/// First site right of `from` where the potential has dropped by `depth`.
fn drop_site(env: &Environment, from: i64, depth: f64) -> Result<i64> {
    let v0 = env.potential(from);
    (from + 1..=env.x_max() + 1)
        .find(|&x| env.potential(x) < v0 - depth)
        .ok_or(Error::BufferExhausted { site: env.x_max() })
}

fn column_sum(env: &Environment, ladders: &LadderStats, x: i64) -> Result<f64> {
    let vx = env.potential(x);
    let mut total = 0.0;
    for e in ladders.entries() {
        let Some(next) = e.next_nu else { break };
        if next <= x {
            continue;
        }
        // blocks far to the right are reached from x only through a drop of
        // the potential below V(x) by more than 60
        if env.potential(e.nu) < vx - 60.0 {
            break;
        }
        total += b_coeff(env, ladders, x, e.k)?;
    }
    Ok(total)
}

const PILOT_WALKS: u64 = 10;

/// Walk count for the g estimate: `walks`, or fewer when the pilot walks
/// suggest that `walks` of them would exceed `step_budget` steps. Deep
/// valleys around 0 make single walks cost ~g times an excursion length.
fn g_walk_count(env: &Environment, stop: i64, env_seed: u64, walks: u64, step_budget: u64) -> Result<u64> {
    let mut steps = 0u64;
    for i in 0..PILOT_WALKS {
        let mut rng = stream(env_seed, &[label("quenched-g-pilot"), i]);
        steps += visits_before(env, 0, stop, &mut rng)?.1;
    }
    let per_walk = (steps / PILOT_WALKS).max(1);
    Ok(walks.min(step_budget / per_walk).max(PILOT_WALKS))
}

/// On `envs` Q-environments: g(0) and β_0 from the formulas against Monte
/// Carlo means over `walks` walks, and the two b_{x,k} sum identities. The
/// g walks of one environment are capped at about `step_budget` steps in
/// total; the count actually used is reported.
pub fn quenched_formula_check<E: Executor>(
    dist: &EnvDistribution,
    envs: u64,
    walks: u64,
    step_budget: u64,
    window: (i64, i64),
    seed: u64,
    exec: &E,
) -> Result<Vec<QuenchedCheck>> {
    let opts = SeriesOptions::default();
    let mut out = Vec::new();
    for e in 0..envs {
        let env_seed = derive_seed(seed, &[label("quenched-env"), e]);
        let env = sample_environment(dist, Law::Q, window.0, window.1, env_seed, SampleOptions::default())?;
        let ladders = LadderStats::compute(&env, opts);
        let l0 = *ladders.get(0).ok_or(Error::IncompleteLadder { k: 0 })?;
        let beta_formula = l0.beta.ok_or(Error::IncompleteLadder { k: 0 })?;
        let nu1 = l0.next_nu.ok_or(Error::IncompleteLadder { k: 0 })?;
        let g_formula = g_function(&env, 0, opts)?.sum;
        let stop = drop_site(&env, 0, RETURN_DEPTH)?;

        let g_walks = g_walk_count(&env, stop, env_seed, walks, step_budget)?;

        let ranges = chunk_ranges(walks, 32);
        let parts: Vec<Result<(Moments, Moments)>> = exec.map_indexed(ranges.len(), |c| {
            let (a, b) = ranges[c];
            let mut g = Moments::new();
            let mut beta = Moments::new();
            for i in a..b {
                if i < g_walks {
                    let mut rng = stream(env_seed, &[label("quenched-g"), i]);
                    g.push(visits_before(&env, 0, stop, &mut rng)?.0 as f64);
                }
                let mut rng = stream(env_seed, &[label("quenched-beta"), i]);
                beta.push(hitting_time(&env, 0, nu1, &mut rng)? as f64);
            }
            Ok((g, beta))
        });
        let mut g_mc = Moments::new();
        let mut beta_mc = Moments::new();
        for p in parts {
            let (g, b) = p?;
            g_mc.merge(&g);
            beta_mc.merge(&b);
        }

        let row: f64 = (env.x_min()..nu1).map(|x| b_coeff(&env, &ladders, x, 0)).sum::<Result<f64>>()?;
        let row_rel_err = (row - beta_formula).abs() / beta_formula;
        let mut column_rel_err = 0.0f64;
        let mut sites = alloc::vec![0, nu1 - 1];
        if let Some(l2) = ladders.get(2) {
            sites.push(l2.nu + 1);
        }
        for x in sites {
            let g = g_function(&env, x, opts)?.sum;
            column_rel_err = column_rel_err.max((column_sum(&env, &ladders, x)? - g).abs() / g);
        }
        out.push(QuenchedCheck {
            env_seed,
            g_formula,
            g_mc,
            g_walks,
            g_variance: g_formula * (g_formula - 1.0),
            beta_formula,
            beta_mc,
            beta_variance: crossing_time_variance(&env, 0, nu1)?,
            row_rel_err,
            column_rel_err,
        });
    }
    Ok(out)
}
