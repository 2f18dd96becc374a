use alloc::vec::Vec;

use super::chunk_ranges;
use crate::env::{g_profile, sample_environment_with, EnvDistribution, Law, SampleOptions, SeriesOptions};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::func::{ProfileFunction, TestFunction};
use crate::math::{ceil, gauss_nodes, pow, poisson, Moments};
use crate::particles::{
    init_configuration, rwre_mean_integral, rwre_space_time_integral, trap_integral_direct, ExitPolicy,
    InitialCondition, ParticleConfiguration,
};
use crate::rng::{derive_seed, label, stream};
use crate::trap::{sample_poisson_traps, truncate_env, PoissonTrapParams, TrapEnvironment};
use crate::uw::{solve_uw_ode, SolveOptions};

/// Time nodes and weights integrating piecewise-smooth functions of t
/// exactly enough against the piecewise-linear ψ: one Gauss panel per
/// stretch between consecutive knots, split into `sub` pieces.
fn time_quadrature(phi: &TestFunction, sub: usize) -> Vec<(f64, f64)> {
    let knots = phi.time.knots();
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let h = (w[1].0 - w[0].0) / sub as f64;
        for s in 0..sub {
            let a = w[0].0 + s as f64 * h;
            for (t, wt) in gauss_nodes(a, a + h) {
                if t >= 0.0 {
                    out.push((t, wt * phi.time.eval(t)));
                }
            }
        }
    }
    out
}

/// ∬ φ u_W dσ_W dt = ∫ ψ(t) Σ_k χ(x_k) u_W(t, x_k) y_k dt.
pub fn trap_target(w: &TrapEnvironment, u: &ProfileFunction, phi: &TestFunction) -> Result<f64> {
    target_with_compensation(w, u, phi, 0.0)
}

/// As [`trap_target`], plus `small_density` × ∫ ψ ∫ χ u_W dx dt, which stands
/// in for atoms below the truncation level spread evenly along the window.
fn target_with_compensation(w: &TrapEnvironment, u: &ProfileFunction, phi: &TestFunction, small_density: f64) -> Result<f64> {
    if u.is_zero() || phi.time.is_zero() || phi.space.is_zero() || w.is_empty() {
        return Ok(0.0);
    }
    let nodes = time_quadrature(phi, 4);
    let times: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let sol = solve_uw_ode(w, u, &times, SolveOptions { allow_stiff: true })?;
    let atoms = w.atoms();
    let hi = w.window().1;
    let weight: Vec<f64> = atoms
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let next = atoms.get(k + 1).map_or(hi, |b| b.x);
            phi.space.eval(a.x) * a.y + small_density * phi.space.integral(a.x, next)
        })
        .collect();
    let mut total = 0.0;
    for (j, &(_, wt)) in nodes.iter().enumerate() {
        let mut s = 0.0;
        for (k, &c) in weight.iter().enumerate() {
            s += c * sol.value(k, j);
        }
        total += wt * s;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HydroTrapsCell {
    pub a_n: f64,
    pub target: f64,
    pub samples: Vec<f64>,
    pub moments: Moments,
    /// Fraction of replicas with |integral − target| > delta.
    pub exceedance: f64,
    pub exits: u64,
}

/// For each a_n: `replicas` draws of (1/a_n) ∫ Σ η_t(x_k) φ(t, x_k) dt on
/// `w` (or on its truncation at `eps[i]` when given) from Poisson(a_n u y)
/// starts, against the target on `w`.
#[allow(clippy::too_many_arguments)]
pub fn hydro_traps<E: Executor>(
    w: &TrapEnvironment,
    u: &ProfileFunction,
    phi: &TestFunction,
    a_ns: &[f64],
    eps: Option<&[f64]>,
    replicas: u64,
    delta: f64,
    seed: u64,
    exec: &E,
) -> Result<Vec<HydroTrapsCell>> {
    if let Some(e) = eps {
        if e.len() != a_ns.len() {
            return Err(Error::InvalidArgument("one truncation level per a_n"));
        }
    }
    let target = trap_target(w, u, phi)?;
    let mut out = Vec::new();
    for (i, &a_n) in a_ns.iter().enumerate() {
        let wn = match eps {
            Some(e) => truncate_env(w, e[i]),
            None => w.clone(),
        };
        let means: Vec<f64> = wn.atoms().iter().map(|a| a_n * u.eval(a.x) * a.y).collect();
        let results: Vec<Result<(f64, u64)>> = exec.map_indexed(replicas as usize, |r| {
            let mut rng = stream(seed, &[label("hydro-traps-init"), i as u64, r as u64]);
            let config = ParticleConfiguration::new(0, means.iter().map(|&m| poisson(&mut rng, m)).collect());
            let s = derive_seed(seed, &[label("hydro-traps-move"), i as u64, r as u64]);
            let v = trap_integral_direct(&wn, &config, phi, a_n, s, ExitPolicy::Tally)?;
            Ok((v.value, v.exits))
        });
        let mut samples = Vec::with_capacity(results.len());
        let mut exits = 0;
        for r in results {
            let (v, e) = r?;
            samples.push(v);
            exits += e;
        }
        let moments: Moments = samples.iter().copied().collect();
        let exceed = samples.iter().filter(|&&v| (v - target).abs() > delta).count();
        out.push(HydroTrapsCell {
            a_n,
            target,
            exceedance: exceed as f64 / samples.len().max(1) as f64,
            samples,
            moments,
            exits,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwreMode {
    /// Exact quenched mean of the particle integral.
    QuenchedMean,
    /// Independent walkers from a Poisson start; `density` multiplies the
    /// initial means and divides the integral.
    Particles { density: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwreIntegralSpec {
    pub n: f64,
    pub kappa: f64,
    /// Sites kept left of 0 and right of n · (right end of supp χ).
    pub left_buffer: i64,
    pub right_buffer: i64,
    pub mode: RwreMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwreSample {
    pub value: f64,
    /// Mass (or particle) fraction that left the window on the left.
    pub exit_fraction: f64,
}

/// One environment draw (law P) of the rescaled RWRE space-time integral
/// from the locally stationary start u(x/n) g(x).
pub fn rwre_integral(
    dist: &EnvDistribution,
    u: &ProfileFunction,
    phi: &TestFunction,
    spec: &RwreIntegralSpec,
    env_seed: u64,
    particle_seed: u64,
) -> Result<RwreSample> {
    let reach = phi.space.support().map_or(0.0, |s| s.1).max(u.support().map_or(0.0, |s| s.1));
    let x_min = -spec.left_buffer;
    let x_max = ceil(reach * spec.n) as i64 + spec.right_buffer;
    let mut rng = stream(env_seed, &[label("hydro-rwre-env")]);
    let env = sample_environment_with(dist, Law::P, x_min, x_max, &mut rng, SampleOptions::default())?;
    let opts = SeriesOptions::default();
    match spec.mode {
        RwreMode::QuenchedMean => {
            let g = g_profile(&env, opts);
            let mut means = alloc::vec![0.0; env.len()];
            for (i, m) in means.iter_mut().enumerate() {
                let x = x_min + i as i64;
                let ux = u.eval(x as f64 / spec.n);
                if ux > 0.0 {
                    *m = ux * g[i].ok_or(Error::BufferExhausted { site: x })?;
                }
            }
            let r = rwre_mean_integral(&env, x_min, &means, phi, spec.n, spec.kappa)?;
            let frac = if r.initial_mass > 0.0 { r.exited_left / r.initial_mass } else { 0.0 };
            Ok(RwreSample { value: r.integral.value, exit_fraction: frac })
        }
        RwreMode::Particles { density } => {
            let d = density.max(1) as f64;
            let scaled = u.clone();
            let cond = InitialCondition::RwreLocal { env: &env, n: spec.n, opts };
            let mut prng = stream(particle_seed, &[label("hydro-rwre-init")]);
            let mut total = 0.0;
            let mut exits = 0;
            let mut particles = 0;
            for rep in 0..density.max(1) {
                let config = init_configuration(&cond, &scaled, &mut prng)?;
                particles += config.total();
                let s = derive_seed(particle_seed, &[label("hydro-rwre-walk"), rep as u64]);
                let v = rwre_space_time_integral(&env, &config, phi, spec.n, spec.kappa, s)?;
                total += v.value;
                exits += v.exits;
            }
            let frac = if particles > 0 { exits as f64 / particles as f64 } else { 0.0 };
            Ok(RwreSample { value: total / d, exit_fraction: frac })
        }
    }
}

/// `envs` independent environment draws of [`rwre_integral`].
pub fn rwre_integral_samples<E: Executor>(
    dist: &EnvDistribution,
    u: &ProfileFunction,
    phi: &TestFunction,
    spec: &RwreIntegralSpec,
    envs: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<RwreSample>> {
    exec.map_indexed(envs, |e| {
        let env_seed = derive_seed(seed, &[label("hydro-rwre"), e as u64]);
        let particle_seed = derive_seed(seed, &[label("hydro-rwre-particles"), e as u64]);
        rwre_integral(dist, u, phi, spec, env_seed, particle_seed)
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSpec {
    pub lambda: f64,
    pub kappa: f64,
    pub eps: f64,
    pub lo: f64,
    pub hi: f64,
    /// Replace the mass of discarded atoms (below `eps`) by its mean density.
    pub compensate: bool,
}

/// ∬ φ u_W dσ_W dt for one Poisson environment W.
pub fn reference_integral(spec: &ReferenceSpec, u: &ProfileFunction, phi: &TestFunction, seed: u64) -> Result<f64> {
    let params = PoissonTrapParams { lambda: spec.lambda, kappa: spec.kappa, lo: spec.lo, hi: spec.hi, y_floor: spec.eps };
    let mut rng = stream(seed, &[label("reference-env")]);
    let w = sample_poisson_traps(&params, &mut rng)?;
    let density = if spec.compensate {
        spec.lambda * pow(spec.eps, 1.0 - spec.kappa) / (1.0 - spec.kappa)
    } else {
        0.0
    };
    target_with_compensation(&w, u, phi, density)
}

pub fn reference_integrals<E: Executor>(
    spec: &ReferenceSpec,
    u: &ProfileFunction,
    phi: &TestFunction,
    draws: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<f64>> {
    let ranges = chunk_ranges(draws as u64, 64);
    let parts: Vec<Result<Vec<f64>>> = exec.map_indexed(ranges.len(), |c| {
        (ranges[c].0..ranges[c].1)
            .map(|i| reference_integral(spec, u, phi, derive_seed(seed, &[label("reference"), i])))
            .collect()
    });
    let mut out = Vec::with_capacity(draws);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
