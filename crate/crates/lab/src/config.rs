//! JSON experiment configs.
//!
//! A config names one experiment, a master seed, optionally a worker count and
//! output directory, and a `params` block whose shape depends on the
//! experiment. Every params field has a default, unknown keys are rejected,
//! and errors carry the key path (`params.traps.poisson.kappa`).

use std::path::{Path, PathBuf};

use rwre_core::env::{two_point_rho_for_kappa, EnvDistribution};
use rwre_core::func::{PiecewiseLinear, ProfileFunction, TestFunction};
use rwre_core::rng::{label, stream};
use rwre_core::trap::{sample_poisson_traps, sample_poisson_traps_with_count, Atom, PoissonTrapParams, TrapEnvironment};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Figure1,
    UwCrosscheck,
    Duality,
    Stationarity,
    Tails,
    StableLimits,
    HydroTraps,
    HydroRwre,
    Speed,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::Figure1,
        ExperimentId::UwCrosscheck,
        ExperimentId::Duality,
        ExperimentId::Stationarity,
        ExperimentId::Tails,
        ExperimentId::StableLimits,
        ExperimentId::HydroTraps,
        ExperimentId::HydroRwre,
        ExperimentId::Speed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentId::Figure1 => "figure1",
            ExperimentId::UwCrosscheck => "uw_crosscheck",
            ExperimentId::Duality => "duality",
            ExperimentId::Stationarity => "stationarity",
            ExperimentId::Tails => "tails",
            ExperimentId::StableLimits => "stable_limits",
            ExperimentId::HydroTraps => "hydro_traps",
            ExperimentId::HydroRwre => "hydro_rwre",
            ExperimentId::Speed => "speed",
        }
    }
}

// ---------------------------------------------------------------------------
// building blocks

/// Nonnegative initial profile u.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Zero,
    /// height · 4 (x − a)(b − x) / (b − a)² on [a, b]
    Parabola { a: f64, b: f64, height: f64 },
    Hat { a: f64, peak: f64, b: f64, height: f64 },
    Plateau { a: f64, b: f64, ramp: f64, level: f64 },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl ProfileSpec {
    pub fn build(&self) -> rwre_core::Result<ProfileFunction> {
        match self {
            ProfileSpec::Zero => Ok(ProfileFunction::zero()),
            ProfileSpec::Parabola { a, b, height } => ProfileFunction::parabola(*a, *b, *height),
            ProfileSpec::Hat { a, peak, b, height } => ProfileFunction::hat(*a, *peak, *b, *height),
            ProfileSpec::Plateau { a, b, ramp, level } => ProfileFunction::plateau(*a, *b, *ramp, *level),
            ProfileSpec::PiecewiseLinear { knots } => ProfileFunction::piecewise_linear(knots.clone()),
        }
    }
}

/// φ(t, x) = ψ(t) χ(x), both piecewise linear through the given knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionSpec {
    pub time: Vec<(f64, f64)>,
    pub space: Vec<(f64, f64)>,
}

impl TestFunctionSpec {
    pub fn build(&self) -> rwre_core::Result<TestFunction> {
        Ok(TestFunction::new(PiecewiseLinear::new(self.time.clone())?, PiecewiseLinear::new(self.space.clone())?))
    }
}

/// Law of ω_0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    /// ρ ∈ {r, s} with equal weights, s chosen so that the root is `kappa`.
    TwoPointRho { r: f64, kappa: f64 },
    /// (ω, probability) pairs.
    Omega { support: Vec<(f64, f64)> },
    /// (ρ, probability) pairs.
    Rho { support: Vec<(f64, f64)> },
}

impl DistSpec {
    pub fn two_point(kappa: f64) -> Self {
        DistSpec::TwoPointRho { r: 2.0, kappa }
    }

    pub fn build(&self) -> rwre_core::Result<EnvDistribution> {
        match self {
            DistSpec::TwoPointRho { r, kappa } => {
                let s = two_point_rho_for_kappa(*r, *kappa)?;
                EnvDistribution::from_rho(&[(*r, 0.5), (s, 0.5)])
            }
            DistSpec::Omega { support } => EnvDistribution::new(support),
            DistSpec::Rho { support } => EnvDistribution::from_rho(support),
        }
    }
}

/// A finite trap environment: sampled, listed, or loaded from a trap CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TrapSpec {
    /// Poisson process with intensity λ y^{−κ−1} on [lo, hi] × [eps, ∞),
    /// conditioned on `count` atoms when given.
    Poisson {
        lambda: f64,
        kappa: f64,
        lo: f64,
        hi: f64,
        eps: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<usize>,
    },
    /// Explicit (x, y) atoms on the window [lo, hi].
    Atoms { atoms: Vec<(f64, f64)>, lo: f64, hi: f64 },
    /// x,y CSV; the window defaults to the span of the atoms.
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<(f64, f64)>,
    },
}

impl TrapSpec {
    pub fn poisson(kappa: f64, lo: f64, hi: f64, eps: f64, count: Option<usize>) -> Self {
        TrapSpec::Poisson { lambda: 1.0, kappa, lo, hi, eps, count }
    }

    /// Build the environment; sampled ones draw from `seed / "traps" / slot`.
    pub fn build(&self, seed: u64, slot: u64) -> Result<TrapEnvironment> {
        match self {
            TrapSpec::Poisson { lambda, kappa, lo, hi, eps, count } => {
                let p = PoissonTrapParams { lambda: *lambda, kappa: *kappa, lo: *lo, hi: *hi, y_floor: *eps };
                let mut rng = stream(seed, &[label("traps"), slot]);
                Ok(match count {
                    Some(n) => sample_poisson_traps_with_count(&p, *n, &mut rng)?,
                    None => sample_poisson_traps(&p, &mut rng)?,
                })
            }
            TrapSpec::Atoms { atoms, lo, hi } => {
                let atoms = atoms.iter().map(|&(x, y)| Atom { x, y }).collect();
                Ok(TrapEnvironment::new(atoms, *lo, *hi, 0.0)?)
            }
            TrapSpec::File { path, window } => crate::formats::load_traps(path, *window),
        }
    }
}

fn parabola() -> ProfileSpec {
    ProfileSpec::Parabola { a: 0.0, b: 1.0, height: 0.25 }
}

// ---------------------------------------------------------------------------
// per-experiment parameters

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure1Params {
    pub traps: TrapSpec,
    pub u: ProfileSpec,
    pub times: Vec<f64>,
}

impl Default for Figure1Params {
    fn default() -> Self {
        Self {
            traps: TrapSpec::poisson(0.7, -0.5, 2.0, 0.001, None),
            u: parabola(),
            times: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UwCrosscheckParams {
    pub traps: TrapSpec,
    pub u: ProfileSpec,
    pub times: Vec<f64>,
    pub reps: u64,
    /// Largest admissible |MC − ODE| / stderr.
    pub z_max: f64,
    pub two_atom_tol: f64,
    /// Test function g and time of the dual pairing identity.
    pub pairing_g: ProfileSpec,
    pub pairing_t: f64,
    pub pairing_tol: f64,
}

impl Default for UwCrosscheckParams {
    fn default() -> Self {
        Self {
            traps: TrapSpec::poisson(0.7, -1.0, 1.0, 0.01, Some(50)),
            u: parabola(),
            times: vec![0.25, 0.5, 1.0],
            reps: 100_000,
            z_max: 3.0,
            two_atom_tol: 1e-8,
            pairing_g: ProfileSpec::Hat { a: 0.2, peak: 0.5, b: 0.8, height: 1.0 },
            pairing_t: 0.5,
            pairing_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticleDualityParams {
    pub traps: TrapSpec,
    pub u: ProfileSpec,
    /// Initial means are scale · u(x_k) y_k.
    pub scale: f64,
    pub t: f64,
    pub reps: u64,
    pub z_max: f64,
    pub dispersion: (f64, f64),
    /// Atoms with expected count below this are left out of the dispersion check.
    pub dispersion_min_mean: f64,
}

impl Default for ParticleDualityParams {
    fn default() -> Self {
        Self {
            traps: TrapSpec::poisson(0.7, -1.0, 1.0, 0.01, Some(50)),
            u: parabola(),
            scale: 100.0,
            t: 0.5,
            reps: 10_000,
            z_max: 4.0,
            dispersion: (0.9, 1.1),
            dispersion_min_mean: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualityParams {
    pub traps: TrapSpec,
    pub t: f64,
    pub reps: u64,
    pub z_max: f64,
    pub particles: ParticleDualityParams,
}

impl Default for DualityParams {
    fn default() -> Self {
        Self {
            traps: TrapSpec::Atoms {
                atoms: vec![(0.1, 0.3), (0.3, 0.15), (0.5, 0.6), (0.7, 0.2), (0.9, 0.4)],
                lo: 0.0,
                hi: 1.0,
            },
            t: 0.5,
            reps: 100_000,
            z_max: 4.0,
            particles: ParticleDualityParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationarityParams {
    pub traps: TrapSpec,
    pub alpha: f64,
    pub t: f64,
    pub reps: u64,
    pub z_max: f64,
    /// Interior atoms: P(no influence from the left edge by time t) > 1 − this.
    pub interior_tol: f64,
}

impl Default for StationarityParams {
    fn default() -> Self {
        Self { traps: TrapSpec::poisson(0.7, -2.0, 2.0, 0.01, None), alpha: 5.0, t: 1.0, reps: 10_000, z_max: 4.0, interior_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuenchedParams {
    pub dist: DistSpec,
    pub envs: u64,
    pub walks: u64,
    /// Cap on the total steps of the g walks in one environment.
    pub step_budget: u64,
    pub window: (i64, i64),
    pub z_max: f64,
    pub identity_tol: f64,
}

impl Default for QuenchedParams {
    fn default() -> Self {
        Self {
            dist: DistSpec::two_point(0.5),
            envs: 10,
            walks: 100_000,
            step_budget: 400_000_000,
            window: (-20_000, 20_000),
            z_max: 3.0,
            identity_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailsParams {
    pub dists: Vec<DistSpec>,
    pub blocks: usize,
    pub top_k: usize,
    pub hill_tol: f64,
    /// The log-survival fit of ν_1 starts at this empirical quantile.
    pub nu_quantile: f64,
    pub nu_min_count: usize,
    pub r2_min: f64,
    pub drift_ms: Vec<usize>,
    pub quenched: QuenchedParams,
}

impl Default for TailsParams {
    fn default() -> Self {
        Self {
            dists: vec![DistSpec::two_point(0.5), DistSpec::two_point(0.7)],
            blocks: 100_000,
            top_k: 1000,
            hill_tol: 0.1,
            nu_quantile: 0.9,
            nu_min_count: 100,
            r2_min: 0.98,
            drift_ms: vec![100, 1000, 10_000],
            quenched: QuenchedParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoissonLaplaceParams {
    pub lambda: f64,
    pub kappa: f64,
    pub eps: f64,
    pub length: f64,
    pub samples: usize,
    pub thetas: Vec<f64>,
    pub z_max: f64,
}

impl Default for PoissonLaplaceParams {
    fn default() -> Self {
        Self { lambda: 1.0, kappa: 0.5, eps: 0.001, length: 1.0, samples: 10_000, thetas: vec![0.25, 0.5, 1.0, 2.0, 4.0], z_max: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetaSumParams {
    pub dist: DistSpec,
    pub n: usize,
    pub samples: usize,
    /// θ at which the stable scale is fitted.
    pub theta0: f64,
    pub thetas: Vec<f64>,
    pub z_max: f64,
}

impl Default for BetaSumParams {
    fn default() -> Self {
        Self {
            dist: DistSpec::two_point(0.5),
            n: 10_000,
            samples: 10_000,
            theta0: 1.0,
            thetas: vec![0.25, 0.5, 2.0, 4.0, 8.0],
            z_max: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct StableLimitsParams {
    pub poisson: PoissonLaplaceParams,
    pub beta_sums: BetaSumParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HydroTrapsParams {
    pub traps: TrapSpec,
    /// Truncation level for each a_n (W_n = W^{(eps_n)}); empty keeps W.
    pub truncation: Vec<f64>,
    pub u: ProfileSpec,
    pub phi: TestFunctionSpec,
    pub a_ns: Vec<f64>,
    pub replicas: u64,
    /// δ as a fraction of the target.
    pub delta_rel: f64,
    pub slope_range: (f64, f64),
}

fn default_phi() -> TestFunctionSpec {
    TestFunctionSpec { time: vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)], space: vec![(0.0, 0.0), (0.5, 1.0), (1.2, 0.0)] }
}

impl Default for HydroTrapsParams {
    fn default() -> Self {
        Self {
            traps: TrapSpec::poisson(0.7, -0.5, 1.5, 0.01, Some(50)),
            truncation: Vec::new(),
            u: parabola(),
            phi: default_phi(),
            a_ns: vec![100.0, 1000.0, 10_000.0],
            replicas: 100,
            delta_rel: 0.05,
            slope_range: (-1.3, -0.7),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LambdaFitParams {
    pub blocks: usize,
    pub top_k: usize,
}

impl Default for LambdaFitParams {
    fn default() -> Self {
        Self { blocks: 100_000, top_k: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceParams {
    pub eps: f64,
    pub lo: f64,
    pub hi: f64,
    pub draws: usize,
    /// Replace atoms below `eps` by their mean mass density.
    pub compensate: bool,
}

impl Default for ReferenceParams {
    fn default() -> Self {
        Self { eps: 1e-3, lo: -0.5, hi: 2.5, draws: 1000, compensate: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticleNoiseParams {
    pub n: f64,
    pub envs: usize,
    /// Independent particle systems averaged per environment; the check
    /// compares `density` against `2 · density`.
    pub density: u32,
}

impl Default for ParticleNoiseParams {
    fn default() -> Self {
        Self { n: 50.0, envs: 20, density: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HydroRwreParams {
    pub dist: DistSpec,
    pub ns: Vec<f64>,
    pub envs: usize,
    pub u: ProfileSpec,
    pub phi: TestFunctionSpec,
    pub left_buffer: i64,
    pub right_buffer: i64,
    pub max_exit_fraction: f64,
    pub lambda_fit: LambdaFitParams,
    pub reference: ReferenceParams,
    pub particles: ParticleNoiseParams,
}

impl Default for HydroRwreParams {
    fn default() -> Self {
        Self {
            dist: DistSpec::two_point(0.5),
            ns: vec![50.0, 200.0, 800.0],
            envs: 200,
            u: ProfileSpec::Hat { a: 0.0, peak: 0.5, b: 1.0, height: 1.0 },
            phi: TestFunctionSpec { time: vec![(0.0, 0.0), (0.25, 1.0), (0.5, 0.0)], space: vec![(0.0, 0.0), (0.75, 1.0), (1.5, 0.0)] },
            left_buffer: 400,
            right_buffer: 400,
            max_exit_fraction: 1e-3,
            lambda_fit: LambdaFitParams::default(),
            reference: ReferenceParams::default(),
            particles: ParticleNoiseParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallisticParams {
    pub dist: DistSpec,
    pub steps: u64,
    pub replicas: usize,
    pub z_max: f64,
}

impl Default for BallisticParams {
    fn default() -> Self {
        Self { dist: DistSpec::Omega { support: vec![(0.75, 1.0)] }, steps: 10_000, replicas: 1000, z_max: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubBallisticParams {
    pub dist: DistSpec,
    pub steps: Vec<u64>,
    pub replicas: usize,
}

impl Default for SubBallisticParams {
    fn default() -> Self {
        Self { dist: DistSpec::two_point(0.5), steps: vec![1000, 10_000, 100_000], replicas: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InverseStableParams {
    pub dist: DistSpec,
    pub n: f64,
    pub samples: usize,
    pub reference_samples: usize,
    pub alpha: f64,
    pub lambda_fit: LambdaFitParams,
}

impl Default for InverseStableParams {
    fn default() -> Self {
        Self {
            dist: DistSpec::two_point(0.5),
            n: 1000.0,
            samples: 500,
            reference_samples: 5000,
            alpha: 0.05,
            lambda_fit: LambdaFitParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SpeedParams {
    pub ballistic: BallisticParams,
    pub sub_ballistic: SubBallisticParams,
    pub inverse_stable: InverseStableParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Figure1(Figure1Params),
    UwCrosscheck(UwCrosscheckParams),
    Duality(DualityParams),
    Stationarity(StationarityParams),
    Tails(TailsParams),
    StableLimits(StableLimitsParams),
    HydroTraps(HydroTrapsParams),
    HydroRwre(HydroRwreParams),
    Speed(SpeedParams),
}

impl Params {
    pub fn default_for(id: ExperimentId) -> Self {
        match id {
            ExperimentId::Figure1 => Params::Figure1(Default::default()),
            ExperimentId::UwCrosscheck => Params::UwCrosscheck(Default::default()),
            ExperimentId::Duality => Params::Duality(Default::default()),
            ExperimentId::Stationarity => Params::Stationarity(Default::default()),
            ExperimentId::Tails => Params::Tails(Default::default()),
            ExperimentId::StableLimits => Params::StableLimits(Default::default()),
            ExperimentId::HydroTraps => Params::HydroTraps(Default::default()),
            ExperimentId::HydroRwre => Params::HydroRwre(Default::default()),
            ExperimentId::Speed => Params::Speed(Default::default()),
        }
    }

    fn parse(id: ExperimentId, value: serde_json::Value) -> Result<Self> {
        fn de<T: DeserializeOwned>(v: serde_json::Value) -> Result<T> {
            serde_path_to_error::deserialize(v).map_err(|e| {
                let inner = e.path().to_string();
                let path = if inner == "." { "params".to_string() } else { format!("params.{inner}") };
                LabError::config(path, e.into_inner().to_string())
            })
        }
        Ok(match id {
            ExperimentId::Figure1 => Params::Figure1(de(value)?),
            ExperimentId::UwCrosscheck => Params::UwCrosscheck(de(value)?),
            ExperimentId::Duality => Params::Duality(de(value)?),
            ExperimentId::Stationarity => Params::Stationarity(de(value)?),
            ExperimentId::Tails => Params::Tails(de(value)?),
            ExperimentId::StableLimits => Params::StableLimits(de(value)?),
            ExperimentId::HydroTraps => Params::HydroTraps(de(value)?),
            ExperimentId::HydroRwre => Params::HydroRwre(de(value)?),
            ExperimentId::Speed => Params::Speed(de(value)?),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentId,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default)]
    workers: Option<usize>,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    params: Option<serde_json::Value>,
}

fn default_seed() -> u64 {
    1
}

/// Fully resolved config, as echoed in the result manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub params: Params,
}

/// Values taken from the command line or the environment, which win over
/// the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            seed: default_seed(),
            workers: crate::exec::default_workers(),
            output_dir: default_output_dir(experiment),
            params: Params::default_for(experiment),
        }
    }

    /// Parse a config (or a result manifest, whose `config` entry is used).
    pub fn from_json(text: &str, overrides: &Overrides) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| LabError::config(".", format!("invalid JSON: {e}")))?;
        let value = match value {
            serde_json::Value::Object(mut m) if m.get("format").and_then(|f| f.as_str()) == Some(crate::result::MANIFEST_FORMAT) => {
                m.remove("config").ok_or_else(|| LabError::config("config", "manifest has no config entry"))?
            }
            v => v,
        };
        let raw: RawConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            LabError::config(path, e.into_inner().to_string())
        })?;
        let params = match raw.params {
            Some(v) => Params::parse(raw.experiment, v)?,
            None => Params::default_for(raw.experiment),
        };
        let workers = overrides.workers.or(raw.workers).unwrap_or_else(crate::exec::default_workers);
        let output_dir =
            overrides.output_dir.clone().or(raw.output_dir).unwrap_or_else(|| default_output_dir(raw.experiment));
        let cfg = Self { experiment: raw.experiment, seed: raw.seed, workers, output_dir, params };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text, overrides)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(LabError::config("workers", "must be at least 1"));
        }
        let mut v = Checker::default();
        match &self.params {
            Params::Figure1(p) => {
                v.traps("params.traps", &p.traps);
                v.profile("params.u", &p.u);
                v.times("params.times", &p.times);
            }
            Params::UwCrosscheck(p) => {
                v.traps("params.traps", &p.traps);
                v.profile("params.u", &p.u);
                v.times("params.times", &p.times);
                v.positive("params.reps", p.reps as f64);
                v.positive("params.z_max", p.z_max);
                v.positive("params.two_atom_tol", p.two_atom_tol);
                v.profile("params.pairing_g", &p.pairing_g);
                v.nonneg("params.pairing_t", p.pairing_t);
                v.positive("params.pairing_tol", p.pairing_tol);
            }
            Params::Duality(p) => {
                v.traps("params.traps", &p.traps);
                v.nonneg("params.t", p.t);
                v.positive("params.reps", p.reps as f64);
                v.positive("params.z_max", p.z_max);
                let q = &p.particles;
                v.traps("params.particles.traps", &q.traps);
                v.profile("params.particles.u", &q.u);
                v.positive("params.particles.scale", q.scale);
                v.nonneg("params.particles.t", q.t);
                v.at_least("params.particles.reps", q.reps as f64, 2.0);
                v.positive("params.particles.z_max", q.z_max);
                v.range("params.particles.dispersion", q.dispersion);
            }
            Params::Stationarity(p) => {
                v.traps("params.traps", &p.traps);
                v.positive("params.alpha", p.alpha);
                v.nonneg("params.t", p.t);
                v.at_least("params.reps", p.reps as f64, 2.0);
                v.positive("params.z_max", p.z_max);
                v.unit("params.interior_tol", p.interior_tol);
            }
            Params::Tails(p) => {
                for (i, d) in p.dists.iter().enumerate() {
                    v.dist(&format!("params.dists[{i}]"), d);
                }
                v.at_least("params.top_k", p.top_k as f64, 50.0);
                if p.blocks <= p.top_k {
                    v.fail("params.blocks", "must exceed top_k");
                }
                v.positive("params.hill_tol", p.hill_tol);
                v.unit("params.nu_quantile", p.nu_quantile);
                v.unit("params.r2_min", p.r2_min);
                if p.drift_ms.iter().any(|&m| m == 0 || m > p.blocks) {
                    v.fail("params.drift_ms", "entries must lie in 1..=blocks");
                }
                let q = &p.quenched;
                v.dist("params.quenched.dist", &q.dist);
                v.at_least("params.quenched.walks", q.walks as f64, 2.0);
                if !(q.window.0 <= 0 && q.window.1 > 0) {
                    v.fail("params.quenched.window", "must contain 0 and extend to its right");
                }
                v.positive("params.quenched.z_max", q.z_max);
                v.positive("params.quenched.identity_tol", q.identity_tol);
            }
            Params::StableLimits(p) => {
                let q = &p.poisson;
                v.positive("params.poisson.lambda", q.lambda);
                v.unit("params.poisson.kappa", q.kappa);
                v.positive("params.poisson.eps", q.eps);
                v.positive("params.poisson.length", q.length);
                v.at_least("params.poisson.samples", q.samples as f64, 2.0);
                v.thetas("params.poisson.thetas", &q.thetas);
                v.positive("params.poisson.z_max", q.z_max);
                let b = &p.beta_sums;
                v.dist("params.beta_sums.dist", &b.dist);
                v.positive("params.beta_sums.n", b.n as f64);
                v.at_least("params.beta_sums.samples", b.samples as f64, 2.0);
                v.positive("params.beta_sums.theta0", b.theta0);
                v.thetas("params.beta_sums.thetas", &b.thetas);
                v.positive("params.beta_sums.z_max", b.z_max);
            }
            Params::HydroTraps(p) => {
                v.traps("params.traps", &p.traps);
                if !p.truncation.is_empty() && p.truncation.len() != p.a_ns.len() {
                    v.fail("params.truncation", "needs one level per a_n, or none");
                }
                v.profile("params.u", &p.u);
                v.phi("params.phi", &p.phi);
                if p.a_ns.len() < 2 || p.a_ns.iter().any(|&a| !(a > 0.0)) {
                    v.fail("params.a_ns", "needs at least two positive entries");
                }
                v.at_least("params.replicas", p.replicas as f64, 2.0);
                v.positive("params.delta_rel", p.delta_rel);
                v.range("params.slope_range", p.slope_range);
            }
            Params::HydroRwre(p) => {
                v.dist("params.dist", &p.dist);
                if p.ns.is_empty() || p.ns.iter().any(|&n| !(n >= 1.0)) {
                    v.fail("params.ns", "entries must be at least 1");
                }
                v.positive("params.envs", p.envs as f64);
                v.profile("params.u", &p.u);
                v.phi("params.phi", &p.phi);
                v.nonneg("params.left_buffer", p.left_buffer as f64);
                v.nonneg("params.right_buffer", p.right_buffer as f64);
                v.unit("params.max_exit_fraction", p.max_exit_fraction);
                v.lambda_fit("params.lambda_fit", &p.lambda_fit);
                v.positive("params.reference.eps", p.reference.eps);
                if !(p.reference.hi > p.reference.lo) {
                    v.fail("params.reference.hi", "must exceed lo");
                }
                v.positive("params.reference.draws", p.reference.draws as f64);
                v.at_least("params.particles.n", p.particles.n, 1.0);
                v.at_least("params.particles.envs", p.particles.envs as f64, 2.0);
                v.positive("params.particles.density", p.particles.density as f64);
            }
            Params::Speed(p) => {
                v.dist("params.ballistic.dist", &p.ballistic.dist);
                v.positive("params.ballistic.steps", p.ballistic.steps as f64);
                v.at_least("params.ballistic.replicas", p.ballistic.replicas as f64, 2.0);
                v.positive("params.ballistic.z_max", p.ballistic.z_max);
                v.dist("params.sub_ballistic.dist", &p.sub_ballistic.dist);
                if p.sub_ballistic.steps.is_empty() || p.sub_ballistic.steps.contains(&0) {
                    v.fail("params.sub_ballistic.steps", "entries must be positive");
                }
                v.positive("params.sub_ballistic.replicas", p.sub_ballistic.replicas as f64);
                let q = &p.inverse_stable;
                v.dist("params.inverse_stable.dist", &q.dist);
                v.at_least("params.inverse_stable.n", q.n, 1.0);
                v.positive("params.inverse_stable.samples", q.samples as f64);
                v.positive("params.inverse_stable.reference_samples", q.reference_samples as f64);
                v.unit("params.inverse_stable.alpha", q.alpha);
                v.lambda_fit("params.inverse_stable.lambda_fit", &q.lambda_fit);
            }
        }
        v.finish()
    }
}

pub fn default_output_dir(id: ExperimentId) -> PathBuf {
    PathBuf::from("results").join(id.name())
}

/// Collects the first semantic error with its key path.
#[derive(Default)]
struct Checker {
    first: Option<LabError>,
}

impl Checker {
    fn fail(&mut self, path: &str, message: impl Into<String>) {
        if self.first.is_none() {
            self.first = Some(LabError::config(path, message));
        }
    }

    fn positive(&mut self, path: &str, x: f64) {
        if !(x > 0.0 && x.is_finite()) {
            self.fail(path, "must be positive");
        }
    }

    fn nonneg(&mut self, path: &str, x: f64) {
        if !(x >= 0.0 && x.is_finite()) {
            self.fail(path, "must be nonnegative");
        }
    }

    fn at_least(&mut self, path: &str, x: f64, min: f64) {
        if !(x >= min) {
            self.fail(path, format!("must be at least {min}"));
        }
    }

    /// Strictly inside (0, 1).
    fn unit(&mut self, path: &str, x: f64) {
        if !(x > 0.0 && x < 1.0) {
            self.fail(path, "must lie in (0, 1)");
        }
    }

    fn range(&mut self, path: &str, r: (f64, f64)) {
        if !(r.0 < r.1) {
            self.fail(path, "lower end must be below upper end");
        }
    }

    fn times(&mut self, path: &str, t: &[f64]) {
        if t.is_empty() || t.iter().any(|&x| !(x >= 0.0 && x.is_finite())) || t.windows(2).any(|w| w[0] > w[1]) {
            self.fail(path, "needs nonnegative times in increasing order");
        }
    }

    fn thetas(&mut self, path: &str, t: &[f64]) {
        if t.is_empty() || t.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            self.fail(path, "needs positive values");
        }
    }

    fn profile(&mut self, path: &str, p: &ProfileSpec) {
        if let Err(e) = p.build() {
            self.fail(path, e.to_string());
        }
    }

    fn phi(&mut self, path: &str, p: &TestFunctionSpec) {
        if let Err(e) = PiecewiseLinear::new(p.time.clone()) {
            self.fail(&format!("{path}.time"), e.to_string());
        }
        if let Err(e) = PiecewiseLinear::new(p.space.clone()) {
            self.fail(&format!("{path}.space"), e.to_string());
        }
    }

    fn dist(&mut self, path: &str, d: &DistSpec) {
        if let Err(e) = d.build() {
            self.fail(path, e.to_string());
        }
    }

    fn lambda_fit(&mut self, path: &str, p: &LambdaFitParams) {
        self.at_least(&format!("{path}.top_k"), p.top_k as f64, 1.0);
        if p.blocks <= p.top_k {
            self.fail(&format!("{path}.blocks"), "must exceed top_k");
        }
    }

    fn traps(&mut self, path: &str, t: &TrapSpec) {
        match t {
            TrapSpec::Poisson { lambda, kappa, lo, hi, eps, .. } => {
                let p = format!("{path}.poisson");
                self.positive(&format!("{p}.lambda"), *lambda);
                self.unit(&format!("{p}.kappa"), *kappa);
                self.positive(&format!("{p}.eps"), *eps);
                if !(hi > lo) {
                    self.fail(&format!("{p}.hi"), "must exceed lo");
                }
            }
            TrapSpec::Atoms { atoms, lo, hi } => {
                let atoms = atoms.iter().map(|&(x, y)| Atom { x, y }).collect();
                if let Err(e) = TrapEnvironment::new(atoms, *lo, *hi, 0.0) {
                    self.fail(&format!("{path}.atoms"), e.to_string());
                }
            }
            TrapSpec::File { path: file, .. } => {
                if file.as_os_str().is_empty() {
                    self.fail(&format!("{path}.file.path"), "must not be empty");
                }
            }
        }
    }

    fn finish(self) -> Result<()> {
        match self.first {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}
