//! One runner per experiment id. A runner turns resolved parameters and the
//! master seed into files and acceptance criteria; it never touches the disk.

mod duality;
mod figure1;
mod hydro_rwre;
mod hydro_traps;
mod speed;
mod stable_limits;
mod stationarity;
mod tails;
mod uw_crosscheck;

use rwre_core::exec::Executor;
use rwre_core::rng::{derive_seed, label};

use crate::config::{ExperimentConfig, Params};
use crate::error::Result;
use crate::result::ExperimentOutput;

pub fn run<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::default();
    out.seed("master", cfg.seed);
    let s = cfg.seed;
    match &cfg.params {
        Params::Figure1(p) => figure1::run(p, s, &mut out)?,
        Params::UwCrosscheck(p) => uw_crosscheck::run(p, s, &mut out)?,
        Params::Duality(p) => duality::run(p, s, exec, &mut out)?,
        Params::Stationarity(p) => stationarity::run(p, s, exec, &mut out)?,
        Params::Tails(p) => tails::run(p, s, exec, &mut out)?,
        Params::StableLimits(p) => stable_limits::run(p, s, exec, &mut out)?,
        Params::HydroTraps(p) => hydro_traps::run(p, s, exec, &mut out)?,
        Params::HydroRwre(p) => hydro_rwre::run(p, s, exec, &mut out)?,
        Params::Speed(p) => speed::run(p, s, exec, &mut out)?,
    }
    Ok(out)
}

/// Sub-seed `name` of the master seed, recorded in the output.
fn sub_seed(out: &mut ExperimentOutput, master: u64, name: &str) -> u64 {
    out.seed(name, derive_seed(master, &[label(name)]))
}

/// |a − b| / se, with a floor on se so that replica-free cells are judged
/// against the resolution of the estimator.
fn z_score(a: f64, b: f64, se: f64, floor: f64) -> f64 {
    (a - b).abs() / se.max(floor)
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}
