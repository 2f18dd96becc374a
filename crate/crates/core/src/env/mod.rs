//! Random environments on Z: the single-site law, windowed samples under P
//! and Q, the potential, ladder locations, and the quenched quantities built
//! from them.

mod blocks;
mod distribution;
mod environment;
mod quenched;

pub use blocks::{Block, BlockStream};
pub use distribution::{solve_kappa, two_point_rho_for_kappa, EnvDistribution, Kappa, SupportPoint};
pub use environment::{sample_environment, sample_environment_with, Environment, Law, SampleOptions};
pub use quenched::{
    b_coeff, backward_series, crossing_time_variance, beta_k, forward_series, g_function, g_profile, rescaled_trap_env,
    LadderEntry, LadderStats, SeriesOptions, SeriesSum,
};
