//! Systems of independent particles in a trap environment or in an RWRE
//! environment, started from product-Poisson configurations.

mod config;
mod rwre;
mod trap;

pub use config::{init_configuration, initial_means, InitialCondition, ParticleConfiguration};
pub use rwre::{
    evolve_rwre_system, rwre_mean_integral, rwre_space_time_integral, step_weights, MeanIntegral, RwreSnapshot,
    RwreTrajectory,
};
pub use trap::{
    evolve_trap_system, trap_configuration_at, trap_integral_direct, trap_space_time_integral, ExitPolicy, JumpEvent,
    SpaceTimeIntegral, TrapTrajectory,
};
