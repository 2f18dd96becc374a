//! Trap environments, the trap measure σ_W, holding-time realizations τ_W and
//! the directed trap processes Z_W (rightward) and Z_W* (leftward).

mod environment;
mod process;
mod sample;

pub use environment::{sigma_mass, truncate_env, validate_env, Atom, TrapEnvironment, ValidationReport};
pub use process::{draw_holding_times, z_backward, z_forward, BackwardMode, HoldingTimes};
pub use sample::{sample_poisson_traps, sample_poisson_traps_with_count, PoissonTrapParams};
