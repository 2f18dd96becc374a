//! Experiment kernels shared by the runner and the tests. Each kernel is a
//! deterministic function of its seed: replica `r` always draws from its own
//! stream, and parallel work is merged in index order.

mod duality;
mod hydro;
mod limits;
mod quenched;

pub use duality::{trap_duality, trap_particle_counts, DualityPair};
pub use hydro::{
    hydro_traps, reference_integral, reference_integrals, rwre_integral, rwre_integral_samples, trap_target,
    HydroTrapsCell, ReferenceSpec, RwreIntegralSpec, RwreMode, RwreSample,
};
pub use limits::{
    beta_sums, block_sample, fit_lambda, inverse_stable_reference, poisson_sigma_samples, trap_walk_positions,
    walk_displacements, BlockSample, LambdaFit,
};
pub use quenched::{quenched_formula_check, QuenchedCheck};

/// Split `n` replicas into at most `chunks` contiguous ranges.
pub(crate) fn chunk_ranges(n: u64, chunks: u64) -> alloc::vec::Vec<(u64, u64)> {
    let chunks = chunks.clamp(1, n.max(1));
    let size = n.div_ceil(chunks);
    (0..chunks).map(|c| (c * size, ((c + 1) * size).min(n))).filter(|r| r.0 < r.1).collect()
}
