//! The limit profile u_W(t, x) = E[u(Z_W*(t; x))] on finite trap sets.
//!
//! On atoms x_1 < ... < x_N the profile v_k(t) = u_W(t, x_k) solves the
//! lower-triangular system dv_k/dt = (v_{k-1} - v_k)/y_k, v_0 = 0,
//! v_k(0) = u(x_k). [`solve_uw_ode`] uses uniformization, which writes
//! e^{tA} u as a Poisson mixture of powers of a stochastic matrix, so all
//! terms are nonnegative and the truncation error is known exactly.
//! [`solve_uw_convolution`] integrates level by level with the exact
//! integrating factor and is kept as an independent check.

mod mc;
mod ode;
mod solution;

pub use mc::{estimate_uw_mc, estimate_uw_mc_grid, McEstimate};
pub use ode::{dual_pairing_check, solve_atoms, solve_uw_circ, solve_uw_convolution, solve_uw_ode, PairingCheck, SolveOptions};
pub use solution::{duw_dt, total_variation, UwMethod, UwSolution};
