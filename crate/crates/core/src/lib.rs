//! Random walks in i.i.d. random environment on Z, directed trap processes, and
//! systems of independent particles evolving in both.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Every random operation takes an explicit seed or generator; see
//! [`rng`] for the stream-splitting scheme.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod env;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod func;
pub mod math;
pub mod particles;
pub mod rng;
pub mod stats;
pub mod trap;
pub mod uw;
pub mod walk;

pub use error::{Error, Result};

/// Crate version, recorded in result manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
