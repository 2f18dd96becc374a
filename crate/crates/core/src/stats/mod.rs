//! Heavy-tail estimators, Kolmogorov-Smirnov distances, Laplace-transform
//! checks and positive stable sampling.

mod hill;
mod ks;
mod laplace;
mod regression;
mod stable;

pub use hill::{hill_plot, hill_tail_index, tail_constant, TailReport};
pub use ks::{ks_critical_one_sample, ks_critical_two_sample, ks_one_sample, ks_two_sample};
pub use laplace::{
    empirical_laplace, fit_stable_scale, laplace_transform_check, levy_laplace_exponent, truncated_levy_laplace,
    LaplaceCheck, LaplacePoint,
};
pub use regression::{linear_fit, log_survival_fit, LinearFit};
pub use stable::{inverse_stable_sample, levy_cdf, sample_positive_stable};
