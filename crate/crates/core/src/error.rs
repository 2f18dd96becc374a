use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(&'static str),
    #[error("E[log rho] = {mean_log_rho} is not negative, the walk is not transient to the right")]
    AssumptionViolated { mean_log_rho: f64 },
    #[error("E[rho^kappa] < 1 for every kappa in (0, {kappa_max}]")]
    NoRoot { kappa_max: f64 },
    #[error("a single block exceeded {cap} sites")]
    BlockOverflow { cap: usize },
    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error("series did not converge before the window edge at site {site}")]
    BufferExhausted { site: i64 },
    #[error("ladder {k} is not complete inside the window")]
    IncompleteLadder { k: i64 },
    #[error("degenerate trap window")]
    DegenerateWindow,
    #[error("process left the window before time {t}")]
    WindowExit { t: f64 },
    #[error("trap environment does not cover the support of the profile")]
    SupportNotCovered,
    #[error("depth ratio {ratio:e} below 1e-9; the system is too stiff")]
    StiffnessWarning { ratio: f64 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid trap environment: {0}")]
    InvalidTrapEnvironment(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
