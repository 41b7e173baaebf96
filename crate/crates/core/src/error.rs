use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// `|g1² − dlt²|` is zero to machine precision, so the effective coupling diverges.
    #[error("system sits on the transition point (g1 = {g1}, threshold = {threshold}); the effective coupling diverges")]
    TransitionSingularity { g1: f64, threshold: f64 },

    /// At least one supermode has a non-positive decay rate, so no steady state exists.
    #[error("no steady state: supermode {mode} amplifies (decay rate {decay_rate} MHz)")]
    Unstable { mode: &'static str, decay_rate: f64 },

    /// Both static supermodes decay, but the mechanical modulation drives a
    /// growing Floquet solution.
    #[error("no periodic steady state: the modulation pumps a growing solution (Floquet decay rate {decay_rate} MHz)")]
    ParametricInstability { decay_rate: f64 },

    #[error("balanced gain (gamma = kappa = {kappa}): the PT/EP amplification ratio diverges")]
    BalancedGain { kappa: f64 },

    #[error("reference sideband power {power:e} is too small to normalize against")]
    DivisionDegenerate { power: f64 },

    #[error("peak at {position} spans only {points:.1} grid points (need at least 5)")]
    Resolution { position: f64, points: f64 },

    #[error("integration diverged at t = {time} us (|a| = {magnitude:e})")]
    Divergence { time: f64, magnitude: f64 },

    #[error("step size dt = {dt} us exceeds the stability/resolution bound {bound} us")]
    StepSize { dt: f64, bound: f64 },

    #[error("harmonic fit residual {residual:e} exceeds 1e-3 of the signal norm")]
    PoorFit { residual: f64 },

    #[error("singular linear system in {context}")]
    Singular { context: &'static str },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("config validation failed:\n  {}", .0.join("\n  "))]
    ConfigInvalid(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics (instability, divergence, singularities),
    /// as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::TransitionSingularity { .. }
                | Error::Unstable { .. }
                | Error::ParametricInstability { .. }
                | Error::BalancedGain { .. }
                | Error::DivisionDegenerate { .. }
                | Error::Resolution { .. }
                | Error::Divergence { .. }
                | Error::StepSize { .. }
                | Error::PoorFit { .. }
                | Error::Singular { .. }
        )
    }
}
