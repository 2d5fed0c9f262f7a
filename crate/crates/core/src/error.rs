use thiserror::Error;

/// Failures reported by the model, solver and sensing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operating point too close to linewidth suppression (E_p = {ep:e}); linear response diverges")]
    NearSingular { ep: f64 },

    #[error("singular drive: response cubic has no x-dependence but I = {intensity:e} > 0")]
    SingularDrive { intensity: f64 },

    #[error("more than one Kerr coefficient is nonzero ({0}); only a single nonlinear mode is supported")]
    MultipleKerrModes(String),

    #[error("phase classification requires g = 0 (got g = {g:e})")]
    CoherentCouplingPresent { g: f64 },

    #[error("need at least {needed} usable points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("finite-difference step at U = {u:e} straddles a branch boundary")]
    BranchStraddle { u: f64 },

    #[error("finite-difference estimate not converged: {coarse:e} vs {fine:e}")]
    FiniteDifferenceMismatch { coarse: f64, fine: f64 },

    #[error("no stable steady state at this operating point")]
    NoStableBranch,

    #[error("steady-state amplitude equation is singular at n = {n:e}")]
    SingularAmplitudeSystem { n: f64 },
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
