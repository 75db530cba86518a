use thiserror::Error;

/// Unified error type for the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// The mean-flow matrix is zero; there is no flow to classify.
    #[error("flow matrix is identically zero; nothing to classify")]
    StaticFlow,

    /// A parameter is outside the domain an operation is defined on.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative solve (Newton, fixed point) failed to converge.
    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature unresolved: {0}")]
    QuadratureUnresolved(String),

    /// A fitting window contains too few points or is numerically degenerate.
    #[error("fit window unusable: {0}")]
    WindowTooShort(String),

    /// Field grids too coarse to resolve the logarithmic shifts.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// The marginal case an asymptotic formula does not cover.
    #[error("unsupported regime: {0}")]
    Unsupported(String),

    /// A field slice or ensemble was empty/degenerate where data was required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A hard budget (cycle count, step count) was exhausted before the
    /// computation finished.
    #[error("resource cap reached: {0}")]
    ResourceCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
