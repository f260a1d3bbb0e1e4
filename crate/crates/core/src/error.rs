//! Crate-wide error type.

use alloc::string::String;

/// Errors reported by design constructions and recovery routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A basis index was requested outside the basis dimension.
    #[error("basis index {index} out of range (dimension {dim})")]
    IndexOutOfRange { index: usize, dim: usize },

    /// The spectral gate of a least-squares fit failed: the smallest Gram
    /// eigenvalue is too close to zero relative to the largest, so the design
    /// does not discretize the approximation space.
    #[error("ill-posed design: relative spectral gap {gap:.3e} below threshold {tol:.3e}")]
    IllPosedDesign { gap: f64, tol: f64 },

    /// A point-suggestion oracle ran out of budget before enough points were
    /// accepted. Signals a bad candidate source, not a broken construction.
    #[error(
        "oracle exhausted after {suggestions} suggestions ({accepted}/{needed} points accepted)"
    )]
    OracleExhausted {
        suggestions: usize,
        accepted: usize,
        needed: usize,
    },

    /// Rejection sampling exceeded its draw budget.
    #[error("rejection sampling budget of {budget} draws exceeded")]
    RejectionBudgetExceeded { budget: usize },

    /// Rejection sampling is unavailable because no sup bound on the density
    /// is known.
    #[error("no sup bound available for rejection sampling from the density")]
    NoRejectionBound,

    /// The singular-value tail used to build an optimal sampling density is
    /// identically zero.
    #[error("degenerate singular-value tail: all sigma_k vanish for k >= {m}")]
    DegenerateTail { m: usize },

    /// A conditional design exceeded its redraw cap. With acceptance
    /// probability at least 1/2 per draw this flags a basis/measure mismatch.
    #[error("redraw cap of {cap} exceeded while drawing a conditional design")]
    RedrawCapExceeded { cap: usize },

    /// An auxiliary family would be larger than the configured cap.
    #[error("auxiliary family of size {required} exceeds the cap {cap}")]
    DimensionOverflow { required: usize, cap: usize },

    /// An iterative solver did not reach its tolerance within the iteration cap.
    #[error("solver did not converge within {iterations} iterations (objective gap {gap:.3e})")]
    NonConvergence { iterations: usize, gap: f64 },

    /// A brute-force enumeration would be too large.
    #[error("combinatorial budget exceeded: {required} supports, cap {cap}")]
    CombinatorialBudgetExceeded { required: u64, cap: u64 },

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl core::fmt::Display) -> Error {
    Error::InvalidArgument(alloc::format!("{msg}"))
}
