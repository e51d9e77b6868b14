//! Error type shared by all library modules.

use thiserror::Error;

/// Errors raised by germ arithmetic, the transform engine and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Binary germ operation on germs anchored at different base points.
    #[error("mismatched base points: {0} vs {1}")]
    MismatchedBasePoint(String, String),

    /// Pole order requested for a germ with no stored terms and a
    /// non-positive truncation order: the order cannot be decided.
    #[error("indeterminate pole order: no stored terms and known order {0} <= 0")]
    IndeterminateOrder(String),

    /// Leading coefficient requested for the zero germ.
    #[error("zero germ has no leading coefficient")]
    ZeroGerm,

    /// The stored truncation window is too narrow to decide the requested
    /// quantity or to guarantee the requested output precision.
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),

    /// Evaluation point lies outside the sector around the anchoring
    /// direction in which the germ's expansion is trusted.
    #[error("evaluation point outside the sector around the anchoring direction")]
    OutOfSector,

    /// Series inversion requested for a germ with pole order zero.
    #[error("series is not invertible: dominant exponent is zero")]
    NotInvertible,

    /// An iteration failed to contract its residual. Signals an internal
    /// bug rather than a user error.
    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    /// Legendre transform requested for a bounded or linear germ.
    #[error("germ is not admissible: {0}")]
    InadmissibleGerm(String),

    /// A filtration rank was requested at a Stokes direction, where the
    /// dominance order degenerates.
    #[error("direction is not generic: a factor comparison is incomparable there")]
    NonGenericDirection,

    /// Singularity data failed validation.
    #[error("invalid singularity data: {0}")]
    InvalidData(String),

    /// A numeric saddle root left the sector of its source direction.
    #[error("saddle root escaped the source sector (arg deviation {deviation:.3e} rad)")]
    WrongSector { deviation: f64 },
}
