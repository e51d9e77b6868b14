//! Pinned numeric tolerances.
//!
//! Exponents are exact rationals, so every structural statement (pole
//! orders, ray counts, case labels) is checked exactly. The constants here
//! govern the floating coefficient side only.

/// Relative magnitude below which a stored coefficient is treated as zero.
///
/// Applied relative to the largest stored coefficient of the germ at hand;
/// decides term dropping after arithmetic, comparison zero tests and class
/// equality.
pub const EPS_ZERO: f64 = 1e-10;

/// Relative bound on the defining-identity residual `zw − f(ψ(w)) + g(w)`
/// of a transform pair, measured against the largest input coefficient.
pub const RESIDUAL_REL: f64 = 1e-9;

/// Relative convergence target for the numeric saddle solver:
/// `|f′(z*) − w| ≤ SADDLE_NEWTON_REL · |w|`.
pub const SADDLE_NEWTON_REL: f64 = 1e-12;

/// Acceptance bound for a solved saddle, `|f′(z*) − w| < SADDLE_ACCEPT_REL · |w|`.
pub const SADDLE_ACCEPT_REL: f64 = 1e-10;

/// Angular agreement required between the symbolic target direction and
/// the numeric limit direction of `f′` along the source ray.
pub const DIRECTION_TOL: f64 = 1e-6;

/// A query direction closer than this to a Stokes ray of the output data
/// is considered non-generic and gets perturbed.
pub const GENERIC_ETA_EPS: f64 = 1e-6;

/// Deterministic perturbation applied to a non-generic query direction.
pub const ETA_PERTURB: f64 = 1e-3;

/// Angular tolerance when merging coincident Stokes rays of distinct
/// germ pairs into one ray of the circle partition.
pub const RAY_MERGE_TOL: f64 = 1e-9;

/// Guaranteed output terms of a transform when the caller does not ask
/// for a specific precision.
pub const DEFAULT_PRECISION: usize = 16;
