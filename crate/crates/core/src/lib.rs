//! Symbolic asymptotic analysis on the complex affine line.
//!
//! The library works with *Puiseux germs*: truncated series in a local
//! coordinate with exact rational exponents and complex coefficients,
//! anchored at a point of the projective line and carrying growth data
//! towards that point. On top of the germ ring it provides
//!
//! - the Legendre transform `(a, θ, f) ↦ (b, η, g)` cut out by the
//!   relations `w = f′(z)`, `z = −g′(w)`, `zw − f(z) + g(w) = 0`
//!   ([`legendre`]),
//! - Stokes directions, Stokes filtration ranks and graded multiplicities
//!   of systems of exponential factors ([`stokesfl`]),
//! - the stationary phase transform carrying singularity data on a line
//!   `V` to singularity data on the dual line `V*` orbit by orbit
//!   ([`fourier`]),
//! - a numeric saddle-point oracle, independent of the symbolic pipeline,
//!   certifying each transform via the identity `g(w) = f(z*) − z*·w` at
//!   the saddle `f′(z*) = w` ([`oracle`]).
//!
//! Exponents are exact rationals throughout, so structural laws (pole
//! orders, Stokes ray counts, ramification lattices) hold exactly;
//! coefficients are double precision complex numbers governed by the
//! tolerances in [`tolerances`].

pub mod error;
pub mod fourier;
pub mod legendre;
pub mod oracle;
pub mod puiseux;
pub mod stokesfl;
pub mod tolerances;

mod cover;

pub use error::Error;
pub use fourier::{fourier_transform, inverse_fourier_transform, TransformReport};
pub use legendre::{
    classify, inverse_legendre, invert_series, legendre_transform, AdmissibilityClass,
    DirectedGerm, LegendrePair,
};
pub use puiseux::{BasePoint, Comparison, Direction, PoleOrder, PuiseuxGerm};
pub use stokesfl::{FactorOrbit, PointData, SingularityData, StokesStructure};

/// Result alias for fallible library operations.
pub type Result<T> = std::result::Result<T, Error>;
