//! Legendre transform of admissible directed germs.
//!
//! The transform `L(a, θ, f) = (b, η, g)` is cut out by the relations
//!
//! ```text
//!     w = f′(z),    z = −g′(w),    z·w − f(z) + g(w) = 0,
//! ```
//!
//! solved as truncated series: `w = f′(z)` is inverted by a fixed-point
//! refinement on integer-exponent covers (see the crate-private `cover`
//! module), and `g = f(ψ(w)) − ψ(w)·w` is assembled by composition. The
//! inverse transform replaces the symplectic map `(z, w) ↦ (w, −z)` by
//! its inverse `(w, w*) ↦ (−w*, w)`, which flips four signs of the same
//! engine.
//!
//! Case split by the source germ (`λ` its pole order):
//! - finite base, `λ > 0`: target `∞`, output order `λ/(λ+1)`; the output
//!   picks up the linear part `−a·w` when the base is `a ≠ 0`;
//! - base `∞`, `f = bz + f̃` with `ord(f̃) = λ ∈ (0, 1)`: target the
//!   finite point `b`, output order `λ/(1−λ)`;
//! - base `∞`, `λ > 1`: target `∞`, output order `λ/(λ−1)`.
//!
//! Directions map by following `w = f′(z)` along the source ray: the
//! lifted target angle is `arg γ − ν·ς·Θ` for the leading term
//! `γ ℓ^(−ν)` of `f′`, and the branch of the seed root of the inverse
//! series is chosen so that the lift of `arg ψ` converges back to the
//! source lift.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::cover::{self, TruncLaurent};
use crate::error::Error;
use crate::puiseux::{rational_to_f64, BasePoint, Direction, Order, PoleOrder, PuiseuxGerm};
use crate::tolerances::{DEFAULT_PRECISION, EPS_ZERO, RESIDUAL_REL};
use crate::Result;

/// A Puiseux germ anchored at a direction of its base point: the triple
/// `(a, θ, f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGerm {
    pub germ: PuiseuxGerm,
    pub dir: Direction,
}

impl DirectedGerm {
    pub fn new(germ: PuiseuxGerm, dir: Direction) -> Result<Self> {
        if germ.base() != dir.base {
            return Err(Error::MismatchedBasePoint(
                germ.base().to_string(),
                dir.base.to_string(),
            ));
        }
        Ok(DirectedGerm { germ, dir })
    }
}

impl fmt::Display for DirectedGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.germ.base(), self.dir, self.germ)
    }
}

/// Why a germ falls outside the domain of the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InadmissibleReason {
    /// `ord(f) ≤ 0`.
    Bounded,
    /// Base `∞` and `f − bz` bounded for some `b`.
    Linear,
}

/// Transform case of a directed germ, following the split above.
#[derive(Debug, Clone, PartialEq)]
pub enum AdmissibilityClass {
    CaseFiniteToInfinity { lambda: Rational64 },
    CaseLinearTwistToFinite { b: Complex64, lambda: Rational64 },
    CaseInfinityToInfinity { lambda: Rational64 },
    Inadmissible(InadmissibleReason),
}

impl AdmissibilityClass {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, AdmissibilityClass::Inadmissible(_))
    }

    /// Pole order of the transformed germ (modulo its linear part), as an
    /// exact rational: `λ/(λ+1)`, `λ/(1−λ)` or `λ/(λ−1)` by case.
    pub fn output_order(&self) -> Option<Rational64> {
        let one = Rational64::from_integer(1);
        match self {
            AdmissibilityClass::CaseFiniteToInfinity { lambda } => Some(lambda / (lambda + one)),
            AdmissibilityClass::CaseLinearTwistToFinite { lambda, .. } => {
                Some(lambda / (one - lambda))
            }
            AdmissibilityClass::CaseInfinityToInfinity { lambda } => Some(lambda / (lambda - one)),
            AdmissibilityClass::Inadmissible(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AdmissibilityClass::CaseFiniteToInfinity { .. } => "finite-to-infinity",
            AdmissibilityClass::CaseLinearTwistToFinite { .. } => "linear-twist-to-finite",
            AdmissibilityClass::CaseInfinityToInfinity { .. } => "infinity-to-infinity",
            AdmissibilityClass::Inadmissible(InadmissibleReason::Bounded) => {
                "inadmissible (bounded)"
            }
            AdmissibilityClass::Inadmissible(InadmissibleReason::Linear) => {
                "inadmissible (linear)"
            }
        }
    }
}

/// A transform result: source and target directed germs, the inverse
/// series `ψ` joining them, the case taken, and the residual of the
/// defining identity over the guaranteed window.
#[derive(Debug, Clone)]
pub struct LegendrePair {
    pub source: DirectedGerm,
    pub target: DirectedGerm,
    /// The solved intermediate variable as a series at the target: for
    /// the forward transform `z = ψ(w)` (affine `z`, including the base
    /// offset `a`), for the inverse transform `w = ψ(z)`.
    pub psi: PuiseuxGerm,
    pub case: AdmissibilityClass,
    /// Max coefficient magnitude of `zw − f(ψ(w)) + g(w)` over the
    /// guaranteed window (absolute).
    pub residual: f64,
    /// Lifted target angle before reduction into `[0, 2πp)`: the full
    /// continuation of `arg w` along the source ray.
    pub target_lift: f64,
    /// Direction coefficient `β` of the target: the limit of `f′(z)`
    /// (or `f′(z) − b`) along the source ray has argument `arg β`, and
    /// `|β|` is the modulus of the leading derivative coefficient.
    pub beta: Complex64,
    /// True for pairs produced by [`inverse_legendre`]: the source is
    /// then the `g`-side of the defining identity.
    pub inverse: bool,
}

impl LegendrePair {
    /// Residual acceptance relative to the largest source coefficient.
    pub fn residual_ok(&self) -> bool {
        self.residual <= RESIDUAL_REL * self.source.germ.max_coeff_abs().max(1e-300)
    }
}

/// Decide the transform case of a directed germ.
///
/// At `∞`, a pole order of exactly 1 routes through the linear-twist case
/// when the sub-linear remainder is unbounded, and is rejected as linear
/// when the remainder is bounded.
pub fn classify(f: &DirectedGerm) -> Result<AdmissibilityClass> {
    let lambda = match order_or_truncation(&f.germ)? {
        PoleOrder::Finite(l) if l.is_positive() => l,
        _ => return Ok(AdmissibilityClass::Inadmissible(InadmissibleReason::Bounded)),
    };
    let one = Rational64::from_integer(1);
    match f.germ.base() {
        BasePoint::Finite(_) => Ok(AdmissibilityClass::CaseFiniteToInfinity { lambda }),
        BasePoint::Infinity => {
            if lambda > one {
                return Ok(AdmissibilityClass::CaseInfinityToInfinity { lambda });
            }
            // λ ∈ (0, 1]: split off the coefficient of z
            let b = f.germ.coeff(one);
            let rest = f
                .germ
                .sub(&PuiseuxGerm::monomial(BasePoint::Infinity, one, b))?;
            match order_or_truncation(&rest)? {
                PoleOrder::Finite(lt) if lt.is_positive() => {
                    Ok(AdmissibilityClass::CaseLinearTwistToFinite { b, lambda: lt })
                }
                _ => Ok(AdmissibilityClass::Inadmissible(InadmissibleReason::Linear)),
            }
        }
    }
}

fn order_or_truncation(g: &PuiseuxGerm) -> Result<PoleOrder> {
    g.pole_order().map_err(|_| {
        Error::TruncationInsufficient("pole order undecidable from the stored window".into())
    })
}

/// Count of guaranteed lattice slots of a germ (from its leading exponent
/// down to the truncation bar), `None` when the germ is exact.
pub(crate) fn guaranteed_slots(g: &PuiseuxGerm) -> Option<i64> {
    match g.order() {
        Order::Exact => None,
        Order::Trunc(tau) => {
            let p = g.reduced_ramification() as i64;
            let bar = (tau * Rational64::from_integer(p)).ceil().to_integer();
            match g.max_exponent() {
                Some(l) => {
                    let q = (l * Rational64::from_integer(p)).to_integer();
                    Some((bar + q).max(0))
                }
                None => Some(0),
            }
        }
    }
}

/// Invert a truncated series with a single dominant term: returns `ψ`
/// with `w_of_z(ψ(w)) = w` up to the guaranteed order, anchored at the
/// image base point (`∞` for a growing series, the origin for a decaying
/// one). The branch of the leading root is chosen so that the lift of
/// `arg ψ` converges to the lift of `dir`.
pub fn invert_series(w_of_z: &PuiseuxGerm, dir: &Direction) -> Result<PuiseuxGerm> {
    let p = w_of_z.reduced_ramification() as i64;
    let inv = invert_with_target(w_of_z, dir, p, DEFAULT_PRECISION as i64 + 4)?;
    let target_base = inv.target_base_at(Complex64::ZERO);
    Ok(cover_to_germ(
        &inv.u.powi(inv.affine_pow)?,
        inv.n,
        target_base,
    ))
}

/// Series inversion data on the covers.
struct Inversion {
    /// The source cover variable as a series in the target cover variable.
    u: TruncLaurent,
    /// Power mapping the source cover variable to the affine source value
    /// (`+p` at a finite base, `−p` at `∞`).
    affine_pow: i64,
    /// Target cover index `N = |c0|` and the equation exponent `c0`.
    n: u32,
    c0: i64,
    target_lift: f64,
    gamma_abs: f64,
}

impl Inversion {
    fn target_base_at(&self, finite_point: Complex64) -> BasePoint {
        if self.c0 < 0 {
            BasePoint::Infinity
        } else {
            BasePoint::Finite(finite_point)
        }
    }
}

fn invert_with_target(
    w_of_z: &PuiseuxGerm,
    dir: &Direction,
    p: i64,
    b_target: i64,
) -> Result<Inversion> {
    if dir.base != w_of_z.base() {
        return Err(Error::MismatchedBasePoint(
            w_of_z.base().to_string(),
            dir.base.to_string(),
        ));
    }
    let nu = match order_or_truncation(w_of_z)? {
        PoleOrder::Finite(n) if !n.is_zero() => n,
        _ => return Err(Error::NotInvertible),
    };
    let w_cover = germ_to_cover(w_of_z, p);
    let c0 = -(nu * Rational64::from_integer(p)).to_integer();
    let n = c0.unsigned_abs() as u32;
    let gamma = w_cover.coeff(c0);
    let sign_src = w_of_z.base().local_phase_sign();
    let theta_src = dir.lift();
    let target_lift = gamma.arg() - rational_to_f64(nu) * sign_src * theta_src;
    let sign_tgt = if c0 < 0 { -1.0 } else { 1.0 };
    let s0 = Complex64::from_polar(
        gamma.norm().powf(-1.0 / c0 as f64),
        sign_src * theta_src / p as f64 - sign_tgt * target_lift / n as f64,
    );
    let u = cover::invert(&w_cover, c0, s0, b_target)?;
    let affine_pow = if w_of_z.base().is_infinity() { -p } else { p };
    Ok(Inversion {
        u,
        affine_pow,
        n,
        c0,
        target_lift,
        gamma_abs: gamma.norm(),
    })
}

/// Legendre transform of an admissible directed germ, truncated to at
/// least `precision` guaranteed output terms.
pub fn legendre_transform(f: &DirectedGerm, precision: usize) -> Result<LegendrePair> {
    transform_engine(f, precision, false)
}

/// Inverse Legendre transform, with the sign conventions of the inverse
/// symplectic map: `z = −g′(w)` is inverted and `f = g(ψ) + ψ·z`.
pub fn inverse_legendre(g: &DirectedGerm, precision: usize) -> Result<LegendrePair> {
    transform_engine(g, precision, true)
}

fn transform_engine(src: &DirectedGerm, precision: usize, inverse: bool) -> Result<LegendrePair> {
    let sigma = if inverse { -1.0 } else { 1.0 };
    let case = classify(src)?;
    if let AdmissibilityClass::Inadmissible(r) = &case {
        return Err(Error::InadmissibleGerm(format!("{:?}", r)));
    }

    // split off the linear part at ∞; it relocates the target point
    let one = Rational64::from_integer(1);
    let (working, linear_coeff) = match (src.germ.base(), &case) {
        (BasePoint::Infinity, AdmissibilityClass::CaseLinearTwistToFinite { b, .. }) => {
            let reduced = src
                .germ
                .sub(&PuiseuxGerm::monomial(BasePoint::Infinity, one, *b))?;
            (reduced, *b)
        }
        _ => (src.germ.clone(), Complex64::ZERO),
    };

    if let Some(slots) = guaranteed_slots(&working) {
        if slots < precision as i64 {
            return Err(Error::TruncationInsufficient(format!(
                "input germ guarantees {} lattice slots, {} requested",
                slots, precision
            )));
        }
    }

    let w_series = working.derive().scale(Complex64::new(sigma, 0.0));
    let p = (working.reduced_ramification() as i64).lcm(&(w_series.reduced_ramification() as i64));
    let inv = invert_with_target(&w_series, &src.dir, p, precision as i64 + 4)?;

    let compose = |u: &TruncLaurent| -> Result<(TruncLaurent, TruncLaurent)> {
        // F = Σ c_μ u^(−pμ) with the source window mapped through, and
        // S = z·(target variable) = u^(±p)·v^(c0)
        let mut f_cover = TruncLaurent::zero(None);
        for (mu, c) in working.terms() {
            let e = -(mu * Rational64::from_integer(p)).to_integer();
            f_cover = f_cover.add(&u.powi(e)?.scale(*c));
        }
        if let Order::Trunc(tau) = working.order() {
            let bar = (tau * Rational64::from_integer(p)).ceil().to_integer();
            f_cover = f_cover.truncate_to(bar);
        }
        let s_cover = u
            .powi(inv.affine_pow)?
            .mul_monomial(inv.c0, Complex64::new(1.0, 0.0));
        Ok((f_cover, s_cover))
    };

    let (f_full, s_full) = compose(&inv.u)?;
    let out_cover = if inverse {
        f_full.add(&s_full)
    } else {
        f_full.sub(&s_full)
    };

    let out_slots = match out_cover.bound() {
        Some(b) => b - out_cover.effective_lead(),
        None => i64::MAX,
    };
    if out_slots < precision as i64 {
        return Err(Error::TruncationInsufficient(format!(
            "transform output guarantees {} lattice slots, {} requested",
            out_slots, precision
        )));
    }

    let target_base = inv.target_base_at(linear_coeff * sigma);
    let source_offset = match (target_base, src.germ.base()) {
        (BasePoint::Infinity, BasePoint::Finite(a)) => a,
        _ => Complex64::ZERO,
    };

    let core = cover_to_germ(&out_cover, inv.n, target_base);

    // residual of the defining identity, recomputed from rounded artifacts
    let u_rounded = round_cover(&inv.u);
    let (f_r, s_r) = compose(&u_rounded)?;
    let reconstructed = if inverse { f_r.add(&s_r) } else { f_r.sub(&s_r) };
    let diff = reconstructed.sub(&germ_to_cover(&core, inv.n as i64));
    let residual = diff
        .iter()
        .filter(|(e, _)| diff.bound().map_or(true, |b| *e < b))
        .fold(0.0f64, |m, (_, c)| m.max(c.norm()));

    // a finite source base contributes the linear term −σ·a·(target var)
    let out_germ = if source_offset != Complex64::ZERO {
        core.add(&PuiseuxGerm::monomial(
            target_base,
            one,
            -source_offset * sigma,
        ))?
    } else {
        core
    };

    let psi_local = cover_to_germ(&u_rounded.powi(inv.affine_pow)?, inv.n, target_base);
    let psi = if source_offset != Complex64::ZERO {
        psi_local.add(&PuiseuxGerm::constant(target_base, source_offset))?
    } else {
        psi_local
    };

    let cover_out = out_germ.reduced_ramification();
    let target_dir = Direction::from_lift(target_base, inv.target_lift, cover_out);

    Ok(LegendrePair {
        source: src.clone(),
        target: DirectedGerm::new(out_germ, target_dir)?,
        psi,
        case,
        residual,
        target_lift: inv.target_lift,
        beta: Complex64::from_polar(inv.gamma_abs, inv.target_lift),
        inverse,
    })
}

fn round_cover(s: &TruncLaurent) -> TruncLaurent {
    let cut = EPS_ZERO * s.max_abs();
    let coeffs: Vec<(i64, Complex64)> = s.iter().filter(|(_, c)| c.norm() > cut).collect();
    let lead = coeffs.first().map(|(e, _)| *e).unwrap_or(0);
    let top = coeffs.last().map(|(e, _)| *e).unwrap_or(0);
    let mut v = vec![Complex64::ZERO; (top - lead + 1).max(0) as usize];
    for (e, c) in &coeffs {
        v[(e - lead) as usize] = *c;
    }
    TruncLaurent::new(lead, v, s.bound())
}

/// Lift a germ onto its integer-exponent cover `ℓ = u^p`; the stored
/// exponent `μ` lands at `u`-exponent `−pμ`.
fn germ_to_cover(g: &PuiseuxGerm, p: i64) -> TruncLaurent {
    let mut entries: Vec<(i64, Complex64)> = g
        .terms()
        .map(|(mu, c)| {
            let e = mu * Rational64::from_integer(p);
            debug_assert!(e.is_integer(), "germ exponent off the cover lattice");
            (-e.to_integer(), *c)
        })
        .collect();
    entries.sort_by_key(|(e, _)| *e);
    let bound = match g.order() {
        Order::Exact => None,
        Order::Trunc(tau) => Some((tau * Rational64::from_integer(p)).ceil().to_integer()),
    };
    let lead = entries.first().map(|(e, _)| *e).unwrap_or(0);
    let top = entries.last().map(|(e, _)| *e).unwrap_or(0);
    let mut coeffs = vec![Complex64::ZERO; (top - lead + 1).max(0) as usize];
    for (e, c) in entries {
        coeffs[(e - lead) as usize] = c;
    }
    TruncLaurent::new(lead, coeffs, bound)
}

/// Project a cover series back to a germ: `v`-exponent `e` carries the
/// pole-scale exponent `−e/N`.
fn cover_to_germ(s: &TruncLaurent, n: u32, base: BasePoint) -> PuiseuxGerm {
    let order = match s.bound() {
        None => Order::Exact,
        Some(b) => Order::Trunc(Rational64::new(b, n as i64)),
    };
    PuiseuxGerm::new(
        base,
        1,
        s.iter().map(|(e, c)| (Rational64::new(-e, n as i64), c)),
        order,
    )
}
