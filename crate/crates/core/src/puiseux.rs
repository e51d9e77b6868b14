//! Truncated Puiseux-series ring on the projective line.
//!
//! A germ is anchored at a base point `a` (a finite point or `∞`) and is
//! stored in the *pole scale* of the local coordinate `ℓ_a`:
//!
//! ```text
//!     f = Σ_μ c_μ · ℓ_a^(−μ),      ℓ_a = z − a  (finite a),
//!                                  ℓ_a = 1/z    (a = ∞),
//! ```
//!
//! so a positive exponent `μ` is a pole of order `μ` regardless of the
//! base kind, and `pole_order(f)` is the largest stored exponent. Exponents
//! are exact rationals whose denominators divide the ramification index
//! `p`; the germ lives on the `p`-fold cover of the circle of directions.
//!
//! Truncation is a first-class contract: a germ equals its stored terms
//! plus an unknown remainder `O(ℓ_a^τ)`, and every operation propagates
//! the guaranteed window explicitly. Germs that are known exactly (finite
//! expressions) carry [`Order::Exact`] instead of a finite `τ`.
//!
//! Directions on the circle carry an integer branch lift: the direction
//! `(φ, k)` stands for the lifted angle `Θ = φ + 2πk` of the affine
//! coordinate, and every determination-dependent quantity (leading
//! coefficients, comparisons, evaluation) consumes the lift.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::tolerances::{EPS_ZERO, RAY_MERGE_TOL};
use crate::Result;

/// Exponent in the pole scale: the term it indexes is `c · ℓ_a^(−value)`,
/// so positive values are poles. Stored in lowest terms.
pub type Exponent = Rational64;

/// Complex coefficient of a germ term.
pub type Coeff = Complex64;

/// Anchor point of a germ on the projective line.
///
/// The local coordinate is fixed, not configurable: `z − a` at a finite
/// point, `1/z` at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePoint {
    Finite(Complex64),
    Infinity,
}

impl BasePoint {
    /// Sign `ς` relating the lifted direction angle `Θ` (argument of the
    /// affine coordinate) to the argument of the local coordinate:
    /// `arg ℓ_a = ς · Θ`.
    pub(crate) fn local_phase_sign(self) -> f64 {
        match self {
            BasePoint::Finite(_) => 1.0,
            BasePoint::Infinity => -1.0,
        }
    }

    /// Absolute value of the local coordinate at `z`.
    pub(crate) fn local_abs(self, z: Complex64) -> f64 {
        match self {
            BasePoint::Finite(a) => (z - a).norm(),
            BasePoint::Infinity => z.norm().recip(),
        }
    }

    /// Argument of the affine coordinate at `z` (principal value), i.e.
    /// `arg(z − a)` at a finite point and `arg z` at infinity.
    pub(crate) fn affine_arg(self, z: Complex64) -> f64 {
        match self {
            BasePoint::Finite(a) => (z - a).arg(),
            BasePoint::Infinity => z.arg(),
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, BasePoint::Infinity)
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Finite(a) => write!(f, "{}+{}i", a.re, a.im),
            BasePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// A direction on the circle of tangent directions at a base point,
/// together with a branch determination.
///
/// The lifted argument of the affine coordinate at this direction is
/// `Θ = angle + 2π·branch`; fractional powers `ℓ_a^(−μ)` evaluate as
/// `t^(−μ)·exp(−i μ ς Θ)` with `t = |ℓ_a|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub base: BasePoint,
    /// Angle `φ ∈ [0, 2π)` of the affine coordinate.
    pub angle: f64,
    /// Branch index `k`, normally `0 ≤ k < p` for the germ at hand.
    pub branch: u32,
}

impl Direction {
    pub fn new(base: BasePoint, angle: f64, branch: u32) -> Self {
        Direction {
            base,
            angle: angle.rem_euclid(TAU),
            branch,
        }
    }

    /// Lifted angle `Θ = φ + 2πk`.
    pub fn lift(&self) -> f64 {
        self.angle + TAU * self.branch as f64
    }

    /// Build a direction from a lifted angle, reducing the lift modulo
    /// `2πp` into the fundamental domain of the `p`-fold cover.
    pub fn from_lift(base: BasePoint, lift: f64, cover: u32) -> Self {
        let period = TAU * cover.max(1) as f64;
        let wrapped = lift.rem_euclid(period);
        let mut branch = (wrapped / TAU).floor() as i64;
        let mut angle = wrapped - TAU * branch as f64;
        // guard against rounding placing angle at exactly 2π
        if angle >= TAU {
            angle -= TAU;
            branch += 1;
        }
        let branch = branch.rem_euclid(cover.max(1) as i64) as u32;
        Direction {
            base,
            angle,
            branch,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(φ={:.6}, k={})", self.angle, self.branch)
    }
}

/// Outcome of comparing the growth of two germs at a direction.
///
/// `StrictlyBelow` means `h ≺_θ f` (the second argument of
/// [`compare_at`] is dominated), `Incomparable` means `θ` is a Stokes
/// direction of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Equivalent,
    StrictlyBelow,
    StrictlyAbove,
    Incomparable,
}

/// Pole order of a germ: the largest stored exponent, or `−∞` for the
/// zero germ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleOrder {
    NegInfinity,
    Finite(Rational64),
}

impl PoleOrder {
    pub fn as_rational(self) -> Option<Rational64> {
        match self {
            PoleOrder::Finite(r) => Some(r),
            PoleOrder::NegInfinity => None,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, PoleOrder::Finite(r) if r.is_positive())
    }
}

impl fmt::Display for PoleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoleOrder::NegInfinity => write!(f, "-inf"),
            PoleOrder::Finite(r) => write!(f, "{}", r),
        }
    }
}

/// Guaranteed truncation window of a germ.
///
/// `Trunc(τ)` means the germ equals its stored terms plus an unknown
/// remainder `O(ℓ_a^τ)`; every exponent with `μ > −τ` is stored. `Exact`
/// marks a germ known in closed form (missing terms are genuinely zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Exact,
    Trunc(Rational64),
}

impl Order {
    pub fn min(self, other: Order) -> Order {
        match (self, other) {
            (Order::Exact, o) | (o, Order::Exact) => o,
            (Order::Trunc(a), Order::Trunc(b)) => Order::Trunc(a.min(b)),
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Order::Exact)
    }

    /// True if boundedness of the tail is guaranteed: the remainder can
    /// only contain non-positive pole exponents.
    fn tail_bounded(self) -> bool {
        match self {
            Order::Exact => true,
            Order::Trunc(t) => t.is_positive(),
        }
    }

    fn shift(self, delta: Rational64) -> Order {
        match self {
            Order::Exact => Order::Exact,
            Order::Trunc(t) => Order::Trunc(t + delta),
        }
    }
}

/// Truncated Puiseux germ, the central value type of the library.
#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxGerm {
    base: BasePoint,
    ramification: u32,
    terms: BTreeMap<Exponent, Coeff>,
    order: Order,
}

impl PuiseuxGerm {
    /// Build a germ from pole-scale terms. The declared ramification is
    /// extended to the least common multiple with all term denominators;
    /// terms outside the guaranteed window are dropped, and repeated
    /// exponents accumulate with cancellation tracking: a slot whose sum
    /// is below the zero tolerance relative to what was summed into it is
    /// treated as zero. (A germ may legitimately store coefficients of
    /// vastly different magnitudes, so dust detection is per slot, not
    /// against the global maximum.)
    pub fn new(
        base: BasePoint,
        ramification: u32,
        terms: impl IntoIterator<Item = (Exponent, Coeff)>,
        order: Order,
    ) -> Self {
        Self::accumulate(
            base,
            ramification,
            terms.into_iter().map(|(e, c)| (e, c, c.norm())),
            order,
        )
    }

    /// Accumulating constructor: each contribution carries the magnitude
    /// scale it was computed at, so cancellation dust can be recognized.
    pub(crate) fn accumulate(
        base: BasePoint,
        ramification: u32,
        terms: impl IntoIterator<Item = (Exponent, Coeff, f64)>,
        order: Order,
    ) -> Self {
        let mut map: BTreeMap<Exponent, (Coeff, f64)> = BTreeMap::new();
        for (e, c, mag) in terms {
            let slot = map.entry(e).or_insert((Complex64::ZERO, 0.0));
            slot.0 += c;
            slot.1 += mag;
        }
        map.retain(|_, (c, mag)| c.norm() > EPS_ZERO * *mag && c.norm() > 0.0);
        let mut g = PuiseuxGerm {
            base,
            ramification: ramification.max(1),
            terms: map.into_iter().map(|(e, (c, _))| (e, c)).collect(),
            order,
        };
        g.normalize();
        g
    }

    /// The zero germ, exact.
    pub fn zero(base: BasePoint) -> Self {
        PuiseuxGerm {
            base,
            ramification: 1,
            terms: BTreeMap::new(),
            order: Order::Exact,
        }
    }

    /// Constant germ `c`, exact.
    pub fn constant(base: BasePoint, c: Coeff) -> Self {
        Self::new(base, 1, [(Rational64::zero(), c)], Order::Exact)
    }

    /// Single-term germ `c · ℓ_a^(−μ)`, exact.
    pub fn monomial(base: BasePoint, pole_exp: Exponent, c: Coeff) -> Self {
        Self::new(base, 1, [(pole_exp, c)], Order::Exact)
    }

    pub fn base(&self) -> BasePoint {
        self.base
    }

    pub fn ramification(&self) -> u32 {
        self.ramification
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// Stored terms, ascending by exponent.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored coefficient of `ℓ_a^(−μ)`, zero if absent.
    pub fn coeff(&self, mu: Exponent) -> Coeff {
        self.terms.get(&mu).copied().unwrap_or(Complex64::ZERO)
    }

    /// Largest stored exponent, `None` for the zero germ.
    pub fn max_exponent(&self) -> Option<Exponent> {
        self.terms.keys().next_back().copied()
    }

    /// Least common multiple of the stored exponent denominators (1 for
    /// the zero germ). This is the finest cover the germ actually needs,
    /// as opposed to the declared `ramification`.
    pub fn reduced_ramification(&self) -> u32 {
        self.terms
            .keys()
            .fold(1i64, |acc, e| acc.lcm(e.denom()))
            .max(1) as u32
    }

    /// Replace the truncation contract. The stored terms are re-filtered
    /// against the new window.
    pub fn with_order(&self, order: Order) -> Self {
        let mut g = self.clone();
        g.order = order;
        g.normalize();
        g
    }

    /// Largest stored coefficient magnitude (0 for the zero germ).
    pub fn max_coeff_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    fn normalize(&mut self) {
        // window: stored exponents must satisfy μ > −τ
        if let Order::Trunc(tau) = self.order {
            let bar = -tau;
            self.terms.retain(|e, _| *e > bar);
        }
        let max = self.terms.values().fold(0.0f64, |m, c| m.max(c.norm()));
        if max == 0.0 {
            self.terms.clear();
        } else {
            let cut = EPS_ZERO * max;
            self.terms.retain(|_, c| c.norm() > cut);
        }
        let denom_lcm = self
            .terms
            .keys()
            .fold(self.ramification as i64, |acc, e| acc.lcm(e.denom()));
        self.ramification = denom_lcm.max(1) as u32;
    }

    fn same_base(&self, other: &PuiseuxGerm) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(Error::MismatchedBasePoint(
                self.base.to_string(),
                other.base.to_string(),
            ))
        }
    }

    /// Termwise sum. Ramifications merge to their lcm and the guaranteed
    /// window is the intersection (`τ = min(τ_f, τ_g)`).
    pub fn add(&self, other: &PuiseuxGerm) -> Result<PuiseuxGerm> {
        self.same_base(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(*e).or_insert(Complex64::ZERO) += c;
        }
        Ok(PuiseuxGerm::new(
            self.base,
            (self.ramification as i64).lcm(&(other.ramification as i64)) as u32,
            terms,
            self.order.min(other.order),
        ))
    }

    pub fn neg(&self) -> PuiseuxGerm {
        let mut g = self.clone();
        for c in g.terms.values_mut() {
            *c = -*c;
        }
        g
    }

    pub fn sub(&self, other: &PuiseuxGerm) -> Result<PuiseuxGerm> {
        self.add(&other.neg())
    }

    /// Multiply by a complex scalar.
    pub fn scale(&self, s: Coeff) -> PuiseuxGerm {
        PuiseuxGerm::new(
            self.base,
            self.ramification,
            self.terms.iter().map(|(e, c)| (*e, c * s)),
            self.order,
        )
    }

    /// Cauchy product truncated to the window both factors can guarantee:
    /// `τ = min(τ_f − λ_g, τ_g − λ_f)` with `λ` the pole orders (terms
    /// with an undefined contribution are skipped; two exact factors give
    /// an exact product).
    pub fn mul(&self, other: &PuiseuxGerm) -> Result<PuiseuxGerm> {
        self.same_base(other)?;
        let mut candidates: Vec<Rational64> = Vec::new();
        if let Order::Trunc(tf) = self.order {
            if let Some(lg) = other.max_exponent() {
                candidates.push(tf - lg);
            }
            if let Order::Trunc(tg) = other.order {
                candidates.push(tf + tg);
            }
        }
        if let Order::Trunc(tg) = other.order {
            if let Some(lf) = self.max_exponent() {
                candidates.push(tg - lf);
            }
        }
        let order = match candidates.into_iter().min() {
            Some(t) => Order::Trunc(t),
            None => Order::Exact,
        };
        let mut terms: BTreeMap<Exponent, Coeff> = BTreeMap::new();
        for (ef, cf) in &self.terms {
            for (eg, cg) in &other.terms {
                *terms.entry(ef + eg).or_insert(Complex64::ZERO) += cf * cg;
            }
        }
        Ok(PuiseuxGerm::new(
            self.base,
            (self.ramification as i64).lcm(&(other.ramification as i64)) as u32,
            terms,
            order,
        ))
    }

    /// Derivative with respect to the global coordinate `z`.
    ///
    /// At a finite point `d/dz ℓ^(−μ) = −μ ℓ^(−μ−1)`; at infinity the
    /// stored term is `c z^μ` and `d/dz z^μ = μ z^(μ−1)`.
    pub fn derive(&self) -> PuiseuxGerm {
        let one = Rational64::from_integer(1);
        let (shift, coeff_sign) = match self.base {
            BasePoint::Finite(_) => (one, -1.0),
            BasePoint::Infinity => (-one, 1.0),
        };
        let terms = self.terms.iter().filter_map(|(e, c)| {
            if e.is_zero() {
                None
            } else {
                let factor = coeff_sign * rational_to_f64(*e);
                Some((e + shift, c * factor))
            }
        });
        PuiseuxGerm::new(
            self.base,
            self.ramification,
            terms,
            self.order.shift(-shift),
        )
    }

    /// Pole order `ord_a(f)`, with `ord_a(0) = −∞` when the tail is
    /// guaranteed bounded.
    pub fn pole_order(&self) -> Result<PoleOrder> {
        match self.max_exponent() {
            Some(l) if l.is_positive() => Ok(PoleOrder::Finite(l)),
            Some(l) => {
                if self.order.tail_bounded() {
                    Ok(PoleOrder::Finite(l))
                } else {
                    Err(Error::IndeterminateOrder(format!("{:?}", self.order)))
                }
            }
            None => {
                if self.order.tail_bounded() {
                    Ok(PoleOrder::NegInfinity)
                } else {
                    Err(Error::IndeterminateOrder(format!("{:?}", self.order)))
                }
            }
        }
    }

    /// Leading coefficient with respect to the determination fixed by
    /// `dir`: the raw stored coefficient rotated by the branch phase, so
    /// that the value matches the chosen branch of `ℓ_a^(−λ)`. Branch 0
    /// returns the stored coefficient unchanged.
    pub fn sigma(&self, dir: &Direction) -> Result<Coeff> {
        if dir.base != self.base {
            return Err(Error::MismatchedBasePoint(
                self.base.to_string(),
                dir.base.to_string(),
            ));
        }
        let lambda = self.max_exponent().ok_or(Error::ZeroGerm)?;
        let c = self.terms[&lambda];
        let sign = self.base.local_phase_sign();
        let k = Rational64::from_integer(dir.branch as i64);
        Ok(c * branch_phase(lambda * k, sign))
    }

    /// Analytic continuation once counterclockwise around the base point
    /// (with respect to the local coordinate): `c_μ ↦ c_μ·e^(−2πiμ)`.
    pub fn monodromy(&self) -> PuiseuxGerm {
        self.monodromy_pow(1)
    }

    /// `j`-fold monodromy in a single step. The rotation of each term is
    /// computed from the reduced fraction `jμ mod 1`, so `j = p` returns
    /// the germ bit-exactly.
    pub fn monodromy_pow(&self, j: i64) -> PuiseuxGerm {
        let terms = self.terms.iter().map(|(e, c)| {
            let turns = e * Rational64::from_integer(j);
            (*e, c * unit_phase(turns))
        });
        PuiseuxGerm::new(self.base, self.ramification, terms, self.order)
    }

    /// Class equality in the quotient modulo bounded germs:
    /// `[f] = [h]` iff `pole_order(h − f) ≤ 0`, with coefficient zero
    /// tests taken relative to the operands' scale.
    pub fn same_class(&self, other: &PuiseuxGerm) -> Result<bool> {
        let d = class_difference(self, other)?;
        match d.max_exponent() {
            Some(l) if l.is_positive() => Ok(false),
            _ => {
                if d.order.tail_bounded() {
                    Ok(true)
                } else {
                    Err(Error::TruncationInsufficient(
                        "difference bounded among stored terms but the tail is unresolved".into(),
                    ))
                }
            }
        }
    }

    /// Representative of the class of `f`: the polar part (terms with
    /// `μ > 0` only), which is exact once the tail is known bounded.
    pub fn polar_part(&self) -> Result<PuiseuxGerm> {
        if !self.order.tail_bounded() {
            return Err(Error::TruncationInsufficient(
                "polar part undetermined: tail may contain poles".into(),
            ));
        }
        Ok(PuiseuxGerm::new(
            self.base,
            1,
            self.terms
                .iter()
                .filter(|(e, _)| e.is_positive())
                .map(|(e, c)| (*e, *c)),
            Order::Exact,
        ))
    }

    /// Evaluate the stored terms at a point `z` lying in a sector around
    /// the anchoring direction, using the branch lift of `dir`.
    pub fn evaluate(&self, z: Complex64, dir: &Direction) -> Result<Complex64> {
        if dir.base != self.base {
            return Err(Error::MismatchedBasePoint(
                self.base.to_string(),
                dir.base.to_string(),
            ));
        }
        let lambda = self
            .max_exponent()
            .map(rational_to_f64)
            .unwrap_or(0.0)
            .max(1.0);
        let diff = wrap_angle(self.base.affine_arg(z) - dir.angle);
        if self.base.local_abs(z) == 0.0 || !diff.is_finite() || diff.abs() > PI / (2.0 * lambda) {
            return Err(Error::OutOfSector);
        }
        Ok(self.evaluate_unchecked(z, dir))
    }

    /// Evaluation without the sector pre-check; the branch lift is still
    /// taken from `dir`. Used by the numeric oracle whose iterates may
    /// wander slightly outside the nominal sector.
    pub fn evaluate_unchecked(&self, z: Complex64, dir: &Direction) -> Complex64 {
        let t = self.base.local_abs(z);
        let theta = dir.lift() + wrap_angle(self.base.affine_arg(z) - dir.angle);
        let sign = self.base.local_phase_sign();
        let mut acc = Complex64::ZERO;
        for (e, c) in &self.terms {
            let mu = rational_to_f64(*e);
            acc += c * t.powf(-mu) * Complex64::cis(-mu * sign * theta);
        }
        acc
    }
}

/// Directional growth comparison of `h` against `f`.
///
/// With `d = h − f`: a bounded difference gives `Equivalent`; otherwise
/// the sign of `Re` of the leading term of `d` along the lifted direction
/// decides (`< 0` gives `StrictlyBelow`, i.e. `h ≺_θ f`), and a vanishing
/// real part — within the zero tolerance — is a Stokes direction and
/// gives `Incomparable`. Lower-order terms never change the answer at a
/// transversal zero, so the leading term suffices.
pub fn compare_at(f: &PuiseuxGerm, h: &PuiseuxGerm, dir: &Direction) -> Result<Comparison> {
    if dir.base != f.base {
        return Err(Error::MismatchedBasePoint(
            f.base.to_string(),
            dir.base.to_string(),
        ));
    }
    let d = class_difference(f, h)?;
    match d.max_exponent() {
        Some(lambda) if lambda.is_positive() => {
            let c = d.terms[&lambda];
            let sign = d.base.local_phase_sign();
            let r = (c * Complex64::cis(-rational_to_f64(lambda) * sign * dir.lift())).re;
            if r.abs() <= EPS_ZERO * c.norm() {
                Ok(Comparison::Incomparable)
            } else if r < 0.0 {
                Ok(Comparison::StrictlyBelow)
            } else {
                Ok(Comparison::StrictlyAbove)
            }
        }
        _ => {
            if d.order.tail_bounded() {
                Ok(Comparison::Equivalent)
            } else {
                Err(Error::TruncationInsufficient(
                    "leading term of the difference is not determined".into(),
                ))
            }
        }
    }
}

/// Stokes directions of the pair `(f, h)`: the lifted directions
/// `Θ ∈ [0, 2πp)` where the real part of the leading term of `h − f`
/// vanishes, reported as `(φ, k)` pairs sorted by `Θ`. Empty when the
/// classes coincide (or cannot be told apart within the stored window).
pub fn stokes_directions(f: &PuiseuxGerm, h: &PuiseuxGerm) -> Result<Vec<Direction>> {
    let d = class_difference(f, h)?;
    let lambda = match d.max_exponent() {
        Some(l) if l.is_positive() => l,
        _ => return Ok(Vec::new()),
    };
    let p = d.ramification as i64;
    let q = (lambda * Rational64::from_integer(p)).to_integer();
    let c = d.terms[&lambda];
    let sign = d.base.local_phase_sign();
    let lam = rational_to_f64(lambda);
    let period = TAU * p as f64;
    // zeros of cos(arg c − λςΘ): Θ = ς(arg c − π/2 − nπ)/λ, spaced π/λ
    let theta0 = sign * (c.arg() - PI / 2.0) / lam;
    let step = PI / lam;
    let mut lifts: Vec<f64> = (0..2 * q)
        .map(|n| (theta0 - sign * step * n as f64).rem_euclid(period))
        .collect();
    lifts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // wrap-around duplicates can only arise from rounding at 0/2πp
    lifts.dedup_by(|a, b| (*a - *b).abs() < RAY_MERGE_TOL);
    if let (Some(first), Some(last)) = (lifts.first().copied(), lifts.last().copied()) {
        if lifts.len() > 1 && (last - first - period).abs() < RAY_MERGE_TOL {
            lifts.pop();
        }
    }
    Ok(lifts
        .into_iter()
        .map(|t| Direction::from_lift(d.base, t, d.ramification))
        .collect())
}

impl fmt::Display for PuiseuxGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (e, c)) in self.terms.iter().rev().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "({}+{}i)*l^(-{})", c.re, c.im, e)?;
            }
        }
        match self.order {
            Order::Exact => Ok(()),
            Order::Trunc(t) => write!(f, " + O(l^{})", t),
        }
    }
}

/// Difference `h − f` with coefficients below the operands' combined
/// zero tolerance dropped. Growth comparisons and class tests measure
/// cancellation against the inputs' scale, not against the (possibly
/// dust-sized) difference itself.
fn class_difference(f: &PuiseuxGerm, h: &PuiseuxGerm) -> Result<PuiseuxGerm> {
    let d = h.sub(f)?;
    let scale = f.max_coeff_abs().max(h.max_coeff_abs());
    if scale == 0.0 {
        return Ok(d);
    }
    let cut = EPS_ZERO * scale;
    Ok(PuiseuxGerm::new(
        d.base,
        d.ramification,
        d.terms.iter().filter(|(_, c)| c.norm() > cut).map(|(e, c)| (*e, *c)),
        d.order,
    ))
}

/// Exact-aware conversion of a reduced rational to `f64`.
pub(crate) fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `e^(−2πi·x)` with the fraction reduced modulo 1 first, so that the
/// rotation is bit-exact for integer, half and quarter turns and repeated
/// monodromy stays on the unit circle.
pub(crate) fn unit_phase(x: Rational64) -> Complex64 {
    let n = x.numer().rem_euclid(*x.denom());
    let d = *x.denom();
    if n == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * n == d {
        Complex64::new(-1.0, 0.0)
    } else if 4 * n == d {
        Complex64::new(0.0, -1.0)
    } else if 4 * n == 3 * d {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::cis(-TAU * (n as f64) / (d as f64))
    }
}

/// Branch rotation `e^(−2πi·ς·x)` applied to leading coefficients.
pub(crate) fn branch_phase(x: Rational64, local_sign: f64) -> Complex64 {
    if local_sign >= 0.0 {
        unit_phase(x)
    } else {
        unit_phase(-x)
    }
}

/// Wrap an angle into `(−π, π]`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}
