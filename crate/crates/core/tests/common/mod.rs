//! Shared helpers for the integration suites: seeded random germ
//! corpora and brute-force numeric classifiers that stay independent of
//! the symbolic code paths they check.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use statphase::puiseux::{BasePoint, Comparison, Direction, Order, PuiseuxGerm};
use statphase::DirectedGerm;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rc(rng: &mut ChaCha8Rng) -> Complex64 {
    let mag = rng.gen_range(0.3..2.5);
    let arg = rng.gen_range(0.0..TAU);
    Complex64::from_polar(mag, arg)
}

/// Random exact germ with leading pole exponent `lambda = q/p` and a few
/// lower terms on the `(1/p)`-lattice.
pub fn random_germ(
    rng: &mut ChaCha8Rng,
    base: BasePoint,
    p: i64,
    q: i64,
    extra_terms: usize,
) -> PuiseuxGerm {
    let lambda = Rational64::new(q, p);
    let mut terms = vec![(lambda, rc(rng))];
    let mut slot = q;
    for _ in 0..extra_terms {
        slot -= rng.gen_range(1..=2);
        if slot <= -3 * p {
            break;
        }
        terms.push((Rational64::new(slot, p), rc(rng)));
    }
    PuiseuxGerm::new(base, p as u32, terms, Order::Exact)
}

/// Which of the three transform cases a random source should exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    FiniteBase,
    LinearTwist,
    InfinityHigh,
}

pub const ALL_CASES: [CaseKind; 3] = [
    CaseKind::FiniteBase,
    CaseKind::LinearTwist,
    CaseKind::InfinityHigh,
];

/// Random admissible directed germ for the requested case, with exponent
/// denominators at most 4 and `λ` between 1/3 and 4.
pub fn random_admissible(rng: &mut ChaCha8Rng, kind: CaseKind) -> DirectedGerm {
    let p = rng.gen_range(1..=4i64);
    let (base, q) = match kind {
        CaseKind::FiniteBase => {
            let a = if rng.gen_bool(0.5) {
                Complex64::ZERO
            } else {
                Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            };
            let q_min = (p + 2) / 3;
            (BasePoint::Finite(a), rng.gen_range(q_min.max(1)..=4 * p))
        }
        CaseKind::LinearTwist => {
            let p = rng.gen_range(2..=4i64);
            return linear_twist_germ(rng, p);
        }
        CaseKind::InfinityHigh => {
            let q_min = p + 1;
            (BasePoint::Infinity, rng.gen_range(q_min..=4 * p))
        }
    };
    let extra = rng.gen_range(0..4);
    let germ = random_germ(rng, base, p, q, extra);
    directed(rng, germ)
}

fn linear_twist_germ(rng: &mut ChaCha8Rng, p: i64) -> DirectedGerm {
    let q = rng.gen_range(1..p);
    let extra = rng.gen_range(0..3);
    let mut germ = random_germ(rng, BasePoint::Infinity, p, q, extra);
    if rng.gen_bool(0.7) {
        let b = rc(rng);
        germ = germ
            .add(&PuiseuxGerm::monomial(
                BasePoint::Infinity,
                Rational64::new(1, 1),
                b,
            ))
            .unwrap();
    }
    directed(rng, germ)
}

pub fn directed(rng: &mut ChaCha8Rng, germ: PuiseuxGerm) -> DirectedGerm {
    let p = germ.reduced_ramification();
    let angle = rng.gen_range(0.0..TAU);
    let branch = rng.gen_range(0..p.max(1));
    let dir = Direction::new(germ.base(), angle, branch);
    DirectedGerm::new(germ, dir).unwrap()
}

/// Brute-force growth classification of `h` against `f` along a ray,
/// from values of `Re(h − f)` at shrinking radii on the ray and two
/// flanking rays. Mirrors the contract of `compare_at` without looking
/// at exponents.
pub fn numeric_compare(
    f: &PuiseuxGerm,
    h: &PuiseuxGerm,
    dir: &Direction,
) -> Option<Comparison> {
    let lambda = f
        .max_exponent()
        .into_iter()
        .chain(h.max_exponent())
        .map(|r| (*r.numer() as f64 / *r.denom() as f64).abs())
        .fold(1.0f64, f64::max);
    let delta = PI / (16.0 * lambda);
    let growth = |angle_offset: f64| -> Option<f64> {
        // returns the signed growth verdict: ±1 for divergence, 0 bounded
        let probe = Direction::new(dir.base, dir.angle, dir.branch);
        let mut first = None;
        let mut last = 0.0f64;
        for k in 0..7 {
            let t = match dir.base {
                BasePoint::Finite(_) => 1e-1 * 10f64.powi(-(k as i32)),
                BasePoint::Infinity => 1e1 * 10f64.powi(k as i32),
            };
            let z = match dir.base {
                BasePoint::Finite(a) => a + Complex64::from_polar(t, dir.angle + angle_offset),
                BasePoint::Infinity => Complex64::from_polar(t, dir.angle + angle_offset),
            };
            let v = h.evaluate_unchecked(z, &probe) - f.evaluate_unchecked(z, &probe);
            if !v.re.is_finite() {
                return None;
            }
            if first.is_none() {
                first = Some(v.re);
            }
            last = v.re;
        }
        let base = first.unwrap_or(0.0).abs().max(1.0);
        if last.abs() <= 50.0 * base {
            Some(0.0)
        } else {
            Some(last.signum())
        }
    };
    // flanks that straddle a nearby Stokes ray disagree; a direction that
    // is not itself Stokes gives stable agreement once the flanks shrink
    // inside its sector
    let mut verdict = Comparison::Incomparable;
    let mut d = delta;
    for _ in 0..4 {
        let minus = growth(-d)?;
        let plus = growth(d)?;
        match (minus as i8, plus as i8) {
            (0, 0) => return Some(Comparison::Equivalent),
            (a, b) if a == b && a < 0 => return Some(Comparison::StrictlyBelow),
            (a, b) if a == b && a > 0 => return Some(Comparison::StrictlyAbove),
            _ => verdict = Comparison::Incomparable,
        }
        d /= 4.0;
    }
    Some(verdict)
}

/// Count and locate sign changes of `Re(h − f)` on a fine angular grid of
/// the lifted cover circle, at a radius deep enough for the leading term
/// to dominate. Returns the crossing angles.
pub fn scan_stokes_rays(f: &PuiseuxGerm, h: &PuiseuxGerm, cover: u32) -> Vec<f64> {
    let period = TAU * cover as f64;
    let n = 4096usize;
    let t = match f.base() {
        BasePoint::Finite(_) => 1e-7,
        BasePoint::Infinity => 1e7,
    };
    let values: Vec<f64> = (0..n)
        .map(|k| {
            let theta = period * k as f64 / n as f64;
            let dir = Direction::from_lift(f.base(), theta, cover);
            let z = match f.base() {
                BasePoint::Finite(a) => a + Complex64::from_polar(t, dir.angle),
                BasePoint::Infinity => Complex64::from_polar(t, dir.angle),
            };
            (h.evaluate_unchecked(z, &dir) - f.evaluate_unchecked(z, &dir)).re
        })
        .collect();
    let mut crossings = Vec::new();
    for k in 0..n {
        let a = values[k];
        let b = values[(k + 1) % n];
        if a == 0.0 || a.signum() != b.signum() {
            // linear interpolation inside the grid cell
            let frac = if (b - a).abs() > 0.0 { a / (a - b) } else { 0.5 };
            crossings.push(period * (k as f64 + frac) / n as f64);
        }
    }
    crossings
}
