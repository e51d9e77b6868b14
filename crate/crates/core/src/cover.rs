//! Dense truncated Laurent series with integer exponents.
//!
//! The transform engine substitutes `ℓ_a = u^p` on the source side and
//! `ℓ_b = v^N` on the target side, which turns every Puiseux germ into a
//! Laurent series in a cover variable that tends to 0 along the ray. All
//! fractional-power branch choices then collapse into a single constant
//! (the seed coefficient of the inverse series); everything else is
//! integer-exponent arithmetic, which this module provides.
//!
//! Each series carries `bound`, the first exponent whose coefficient is
//! *not* guaranteed, mirroring the truncation contract of the germ ring
//! (`None` = all coefficients known). Arithmetic propagates bounds with
//! the same min-rules as the germ ring.

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

const ZERO_CUT: f64 = 1e-300;

/// `Σ_i coeffs[i] · x^(lead + i)`, unknown from exponent `bound` on.
#[derive(Debug, Clone)]
pub(crate) struct TruncLaurent {
    lead: i64,
    coeffs: Vec<Complex64>,
    bound: Option<i64>,
}

impl TruncLaurent {
    pub fn new(lead: i64, coeffs: Vec<Complex64>, bound: Option<i64>) -> Self {
        let mut s = TruncLaurent {
            lead,
            coeffs,
            bound,
        };
        s.trim();
        s
    }

    pub fn zero(bound: Option<i64>) -> Self {
        TruncLaurent {
            lead: 0,
            coeffs: Vec::new(),
            bound,
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(e: i64, c: Complex64) -> Self {
        TruncLaurent {
            lead: e,
            coeffs: vec![c],
            bound: None,
        }
    }

    pub fn bound(&self) -> Option<i64> {
        self.bound
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the first stored coefficient; for an all-zero series,
    /// the bound stands in (an exact zero counts as infinitely small).
    pub fn effective_lead(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.bound.unwrap_or(i64::MAX / 4)
        } else {
            self.lead
        }
    }

    pub fn coeff(&self, e: i64) -> Complex64 {
        if self.coeffs.is_empty() || e < self.lead {
            return Complex64::ZERO;
        }
        let i = (e - self.lead) as usize;
        self.coeffs.get(i).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > ZERO_CUT)
            .map(move |(i, c)| (self.lead + i as i64, *c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    fn trim(&mut self) {
        if let Some(b) = self.bound {
            let keep = (b - self.lead).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        while let Some(c) = self.coeffs.last() {
            if c.norm() <= ZERO_CUT {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        let strip = self
            .coeffs
            .iter()
            .take_while(|c| c.norm() <= ZERO_CUT)
            .count();
        if strip > 0 {
            self.coeffs.drain(..strip);
            self.lead += strip as i64;
        }
        if self.coeffs.is_empty() {
            self.lead = 0;
        }
    }

    /// Restrict the guaranteed window to exponents below `b`.
    pub fn truncate_to(&self, b: i64) -> Self {
        let bound = Some(self.bound.map_or(b, |old| old.min(b)));
        TruncLaurent::new(self.lead, self.coeffs.clone(), bound)
    }

    pub fn add(&self, other: &TruncLaurent) -> Self {
        let bound = opt_min(self.bound, other.bound);
        if self.coeffs.is_empty() {
            return TruncLaurent::new(other.lead, other.coeffs.clone(), bound);
        }
        if other.coeffs.is_empty() {
            return TruncLaurent::new(self.lead, self.coeffs.clone(), bound);
        }
        let lead = self.lead.min(other.lead);
        let top = (self.lead + self.coeffs.len() as i64).max(other.lead + other.coeffs.len() as i64);
        let mut coeffs = vec![Complex64::ZERO; (top - lead) as usize];
        for (e, c) in self.iter() {
            coeffs[(e - lead) as usize] += c;
        }
        for (e, c) in other.iter() {
            coeffs[(e - lead) as usize] += c;
        }
        TruncLaurent::new(lead, coeffs, bound)
    }

    pub fn neg(&self) -> Self {
        TruncLaurent {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            bound: self.bound,
        }
    }

    pub fn sub(&self, other: &TruncLaurent) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        TruncLaurent::new(
            self.lead,
            self.coeffs.iter().map(|c| c * s).collect(),
            self.bound,
        )
    }

    pub fn mul_monomial(&self, e: i64, c: Complex64) -> Self {
        TruncLaurent::new(
            self.lead + e,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.bound.map(|b| b + e),
        )
    }

    pub fn mul(&self, other: &TruncLaurent) -> Self {
        let mut cands: Vec<i64> = Vec::new();
        if let Some(bs) = self.bound {
            cands.push(bs + other.effective_lead().min(i64::MAX / 8));
            if let Some(bo) = other.bound {
                cands.push(bs + bo);
            }
        }
        if let Some(bo) = other.bound {
            cands.push(bo + self.effective_lead().min(i64::MAX / 8));
        }
        let bound = cands.into_iter().min();
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return TruncLaurent::zero(bound);
        }
        let lead = self.lead + other.lead;
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let cap = bound.map_or(len, |b| ((b - lead).max(0) as usize).min(len));
        let mut coeffs = vec![Complex64::ZERO; cap];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm() <= ZERO_CUT {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= cap {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        TruncLaurent::new(lead, coeffs, bound)
    }

    /// Integer power of a series with nonzero leading coefficient:
    /// `(c x^m (1 + e))^n = c^n x^(mn) (1 + e)^n` with the unit part
    /// raised by the binomial series.
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n == 0 {
            return Ok(TruncLaurent::one());
        }
        if self.coeffs.is_empty() {
            if n > 0 {
                return Ok(TruncLaurent::zero(self.bound.map(|b| b + (n - 1) * self.effective_lead())));
            }
            return Err(Error::NotInvertible);
        }
        let c = self.coeffs[0];
        let unit = self.mul_monomial(-self.lead, c.inv());
        let unit_pow = unit.binomial_pow(n as f64)?;
        Ok(unit_pow.mul_monomial(self.lead * n, c.powi(n as i32)))
    }

    /// `r`-th power of a series `c·(1 + e)` with leading exponent 0 and
    /// `e` supported in strictly positive exponents: `c^r Σ_k C(r, k) e^k`
    /// with the principal branch of `c^r`.
    pub fn binomial_pow(&self, r: f64) -> Result<Self> {
        if self.is_empty() || self.effective_lead() != 0 {
            return Err(Error::NoConvergence(
                "binomial power requires a unit leading term".into(),
            ));
        }
        let c0 = self.coeffs[0];
        let scale = c0.powf(r);
        let e = TruncLaurent::new(
            1,
            self.coeffs[1..].iter().map(|c| c / c0).collect(),
            self.bound.map(|b| b.max(1)),
        );
        if e.is_empty() {
            let one = TruncLaurent::monomial(0, scale);
            return Ok(match e.bound() {
                Some(b) => one.truncate_to(b),
                None => one,
            });
        }
        let kmax = match e.bound() {
            Some(b) => {
                let l = e.effective_lead();
                ((b + l - 1) / l).max(0) as usize
            }
            None => {
                // an unbounded series only terminates for integer r ≥ 0
                if r >= 0.0 && (r - r.round()).abs() < 1e-12 {
                    r.round() as usize
                } else {
                    return Err(Error::NoConvergence(
                        "non-terminating binomial power of an exact series".into(),
                    ));
                }
            }
        };
        let mut acc = TruncLaurent::one();
        let mut epow = TruncLaurent::one();
        let mut binom = 1.0f64;
        for k in 1..=kmax {
            binom *= (r - (k as f64 - 1.0)) / k as f64;
            epow = epow.mul(&e);
            if epow.is_empty() && epow.bound().is_none() {
                break;
            }
            acc = acc.add(&epow.scale(Complex64::new(binom, 0.0)));
            if binom == 0.0 {
                break;
            }
        }
        Ok(acc.scale(scale))
    }

}

fn opt_min(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// Solve `W(U(v)) = v^(c0)` for `U(v) = s0·v·(1 + Σ ε_j v^j)`.
///
/// `w` must have leading exponent `c0` with leading coefficient `γ`, and
/// `s0` must satisfy `s0^(c0) ≈ 1/γ` (the caller fixes the branch). The
/// iteration refines the unit part one exponent per pass and is cut off
/// at `b_target` coefficients of `U` past the seed; the trusted window of
/// the result also accounts for the truncation of `w`.
pub(crate) fn invert(
    w: &TruncLaurent,
    c0: i64,
    s0: Complex64,
    b_target: i64,
) -> Result<TruncLaurent> {
    if w.is_empty() || w.effective_lead() != c0 || c0 == 0 {
        return Err(Error::NotInvertible);
    }
    let gamma = w.coeff(c0);
    let norm = gamma * s0.powi(c0 as i32);
    if (norm - Complex64::new(1.0, 0.0)).norm() > 1e-6 {
        return Err(Error::NoConvergence(format!(
            "seed branch inconsistent with leading coefficient: |γ·s0^c0 - 1| = {:.3e}",
            (norm - Complex64::new(1.0, 0.0)).norm()
        )));
    }
    // trusted window of the unit part: each pass pins one more slot, and
    // the unknown tail of w blocks everything from v^(bound_w - c0) on
    let trusted = match w.bound() {
        Some(bw) => {
            let limit = bw - c0;
            if limit < 1 {
                return Err(Error::TruncationInsufficient(
                    "series to invert has no guaranteed slots past its leading term".into(),
                ));
            }
            b_target.min(limit)
        }
        None => b_target,
    };
    let r = -1.0 / c0 as f64;
    let mut a = TruncLaurent::one();
    for _ in 0..=(trusted as usize) {
        // M̂ = s0^c0 Σ_j a_j (s0 v)^j A^j, constant term γ·s0^c0 ≈ 1
        let mut m = TruncLaurent::zero(Some(trusted + 1));
        let mut apow = TruncLaurent::one();
        let mut svpow = TruncLaurent::one();
        let sv = TruncLaurent::monomial(1, s0);
        let mut prev_j = 0i64;
        for (e, cj) in w.iter().collect::<Vec<_>>() {
            let j = e - c0;
            if j >= trusted + 1 {
                break;
            }
            for _ in prev_j..j {
                apow = apow.mul(&a).truncate_to(trusted + 1);
                svpow = svpow.mul(&sv);
            }
            prev_j = j;
            m = m.add(&svpow.mul(&apow).scale(cj * s0.powi(c0 as i32)));
        }
        if let Some(bw) = w.bound() {
            m = m.truncate_to(bw - c0);
        }
        a = m.binomial_pow(r)?.truncate_to(trusted + 1);
    }
    let u = a.mul_monomial(1, s0).truncate_to(trusted + 1);
    // residual check: W(U) - v^c0 must vanish on the trusted window
    let mut res = TruncLaurent::monomial(c0, Complex64::new(-1.0, 0.0));
    for (e, cj) in w.iter() {
        res = res.add(&u.powi(e)?.scale(cj));
    }
    let scale = w.max_abs().max(1.0);
    let worst = res
        .iter()
        .filter(|(e, _)| res.bound().map_or(true, |b| *e < b) && *e < c0 + trusted)
        .fold(0.0f64, |m, (_, c)| m.max(c.norm()));
    if worst > 1e-9 * scale {
        return Err(Error::NoConvergence(format!(
            "inversion residual {:.3e} did not contract",
            worst
        )));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_bounds_follow_min_rule() {
        let a = TruncLaurent::new(-2, vec![c(1.0, 0.0), c(2.0, 0.0)], Some(3));
        let b = TruncLaurent::new(1, vec![c(1.0, 0.0)], None);
        let p = a.mul(&b);
        assert_eq!(p.coeff(-1), c(1.0, 0.0));
        assert_eq!(p.coeff(0), c(2.0, 0.0));
        assert_eq!(p.bound(), Some(4));
    }

    #[test]
    fn powi_negative_inverts_units() {
        // (1 + v)^-1 = 1 - v + v^2 - ...
        let x = TruncLaurent::new(0, vec![c(1.0, 0.0), c(1.0, 0.0)], Some(6));
        let inv = x.powi(-1).unwrap();
        for k in 0..6 {
            let want = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((inv.coeff(k) - c(want, 0.0)).norm() < 1e-12, "k={}", k);
        }
        let prod = x.mul(&inv);
        assert!((prod.coeff(0) - c(1.0, 0.0)).norm() < 1e-12);
        for k in 1..6 {
            assert!(prod.coeff(k).norm() < 1e-12);
        }
    }

    #[test]
    fn invert_monomial_is_seed_only() {
        // W = -u^-2, target w = v^-2 (c0 = -2): U = s0·v with s0^-2 = -1
        let w = TruncLaurent::monomial(-2, c(-1.0, 0.0));
        let s0 = c(0.0, 1.0); // i^-2 = -1
        let u = invert(&w, -2, s0, 8).unwrap();
        assert!((u.coeff(1) - s0).norm() < 1e-14);
        assert_eq!(u.iter().count(), 1);
    }

    #[test]
    fn invert_two_term_series_round_trips() {
        // W = u^-3 + u^-1 (exact); check W(U(v)) = v^-3 numerically
        let w = TruncLaurent::new(-3, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], None);
        let u = invert(&w, -3, c(1.0, 0.0), 14).unwrap();
        let v0 = c(0.09, 0.02);
        let uval: Complex64 = u.iter().map(|(e, ce)| ce * v0.powi(e as i32)).sum();
        let wval: Complex64 = w.iter().map(|(e, ce)| ce * uval.powi(e as i32)).sum();
        let target = v0.powi(-3);
        assert!(
            (wval - target).norm() / target.norm() < 1e-9,
            "relative error {}",
            (wval - target).norm() / target.norm()
        );
    }

    #[test]
    fn invert_respects_source_truncation() {
        let w = TruncLaurent::new(-2, vec![c(1.0, 0.0), c(0.5, 0.0)], Some(2));
        let u = invert(&w, -2, c(1.0, 0.0), 30).unwrap();
        // bound of w is 2, c0 = -2, so only 4 slots of the unit part are trusted
        assert_eq!(u.bound(), Some(5));
    }
}
