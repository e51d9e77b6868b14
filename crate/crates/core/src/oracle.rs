//! Numeric verification independent of the symbolic pipeline.
//!
//! The transform is certified through the saddle-value identity: for
//! `w = f′(z*)` one has `g(w) = f(z*) − z*·w`, so a numeric root of the
//! saddle equation checks the symbolic series `g` without re-using the
//! series inversion. The Newton solver is seeded from the symbolic
//! leading term, which ties the oracle to the same branch choices by
//! construction; the root's sector membership is then asserted, not
//! assumed.
//!
//! The full steepest-descent integral is out of scope here: the saddle
//! identity already certifies the exponential factor itself.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;

use crate::error::Error;
use crate::legendre::{classify, AdmissibilityClass, DirectedGerm, LegendrePair};
use crate::puiseux::{rational_to_f64, wrap_angle, BasePoint, PoleOrder, Direction, PuiseuxGerm};
use crate::tolerances::{SADDLE_ACCEPT_REL, SADDLE_NEWTON_REL};
use crate::Result;

/// One sampled comparison of series value against saddle value.
#[derive(Debug, Clone, Copy)]
pub struct SaddleSample {
    pub w: Complex64,
    pub z_star: Complex64,
    pub g_series: Complex64,
    pub g_saddle: Complex64,
}

impl SaddleSample {
    pub fn error(&self) -> f64 {
        (self.g_series - self.g_saddle).norm()
    }
}

/// Saddle-identity verification of a transform pair over several radii.
#[derive(Debug, Clone)]
pub struct SaddleCheck {
    pub w_samples: Vec<Complex64>,
    pub max_abs_error: f64,
    pub per_sample: Vec<SaddleSample>,
}

/// Numeric root of the saddle equation `f′(z) = w`, seeded from the
/// symbolic leading-term root `(w/γ)^(±1/ν)` on the branch of the source
/// direction, then refined by Newton iteration to
/// `|f′(z*) − w| ≤ 1e−12·|w|`.
pub fn solve_saddle(f: &DirectedGerm, w: Complex64) -> Result<Complex64> {
    let case = classify(f)?;
    let b = match &case {
        AdmissibilityClass::CaseLinearTwistToFinite { b, .. } => *b,
        AdmissibilityClass::Inadmissible(_) => {
            return Err(Error::InadmissibleGerm(case.label().into()))
        }
        _ => Complex64::ZERO,
    };
    let one = Rational64::from_integer(1);
    let working = if b == Complex64::ZERO {
        f.germ.clone()
    } else {
        f.germ
            .sub(&PuiseuxGerm::monomial(BasePoint::Infinity, one, b))?
    };

    let z0 = seed_root(&working, &f.dir, w - b)?;
    let fp = f.germ.derive();
    let fpp = fp.derive();
    let scale = w.norm().max(1e-300);
    let mut z = z0;
    let mut converged = false;
    for _ in 0..80 {
        let fval = fp.evaluate_unchecked(z, &f.dir) - w;
        if fval.norm() <= SADDLE_NEWTON_REL * scale {
            converged = true;
            break;
        }
        let dval = fpp.evaluate_unchecked(z, &f.dir);
        if dval.norm() < 1e-280 {
            return Err(Error::NoConvergence("vanishing saddle derivative".into()));
        }
        z -= fval / dval;
    }
    let final_res = (fp.evaluate_unchecked(z, &f.dir) - w).norm();
    if !converged && final_res > SADDLE_ACCEPT_REL * scale {
        return Err(Error::NoConvergence(format!(
            "saddle residual {:.3e} at |w| = {:.3e}",
            final_res, scale
        )));
    }
    // the root must stay in the sector of the source ray
    let deviation = wrap_angle(f.germ.base().affine_arg(z) - f.dir.angle).abs();
    let lambda = match f.germ.pole_order()? {
        PoleOrder::Finite(l) => rational_to_f64(l),
        PoleOrder::NegInfinity => 1.0,
    };
    let half_width = (PI / (4.0 * lambda)).min(PI * 0.999);
    if deviation > half_width {
        return Err(Error::WrongSector { deviation });
    }
    Ok(z)
}

/// Leading-term seed for the saddle solver: the first term of the
/// symbolic inverse of `w = f′(z)`, evaluated at the sampled `w`.
fn seed_root(working: &PuiseuxGerm, dir: &Direction, w_loc: Complex64) -> Result<Complex64> {
    let w_series = working.derive();
    let nu = match w_series.pole_order().map_err(|_| {
        Error::TruncationInsufficient("derivative order undecidable".into())
    })? {
        PoleOrder::Finite(n) => n,
        PoleOrder::NegInfinity => return Err(Error::NotInvertible),
    };
    let p = (working.reduced_ramification() as i64)
        .lcm(&(w_series.reduced_ramification() as i64));
    let gamma = w_series.coeff(nu);
    let sign_src = working.base().local_phase_sign();
    let theta_src = dir.lift();
    let target_lift = gamma.arg() - rational_to_f64(nu) * sign_src * theta_src;
    let c0 = -(nu * Rational64::from_integer(p)).to_integer();
    let n = c0.unsigned_abs() as f64;
    let sign_tgt = if c0 < 0 { -1.0 } else { 1.0 };
    let s0 = Complex64::from_polar(
        gamma.norm().powf(-1.0 / c0 as f64),
        sign_src * theta_src / p as f64 - sign_tgt * target_lift / n,
    );
    // lift the sampled argument next to the predicted one
    let theta_w = target_lift + wrap_angle(w_loc.arg() - target_lift);
    let t_ell = if c0 < 0 {
        w_loc.norm().recip()
    } else {
        w_loc.norm()
    };
    let v = Complex64::from_polar(t_ell.powf(1.0 / n), sign_tgt * theta_w / n);
    let u = s0 * v;
    let z_loc = u.powi(if working.base().is_infinity() { -p as i32 } else { p as i32 });
    Ok(match working.base() {
        BasePoint::Finite(a) => a + z_loc,
        BasePoint::Infinity => z_loc,
    })
}

/// Compare the series value of the transformed germ against the saddle
/// value `f(z*) − z*·w` at points along the target ray.
pub fn verify_pair(pair: &LegendrePair, radii: &[f64]) -> Result<SaddleCheck> {
    // orient the pair so that `f` is the germ whose saddle is solved
    let (f_dg, g_dg) = if pair.inverse {
        (&pair.target, &pair.source)
    } else {
        (&pair.source, &pair.target)
    };
    let mut per_sample = Vec::with_capacity(radii.len());
    let mut w_samples = Vec::with_capacity(radii.len());
    let mut max_abs_error = 0.0f64;
    for &r in radii {
        let w = match g_dg.germ.base() {
            BasePoint::Finite(b) => b + Complex64::from_polar(r, g_dg.dir.angle),
            BasePoint::Infinity => Complex64::from_polar(r, g_dg.dir.angle),
        };
        let g_series = g_dg.germ.evaluate_unchecked(w, &g_dg.dir);
        let z_star = solve_saddle(f_dg, w)?;
        let f_val = f_dg.germ.evaluate_unchecked(z_star, &f_dg.dir);
        let g_saddle = f_val - z_star * w;
        let sample = SaddleSample {
            w,
            z_star,
            g_series,
            g_saddle,
        };
        max_abs_error = max_abs_error.max(sample.error());
        w_samples.push(w);
        per_sample.push(sample);
    }
    Ok(SaddleCheck {
        w_samples,
        max_abs_error,
        per_sample,
    })
}

/// Numerically follow `f′(z)` along the source ray and compare its limit
/// direction with the predicted target direction. Returns the absolute
/// angular difference in radians.
///
/// The limit is accelerated by Richardson extrapolation over the exact
/// exponent lattice of the derivative (the tail modes scale by the known
/// ratios `R^(−j/p)` per radius step), so multi-term germs converge far
/// beyond the raw sample accuracy.
pub fn verify_direction(f: &DirectedGerm, eta_predicted: &Direction) -> Result<f64> {
    let case = classify(f)?;
    let b = match &case {
        AdmissibilityClass::CaseLinearTwistToFinite { b, .. } => *b,
        AdmissibilityClass::Inadmissible(_) => {
            return Err(Error::InadmissibleGerm(case.label().into()))
        }
        _ => Complex64::ZERO,
    };
    let fp = f.germ.derive();
    let p = f.germ.reduced_ramification() as f64;
    let ratio = 10.0f64;
    let samples = 8usize;
    let infinite = f.germ.base().is_infinity();
    let t0 = if infinite { 1e2 } else { 1e-2 };
    let mut phasors: Vec<Complex64> = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = if infinite {
            t0 * ratio.powi(k as i32)
        } else {
            t0 * ratio.powi(-(k as i32))
        };
        let z = match f.germ.base() {
            BasePoint::Finite(a) => a + Complex64::from_polar(t, f.dir.angle),
            BasePoint::Infinity => Complex64::from_polar(t, f.dir.angle),
        };
        let w = fp.evaluate_unchecked(z, &f.dir) - b;
        if w.norm() < 1e-290 {
            return Err(Error::NoConvergence("derivative vanished on the ray".into()));
        }
        phasors.push(w / w.norm());
    }
    // eliminate tail modes at the known lattice gaps j/p
    let mut seq = phasors;
    let mut j = 1;
    while seq.len() > 2 {
        let rho = ratio.powf(-(j as f64) / p);
        let next: Vec<Complex64> = seq
            .windows(2)
            .map(|w| (w[1] - w[0] * rho) / (1.0 - rho))
            .collect();
        seq = next;
        j += 1;
    }
    let limit = *seq.last().unwrap();
    Ok(wrap_angle(limit.arg() - eta_predicted.angle).abs())
}

/// Least-squares slope of `ln error` against `ln radius`; the expected
/// value is the signed truncation exponent of the series under test.
pub fn fit_decay_exponent(radii: &[f64], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 1e-290)
        .map(|(r, e)| (r.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}
