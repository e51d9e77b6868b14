//! Transform-level properties over seeded random corpora: exact pole
//! order laws per case, defining-identity residuals, the involution with
//! the inverse transform, class functoriality under bounded
//! perturbations, and numeric oracle agreement.

mod common;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;

use common::{random_admissible, rc, rng, CaseKind, ALL_CASES};
use statphase::legendre::{
    classify, inverse_legendre, legendre_transform, AdmissibilityClass, DirectedGerm,
};
use statphase::oracle::{fit_decay_exponent, verify_direction, verify_pair};
use statphase::puiseux::{BasePoint, Order, PoleOrder, PuiseuxGerm};

fn case_lambda(case: &AdmissibilityClass) -> Rational64 {
    match case {
        AdmissibilityClass::CaseFiniteToInfinity { lambda } => *lambda,
        AdmissibilityClass::CaseLinearTwistToFinite { lambda, .. } => *lambda,
        AdmissibilityClass::CaseInfinityToInfinity { lambda } => *lambda,
        AdmissibilityClass::Inadmissible(_) => unreachable!(),
    }
}

/// Strip the linear part the transform appends for a finite source base,
/// exposing the `λ/(λ+1)` core whose order the law predicts.
fn core_germ(src: &DirectedGerm, target: &PuiseuxGerm) -> PuiseuxGerm {
    match src.germ.base() {
        BasePoint::Finite(a) if a != Complex64::ZERO => target
            .sub(&PuiseuxGerm::monomial(
                target.base(),
                Rational64::new(1, 1),
                -a,
            ))
            .unwrap(),
        _ => target.clone(),
    }
}

#[test]
fn pole_order_laws_across_300_random_germs() {
    let mut r = rng(101);
    let mut count = 0;
    while count < 300 {
        let kind = ALL_CASES[count % 3];
        let src = random_admissible(&mut r, kind);
        let pair = legendre_transform(&src, 12).unwrap();
        let lambda = case_lambda(&pair.case);
        let expected = pair.case.output_order().unwrap();
        let core = core_germ(&src, &pair.target.germ);
        let got = match core.pole_order().unwrap() {
            PoleOrder::Finite(l) => l,
            PoleOrder::NegInfinity => panic!("transform produced a bounded germ"),
        };
        assert_eq!(
            got, expected,
            "case {:?} λ = {} must map to {}",
            kind, lambda, expected
        );
        count += 1;
    }
}

#[test]
fn defining_identity_residuals_within_tolerance() {
    let mut r = rng(102);
    for i in 0..120 {
        let src = random_admissible(&mut r, ALL_CASES[i % 3]);
        let pair = legendre_transform(&src, 12).unwrap();
        assert!(
            pair.residual_ok(),
            "residual {} too large for {}",
            pair.residual,
            src.germ
        );
    }
}

#[test]
fn involution_on_classes_directions_branches() {
    let mut r = rng(103);
    let mut count = 0;
    while count < 100 {
        let kind = ALL_CASES[count % 3];
        let src = random_admissible(&mut r, kind);
        let fwd = legendre_transform(&src, 40).unwrap();
        let back = inverse_legendre(&fwd.target, 10).unwrap();
        assert_eq!(back.target.germ.base(), src.germ.base());
        assert!(
            back.target.germ.same_class(&src.germ).unwrap(),
            "case {:?}: round trip changed the class\n src = {}\n back = {}",
            kind,
            src.germ,
            back.target.germ
        );
        assert!(
            (back.target.dir.angle - src.dir.angle).abs() < 1e-8,
            "angle drift {} vs {}",
            back.target.dir.angle,
            src.dir.angle
        );
        assert_eq!(back.target.dir.branch, src.dir.branch, "branch must round trip");
        count += 1;
    }
}

#[test]
fn class_functoriality_under_bounded_perturbations() {
    let mut r = rng(104);
    for i in 0..90 {
        let src = random_admissible(&mut r, ALL_CASES[i % 3]);
        // random bounded germ: non-positive pole exponents only
        let mut bump = PuiseuxGerm::constant(src.germ.base(), rc(&mut r));
        let p = src.germ.reduced_ramification() as i64;
        for _ in 0..r.gen_range(1..3) {
            let e = Rational64::new(-r.gen_range(1..=2 * p), p);
            let coeff = rc(&mut r);
            bump = bump
                .add(&PuiseuxGerm::monomial(src.germ.base(), e, coeff))
                .unwrap();
        }
        let perturbed =
            DirectedGerm::new(src.germ.add(&bump).unwrap(), src.dir).unwrap();
        let a = legendre_transform(&src, 12).unwrap();
        let b = legendre_transform(&perturbed, 12).unwrap();
        assert_eq!(a.target.germ.base(), b.target.germ.base(), "target point");
        assert!(
            (a.target.dir.angle - b.target.dir.angle).abs() < 1e-9,
            "η must not move"
        );
        assert_eq!(a.target.dir.branch, b.target.dir.branch);
        assert!(
            a.target.germ.same_class(&b.target.germ).unwrap(),
            "output class changed under a bounded perturbation"
        );
    }
}

#[test]
fn oracle_certifies_every_pair() {
    let mut r = rng(105);
    for i in 0..60 {
        let kind = ALL_CASES[i % 3];
        let src = random_admissible(&mut r, kind);
        let pair = legendre_transform(&src, 14).unwrap();
        let radii: Vec<f64> = match pair.target.germ.base() {
            // the series window shrinks towards the point / towards ∞
            BasePoint::Finite(_) => vec![1e-4, 1e-5, 1e-6],
            BasePoint::Infinity => vec![1e4, 1e5, 1e6],
        };
        let check = verify_pair(&pair, &radii).unwrap();
        // compare against the magnitude of g at the sample
        let scale = check
            .per_sample
            .iter()
            .map(|s| s.g_series.norm())
            .fold(1.0f64, f64::max);
        assert!(
            check.max_abs_error <= 1e-6 * scale,
            "case {:?}: saddle error {} at scale {} for {}",
            kind,
            check.max_abs_error,
            scale,
            src.germ
        );
        let dir_err = verify_direction(&src, &pair.target.dir).unwrap();
        assert!(
            dir_err < 1e-6,
            "case {:?}: direction error {} for {}",
            kind,
            dir_err,
            src.germ
        );
    }
}

#[test]
fn inverse_pairs_certify_through_the_same_oracle() {
    let mut r = rng(106);
    for i in 0..30 {
        let src = random_admissible(&mut r, ALL_CASES[i % 3]);
        let fwd = legendre_transform(&src, 30).unwrap();
        let back = inverse_legendre(&fwd.target, 10).unwrap();
        let radii: Vec<f64> = match back.target.germ.base() {
            BasePoint::Finite(_) => vec![1e-4, 1e-5],
            BasePoint::Infinity => vec![1e4, 1e5],
        };
        let check = verify_pair(&back, &radii).unwrap();
        let scale = check
            .per_sample
            .iter()
            .map(|s| s.g_series.norm())
            .fold(1.0f64, f64::max);
        assert!(
            check.max_abs_error <= 1e-5 * scale,
            "inverse saddle error {} at scale {}",
            check.max_abs_error,
            scale
        );
    }
}

#[test]
fn truncated_pairs_decay_at_the_predicted_exponent() {
    // truncate an exact multi-term germ, transform, and compare the decay
    // of the saddle error with the first symbolic term past the window,
    // obtained from the untruncated transform
    let mut r = rng(107);
    let mut done = 0;
    while done < 8 {
        let full = random_admissible(&mut r, CaseKind::InfinityHigh);
        if full.germ.num_terms() < 3 {
            continue;
        }
        let tau = {
            // cut below the second stored exponent so real terms drop
            let exps: Vec<Rational64> = full.germ.terms().map(|(e, _)| *e).collect();
            -exps[exps.len() - 3] + Rational64::new(1, 8)
        };
        let truncated = DirectedGerm::new(
            full.germ.with_order(Order::Trunc(tau)),
            full.dir,
        )
        .unwrap();
        if classify(&truncated).is_err() {
            continue;
        }
        let slots = 4;
        let pair = match legendre_transform(&truncated, slots) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let reference = legendre_transform(&full, 40).unwrap();
        // first reference exponent outside the truncated window
        let bar = match pair.target.germ.order() {
            Order::Trunc(t) => -t,
            Order::Exact => continue,
        };
        let next_exp = reference
            .target
            .germ
            .terms()
            .map(|(e, _)| *e)
            .filter(|e| *e <= bar)
            .fold(None::<Rational64>, |acc, e| match acc {
                None => Some(e),
                Some(a) => Some(a.max(e)),
            });
        let next_exp = match next_exp {
            Some(e) => e,
            None => continue,
        };
        let radii = [1e3, 3e3, 1e4, 3e4, 1e5];
        let check = verify_pair(&pair, &radii).unwrap();
        let errors: Vec<f64> = check.per_sample.iter().map(|s| s.error()).collect();
        if errors.iter().any(|e| *e < 1e-10) {
            continue;
        }
        let slope = fit_decay_exponent(&radii, &errors);
        let predicted = *next_exp.numer() as f64 / *next_exp.denom() as f64;
        assert!(
            (slope - predicted).abs() < 0.1,
            "decay slope {} vs predicted {} (window bar {})",
            slope,
            predicted,
            bar
        );
        done += 1;
    }
}
