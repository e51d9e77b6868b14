//! Stationary phase transform of singularity data.
//!
//! Carries data on the line `V` to data on the dual line `V*` by applying
//! the Legendre transform orbit by orbit: each factor orbit is
//! transformed at one generic base direction, the image is closed under
//! monodromy on the target side, and multiplicities are preserved
//! entry-wise. Inadmissible (linear or bounded) factors are reported,
//! never dropped silently.
//!
//! [`check_stationary_phase`] realizes the rank equality behind the
//! construction: the graded multiplicity of a class `[f]` in the input
//! equals the graded multiplicity of `[L(f)]` in the transformed data at
//! a generic target direction.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Error;
use crate::legendre::{
    classify, inverse_legendre, legendre_transform, AdmissibilityClass, DirectedGerm,
    InadmissibleReason,
};
use crate::puiseux::{BasePoint, Direction, PuiseuxGerm};
use crate::stokesfl::{
    gr_rank, stokes_structure, validate, FactorOrbit, LineTag, PointData, SingularityData,
};
use crate::tolerances::{ETA_PERTURB, GENERIC_ETA_EPS};
use crate::Result;

/// One transformed factor orbit.
#[derive(Debug, Clone)]
pub struct TransformEntry {
    pub source_point: BasePoint,
    pub source_rep: PuiseuxGerm,
    pub multiplicity: u32,
    pub case: AdmissibilityClass,
    pub beta: Complex64,
    pub eta: Direction,
    pub target_point: BasePoint,
    pub target_rep: PuiseuxGerm,
    pub residual: f64,
}

/// A factor outside the transform's domain, with the reason.
#[derive(Debug, Clone)]
pub struct SkippedFactor {
    pub source_point: BasePoint,
    pub source_rep: PuiseuxGerm,
    pub multiplicity: u32,
    pub reason: InadmissibleReason,
}

/// Full account of one transform run.
#[derive(Debug, Clone, Default)]
pub struct TransformReport {
    pub entries: Vec<TransformEntry>,
    pub skipped: Vec<SkippedFactor>,
    /// Same-class collisions absorbed by the defensive merge. The
    /// transform is a class bijection, so this is expected to stay empty;
    /// a non-empty list on validated data indicates a bug.
    pub collisions: Vec<String>,
}

impl TransformReport {
    pub fn residuals(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.residual).collect()
    }
}

/// Outcome of the rank equality test at one queried factor.
#[derive(Debug, Clone, Copy)]
pub struct StationaryPhaseCheck {
    pub lhs: u32,
    pub rhs: u32,
    pub eta: Direction,
}

impl StationaryPhaseCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Transform singularity data on `V` to data on `V*`.
pub fn fourier_transform(
    data: &SingularityData,
    precision: usize,
) -> Result<(SingularityData, TransformReport)> {
    transform_data(data, precision, false)
}

/// Transform singularity data on `V*` back to data on `V`.
pub fn inverse_fourier_transform(
    data: &SingularityData,
    precision: usize,
) -> Result<(SingularityData, TransformReport)> {
    transform_data(data, precision, true)
}

fn transform_data(
    data: &SingularityData,
    precision: usize,
    inverse: bool,
) -> Result<(SingularityData, TransformReport)> {
    let expected = if inverse { LineTag::VStar } else { LineTag::V };
    if data.line != expected {
        return Err(Error::InvalidData(format!(
            "data lives on {} but this transform consumes {}",
            data.line, expected
        )));
    }
    let violations = validate(data);
    if !violations.is_empty() {
        let msg = violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::InvalidData(msg));
    }

    let mut report = TransformReport::default();
    let mut out_points: Vec<PointData> = Vec::new();

    let mut points = data.points.clone();
    points.sort_by(base_point_cmp_key);
    for pd in &points {
        if pd.factors.is_empty() {
            continue;
        }
        // transform away from source Stokes rays: smallest sector midpoint
        let st = stokes_structure(pd)?;
        let base_lift = st
            .sectors
            .iter()
            .map(|s| s.midpoint)
            .fold(f64::INFINITY, f64::min);
        let base_dir = Direction::from_lift(pd.point, base_lift, st.cover);

        let mut orbits = pd.factors.clone();
        orbits.sort_by(|a, b| germ_total_cmp(a.representative(), b.representative()));

        for orbit in &orbits {
            let src = DirectedGerm::new(orbit.representative().clone(), base_dir)?;
            let case = classify(&src)?;
            if let AdmissibilityClass::Inadmissible(reason) = case {
                report.skipped.push(SkippedFactor {
                    source_point: pd.point,
                    source_rep: orbit.representative().clone(),
                    multiplicity: orbit.multiplicity(),
                    reason,
                });
                continue;
            }
            let pair = if inverse {
                inverse_legendre(&src, precision)?
            } else {
                legendre_transform(&src, precision)?
            };
            let target_polar = pair.target.germ.polar_part()?;
            let canonical = canonical_conjugate(&target_polar);
            let new_orbit = FactorOrbit::new(&canonical, orbit.multiplicity())?;

            let target_point = pair.target.germ.base();
            merge_orbit(&mut out_points, target_point, new_orbit, &mut report.collisions)?;

            report.entries.push(TransformEntry {
                source_point: pd.point,
                source_rep: orbit.representative().clone(),
                multiplicity: orbit.multiplicity(),
                case: pair.case.clone(),
                beta: pair.beta,
                eta: pair.target.dir,
                target_point,
                target_rep: canonical,
                residual: pair.residual,
            });
        }
    }

    out_points.sort_by(base_point_cmp_key);
    for pd in &mut out_points {
        pd.factors
            .sort_by(|a, b| germ_total_cmp(a.representative(), b.representative()));
    }
    Ok((
        SingularityData::new(data.line.flipped(), out_points),
        report,
    ))
}

fn merge_orbit(
    out_points: &mut Vec<PointData>,
    point: BasePoint,
    orbit: FactorOrbit,
    collisions: &mut Vec<String>,
) -> Result<()> {
    let slot = out_points.iter_mut().find(|pd| pd.point == point);
    let pd = match slot {
        Some(pd) => pd,
        None => {
            out_points.push(PointData::new(point, Vec::new())?);
            out_points.last_mut().unwrap()
        }
    };
    // defensive merge: a same-class collision sums multiplicities and is
    // flagged, because the transform should be a class bijection
    for existing in &mut pd.factors {
        let collide = existing.conjugates().iter().any(|e| {
            orbit
                .conjugates()
                .iter()
                .any(|n| e.same_class(n).unwrap_or(false))
        });
        if collide {
            let merged =
                FactorOrbit::new(existing.representative(), existing.multiplicity() + orbit.multiplicity())?;
            collisions.push(format!(
                "class collision at {}: {} absorbed into {}",
                point,
                orbit.representative(),
                existing.representative()
            ));
            *existing = merged;
            return Ok(());
        }
    }
    pd.factors.push(orbit);
    Ok(())
}

/// Rank equality at one queried admissible factor: the graded rank of
/// `[f]` in `data` must equal the graded rank of `[L(f)]` in the
/// transformed data at the (generically perturbed) target direction.
pub fn check_stationary_phase(
    data: &SingularityData,
    f_query: &DirectedGerm,
    precision: usize,
) -> Result<StationaryPhaseCheck> {
    let case = classify(f_query)?;
    if !case.is_admissible() {
        return Err(Error::InadmissibleGerm(case.label().into()));
    }
    let inverse = data.line == LineTag::VStar;
    let (out_data, _) = transform_data(data, precision, inverse)?;
    let pair = if inverse {
        inverse_legendre(f_query, precision)?
    } else {
        legendre_transform(f_query, precision)?
    };

    let rhs = data
        .point_data(f_query.germ.base())
        .map(|pd| gr_rank(pd, &f_query.dir, &f_query.germ))
        .unwrap_or(0);

    let target_base = pair.target.germ.base();
    let (lhs, eta) = match out_data.point_data(target_base) {
        None => (0, pair.target.dir),
        Some(pd_out) => {
            let st = stokes_structure(pd_out)?;
            let period = TAU * st.cover as f64;
            let mut lift = pair.target_lift.rem_euclid(period);
            for _ in 0..16 {
                let near_ray = st
                    .rays
                    .iter()
                    .any(|r| circle_dist(lift, r.lift, period) < GENERIC_ETA_EPS);
                if !near_ray {
                    break;
                }
                lift += ETA_PERTURB;
            }
            let eta = Direction::from_lift(target_base, lift, st.cover);
            (gr_rank(pd_out, &eta, &pair.target.germ), eta)
        }
    };

    Ok(StationaryPhaseCheck { lhs, rhs, eta })
}

fn circle_dist(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

fn base_point_cmp_key(a: &PointData, b: &PointData) -> Ordering {
    base_point_cmp(a.point, b.point)
}

pub(crate) fn base_point_cmp(a: BasePoint, b: BasePoint) -> Ordering {
    match (a, b) {
        (BasePoint::Finite(x), BasePoint::Finite(y)) => x
            .re
            .total_cmp(&y.re)
            .then_with(|| x.im.total_cmp(&y.im)),
        (BasePoint::Finite(_), BasePoint::Infinity) => Ordering::Less,
        (BasePoint::Infinity, BasePoint::Finite(_)) => Ordering::Greater,
        (BasePoint::Infinity, BasePoint::Infinity) => Ordering::Equal,
    }
}

/// Total order on germs used for deterministic processing and canonical
/// orbit representatives: compare term lists from the leading exponent
/// down, by exponent then coefficient.
pub(crate) fn germ_total_cmp(a: &PuiseuxGerm, b: &PuiseuxGerm) -> Ordering {
    let at: Vec<_> = a.terms().collect();
    let bt: Vec<_> = b.terms().collect();
    for (x, y) in at.iter().rev().zip(bt.iter().rev()) {
        let ord = x
            .0
            .cmp(y.0)
            .then_with(|| x.1.re.total_cmp(&y.1.re))
            .then_with(|| x.1.im.total_cmp(&y.1.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    at.len().cmp(&bt.len())
}

/// The largest conjugate in the germ order: a deterministic orbit
/// representative independent of which branch produced it.
pub(crate) fn canonical_conjugate(g: &PuiseuxGerm) -> PuiseuxGerm {
    let size = g.reduced_ramification() as i64;
    (0..size)
        .map(|j| g.monodromy_pow(j))
        .max_by(germ_total_cmp)
        .unwrap_or_else(|| g.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::Order;
    use num_rational::Rational64;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn airy_data() -> SingularityData {
        let f = PuiseuxGerm::monomial(BasePoint::Infinity, r(3, 1), c(1.0 / 3.0, 0.0));
        SingularityData::new(
            LineTag::V,
            vec![PointData::new(
                BasePoint::Infinity,
                vec![FactorOrbit::new(&f, 1).unwrap()],
            )
            .unwrap()],
        )
    }

    #[test]
    fn airy_end_to_end() {
        let (out, report) = fourier_transform(&airy_data(), 16).unwrap();
        assert_eq!(out.line, LineTag::VStar);
        assert_eq!(out.points.len(), 1);
        let pd = &out.points[0];
        assert_eq!(pd.point, BasePoint::Infinity);
        assert_eq!(pd.factors.len(), 1, "a single orbit of ramification 2");
        let fo = &pd.factors[0];
        assert_eq!(fo.orbit_size(), 2);
        assert_eq!(fo.multiplicity(), 1);
        assert_eq!(fo.representative().reduced_ramification(), 2);
        // canonical representative is +(2/3)w^(3/2); the orbit holds both signs
        assert!((fo.representative().coeff(r(3, 2)) - c(2.0 / 3.0, 0.0)).norm() < 1e-9);
        let conj = fo.conjugates();
        assert!((conj[1].coeff(r(3, 2)) - c(-2.0 / 3.0, 0.0)).norm() < 1e-9);
        assert!(report.skipped.is_empty());
        assert!(report.collisions.is_empty());
        assert_eq!(report.entries.len(), 1);
        assert!(report.entries[0].residual < 1e-12);
    }

    #[test]
    fn pole_with_multiplicity_carries_through() {
        let f = PuiseuxGerm::monomial(BasePoint::Finite(Complex64::ZERO), r(1, 1), c(1.0, 0.0));
        let data = SingularityData::new(
            LineTag::V,
            vec![PointData::new(
                BasePoint::Finite(Complex64::ZERO),
                vec![FactorOrbit::new(&f, 2).unwrap()],
            )
            .unwrap()],
        );
        let (out, report) = fourier_transform(&data, 16).unwrap();
        let pd = &out.points[0];
        assert_eq!(pd.point, BasePoint::Infinity);
        assert_eq!(pd.factors[0].multiplicity(), 2);
        assert_eq!(
            pd.factors[0].representative().pole_order().unwrap(),
            crate::puiseux::PoleOrder::Finite(r(1, 2))
        );
        assert_eq!(report.entries.len(), 1);
    }

    #[test]
    fn empty_data_transforms_to_empty() {
        let data = SingularityData::new(LineTag::V, vec![]);
        let (out, report) = fourier_transform(&data, 16).unwrap();
        assert!(out.is_empty());
        assert!(report.entries.is_empty());
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn linear_twist_lands_at_finite_point() {
        let f = PuiseuxGerm::new(
            BasePoint::Infinity,
            3,
            [(r(1, 1), c(3.0, 0.0)), (r(1, 3), c(1.0, 0.0))],
            Order::Exact,
        );
        let data = SingularityData::new(
            LineTag::V,
            vec![PointData::new(
                BasePoint::Infinity,
                vec![FactorOrbit::new(&f, 1).unwrap()],
            )
            .unwrap()],
        );
        let (out, report) = fourier_transform(&data, 16).unwrap();
        assert_eq!(out.points.len(), 1);
        match out.points[0].point {
            BasePoint::Finite(b) => assert!((b - c(3.0, 0.0)).norm() < 1e-12),
            BasePoint::Infinity => panic!("expected finite target"),
        }
        assert_eq!(
            out.points[0].factors[0]
                .representative()
                .pole_order()
                .unwrap(),
            crate::puiseux::PoleOrder::Finite(r(1, 2))
        );
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn linear_factor_is_skipped_with_reason() {
        let lin = PuiseuxGerm::monomial(BasePoint::Infinity, r(1, 1), c(2.0, 0.0));
        let good = PuiseuxGerm::monomial(BasePoint::Infinity, r(2, 1), c(1.0, 0.0));
        let data = SingularityData::new(
            LineTag::V,
            vec![PointData::new(
                BasePoint::Infinity,
                vec![
                    FactorOrbit::new(&lin, 1).unwrap(),
                    FactorOrbit::new(&good, 1).unwrap(),
                ],
            )
            .unwrap()],
        );
        let (out, report) = fourier_transform(&data, 12).unwrap();
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].reason, InadmissibleReason::Linear);
        assert_eq!(report.entries.len(), 1);
        assert_eq!(out.points.len(), 1);
    }

    #[test]
    fn airy_round_trip_classes() {
        let (out, _) = fourier_transform(&airy_data(), 24).unwrap();
        let (back, _) = inverse_fourier_transform(&out, 12).unwrap();
        assert_eq!(back.line, LineTag::V);
        assert_eq!(back.points.len(), 1);
        let fo = &back.points[0].factors[0];
        assert_eq!(fo.multiplicity(), 1);
        let f = PuiseuxGerm::monomial(BasePoint::Infinity, r(3, 1), c(1.0 / 3.0, 0.0));
        assert!(fo
            .conjugates()
            .iter()
            .any(|g| g.same_class(&f).unwrap_or(false)));
    }

    #[test]
    fn stationary_phase_airy_rank_one() {
        let f = PuiseuxGerm::monomial(BasePoint::Infinity, r(3, 1), c(1.0 / 3.0, 0.0));
        let query = DirectedGerm::new(
            f,
            Direction::new(BasePoint::Infinity, std::f64::consts::PI, 0),
        )
        .unwrap();
        let check = check_stationary_phase(&airy_data(), &query, 16).unwrap();
        assert_eq!(check.lhs, 1);
        assert_eq!(check.rhs, 1);
        assert!(check.holds());
    }

    #[test]
    fn stationary_phase_absent_class() {
        let f = PuiseuxGerm::monomial(BasePoint::Infinity, r(2, 1), c(1.0, 0.0));
        let query =
            DirectedGerm::new(f, Direction::new(BasePoint::Infinity, 0.3, 0)).unwrap();
        let check = check_stationary_phase(&airy_data(), &query, 16).unwrap();
        assert_eq!(check.lhs, 0);
        assert_eq!(check.rhs, 0);
    }

    #[test]
    fn direction_coverage_single_target_orbit() {
        // transforming at all p source branches yields germs in one orbit
        let f = PuiseuxGerm::new(
            BasePoint::Infinity,
            2,
            [(r(5, 2), c(1.0, 0.0))],
            Order::Exact,
        );
        let mut reps = Vec::new();
        for k in 0..2u32 {
            let src = DirectedGerm::new(
                f.clone(),
                Direction::new(BasePoint::Infinity, 0.4, k),
            )
            .unwrap();
            let pair = legendre_transform(&src, 12).unwrap();
            reps.push(pair.target.germ.polar_part().unwrap());
        }
        let orbit0 = canonical_conjugate(&reps[0]);
        for rep in &reps {
            let canon = canonical_conjugate(rep);
            assert!(
                canon.same_class(&orbit0).unwrap(),
                "branches map into one monodromy orbit"
            );
        }
    }
}
