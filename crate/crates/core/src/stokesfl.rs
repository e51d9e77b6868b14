//! Systems of exponential factors with multiplicities, and their Stokes
//! filtration rank data.
//!
//! A factor is stored as a monodromy orbit: a representative germ in
//! normal form (polar part only, so class representatives are canonical)
//! together with a multiplicity. Instantiating an orbit at a direction
//! produces all monodromy conjugates; the sheaf condition on the
//! multiplicity map becomes the checkable requirement that the orbit is
//! closed and its members lie in pairwise distinct classes.
//!
//! The Stokes structure of a point partitions the (ramified) circle of
//! directions by the Stokes rays of all factor pairs; inside each sector
//! the dominance order is constant and the filtration ranks
//!
//! ```text
//!     F_⪯(f) = Σ_{h ⪯ f} mult(h),   F_≺(f) = Σ_{h ≺ f} mult(h),
//!     Gr(f)  = F_⪯(f) − F_≺(f) = mult(f)
//! ```
//!
//! are locally constant.

use std::f64::consts::TAU;
use std::fmt;

use num_integer::Integer;

use crate::error::Error;
use crate::puiseux::{compare_at, stokes_directions, BasePoint, Comparison, Direction, PuiseuxGerm};
use crate::tolerances::RAY_MERGE_TOL;
use crate::Result;

/// Which affine line the data lives on: the source line or its dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineTag {
    V,
    VStar,
}

impl LineTag {
    pub fn flipped(self) -> LineTag {
        match self {
            LineTag::V => LineTag::VStar,
            LineTag::VStar => LineTag::V,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LineTag::V => "V",
            LineTag::VStar => "V*",
        }
    }
}

impl fmt::Display for LineTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A monodromy orbit of exponential factors with a multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorOrbit {
    representative: PuiseuxGerm,
    multiplicity: u32,
    orbit_size: u32,
}

impl FactorOrbit {
    /// Normalizes the germ to its polar part and sizes the orbit from the
    /// exponent lattice. Bounded factors and zero multiplicities are
    /// rejected.
    pub fn new(germ: &PuiseuxGerm, multiplicity: u32) -> Result<Self> {
        let representative = germ.polar_part()?;
        if representative.is_zero() {
            return Err(Error::InvalidData(
                "factor is bounded: polar part is empty".into(),
            ));
        }
        if multiplicity == 0 {
            return Err(Error::InvalidData("factor multiplicity must be >= 1".into()));
        }
        let orbit_size = representative.reduced_ramification();
        Ok(FactorOrbit {
            representative,
            multiplicity,
            orbit_size,
        })
    }

    pub fn representative(&self) -> &PuiseuxGerm {
        &self.representative
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    pub fn orbit_size(&self) -> u32 {
        self.orbit_size
    }

    /// All monodromy conjugates of the representative, each computed in a
    /// single rotation step from the reduced fraction `jμ mod 1`.
    pub fn conjugates(&self) -> Vec<PuiseuxGerm> {
        (0..self.orbit_size as i64)
            .map(|j| self.representative.monodromy_pow(j))
            .collect()
    }
}

/// All factor orbits anchored at one singular point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointData {
    pub point: BasePoint,
    pub factors: Vec<FactorOrbit>,
}

impl PointData {
    pub fn new(point: BasePoint, factors: Vec<FactorOrbit>) -> Result<Self> {
        for fo in &factors {
            if fo.representative.base() != point {
                return Err(Error::MismatchedBasePoint(
                    point.to_string(),
                    fo.representative.base().to_string(),
                ));
            }
        }
        Ok(PointData { point, factors })
    }

    /// Total rank: the sum of multiplicities over all instantiated
    /// factors (orbit sizes included).
    pub fn total_rank(&self) -> u32 {
        self.factors
            .iter()
            .map(|f| f.orbit_size * f.multiplicity)
            .sum()
    }

    /// The common cover on which every instantiated factor is single
    /// valued.
    pub fn cover(&self) -> u32 {
        self.factors
            .iter()
            .fold(1i64, |acc, f| {
                acc.lcm(&(f.representative.reduced_ramification() as i64))
            })
            .max(1) as u32
    }
}

/// Instantiate the full factor system at a direction: all monodromy
/// conjugates of all orbits with their multiplicities.
pub fn instantiate(pd: &PointData, dir: &Direction) -> Result<Vec<(PuiseuxGerm, u32)>> {
    if dir.base != pd.point {
        return Err(Error::MismatchedBasePoint(
            pd.point.to_string(),
            dir.base.to_string(),
        ));
    }
    Ok(instantiate_unchecked(pd))
}

fn instantiate_unchecked(pd: &PointData) -> Vec<(PuiseuxGerm, u32)> {
    pd.factors
        .iter()
        .flat_map(|fo| {
            fo.conjugates()
                .into_iter()
                .map(move |g| (g, fo.multiplicity))
        })
        .collect()
}

/// Singularity data of a line: per singular point, a well separated
/// system of exponential factor orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityData {
    pub line: LineTag,
    pub points: Vec<PointData>,
}

impl SingularityData {
    pub fn new(line: LineTag, points: Vec<PointData>) -> Self {
        SingularityData { line, points }
    }

    pub fn point_data(&self, base: BasePoint) -> Option<&PointData> {
        self.points.iter().find(|pd| pd.point == base)
    }

    pub fn is_empty(&self) -> bool {
        self.points.iter().all(|pd| pd.factors.is_empty())
    }
}

/// A broken invariant of singularity data. Violations are reported as
/// data, not errors.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicatePoint {
        point: String,
    },
    BoundedFactor {
        point: String,
        factor: usize,
    },
    NotNormalized {
        point: String,
        factor: usize,
    },
    OrbitNotClosed {
        point: String,
        factor: usize,
        detail: String,
    },
    NotWellSeparated {
        point: String,
        first: (usize, u32),
        second: (usize, u32),
    },
    Undecidable {
        point: String,
        detail: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePoint { point } => write!(f, "duplicate point {}", point),
            Violation::BoundedFactor { point, factor } => {
                write!(f, "bounded factor #{} at {}", factor, point)
            }
            Violation::NotNormalized { point, factor } => {
                write!(f, "factor #{} at {} is not in polar normal form", factor, point)
            }
            Violation::OrbitNotClosed {
                point,
                factor,
                detail,
            } => write!(f, "orbit of factor #{} at {} not closed: {}", factor, point, detail),
            Violation::NotWellSeparated {
                point,
                first,
                second,
            } => write!(
                f,
                "factors {}#{} and {}#{} at {} share a class",
                first.0, first.1, second.0, second.1, point
            ),
            Violation::Undecidable { point, detail } => {
                write!(f, "undecidable invariant at {}: {}", point, detail)
            }
        }
    }
}

/// Check every invariant of the data: distinct points, normalized
/// unbounded factors, closed orbits with pairwise distinct member
/// classes, and well separatedness of the full instantiated system.
///
/// Class equality of germs with exact exponents does not depend on the
/// probe direction, so one check covers the whole circle.
pub fn validate(data: &SingularityData) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, pd) in data.points.iter().enumerate() {
        if data.points[..i].iter().any(|q| q.point == pd.point) {
            out.push(Violation::DuplicatePoint {
                point: pd.point.to_string(),
            });
        }
        validate_point(pd, &mut out);
    }
    out
}

fn validate_point(pd: &PointData, out: &mut Vec<Violation>) {
    let pt = pd.point.to_string();
    for (i, fo) in pd.factors.iter().enumerate() {
        match fo.representative.polar_part() {
            Ok(p) => {
                if p != fo.representative {
                    out.push(Violation::NotNormalized {
                        point: pt.clone(),
                        factor: i,
                    });
                }
                if p.is_zero() {
                    out.push(Violation::BoundedFactor {
                        point: pt.clone(),
                        factor: i,
                    });
                    continue;
                }
            }
            Err(e) => {
                out.push(Violation::Undecidable {
                    point: pt.clone(),
                    detail: e.to_string(),
                });
                continue;
            }
        }
        // orbit closure and internal class separation
        let conj = fo.conjugates();
        let back = fo.representative.monodromy_pow(fo.orbit_size as i64);
        match back.same_class(&fo.representative) {
            Ok(true) => {}
            Ok(false) => out.push(Violation::OrbitNotClosed {
                point: pt.clone(),
                factor: i,
                detail: format!("monodromy^{} leaves the class", fo.orbit_size),
            }),
            Err(e) => out.push(Violation::Undecidable {
                point: pt.clone(),
                detail: e.to_string(),
            }),
        }
        for a in 0..conj.len() {
            for b in (a + 1)..conj.len() {
                if conj[a].same_class(&conj[b]).unwrap_or(false) {
                    out.push(Violation::OrbitNotClosed {
                        point: pt.clone(),
                        factor: i,
                        detail: format!("conjugates {} and {} coincide", a, b),
                    });
                }
            }
        }
    }
    // pairwise separation across orbits
    for i in 0..pd.factors.len() {
        for j in (i + 1)..pd.factors.len() {
            let ci = pd.factors[i].conjugates();
            let cj = pd.factors[j].conjugates();
            for (a, ga) in ci.iter().enumerate() {
                for (b, gb) in cj.iter().enumerate() {
                    if ga.same_class(gb).unwrap_or(false) {
                        out.push(Violation::NotWellSeparated {
                            point: pt.clone(),
                            first: (i, a as u32),
                            second: (j, b as u32),
                        });
                    }
                }
            }
        }
    }
}

/// One Stokes ray of the circle partition, on the lifted cover.
#[derive(Debug, Clone)]
pub struct StokesRay {
    /// Lifted angle in `[0, 2π·cover)`.
    pub lift: f64,
    pub angle: f64,
    pub branch: u32,
    /// Indices into the instantiated factor list of the pairs whose
    /// Stokes set passes through this ray.
    pub pairs: Vec<(usize, usize)>,
}

/// Rank data of one instantiated factor inside a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorRanks {
    pub factor: usize,
    /// `F_⪯`: total multiplicity of factors dominated weakly.
    pub filt_weak: u32,
    /// `F_≺`: total multiplicity of factors dominated strictly.
    pub filt_strict: u32,
    /// `Gr = F_⪯ − F_≺`.
    pub graded: u32,
}

/// An open arc between consecutive Stokes rays, with the dominance order
/// and filtration ranks valid throughout.
#[derive(Debug, Clone)]
pub struct Sector {
    pub start: f64,
    pub end: f64,
    pub midpoint: f64,
    /// Strict dominance edges `(i, j)` meaning factor `i ≺ j` on this arc.
    pub below_edges: Vec<(usize, usize)>,
    pub ranks: Vec<FactorRanks>,
}

/// Circle partition by Stokes directions with per-sector filtration data.
#[derive(Debug, Clone)]
pub struct StokesStructure {
    pub point: BasePoint,
    /// Cover index: lifts live on `[0, 2π·cover)`.
    pub cover: u32,
    /// Instantiated factors (monodromy conjugates) with multiplicities.
    pub factors: Vec<(PuiseuxGerm, u32)>,
    pub rays: Vec<StokesRay>,
    pub sectors: Vec<Sector>,
}

impl StokesStructure {
    /// Distinct ray angles projected to the base circle `[0, 2π)`.
    pub fn base_ray_angles(&self) -> Vec<f64> {
        let mut angles: Vec<f64> = self.rays.iter().map(|r| r.angle).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        angles.dedup_by(|a, b| (*a - *b).abs() < RAY_MERGE_TOL);
        angles
    }

    /// Total rank, constant across sectors.
    pub fn total_rank(&self) -> u32 {
        self.factors.iter().map(|(_, m)| m).sum()
    }
}

/// Build the Stokes structure of a point: rays from all instantiated
/// factor pairs, sector dominance orders and filtration ranks at each
/// sector midpoint.
pub fn stokes_structure(pd: &PointData) -> Result<StokesStructure> {
    let factors = instantiate_unchecked(pd);
    let cover = pd.cover();
    let period = TAU * cover as f64;

    // collect rays on the common cover; a pair's rays are periodic with
    // its own (smaller) cover and repeat across the common one
    let mut raw: Vec<(f64, (usize, usize))> = Vec::new();
    for i in 0..factors.len() {
        for j in (i + 1)..factors.len() {
            let dirs = stokes_directions(&factors[i].0, &factors[j].0)?;
            if dirs.is_empty() {
                continue;
            }
            let pair_period = TAU
                * (factors[i].0.reduced_ramification() as i64)
                    .lcm(&(factors[j].0.reduced_ramification() as i64)) as f64;
            for d in dirs {
                let mut lift = d.lift();
                while lift < period - RAY_MERGE_TOL {
                    if lift >= -RAY_MERGE_TOL {
                        raw.push((lift.max(0.0), (i, j)));
                    }
                    lift += pair_period;
                }
            }
        }
    }
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut rays: Vec<StokesRay> = Vec::new();
    for (lift, pair) in raw {
        match rays.last_mut() {
            Some(last) if (lift - last.lift).abs() < RAY_MERGE_TOL => {
                if !last.pairs.contains(&pair) {
                    last.pairs.push(pair);
                }
            }
            _ => {
                let dir = Direction::from_lift(pd.point, lift, cover);
                rays.push(StokesRay {
                    lift,
                    angle: dir.angle,
                    branch: dir.branch,
                    pairs: vec![pair],
                });
            }
        }
    }

    let arcs: Vec<(f64, f64)> = if rays.is_empty() {
        vec![(0.0, period)]
    } else {
        (0..rays.len())
            .map(|s| {
                let start = rays[s].lift;
                let end = if s + 1 < rays.len() {
                    rays[s + 1].lift
                } else {
                    rays[0].lift + period
                };
                (start, end)
            })
            .collect()
    };

    let mut sectors = Vec::with_capacity(arcs.len());
    for (start, end) in arcs {
        let midpoint = 0.5 * (start + end);
        let dir = Direction::from_lift(pd.point, midpoint, cover);
        let sector = sector_at(&factors, &dir, start, end, midpoint)?;
        sectors.push(sector);
    }

    Ok(StokesStructure {
        point: pd.point,
        cover,
        factors,
        rays,
        sectors,
    })
}

fn sector_at(
    factors: &[(PuiseuxGerm, u32)],
    dir: &Direction,
    start: f64,
    end: f64,
    midpoint: f64,
) -> Result<Sector> {
    let n = factors.len();
    let mut below = vec![vec![false; n]; n];
    let mut below_edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // StrictlyBelow means the second germ is dominated
            match compare_at(&factors[j].0, &factors[i].0, dir)? {
                Comparison::StrictlyBelow => {
                    below[i][j] = true;
                    below_edges.push((i, j));
                }
                Comparison::Incomparable => {
                    return Err(Error::NonGenericDirection);
                }
                _ => {}
            }
        }
    }
    below_edges.sort_unstable();
    let ranks = (0..n)
        .map(|i| {
            let strict: u32 = (0..n).filter(|&j| below[j][i]).map(|j| factors[j].1).sum();
            let weak = strict + factors[i].1;
            FactorRanks {
                factor: i,
                filt_weak: weak,
                filt_strict: strict,
                graded: weak - strict,
            }
        })
        .collect();
    Ok(Sector {
        start,
        end,
        midpoint,
        below_edges,
        ranks,
    })
}

/// Rank of the graded piece at class `[f]`: the multiplicity of the
/// unique instantiated factor in the class of `f`, or 0.
pub fn gr_rank(pd: &PointData, dir: &Direction, f: &PuiseuxGerm) -> u32 {
    if dir.base != pd.point || f.base() != pd.point {
        return 0;
    }
    instantiate_unchecked(pd)
        .into_iter()
        .find(|(h, _)| h.same_class(f).unwrap_or(false))
        .map(|(_, m)| m)
        .unwrap_or(0)
}

/// Stokes filtration rank at a generic direction: the total multiplicity
/// of instantiated factors `h` with `h ≺_θ f` (strict) or `h ⪯_θ f`
/// (weak). Directions where any comparison degenerates are refused.
pub fn filtration_rank(
    pd: &PointData,
    dir: &Direction,
    f: &PuiseuxGerm,
    strict: bool,
) -> Result<u32> {
    let mut total = 0u32;
    for (h, mult) in instantiate(pd, dir)? {
        match compare_at(f, &h, dir)? {
            Comparison::StrictlyBelow => total += mult,
            Comparison::Equivalent if !strict => total += mult,
            Comparison::Incomparable => return Err(Error::NonGenericDirection),
            _ => {}
        }
    }
    Ok(total)
}
