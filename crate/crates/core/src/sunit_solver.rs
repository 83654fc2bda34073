//! Brute-force enumeration of solutions of `alpha x + beta y = 1` in
//! S-units, with checks of the lemma on the critical set
//! `E = {alpha x, beta y, beta y / (alpha x)}` and the place-selection step.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::baker_bounds::{h_parameter, BoundReport, EquationEcho};
use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::heights::{local_height_zero, weil_height};
use crate::number_fields::{
    places_above, support_primes, AlgebraicNumber, FieldDescriptor, Place, PlaceSet,
    PrimeOrInfinity,
};
use crate::s_units::{is_s_unit, is_s_unit_rational, FundamentalSystem, SUnitDecomposition};

/// Default ceiling on the number of candidates an enumeration may test.
pub const DEFAULT_WORK_LIMIT: u128 = 50_000_000;

/// Slack for threshold comparisons; equality counts as not exceeding.
pub const SLACK: f64 = 1e-12;

/// `alpha x + beta y = 1` with `x, y` S-units.
#[derive(Clone, Debug, PartialEq)]
pub struct SUnitEquation {
    field: FieldDescriptor,
    places: PlaceSet,
    alpha: AlgebraicNumber,
    beta: AlgebraicNumber,
}

impl SUnitEquation {
    pub fn new(places: PlaceSet, alpha: AlgebraicNumber, beta: AlgebraicNumber) -> Result<Self> {
        let field = places.field();
        if alpha.is_zero() {
            return Err(Error::Zero("alpha"));
        }
        if beta.is_zero() {
            return Err(Error::Zero("beta"));
        }
        let lift = |t: AlgebraicNumber| -> Result<AlgebraicNumber> {
            if t.field() == field {
                Ok(t)
            } else if t.is_rational() {
                t.in_field(field)
            } else {
                Err(Error::FieldMismatch(
                    t.field().to_string(),
                    field.to_string(),
                ))
            }
        };
        Ok(SUnitEquation {
            field,
            alpha: lift(alpha)?,
            beta: lift(beta)?,
            places,
        })
    }

    /// Over Q with S given by its primes.
    pub fn rational(primes: &[u64], alpha: &str, beta: &str) -> Result<Self> {
        SUnitEquation::new(
            PlaceSet::from_primes(FieldDescriptor::Rational, primes)?,
            AlgebraicNumber::parse_any(alpha)?,
            AlgebraicNumber::parse_any(beta)?,
        )
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn places(&self) -> &PlaceSet {
        &self.places
    }

    pub fn alpha(&self) -> &AlgebraicNumber {
        &self.alpha
    }

    pub fn beta(&self) -> &AlgebraicNumber {
        &self.beta
    }

    pub fn s(&self) -> usize {
        self.places.len()
    }

    pub fn is_solution(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> Result<bool> {
        if x.is_zero() || y.is_zero() {
            return Ok(false);
        }
        let lhs = &(&self.alpha * x) + &(&self.beta * y);
        Ok(lhs.is_one() && is_s_unit(x, &self.places)? && is_s_unit(y, &self.places)?)
    }
}

/// A solution together with heights and exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub x: AlgebraicNumber,
    pub y: AlgebraicNumber,
    pub hx: Ball,
    pub hy: Ball,
    pub dec_x: SUnitDecomposition,
    pub dec_y: SUnitDecomposition,
}

impl Solution {
    /// Checks the pair and fills in heights and decompositions.
    pub fn new(
        eq: &SUnitEquation,
        sys: &FundamentalSystem,
        x: AlgebraicNumber,
        y: AlgebraicNumber,
    ) -> Result<Self> {
        if !eq.is_solution(&x, &y)? {
            return Err(Error::NotASolution(format!("({x}, {y})")));
        }
        let x = x.in_field(eq.field)?;
        let y = y.in_field(eq.field)?;
        Ok(Solution {
            hx: weil_height(&x),
            hy: weil_height(&y),
            dec_x: sys.decompose(&x)?,
            dec_y: sys.decompose(&y)?,
            x,
            y,
        })
    }

    /// `h = max(h(x), h(y))`.
    pub fn height(&self) -> Ball {
        self.hx.max(self.hy)
    }
}

impl Serialize for Solution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Solution", 4)?;
        st.serialize_field("x", &self.x.to_string())?;
        st.serialize_field("y", &self.y.to_string())?;
        st.serialize_field("hx", &self.hx.mid)?;
        st.serialize_field("hy", &self.hy.mid)?;
        st.end()
    }
}

/// The three points `alpha x`, `beta y`, `beta y / (alpha x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSet {
    pub points: [AlgebraicNumber; 3],
}

impl CriticalSet {
    pub fn new(eq: &SUnitEquation, sol: &Solution) -> Self {
        let ax = &eq.alpha * &sol.x;
        let by = &eq.beta * &sol.y;
        let q = &by / &ax;
        CriticalSet {
            points: [ax, by, q],
        }
    }
}

/// Number of candidates tested for a given cap: `2 (2 cap + 1)^rank`.
pub fn enumeration_work(rank: usize, cap: u32) -> u128 {
    let side = 2 * cap as u128 + 1;
    (0..rank).fold(2u128, |acc, _| acc.saturating_mul(side))
}

pub fn enumerate_solutions(eq: &SUnitEquation, cap: u32) -> Result<Vec<Solution>> {
    enumerate_solutions_with_limit(eq, cap, DEFAULT_WORK_LIMIT)
}

/// All solutions whose `x` has exponents `|b_i| <= cap`, sorted by `(x, y)`.
pub fn enumerate_solutions_with_limit(
    eq: &SUnitEquation,
    cap: u32,
    work_limit: u128,
) -> Result<Vec<Solution>> {
    if cap == 0 {
        return Err(Error::Domain("exponent cap must be at least 1".into()));
    }
    let sys = FundamentalSystem::new(&eq.places)?;
    let rank = sys.rank();
    let needed = enumeration_work(rank, cap);
    if needed > work_limit {
        return Err(Error::WorkLimit {
            needed,
            limit: work_limit,
        });
    }
    let side = 2 * cap as u64 + 1;
    let boxes = (needed / 2) as u64;
    let cap = cap as i64;

    let mut pairs: Vec<(AlgebraicNumber, AlgebraicNumber)> =
        if eq.field == FieldDescriptor::Rational {
            let powers: Vec<Vec<BigRational>> = sys
                .units()
                .iter()
                .map(|u| (-cap..=cap).map(|b| u.pow(b).a().clone()).collect())
                .collect();
            let primes = eq.places.primes_below();
            let alpha = eq.alpha.a().clone();
            let beta = eq.beta.a().clone();
            let one = BigRational::from_integer(BigInt::from(1));
            (0..boxes)
                .into_par_iter()
                .flat_map_iter(|idx| {
                    let mut x = one.clone();
                    let mut r = idx;
                    for p in &powers {
                        x *= &p[(r % side) as usize];
                        r /= side;
                    }
                    let mut out = Vec::new();
                    for x in [x.clone(), -x] {
                        let y = (&one - &alpha * &x) / &beta;
                        if is_s_unit_rational(&y, &primes) {
                            out.push((AlgebraicNumber::rational(x), AlgebraicNumber::rational(y)));
                        }
                    }
                    out
                })
                .collect()
        } else {
            let powers: Vec<Vec<AlgebraicNumber>> = sys
                .units()
                .iter()
                .map(|u| (-cap..=cap).map(|b| u.pow(b)).collect())
                .collect();
            let one = AlgebraicNumber::one(eq.field);
            let found: Result<Vec<Vec<_>>> = (0..boxes)
                .into_par_iter()
                .map(|idx| {
                    let mut x = one.clone();
                    let mut r = idx;
                    for p in &powers {
                        x = &x * &p[(r % side) as usize];
                        r /= side;
                    }
                    let mut out = Vec::new();
                    for x in [x.clone(), -&x] {
                        let y = &(&one - &(&eq.alpha * &x)) / &eq.beta;
                        if !y.is_zero() && is_s_unit(&y, &eq.places)? {
                            out.push((x, y));
                        }
                    }
                    Ok(out)
                })
                .collect();
            found?.into_iter().flatten().collect()
        };
    pairs.sort();
    pairs.dedup();
    pairs
        .into_iter()
        .map(|(x, y)| Solution::new(eq, &sys, x, y))
        .collect()
}

/// Places where some member of `E` or a coefficient is not a unit, plus S.
fn relevant_places(eq: &SUnitEquation, e: &CriticalSet) -> Result<Vec<Place>> {
    let mut places: Vec<Place> = eq.places.places().to_vec();
    let mut primes = Vec::new();
    for t in e.points.iter().chain([&eq.alpha, &eq.beta]) {
        primes.extend(support_primes(t)?);
    }
    primes.sort_unstable();
    primes.dedup();
    for q in primes {
        for w in places_above(PrimeOrInfinity::Prime(q), eq.field)? {
            if !places.contains(&w) {
                places.push(w);
            }
        }
    }
    places.sort();
    Ok(places)
}

fn check_solution(eq: &SUnitEquation, sol: &Solution) -> Result<()> {
    if eq.is_solution(&sol.x, &sol.y)? {
        Ok(())
    } else {
        Err(Error::NotASolution(format!("({}, {})", sol.x, sol.y)))
    }
}

/// `h_w(P) > delta_w log 2`, exact at finite places.
fn exceeds_threshold(p: &AlgebraicNumber, w: &Place) -> Result<bool> {
    match w {
        Place::Finite { .. } => Ok(crate::number_fields::ord(p, w)? > 0),
        Place::Archimedean { .. } => {
            let h = local_height_zero(p, w)?;
            Ok(h.mid > std::f64::consts::LN_2 + SLACK)
        }
    }
}

/// At every place at most one member of `E` has `h_w(P) > delta_w log 2`.
pub fn lemma41_item1(sol: &Solution, eq: &SUnitEquation) -> Result<bool> {
    check_solution(eq, sol)?;
    let e = CriticalSet::new(eq, sol);
    for w in relevant_places(eq, &e)? {
        let mut count = 0;
        for p in &e.points {
            if exceeds_threshold(p, &w)? {
                count += 1;
            }
        }
        if count > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pairwise differences among `h(x), h(y), h(alpha x), h(beta y),
/// h(beta y / alpha x)` are at most `3H`, and at most `2H` except for the
/// pair `(h(x), h(y))`.
pub fn lemma41_item2(sol: &Solution, eq: &SUnitEquation) -> Result<bool> {
    check_solution(eq, sol)?;
    let big_h = h_parameter(&eq.alpha, &eq.beta, eq.field.degree())?;
    let e = CriticalSet::new(eq, sol);
    let hs = [
        sol.hx,
        sol.hy,
        weil_height(&e.points[0]),
        weil_height(&e.points[1]),
        weil_height(&e.points[2]),
    ];
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let diff = (hs[i] - hs[j]).abs();
            let limit = if (i, j) == (0, 1) {
                big_h.scale(3.0)
            } else {
                big_h.scale(2.0)
            };
            if diff.mid > limit.mid + SLACK * limit.mid.max(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Weighted S-mass `sum_{w in S} (n_w / d) h_w(P)` of each point of E.
fn s_masses(eq: &SUnitEquation, e: &CriticalSet) -> Result<[Ball; 3]> {
    let d = eq.field.degree() as f64;
    let mut out = [Ball::ZERO; 3];
    for (k, p) in e.points.iter().enumerate() {
        for w in eq.places.places() {
            out[k] = out[k] + local_height_zero(p, w)?.scale(w.local_degree() as f64 / d);
        }
    }
    Ok(out)
}

/// For each `P` in E, the weighted S-mass of `h_w(P)` is at least `h - 3H`.
pub fn lemma41_item3(sol: &Solution, eq: &SUnitEquation) -> Result<bool> {
    check_solution(eq, sol)?;
    let big_h = h_parameter(&eq.alpha, &eq.beta, eq.field.degree())?;
    let e = CriticalSet::new(eq, sol);
    let target = sol.height() - big_h.scale(3.0);
    Ok(s_masses(eq, &e)?
        .iter()
        .all(|m| m.mid >= target.mid - SLACK * target.mid.abs().max(1.0)))
}

/// Outcome of the place-selection step.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PlaceSelection {
    /// `(n_w/d) h_w(P) >= (h - 3H)/s` at an archimedean `w`.
    Archimedean {
        point: usize,
        place: Place,
        value: f64,
        threshold: f64,
    },
    /// A finite place carrying two members of E above the threshold; then
    /// `h <= 3H` must hold and `certified` records whether it does.
    Collision {
        place: Place,
        points: (usize, usize),
        h: f64,
        three_h: f64,
        certified: bool,
    },
    /// Neither case applies; never expected.
    Unresolved,
}

pub fn place_selection(sol: &Solution, eq: &SUnitEquation) -> Result<PlaceSelection> {
    check_solution(eq, sol)?;
    let big_h = h_parameter(&eq.alpha, &eq.beta, eq.field.degree())?;
    let e = CriticalSet::new(eq, sol);
    let d = eq.field.degree() as f64;
    let h = sol.height();
    let threshold = ((h - big_h.scale(3.0)).scale(1.0 / eq.s() as f64)).mid;
    let slack = SLACK * threshold.abs().max(1.0);
    let places = eq.places.places();
    let mut table = vec![[0.0f64; 3]; places.len()];
    for (i, w) in places.iter().enumerate() {
        for (k, p) in e.points.iter().enumerate() {
            table[i][k] = local_height_zero(p, w)?
                .scale(w.local_degree() as f64 / d)
                .mid;
        }
    }
    for k in 0..3 {
        let best = (0..places.len())
            .max_by(|&a, &b| table[a][k].total_cmp(&table[b][k]).then(b.cmp(&a)))
            .expect("S is nonempty");
        if places[best].is_archimedean() && table[best][k] >= threshold - slack {
            return Ok(PlaceSelection::Archimedean {
                point: k,
                place: places[best],
                value: table[best][k],
                threshold,
            });
        }
    }
    for (i, w) in places
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_archimedean())
    {
        for a in 0..3 {
            for b in a + 1..3 {
                if table[i][a].min(table[i][b]) >= threshold - slack {
                    let three_h = big_h.scale(3.0);
                    return Ok(PlaceSelection::Collision {
                        place: *w,
                        points: (a, b),
                        h: h.mid,
                        three_h: three_h.mid,
                        certified: h.mid <= three_h.mid + SLACK * three_h.mid,
                    });
                }
            }
        }
    }
    Ok(PlaceSelection::Unresolved)
}

/// Result of checking solutions against a bound report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub bound: f64,
    pub max_height: f64,
    /// `bound - max_height`; the bound itself when there are no solutions.
    pub margin: f64,
    pub solutions: usize,
    pub worst: Option<(String, String)>,
}

pub fn verify_bound(
    eq: &SUnitEquation,
    report: &BoundReport,
    solutions: &[Solution],
) -> Result<Verdict> {
    if report.equation != EquationEcho::new(eq) {
        return Err(Error::EquationMismatch);
    }
    let worst = solutions
        .iter()
        .max_by(|a, b| a.height().hi().total_cmp(&b.height().hi()));
    let max_height = worst.map_or(0.0, |s| s.height().hi());
    let margin = report.bound - max_height;
    Ok(Verdict {
        pass: margin >= 0.0,
        bound: report.bound,
        max_height,
        margin,
        solutions: solutions.len(),
        worst: worst.map(|s| (s.x.to_string(), s.y.to_string())),
    })
}
