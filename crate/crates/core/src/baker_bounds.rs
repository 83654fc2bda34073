//! Explicit constants of the linear-forms-in-logarithms route to a height
//! bound for S-unit equations, the inequality solver, and bound reports.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::heights::{log_star, weil_height};
use crate::number_fields::{AlgebraicNumber, FieldDescriptor, Place};
use crate::s_units::{
    prime_norm_stats, product_bound_constant, FundamentalSystem, ProductBoundCheck,
};
use crate::sunit_solver::SUnitEquation;

/// Relative tolerance of the bisection in [`solve_height_inequality`].
pub const SOLVER_TOLERANCE: f64 = 1e-9;
pub const SOLVER_MAX_ITERATIONS: usize = 500;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn check_ds(d: u32, s: usize, min_s: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    if s < min_s {
        return Err(Error::Domain(format!(
            "s = {s} but at least {min_s} is required"
        )));
    }
    Ok(())
}

/// Exponent bound constant: `B <= c1 h(y)`.
///
/// `((s-1)!)^2 / (2^(s-3) log 2)` for `d = 1`, and
/// `((s-1)!)^2 / 2^(s-2) * log(3d)^3` for `d >= 2`.
pub fn c1_const(d: u32, s: usize) -> Result<f64> {
    check_ds(d, s, 2)?;
    let f = factorial(s as u32 - 1).powi(2);
    let s = s as i32;
    Ok(if d == 1 {
        f / (2f64.powi(s - 3) * LN_2)
    } else {
        f / 2f64.powi(s - 2) * (3.0 * f64::from(d)).ln().powi(3)
    })
}

/// `d^3 log(e d) min(1.451 (30 sqrt2)^(s+4) (s+1)^5.5, pi 2^(6.5 s + 27))`.
pub fn c2_const(d: u32, s: usize) -> Result<f64> {
    check_ds(d, s, 2)?;
    let df = f64::from(d);
    let sf = s as f64;
    let first = 1.451 * (30.0 * 2f64.sqrt()).powf(sf + 4.0) * (sf + 1.0).powf(5.5);
    let second = PI * 2f64.powf(6.5 * sf + 27.0);
    Ok(df.powi(3) * (E * df).ln() * first.min(second))
}

/// `e sqrt(s-2) ((s-1)!)^2 / 2^(s-2) pi^(s-2)` times 8.5 (`d = 1`) or
/// `29 d log d` (`d >= 2`).
pub fn c3_const(d: u32, s: usize) -> Result<f64> {
    check_ds(d, s, 3)?;
    let df = f64::from(d);
    let tail = if d == 1 { 8.5 } else { 29.0 * df * df.ln() };
    let si = s as i32;
    Ok(
        E * ((s - 2) as f64).sqrt() * factorial(s as u32 - 1).powi(2) / 2f64.powi(si - 2)
            * PI.powi(si - 2)
            * tail,
    )
}

/// Externally sourced constants, all optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectedConstants {
    /// `C(d, s)` of the lower bound `log|alpha - 1|_w >= -C N(w) R_S log* h(alpha)`.
    #[serde(rename = "C_prop23", default, skip_serializing_if = "Option::is_none")]
    pub c_prop23: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gy_c26: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gy_c1: Option<f64>,
}

impl InjectedConstants {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: InjectedConstants =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("constants file: {e}")))?;
        for (name, v) in [
            ("C_prop23", c.c_prop23),
            ("gy_c26", c.gy_c26),
            ("gy_c1", c.gy_c1),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Parse(format!(
                        "{name} must be a positive real, got {v}"
                    )));
                }
            }
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BakerConstants {
    pub d: u32,
    pub s: usize,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `c_1(s)` of the product bound for fundamental systems.
    pub bg_c1: f64,
    pub injected: InjectedConstants,
}

impl BakerConstants {
    pub fn new(d: u32, s: usize, injected: InjectedConstants) -> Result<Self> {
        Ok(BakerConstants {
            d,
            s,
            c1: c1_const(d, s)?,
            c2: c2_const(d, s)?,
            c3: c3_const(d, s)?,
            bg_c1: product_bound_constant(d, s)?,
            injected,
        })
    }
}

/// `H = max(h(alpha), h(beta), 1, pi/d)`.
pub fn h_parameter(alpha: &AlgebraicNumber, beta: &AlgebraicNumber, d: u32) -> Result<Ball> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::Zero("coefficient of the S-unit equation"));
    }
    if d == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    Ok(weil_height(alpha)
        .max(weil_height(beta))
        .max(Ball::exact(1.0))
        .max(Ball::pi().scale(1.0 / f64::from(d))))
}

/// `log* x` extended by `log* 0 = 1`, as heights may vanish.
fn log_star_height(h: f64) -> Result<f64> {
    if h < 0.0 {
        return Err(Error::Domain(format!("negative height {h}")));
    }
    if h <= E {
        Ok(1.0)
    } else {
        log_star(h)
    }
}

/// `-C N(w) R_S log* h(alpha)`, a lower bound for `log|alpha - 1|_w`.
pub fn baker_lower_bound(
    h_alpha: f64,
    w: &Place,
    consts: &BakerConstants,
    r_s: f64,
) -> Result<f64> {
    let c = consts
        .injected
        .c_prop23
        .ok_or(Error::MissingConstant("C_prop23"))?;
    Ok(-c * w.baker_norm() as f64 * r_s * log_star_height(h_alpha)?)
}

/// `h_L R_S m^(d/e)`, an upper bound for the regulator after adjoining the
/// primes dividing `m`.
pub fn regulator_extension_bound(h_l: f64, r_s: f64, m: u64, d: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    Ok(h_l * r_s * (m as f64).powf(f64::from(d) / E))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverOutcome {
    pub h_star: f64,
    pub iterations: usize,
    pub tolerance: f64,
}

/// Largest root of `h/s - H = K log(c1 h / (sqrt2 H))`.
///
/// The left minus the right side is convex with its minimum at `h = sK`, so
/// the largest root lies to the right of `sK`; the upper end of the bracket
/// is found by doubling.
pub fn solve_crossover(s: f64, k: f64, c1: f64, big_h: f64) -> Result<SolverOutcome> {
    for (name, v) in [("s", s), ("c1", c1), ("H", big_h)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("K must be nonnegative, got {k}")));
    }
    if k == 0.0 {
        return Ok(SolverOutcome {
            h_star: s * big_h,
            iterations: 0,
            tolerance: SOLVER_TOLERANCE,
        });
    }
    let f = |h: f64| h / s - big_h - k * (c1 * h / (2f64.sqrt() * big_h)).ln();
    let mut lo = s * k;
    if f(lo) > 0.0 {
        // the inequality holds nowhere
        return Ok(SolverOutcome {
            h_star: lo,
            iterations: 0,
            tolerance: SOLVER_TOLERANCE,
        });
    }
    let mut hi = (2.0 * lo).max(s * big_h);
    let mut iterations = 0;
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations > SOLVER_MAX_ITERATIONS || !hi.is_finite() {
            return Err(Error::NoConvergence(iterations));
        }
    }
    while hi - lo > SOLVER_TOLERANCE * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > SOLVER_MAX_ITERATIONS {
            return Err(Error::NoConvergence(iterations));
        }
    }
    Ok(SolverOutcome {
        h_star: hi,
        iterations,
        tolerance: SOLVER_TOLERANCE,
    })
}

/// Solves the final inequality with `K = (n_w/d) c2 c3 R_S H`.
pub fn solve_height_inequality(
    s: usize,
    d: u32,
    n_w: u32,
    r_s: f64,
    big_h: f64,
    consts: &BakerConstants,
) -> Result<SolverOutcome> {
    if !(r_s > 0.0) {
        return Err(Error::Domain(format!("R_S must be positive, got {r_s}")));
    }
    let k = f64::from(n_w) / f64::from(d) * consts.c2 * consts.c3 * r_s * big_h;
    solve_crossover(s as f64, k, consts.c1, big_h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `s <= 2`: `h <= 4H + log 2`.
    Trivial,
    /// Two points of E at one finite place: `h <= 3H`.
    Collision,
    /// At most two finite places; an archimedean place carries the mass.
    Archimedean,
    /// More than two finite places; estimate in terms of `P'_S`.
    Finite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BuiltinFormula,
    InjectedConfig,
    Surrogate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantEntry {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
}

/// The equation as echoed in reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationEcho {
    pub field: FieldDescriptor,
    #[serde(rename = "S")]
    pub places: Vec<String>,
    pub alpha: String,
    pub beta: String,
}

impl EquationEcho {
    pub fn new(eq: &SUnitEquation) -> Self {
        EquationEcho {
            field: eq.field(),
            places: eq.places().places().iter().map(|w| w.to_string()).collect(),
            alpha: eq.alpha().to_string(),
            beta: eq.beta().to_string(),
        }
    }
}

/// Every candidate bound entering the final max.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundTerms {
    pub trivial: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archimedean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverReport {
    pub archimedean: SolverOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite: Option<SolverOutcome>,
    pub n_w: u32,
}

/// Closed forms `c R_S log*(R_S) H` and `c' P'_S R_S (1 + log* R_S / log* P'_S) H`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedForms {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gy_c26: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gy_c1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub schema: u32,
    pub equation: EquationEcho,
    pub branch: Branch,
    pub d: u32,
    pub s: usize,
    #[serde(rename = "H")]
    pub big_h: f64,
    #[serde(rename = "R_S")]
    pub r_s: f64,
    #[serde(rename = "P_S")]
    pub p_s: u64,
    #[serde(rename = "P_prime_S")]
    pub p_prime_s: u64,
    pub fundamental_system: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_bound: Option<ProductBoundCheck>,
    pub constants: Vec<ConstantEntry>,
    pub terms: BoundTerms,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedForms>,
    pub bound: f64,
}

fn entry(name: &str, value: f64, provenance: Provenance) -> ConstantEntry {
    ConstantEntry {
        name: name.into(),
        value,
        provenance,
    }
}

/// Height bound for all solutions of `eq`.
///
/// The bound is the max over every case of the argument, so it holds
/// whichever case a solution falls into. With `closed_form` set, both
/// injected closed-form constants must be present.
pub fn sunit_bound(
    eq: &SUnitEquation,
    injected: &InjectedConstants,
    closed_form: bool,
) -> Result<BoundReport> {
    if closed_form {
        injected.gy_c26.ok_or(Error::MissingConstant("gy_c26"))?;
        injected.gy_c1.ok_or(Error::MissingConstant("gy_c1"))?;
    }
    let d = eq.field().degree();
    let s = eq.s();
    let big_h = h_parameter(eq.alpha(), eq.beta(), d)?.hi();
    let sys = FundamentalSystem::new(eq.places())?;
    let r_s = sys.regulator()?.hi();
    let (p_s, p_prime_s) = prime_norm_stats(eq.places());
    let trivial = 4.0 * big_h + LN_2;
    let mut report = BoundReport {
        schema: 1,
        equation: EquationEcho::new(eq),
        branch: Branch::Trivial,
        d,
        s,
        big_h,
        r_s,
        p_s,
        p_prime_s,
        fundamental_system: sys.units().iter().map(|u| u.to_string()).collect(),
        product_bound: if s >= 2 {
            Some(sys.product_bound_check()?)
        } else {
            None
        },
        constants: Vec::new(),
        terms: BoundTerms {
            trivial,
            ..Default::default()
        },
        solver: None,
        closed_form: None,
        bound: trivial,
    };
    if closed_form {
        let ls_r = log_star(r_s)?;
        let ls_p = log_star(p_prime_s as f64)?;
        report.closed_form = Some(ClosedForms {
            gy_c26: injected.gy_c26.map(|c| c * r_s * ls_r * big_h),
            gy_c1: injected
                .gy_c1
                .map(|c| c * p_prime_s as f64 * r_s * (1.0 + ls_r / ls_p) * big_h),
        });
    }
    for (name, v) in [
        ("C_prop23", injected.c_prop23),
        ("gy_c26", injected.gy_c26),
        ("gy_c1", injected.gy_c1),
    ] {
        if let Some(v) = v {
            report
                .constants
                .push(entry(name, v, Provenance::InjectedConfig));
        }
    }
    if s <= 2 {
        return Ok(report);
    }

    let consts = BakerConstants::new(d, s, injected.clone())?;
    report.constants.splice(
        0..0,
        [
            entry("c1", consts.c1, Provenance::BuiltinFormula),
            entry("c2", consts.c2, Provenance::BuiltinFormula),
            entry("c3", consts.c3, Provenance::BuiltinFormula),
            entry("bg_c1", consts.bg_c1, Provenance::BuiltinFormula),
        ],
    );
    // worst case n_w = d
    let arch = solve_height_inequality(s, d, d, r_s, big_h, &consts)?;
    let collision = 3.0 * big_h;
    report.terms.archimedean = Some(arch.h_star);
    report.terms.collision = Some(collision);
    report.branch = Branch::Archimedean;
    let mut bound = arch.h_star.max(collision).max(trivial);
    let mut finite = None;
    if eq.places().finite().count() > 2 {
        let ls_r = log_star(r_s)?;
        let ls_p = log_star(p_prime_s as f64)?;
        let scale = p_prime_s as f64 * (1.0 + ls_r / ls_p);
        report.constants.push(entry(
            "c2*c3*P'_S-factor",
            consts.c2 * consts.c3 * scale,
            Provenance::Surrogate,
        ));
        let k = consts.c2 * consts.c3 * r_s * big_h * scale;
        let out = solve_crossover(s as f64, k, consts.c1, big_h)?;
        report.terms.finite = Some(out.h_star);
        report.branch = Branch::Finite;
        bound = bound.max(out.h_star);
        finite = Some(out);
    }
    report.solver = Some(SolverReport {
        archimedean: arch,
        finite,
        n_w: d,
    });
    report.bound = bound;
    Ok(report)
}
