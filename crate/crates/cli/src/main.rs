mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use baker_core::baker_bounds::{sunit_bound, BoundReport, InjectedConstants};
use baker_core::number_fields::{AlgebraicNumber, FieldDescriptor, PlaceSet};
use baker_core::sunit_solver::{
    enumerate_solutions_with_limit, verify_bound, SUnitEquation, Solution, DEFAULT_WORK_LIMIT,
};
use baker_core::tubular::{feasible_signatures, IncidenceData};
use baker_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use output::{num, to_json_line, to_json_pretty};

const EXIT_FAIL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_MISSING_CONSTANT: u8 = 3;
const EXIT_WORK_LIMIT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "baker",
    version,
    about = "Explicit height bounds and solution search for S-unit equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Height bound for every solution of alpha x + beta y = 1 in S-units.
    Bound(BoundArgs),
    /// Enumerate solutions whose exponents are at most the cap.
    Solve(SolveArgs),
    /// Enumerate solutions and check them against the bound.
    Verify(VerifyArgs),
    /// m_B, m_Y and feasible place signatures from incidence data.
    Tubular(TubularArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldKind {
    #[value(name = "Q", alias = "rational")]
    Q,
    Quadratic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Human,
}

#[derive(Args)]
struct EquationArgs {
    #[arg(long, value_enum, default_value = "Q")]
    field: FieldKind,
    /// Squarefree D > 1 for Q(sqrt D).
    #[arg(long = "D")]
    d: Option<i64>,
    /// Rational primes below S, comma-separated; may be empty.
    #[arg(long = "S")]
    s: String,
    /// `a`, `a/b` or `a/b+c/d*sqrtD`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// JSON file with injected constants (C_prop23, gy_c26, gy_c1).
    #[arg(long)]
    constants: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    eq: EquationArgs,
    /// Also evaluate the closed forms; needs gy_c26 and gy_c1.
    #[arg(long)]
    closed_form: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    eq: EquationArgs,
    /// Largest absolute exponent tried for x.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    cap: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    eq: EquationArgs,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    cap: u32,
    #[arg(long)]
    closed_form: bool,
    /// Replace the computed bound (for testing the FAIL path).
    #[arg(long, hide = true, allow_hyphen_values = true)]
    override_bound: Option<f64>,
}

#[derive(Args)]
struct TubularArgs {
    /// JSON: {"n": 3, "finite": [[1],[2],[3]], "contained": [[1,2],[1,3],[2,3]]}.
    #[arg(long)]
    incidence: PathBuf,
    #[arg(long, default_value_t = 10)]
    max_inf: usize,
    #[arg(long, default_value_t = 10)]
    max_fin: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MissingConstant(_) => EXIT_MISSING_CONSTANT,
            Error::WorkLimit { .. } => EXIT_WORK_LIMIT,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn parse_primes(list: &str) -> Result<Vec<u64>, Failure> {
    let mut primes = Vec::new();
    for item in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let p: u64 = item
            .parse()
            .map_err(|_| Failure::invalid(format!("bad prime `{item}` in --S")))?;
        if primes.contains(&p) {
            return Err(Failure::invalid(format!("prime {p} listed twice in --S")));
        }
        primes.push(p);
    }
    Ok(primes)
}

fn field_of(args: &EquationArgs) -> Result<FieldDescriptor, Failure> {
    match (args.field, args.d) {
        (FieldKind::Q, None) => Ok(FieldDescriptor::Rational),
        (FieldKind::Q, Some(_)) => {
            Err(Failure::invalid("--D is only valid with --field quadratic"))
        }
        (FieldKind::Quadratic, None) => Err(Failure::invalid("--field quadratic needs --D")),
        (FieldKind::Quadratic, Some(d)) => Ok(FieldDescriptor::real_quadratic(d)?),
    }
}

fn equation(args: &EquationArgs) -> Result<SUnitEquation, Failure> {
    let field = field_of(args)?;
    let places = PlaceSet::from_primes(field, &parse_primes(&args.s)?)?;
    let alpha = AlgebraicNumber::parse_in(&args.alpha, field)?;
    let beta = AlgebraicNumber::parse_in(&args.beta, field)?;
    Ok(SUnitEquation::new(places, alpha, beta)?)
}

fn injected(path: Option<&Path>) -> Result<InjectedConstants, Failure> {
    match path {
        None => Ok(InjectedConstants::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", p.display())))?;
            Ok(InjectedConstants::from_json(&text)?)
        }
    }
}

fn work_limit() -> Result<u128, Failure> {
    match std::env::var("BAKER_WORK_LIMIT") {
        Err(_) => Ok(DEFAULT_WORK_LIMIT),
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::invalid(format!(
                "BAKER_WORK_LIMIT must be a nonnegative integer, got `{v}`"
            ))
        }),
    }
}

fn describe(eq: &SUnitEquation) -> String {
    let places: Vec<String> = eq.places().places().iter().map(|w| w.to_string()).collect();
    format!(
        "({})*x + ({})*y = 1 over {}, S = {{{}}}",
        eq.alpha(),
        eq.beta(),
        eq.field(),
        places.join(", ")
    )
}

fn bound_human(r: &BoundReport, eq: &SUnitEquation) -> String {
    let mut out = vec![
        describe(eq),
        format!(
            "branch: {}",
            serde_json::to_value(r.branch)
                .unwrap()
                .as_str()
                .unwrap_or("?")
        ),
        format!(
            "d = {}, s = {}, H = {}, R_S = {}",
            r.d,
            r.s,
            num(r.big_h),
            num(r.r_s)
        ),
    ];
    if r.p_s > 0 {
        out.push(format!("P_S = {}, P'_S = {}", r.p_s, r.p_prime_s));
    }
    for c in &r.constants {
        out.push(format!("{} = {}", c.name, num(c.value)));
    }
    out.push(format!(
        "trivial term 4H + log 2 = {}",
        num(r.terms.trivial)
    ));
    for (name, v) in [
        ("collision term 3H", r.terms.collision),
        ("archimedean term", r.terms.archimedean),
        ("finite term", r.terms.finite),
    ] {
        if let Some(v) = v {
            out.push(format!("{name} = {}", num(v)));
        }
    }
    if let Some(cf) = &r.closed_form {
        for (name, v) in [
            ("closed form (gy_c26)", cf.gy_c26),
            ("closed form (gy_c1)", cf.gy_c1),
        ] {
            if let Some(v) = v {
                out.push(format!("{name} = {}", num(v)));
            }
        }
    }
    out.push(format!("bound: max(h(x), h(y)) <= {}", num(r.bound)));
    out.join("\n")
}

fn bound_tsv(r: &BoundReport) -> String {
    let branch = serde_json::to_value(r.branch).unwrap();
    let mut rows = vec![
        format!("branch\t{}", branch.as_str().unwrap_or("?")),
        format!("d\t{}", r.d),
        format!("s\t{}", r.s),
        format!("H\t{}", output::sig10(r.big_h)),
        format!("R_S\t{}", output::sig10(r.r_s)),
        format!("P_S\t{}", r.p_s),
        format!("P_prime_S\t{}", r.p_prime_s),
        format!("trivial\t{}", output::sig10(r.terms.trivial)),
    ];
    for (name, v) in [
        ("collision", r.terms.collision),
        ("archimedean", r.terms.archimedean),
        ("finite", r.terms.finite),
    ] {
        if let Some(v) = v {
            rows.push(format!("{name}\t{}", output::sig10(v)));
        }
    }
    rows.push(format!("bound\t{}", output::sig10(r.bound)));
    rows.join("\n")
}

fn cmd_bound(args: &BoundArgs) -> CmdResult {
    let eq = equation(&args.eq)?;
    let consts = injected(args.eq.constants.as_deref())?;
    let report = sunit_bound(&eq, &consts, args.closed_form)?;
    let text = match args.eq.format.unwrap_or(Format::Json) {
        Format::Json => to_json_pretty(serde_json::to_value(&report).expect("report serializes")),
        Format::Tsv => bound_tsv(&report),
        Format::Human => bound_human(&report, &eq),
    };
    println!("{text}");
    Ok(0)
}

fn solution_json(s: &Solution) -> Value {
    json!({"schema": 1, "x": s.x.to_string(), "y": s.y.to_string(), "hx": s.hx.mid, "hy": s.hy.mid})
}

fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let eq = equation(&args.eq)?;
    let sols = enumerate_solutions_with_limit(&eq, args.cap, work_limit()?)?;
    let lines: Vec<String> = match args.eq.format.unwrap_or(Format::Json) {
        Format::Json => sols
            .iter()
            .map(|s| to_json_line(solution_json(s)))
            .collect(),
        Format::Tsv => std::iter::once("x\ty\thx\thy".to_string())
            .chain(sols.iter().map(|s| {
                format!(
                    "{}\t{}\t{}\t{}",
                    s.x,
                    s.y,
                    output::sig10(s.hx.mid),
                    output::sig10(s.hy.mid)
                )
            }))
            .collect(),
        Format::Human => std::iter::once(format!(
            "{}: {} solutions with cap {}",
            describe(&eq),
            sols.len(),
            args.cap
        ))
        .chain(
            sols.iter()
                .map(|s| format!("x = {}, y = {}, h = {}", s.x, s.y, num(s.height().mid))),
        )
        .collect(),
    };
    for line in lines {
        println!("{line}");
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let eq = equation(&args.eq)?;
    let consts = injected(args.eq.constants.as_deref())?;
    let mut report = sunit_bound(&eq, &consts, args.closed_form)?;
    if let Some(b) = args.override_bound {
        report.bound = b;
    }
    let sols = enumerate_solutions_with_limit(&eq, args.cap, work_limit()?)?;
    let v = verify_bound(&eq, &report, &sols)?;
    let verdict = if v.pass { "PASS" } else { "FAIL" };
    let text = match args.eq.format.unwrap_or(Format::Human) {
        Format::Json => to_json_pretty(json!({
            "schema": 1,
            "verdict": verdict,
            "bound": v.bound,
            "max_height": v.max_height,
            "margin": v.margin,
            "solutions": v.solutions,
            "cap": args.cap,
            "worst": v.worst.as_ref().map(|(x, y)| json!({"x": x, "y": y})),
        })),
        Format::Tsv => format!(
            "verdict\tbound\tmax_height\tmargin\tsolutions\tcap\n{verdict}\t{}\t{}\t{}\t{}\t{}",
            output::sig10(v.bound),
            output::sig10(v.max_height),
            output::sig10(v.margin),
            v.solutions,
            args.cap
        ),
        Format::Human => {
            let worst = v.worst.as_ref().map_or(String::new(), |(x, y)| {
                format!(", highest at x = {x}, y = {y}")
            });
            format!(
                "{verdict}: max height {} {} bound {} (margin {}), {} solutions with cap {}{worst}",
                num(v.max_height),
                if v.pass { "<=" } else { ">" },
                num(v.bound),
                num(v.margin),
                v.solutions,
                args.cap
            )
        }
    };
    println!("{text}");
    Ok(if v.pass { 0 } else { EXIT_FAIL })
}

fn term(coef: usize, var: &str) -> Option<String> {
    match coef {
        0 => None,
        1 => Some(var.to_string()),
        c => Some(format!("{c}*{var}")),
    }
}

fn condition_text(m_b: usize, m_y: usize, n: usize) -> String {
    let terms: Vec<String> = [term(m_b - 1, "r_inf"), term(m_y, "r_fin")]
        .into_iter()
        .flatten()
        .collect();
    if terms.is_empty() {
        "condition always holds".to_string()
    } else {
        format!("condition <=> {} < {n}", terms.join(" + "))
    }
}

fn cmd_tubular(args: &TubularArgs) -> CmdResult {
    let text = fs::read_to_string(&args.incidence)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", args.incidence.display())))?;
    let inc = IncidenceData::from_json(&text)?;
    let n = inc.n();
    let m_b = inc.m_baker();
    let m_y = inc.m_tubular().ok();
    let sigs = match (m_b, m_y) {
        (Some(b), Some(y)) => feasible_signatures(b, y, n, (args.max_inf, args.max_fin)),
        _ => Vec::new(),
    };
    let condition = match (m_b, m_y) {
        (Some(b), Some(y)) => Some(condition_text(b, y, n)),
        _ => None,
    };
    let out = match args.format.unwrap_or(Format::Human) {
        Format::Json => to_json_pretty(json!({
            "schema": 1,
            "n": n,
            "m_B": m_b,
            "m_Y": m_y,
            "condition": condition,
            "caps": {"r_inf": args.max_inf, "r_fin": args.max_fin},
            "feasible_signatures": sigs,
        })),
        Format::Tsv => std::iter::once("r_inf\tr_fin".to_string())
            .chain(sigs.iter().map(|s| format!("{}\t{}", s.r_inf, s.r_fin)))
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Human => {
            let mut lines = vec![format!("n={n}")];
            match (m_b, m_y, &condition) {
                (Some(b), Some(y), Some(c)) => lines.push(format!("m_B={b} m_Y={y}; {c}")),
                _ => {
                    lines
                        .push(m_b.map_or("m_B does not exist".to_string(), |b| format!("m_B={b}")));
                    lines
                        .push(m_y.map_or("m_Y does not exist".to_string(), |y| format!("m_Y={y}")));
                }
            }
            if condition.is_some() {
                lines.push(format!(
                    "feasible signatures with r_inf <= {}, r_fin <= {}:",
                    args.max_inf, args.max_fin
                ));
                if sigs.is_empty() {
                    lines.push("  none".to_string());
                }
                for r_inf in 1..=args.max_inf {
                    let fins: Vec<usize> = sigs
                        .iter()
                        .filter(|s| s.r_inf == r_inf)
                        .map(|s| s.r_fin)
                        .collect();
                    if let (Some(lo), Some(hi)) = (fins.first(), fins.last()) {
                        lines.push(format!("  r_inf={r_inf}: r_fin in {lo}..={hi}"));
                    }
                }
            }
            lines.join("\n")
        }
    };
    println!("{out}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Tubular(a) => cmd_tubular(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
