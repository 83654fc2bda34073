use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn baker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_baker"))
        .args(args)
        .env_remove("BAKER_WORK_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("stdout is JSON")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("baker-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn bound_two_three_is_archimedean() {
    let o = baker(&[
        "bound", "--field", "Q", "--S", "2,3", "--alpha", "1", "--beta", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["branch"], "archimedean");
    assert_eq!(v["s"], 3);
    assert!(v["bound"].as_f64().unwrap() > 4.0 * std::f64::consts::PI);
}

#[test]
fn bound_five_primes_uses_third_largest_norm() {
    let o = baker(&[
        "bound",
        "--field",
        "Q",
        "--S",
        "2,3,5,7,11",
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["branch"], "finite");
    assert_eq!(v["P_prime_S"], 5);
    assert_eq!(v["P_S"], 11);
}

#[test]
fn bound_empty_s_is_trivial() {
    let o = baker(&[
        "bound", "--field", "Q", "--S", "", "--alpha", "1", "--beta", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["branch"], "trivial");
    let want = 4.0 * std::f64::consts::PI + std::f64::consts::LN_2;
    assert!((v["bound"].as_f64().unwrap() - want).abs() < 1e-8);
}

#[test]
fn printed_floats_have_ten_digits() {
    let o = baker(&[
        "bound", "--field", "Q", "--S", "", "--alpha", "1", "--beta", "1", "--format", "tsv",
    ]);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("bound\t")).unwrap();
    assert_eq!(line, "bound\t13.25951779");
}

#[test]
fn output_is_deterministic() {
    let args = [
        "solve", "--field", "Q", "--S", "2,3", "--alpha", "3", "--beta", "5", "--cap", "8",
    ];
    assert_eq!(baker(&args).stdout, baker(&args).stdout);
    let args = [
        "bound",
        "--field",
        "quadratic",
        "--D",
        "2",
        "--S",
        "7",
        "--alpha",
        "1",
        "--beta",
        "1",
    ];
    assert_eq!(baker(&args).stdout, baker(&args).stdout);
}

#[test]
fn solve_over_two() {
    let o = baker(&[
        "solve", "--field", "Q", "--S", "2", "--alpha", "1", "--beta", "1", "--cap", "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    let mut pairs: Vec<(String, String)> = lines
        .iter()
        .map(|v| {
            (
                v["x"].as_str().unwrap().to_string(),
                v["y"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    for (x, y) in pairs.clone() {
        assert!(pairs.contains(&(y, x)), "swap-closed");
    }
    pairs.sort();
    assert_eq!(pairs[0], ("-1".to_string(), "2".to_string()));
}

#[test]
fn solve_cap_zero_is_usage_error() {
    let o = baker(&[
        "solve", "--field", "Q", "--S", "2", "--alpha", "1", "--beta", "1", "--cap", "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn work_limit_exit_code() {
    let o = Command::new(env!("CARGO_BIN_EXE_baker"))
        .args([
            "solve", "--field", "Q", "--S", "2,3,5", "--alpha", "1", "--beta", "1",
        ])
        .env("BAKER_WORK_LIMIT", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(o.stdout.is_empty());
}

#[test]
fn verify_passes_on_fixtures() {
    for (a, b) in [("1", "1"), ("3", "5")] {
        let o = baker(&[
            "verify", "--field", "Q", "--S", "2,3", "--alpha", a, "--beta", b, "--format", "json",
        ]);
        assert_eq!(o.status.code(), Some(0));
        let v = json(&o);
        assert_eq!(v["verdict"], "PASS");
        assert!(v["margin"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn verify_fails_with_zero_bound() {
    let o = baker(&[
        "verify",
        "--field",
        "Q",
        "--S",
        "2,3",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--override-bound",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL"));
}

#[test]
fn verify_quadratic() {
    let o = baker(&[
        "verify",
        "--field",
        "quadratic",
        "--D",
        "2",
        "--S",
        "7",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--cap",
        "6",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).starts_with("PASS"));
}

#[test]
fn validation_errors() {
    let cases: &[&[&str]] = &[
        &[
            "bound", "--field", "Q", "--S", "4", "--alpha", "1", "--beta", "1",
        ],
        &[
            "bound", "--field", "Q", "--S", "2,2", "--alpha", "1", "--beta", "1",
        ],
        &[
            "bound", "--field", "Q", "--S", "2", "--alpha", "0", "--beta", "1",
        ],
        &[
            "bound", "--field", "Q", "--S", "2", "--alpha", "1/0", "--beta", "1",
        ],
        &[
            "bound",
            "--field",
            "quadratic",
            "--D",
            "4",
            "--S",
            "2",
            "--alpha",
            "1",
            "--beta",
            "1",
        ],
        &[
            "bound",
            "--field",
            "quadratic",
            "--S",
            "2",
            "--alpha",
            "1",
            "--beta",
            "1",
        ],
        &[
            "bound", "--field", "Q", "--S", "2", "--alpha", "1+sqrt2", "--beta", "1",
        ],
    ];
    for args in cases {
        let o = baker(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn closed_form_needs_constants() {
    let base = [
        "bound",
        "--field",
        "Q",
        "--S",
        "2,3",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--closed-form",
    ];
    let o = baker(&base);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());

    let partial = temp_file("partial.json", r#"{"gy_c26": 2.0}"#);
    let mut args = base.to_vec();
    args.extend(["--constants", partial.to_str().unwrap()]);
    assert_eq!(baker(&args).status.code(), Some(3));

    let full = temp_file("full.json", r#"{"gy_c26": 2.0, "gy_c1": 3.0}"#);
    let mut args = base.to_vec();
    args.extend(["--constants", full.to_str().unwrap()]);
    let o = baker(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["closed_form"]["gy_c1"].as_f64().unwrap() > 0.0);
}

#[test]
fn tubular_curve_fixture() {
    let p = temp_file(
        "curve.json",
        r#"{"n": 3, "finite": [[1],[2],[3]], "contained": [[1,2],[1,3],[2,3]]}"#,
    );
    let o = baker(&["tubular", "--incidence", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("m_B=1 m_Y=1; condition <=> r_fin < 3"),
        "{text}"
    );
    assert!(text.contains("r_inf=1: r_fin in 0..=2"));

    let o = baker(&[
        "tubular",
        "--incidence",
        p.to_str().unwrap(),
        "--format",
        "json",
        "--max-inf",
        "2",
        "--max-fin",
        "4",
    ]);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["feasible_signatures"].as_array().unwrap().len(), 6);
}

#[test]
fn tubular_nonexistence() {
    let p = temp_file("none.json", r#"{"n": 2, "finite": [], "contained": []}"#);
    let o = baker(&["tubular", "--incidence", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("m_B does not exist"));
    assert!(text.contains("m_Y does not exist"));
}

#[test]
fn tubular_levin_case() {
    // Y = D: every support lies in Y
    let p = temp_file(
        "levin.json",
        r#"{"n": 3, "finite": [[1,2]], "contained": [[1],[2],[3]]}"#,
    );
    let v = json(&baker(&[
        "tubular",
        "--incidence",
        p.to_str().unwrap(),
        "--format",
        "json",
    ]));
    assert_eq!(v["m_Y"], 0);
    assert_eq!(v["m_B"], 3);
}

#[test]
fn tubular_non_monotone_rejected() {
    let p = temp_file(
        "bad.json",
        r#"{"n": 2, "finite": [[1]], "contained": [[1,2]], "closure": false}"#,
    );
    let o = baker(&["tubular", "--incidence", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}
