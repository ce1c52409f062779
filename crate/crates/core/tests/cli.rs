use std::path::Path;
use std::process::{Command, Output};

use mfloor_core::prob::{parse_rational, Rational};
use serde_json::Value;

fn mfloor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfloor")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const MARTINGALE: &str = r#"{
  "atoms": [{"label": "up", "prob": "1/2"}, {"label": "down", "prob": "1/2"}],
  "generators": [["1", "-1"]],
  "mode": "subspace",
  "f": ["1", "1"]
}"#;

const ARBITRAGE: &str = r#"{
  "atoms": [{"label": "a", "prob": "1/2"}, {"label": "b", "prob": "1/2"}],
  "generators": [["1", "0"]],
  "mode": "cone",
  "f": ["1", "1"]
}"#;

fn exact(v: &Value) -> Rational {
    parse_rational(v["exact"].as_str().unwrap()).unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = mfloor(&["check", &write(dir.path(), "m.json", MARTINGALE)]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("g             [1, 1]"));

    let arb = mfloor(&["check", &write(dir.path(), "a.json", ARBITRAGE)]);
    assert_eq!(code(&arb), 2);
    assert!(stdout(&arb).contains("[1, 0]"));

}

#[test]
fn arbitrage_takes_precedence() {
    let dir = tempfile::tempdir().unwrap();
    // f <= 0, so g = 0 dominates, but (1, 0) is still an arbitrage
    let text = ARBITRAGE.replace("\"f\": [\"1\", \"1\"]", "\"f\": [\"-1\", \"0\"]");
    let out = mfloor(&["--format", "json", "check", &write(dir.path(), "x.json", &text)]);
    assert_eq!(code(&out), 2);
    let v: Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(v["no_arbitrage"]["witness"], serde_json::json!(["1", "0"]));
    assert!(v["dominating_g"].is_array());

    let text = r#"{
      "atoms": [{"label": "a", "prob": "1/2"}, {"label": "b", "prob": "1/2"}],
      "generators": [["1", "-1"]],
      "mode": "cone_minus_positives",
      "f": ["1", "-1"]
    }"#;
    assert_eq!(code(&mfloor(&["check", &write(dir.path(), "y.json", text)])), 0);
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = mfloor(&["check", &write(dir.path(), "bad.json", "{\"atoms\": [}")]);
    assert_eq!(code(&bad), 3);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 1"));

    let unknown = MARTINGALE.replace("\"mode\"", "\"colour\": 1, \"mode\"");
    assert_eq!(code(&mfloor(&["check", &write(dir.path(), "u.json", &unknown)])), 3);

    let probs = MARTINGALE.replace("\"prob\": \"1/2\"}, {\"label\": \"down\"", "\"prob\": \"1/3\"}, {\"label\": \"down\"");
    let out = mfloor(&["check", &write(dir.path(), "p.json", &probs)]);
    assert_eq!(code(&out), 3);

    let float = MARTINGALE.replace("\"f\": [\"1\", \"1\"]", "\"f\": [1.5, \"1\"]");
    let out = mfloor(&["check", &write(dir.path(), "f.json", &float)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("f[0]"));

    assert_eq!(code(&mfloor(&["check", "/nonexistent/market.json"])), 3);
    assert_eq!(code(&mfloor(&["examples", "example9"])), 3);
    assert_eq!(code(&mfloor(&["examples", "example2", "--level", "0"])), 3);
    assert_eq!(code(&mfloor(&["frobnicate"])), 3);
    assert_eq!(code(&mfloor(&["--help"])), 0);
}

#[test]
fn dump_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, level) in [("example1", "4"), ("example2", "3"), ("example3", "3")] {
        for format in ["text", "json"] {
            let path = dir.path().join(format!("{kind}.json"));
            let path = path.to_str().unwrap();
            let built = mfloor(&["--format", format, "examples", kind, "--level", level, "--dump", path]);
            let checked = mfloor(&["--format", format, "check", path]);
            assert_eq!(code(&built), code(&checked));
            let report = stdout(&checked);
            assert!(!report.is_empty());
            assert!(stdout(&built).starts_with(&report), "{kind} {format}");
        }
    }
}

#[test]
fn example3_dump_is_dominated_with_small_sup() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e3.json");
    let path = path.to_str().unwrap();
    assert_eq!(code(&mfloor(&["examples", "example3", "--level", "4", "--dump", path])), 0);
    let out = mfloor(&["--format", "json", "check", path]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert!(exact(&v["sup_truncated"]["value"]) <= parse_rational("4/3").unwrap());
    assert_eq!(v["verdict"], "dominating density found");
}

#[test]
fn example2_sweep_is_increasing() {
    let out = mfloor(&[
        "--format", "machine-readable", "examples", "example2", "--level", "5", "--f", "ones-odd",
        "--sweep", "1", "10",
    ]);
    assert_eq!(code(&out), 0);
    let sweep: Value = serde_json::from_str(stdout(&out).lines().last().unwrap()).unwrap();
    let rows = sweep["sweep"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    let values: Vec<Rational> = rows.iter().map(|r| exact(&r["min_l1_norm"])).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(sweep["sweep"]["diverging"], true);
}

#[test]
fn example1_table_and_example3_report() {
    let out = mfloor(&["examples", "example1", "--level", "6"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    // n = 6: 6 (1 - 2/64) = 93/16
    assert!(text.lines().any(|l| l.trim_start().starts_with("6 ") && l.contains("93/16")));

    let out = mfloor(&["--format", "json", "examples", "example3", "--level", "5"]);
    let v: Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert!(exact(&v["sup_truncated"]["value"]) <= parse_rational("4/3").unwrap());
}

#[test]
fn orlicz_subcommands() {
    let out = mfloor(&["orlicz", "eps-to-phi", "1/2", "1/4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("  1  2 "));
    assert!(text.contains("  2  6 "));

    let phi = r#"{"knots":[["0","0"],["1/2","0"],["1","1"]],"tail_slope":"2","tail_quad":"1"}"#;
    let out = mfloor(&["--format", "json", "orlicz", "phi-to-eps", "--phi", phi, "--k", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for e in ["\"1/4\"", "\"1/36\"", "\"1/144\""] {
        assert!(text.contains(e), "{e} in {text}");
    }

    let dir = tempfile::tempdir().unwrap();
    let phi_path = write(dir.path(), "phi.json", r#"{"knots":[["0","0"],["1","0"],["2","1"]],"tail_slope":"1","tail_quad":"1"}"#);
    let out = mfloor(&["orlicz", "norm", "--phi", &phi_path, "--values", "2", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("unit ball  inside"));
    let out = mfloor(&["orlicz", "norm", "--phi", &phi_path, "--values", "3", "3"]);
    assert!(stdout(&out).contains("unit ball  outside"));

    assert_eq!(code(&mfloor(&["orlicz", "eps-to-phi", "0"])), 3);
    assert_eq!(code(&mfloor(&["orlicz", "phi-to-eps", "--phi", "{}", "--k", "2"])), 3);
}
