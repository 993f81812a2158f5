use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ksnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksnorm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

fn emit(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    let o = ksnorm(&["emit-fixture", name, "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    path.to_str().unwrap().to_string()
}

#[test]
fn four_fifteenths_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = emit(dir.path(), "ks-4-15");
    let o = ksnorm(&["norm", "ks", &file, "f", "--p", "1"]);
    assert!(o.status.success());
    assert!((field(&stdout(&o), "value") - 4.0 / 15.0).abs() < 1e-12);

    for norm in ["lp", "ks", "ksw", "hkl"] {
        let o = ksnorm(&["norm", norm, &file, "zero", "--p", "2"]);
        assert_eq!(field(&stdout(&o), "value"), 0.0, "{norm}");
    }
}

#[test]
fn json_output_carries_flags_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let file = emit(dir.path(), "ellinf-square");
    let o = ksnorm(&["norm", "ks", &file, "f", "--p", "inf", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["candidate_provenance"]["kind"], "extreme_points");
    assert_eq!(doc["result"]["series_tail_bound"], 0.0);
    assert_eq!(doc["p"], "inf");
}

#[test]
fn tolerance_truncates_the_series() {
    let dir = tempfile::tempdir().unwrap();
    let file = emit(dir.path(), "ks-4-15");
    let full = field(&stdout(&ksnorm(&["norm", "ks", &file, "f"])), "value");
    let o = ksnorm(&["norm", "ks", &file, "f", "--tol", "0.1"]);
    let text = stdout(&o);
    let (value, tail) = (field(&text, "value"), field(&text, "series_tail_bound"));
    assert!(tail <= 0.1 && value <= full && full <= value + tail, "{text}");
    assert_eq!(ksnorm(&["norm", "lp", &file, "f", "--tol", "0.1"]).status.code(), Some(2));
}

#[test]
fn singleton_weak_norm_matches_strong() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.json");
    fs::write(
        &path,
        r#"{"schema_version": 1, "space": {"dim": 1, "norm": "ell2"},
            "atoms": [{"id": "l", "value": ["1/2"]}, {"id": "r", "value": ["1/2"]}],
            "functions": {"f": [1, 1]},
            "candidates": {"strategy": "explicit", "vectors": [[1]], "weights": [1]}}"#,
    )
    .unwrap();
    let file = path.to_str().unwrap();
    for p in ["1", "2", "inf"] {
        let ks = field(&stdout(&ksnorm(&["norm", "ks", file, "f", "--p", p])), "value");
        let ksw = field(&stdout(&ksnorm(&["norm", "ksw", file, "f", "--p", p])), "value");
        assert_eq!(ks, ksw, "p = {p}");
    }
}

#[test]
fn integrate_builtins() {
    let cases: [(&[&str], f64); 3] = [
        (&["poly", "--coeffs", "0,2", "--tol", "1e-8"], 1.0),
        (&["sqrt_singular"], 2.0),
        (&["oscillatory_derivative"], 1f64.sin()),
    ];
    for (args, want) in cases {
        let mut full = vec!["integrate"];
        full.extend_from_slice(args);
        let o = ksnorm(&full);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = stdout(&o);
        let tol = if args.contains(&"1e-8") { 1e-8 } else { 1e-6 };
        assert!((field(&text, "value") - want).abs() <= tol, "{text}");
        assert!(field(&text, "achieved_tol") <= tol);
        field(&text, "refinement_depth");
    }
}

#[test]
fn reversed_interval_is_a_usage_error() {
    let o = ksnorm(&["integrate", "sqrt_singular", "--a", "1", "--b", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("a < b"));
}

#[test]
fn validation_errors_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"schema_version": 1,
            "space": {"dim": 2, "norm": "ell1"},
            "atoms": [{"id": "a", "value": [1, "x/2"]}]}"#,
    )
    .unwrap();
    let o = ksnorm(&["norm", "ks", path.to_str().unwrap(), "f"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("atoms[0].value[1]"), "{}", stderr(&o));

    let file = emit(dir.path(), "ks-4-15");
    let o = ksnorm(&["norm", "ks", &file, "missing"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("known: f, zero"));
    assert_eq!(ksnorm(&["norm", "ks", &file, "f", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(ksnorm(&["emit-fixture", "nope"]).status.code(), Some(2));
}

#[test]
fn corpus_only_check_passes_with_expected_failure() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let text = dir.path().join("r.txt");
    let o = ksnorm(&[
        "check",
        "--suite",
        "corpus",
        "--report-json",
        json.to_str().unwrap(),
        "--report-text",
        text.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["summary"]["xfail"], 1);
    assert_eq!(report["records"][0]["status"], "xfail");
    assert!(fs::read_to_string(&text).unwrap().contains("XFAIL corpus.signed-lattice-monotonicity"));
}

#[test]
fn check_accepts_fixture_files_and_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = emit(dir.path(), "ellinf-square");
    let o = ksnorm(&["check", "--suite", "spaces,measures", "--instances", "3", "--fixture", &file, "--no-builtin-fixtures"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("fixture ellinf-square"));

    assert_eq!(ksnorm(&["check", "--suite", "bogus"]).status.code(), Some(2));
    let unwritable = dir.path().join("missing-dir").join("r.json");
    let o = ksnorm(&["check", "--suite", "corpus", "--report-json", unwritable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
