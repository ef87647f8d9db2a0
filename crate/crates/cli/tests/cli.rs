use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singcount"))
        .args(args)
        .env_remove("SINGCOUNT_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn documented_examples() {
    let cone = data("cone.json");
    let cusp = data("cusp.json");
    assert_eq!(stdout(&["count", "--scheme", &cone, "--ring", "mixed:3^1:2"]), "99\n");
    assert_eq!(stdout(&["h", "--scheme", &cusp, "--ring", "mixed:3^1:2"]), "5/3\n");
    assert_eq!(stdout(&["rs-threshold", "--type", "A"]), "12\n");
}

#[test]
fn engines_agree_through_the_cli() {
    let cusp = data("cusp.json");
    for ring in ["mixed:3^1:3", "equal:2^2:2"] {
        let lift = stdout(&["count", "--scheme", &cusp, "--ring", ring, "--engine", "lift"]);
        let brute = stdout(&["count", "--scheme", &cusp, "--ring", ring, "--engine", "bruteforce"]);
        assert_eq!(lift, brute, "{ring}");
    }
}

#[test]
fn json_and_csv_forms() {
    let cone = data("cone.json");
    let j = stdout(&["count", "--scheme", &cone, "--ring", "mixed:3^1:2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&j).unwrap();
    assert_eq!(v["count"], "99");
    let csv = stdout(&["h", "--scheme", &cone, "--ring", "mixed:5^1:2", "--format", "csv"]);
    assert_eq!(csv, "scheme,q,m,kind,count,h_num,h_den\ncone,5,2,mixed,725,29,25\n");
}

#[test]
fn exit_codes() {
    let cone = data("cone.json");
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--scheme", &data("broken.json"), "--ring", "mixed:3^1:1"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--scheme", &cone, "--ring", "mixed:4^1:1"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--scheme", "/nonexistent.json", "--ring", "mixed:3^1:1"]).status.code(), Some(2));
    let budget = run(&[
        "count", "--scheme", &cone, "--ring", "mixed:3^1:4", "--engine", "bruteforce", "--budget", "10",
    ]);
    assert_eq!(budget.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("budget"));
    assert_eq!(run(&["rs-threshold", "--type", "E"]).status.code(), Some(2));
}

#[test]
fn cache_changes_no_value() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().display().to_string();
    let cusp = data("cusp.json");
    let args = ["h", "--scheme", cusp.as_str(), "--ring", "mixed:5^1:3"];
    let plain = stdout(&args);
    let mut cached = args.to_vec();
    cached.extend(["--cache", cache.as_str()]);
    assert_eq!(stdout(&cached), plain);
    assert_eq!(stdout(&cached), plain);
    let records = std::fs::read_to_string(dir.path().join("counts.ndjson")).unwrap();
    assert_eq!(records.lines().count(), 1, "second run is a hit");
}

#[test]
fn corrupt_cache_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("counts.ndjson"), "garbage\n{\"hash\": 1}\n").unwrap();
    let cone = data("cone.json");
    let out = Command::new(env!("CARGO_BIN_EXE_singcount"))
        .args(["count", "--scheme", &cone, "--ring", "mixed:3^1:2"])
        .env("SINGCOUNT_CACHE", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "99\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn output_is_thread_independent() {
    let cone = data("cone.json");
    let args = ["diagnose", "--scheme", cone.as_str(), "--m-max", "2", "--format", "json"];
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut four = args.to_vec();
    four.extend(["--threads", "4"]);
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn group_commands() {
    assert_eq!(stdout(&["def-count", "--group", "S3", "--n", "1"]), "18\n");
    assert_eq!(stdout(&["def-count", "--group", "S3", "--n", "2"]), "486\n");
    assert_eq!(stdout(&["def-count", "--group", "SL2:mixed:3^1:1", "--n", "2"]), "53376\n");
    assert_eq!(stdout(&["repzeta", "--group", "Q8", "--s", "2"]), "degrees [1, 1, 1, 1, 2]\nzeta(2) = 17/4\n");
    assert_eq!(stdout(&["repzeta", "--table", &data("c3.txt")]), "degrees [1, 1, 1]\n");
    let csv = stdout(&["word-prob", "--group", "S3", "--n", "2", "--format", "csv"]);
    assert!(csv.contains(",3/8,") && csv.contains(",5/16,"));
    let table = stdout(&["repzeta", "--p", "3", "--m-list", "1", "--n", "2", "--format", "csv"]);
    assert_eq!(table, "type,p,m,n,zeta_num,zeta_den,q_times_zeta_minus_1\nSL2,3,1,2,139,36,103/12\n");
}

#[test]
fn series_commands() {
    let line = data("line.json");
    let out = stdout(&["igusa", "--scheme", &line, "--p", "3", "--m-max", "8", "--fit", "2"]);
    assert!(out.contains("stable: true"), "{out}");
    let csv = stdout(&["zeta-local", "--scheme", &line, "--p", "5", "--m-max", "3", "--format", "csv"]);
    assert_eq!(csv, "scheme,p,kind,n,coefficient\nline,5,P,0,1\nline,5,P,1,5\nline,5,P,2,25\nline,5,P,3,125\n");
    let v: f64 = stdout(&["zeta-global", "--scheme", &line, "--s", "3", "--p-max", "100"])
        .trim()
        .parse()
        .unwrap();
    assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() < 0.01);
    let jet = stdout(&["jet", "--scheme", &data("cusp.json"), "--m", "1", "--ring", "mixed:3^1:1"]);
    let direct = stdout(&["count", "--scheme", &data("cusp.json"), "--ring", "equal:3^1:2"]);
    assert_eq!(jet, direct);
}

#[test]
fn cross_check_and_lang_weil_scheme() {
    let out = stdout(&["cross-check", "--scheme", &data("x2y2.json"), "--q-list", "5,7", "--m-max", "2"]);
    assert!(!out.contains("DIFFERENT"), "{out}");
    assert_eq!(out.lines().count(), 4);
}
