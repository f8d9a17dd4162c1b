use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_aon-teleport"));
    c.env_remove("AON_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn record(path: &Path) -> (String, Value) {
    let text = std::fs::read_to_string(path).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    (text, v)
}

#[test]
fn channel_two_senders_has_four_terms() {
    let o = run(&["channel", "--n", "2"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("4 terms"), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with(['0', '1'])).count(), 4);
}

#[test]
fn product_channel_prints_two_to_the_n_terms() {
    let o = run(&["channel", "--n", "3", "--kind", "product"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("8 terms"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["channel", "--n", "0"][..],
        &["verify", "--n", "9"],
        &["verify", "--n", "3..1"],
        &["tables", "--n", "4", "--compare", "paper"],
        &["run", "--n", "2", "--votes", "012"],
        &["run", "--n", "2", "--withhold", "5"],
        &["run", "--n", "2", "--forced", "phi+,phi+", "--seed", "3"],
        &["bogus"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn forced_outcomes_reach_unit_fidelity() {
    for forced in ["phi+,phi+", "psi-,phi-", "psi+,psi-"] {
        let o = run(&["run", "--n", "2", "--forced", forced]);
        assert_eq!(code(&o), 0);
        let s = stdout(&o);
        let f: f64 = s.lines().find_map(|l| l.strip_prefix("fidelity: ")).unwrap().parse().unwrap();
        assert!((f - 1.0).abs() < 1e-10, "{forced}: {s}");
    }
}

#[test]
fn vote_tally_matches_ballots() {
    let o = run(&["run", "--n", "3", "--votes", "011", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("tally: yes=2 no=1"), "{s}");
    assert!(!s.contains("FAIL"), "{s}");
}

#[test]
fn withholding_exits_three_and_records_status() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("w.json");
    let o = run(&["run", "--n", "2", "--withhold", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("protocol incomplete"));
    let (_, v) = record(&out);
    assert_eq!(v["payload"]["transcript"]["status"]["status"], "withheld");
    let f = v["payload"]["withheld"]["joint_fidelity_corrected"].as_f64().unwrap();
    assert!(f < 0.99, "{f}");
}

#[test]
fn tables_comparison_lists_mismatches() {
    let o = run(&["tables", "--n", "2", "--compare", "paper"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("16/16"));
    let o = run(&["tables", "--n", "3", "--compare", "paper"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("58/64") && s.contains("62/64"), "{s}");
}

#[test]
fn verify_small_range_passes() {
    let o = run(&["verify", "--n", "1..3", "--samples", "64", "--seed", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(" 0 failed"));
}

#[test]
fn same_seed_gives_identical_records() {
    let dir = tempdir().unwrap();
    let mut texts = Vec::new();
    let p = dir.path().join("a.json");
    for _ in 0..2 {
        let o = run(&["run", "--n", "3", "--seed", "42", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        texts.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn seed_env_var_matches_flag() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    run(&["run", "--n", "2", "--seed", "9", "--out", a.to_str().unwrap()]);
    bin().args(["run", "--n", "2", "--out", b.to_str().unwrap()]).env("AON_SEED", "9").output().unwrap();
    assert_eq!(record(&a).1["payload"], record(&b).1["payload"]);
}

#[test]
fn records_round_trip_byte_identical() {
    let dir = tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["channel", "--n", "2"],
        &["run", "--n", "3", "--seed", "11"],
        &["tables", "--n", "2", "--compare", "paper"],
        &["verify", "--n", "2", "--samples", "16"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let p = dir.path().join(format!("r{k}.json"));
        let mut full = args.to_vec();
        full.extend(["--out", p.to_str().unwrap()]);
        let o = run(&full);
        assert_eq!(code(&o), 0, "{args:?}");
        let (text, v) = record(&p);
        assert_eq!(v["schema_version"], 1);
        assert!(v.get("timing").is_none());
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn timing_flag_adds_elapsed() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("t.json");
    let o = run(&["--timing", "channel", "--n", "1", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(record(&p).1["timing"]["elapsed_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("missing").join("x.json");
    let o = run(&["channel", "--n", "1", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}
