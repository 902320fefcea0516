use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_weylmoments"));
    c.env_remove("WEYLMOMENTS_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

const INVOCATIONS: &[&[&str]] = &[
    &["jk", "--k", "2", "--s", "2", "--x", "3"],
    &["jk-scan", "--k", "3", "--s", "2", "--xs", "2,4,6,8"],
    &["weyl", "--coeffs", "1/3,1/2", "--x", "20", "--a", "3"],
    &["moments", "--coeffs", "0.1,1/7,2/9", "--x", "30", "--t", "40", "--s", "2"],
    &["regime", "--k", "3", "--x", "100", "--t", "1e7", "--q", "100,5000,1000000"],
    &["arcs", "--alpha", "55/144,1/2,0", "--k", "3", "--x", "10", "--t", "10000"],
    &["sumlemma", "--alpha", "1/3", "--cap", "10", "--from", "1", "--to", "3", "--q", "3"],
    &["varsumlemma", "--alpha", "1/3", "--beta", "1/5", "--cap", "5", "--q", "3"],
    &["smooth", "--curve", "invpow:1e6:1.5", "--k", "3", "--n", "200", "--t", "12"],
    &["curve", "--curve", "log:1000", "--k", "3", "--n", "500", "--delta", "0.05"],
    &["sieve", "--poly", "1,0,1", "--q", "3", "--n", "20", "--v", "random", "--seed", "11"],
    &["exponents", "--k", "3,4,5"],
];

#[test]
fn jk_prints_value() {
    let out = run(&["jk", "--k", "2", "--s", "2", "--x", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(row.split(' ').any(|f| f == "j=15"), "{row}");
}

#[test]
fn every_subcommand_emits_a_report_document() {
    for args in INVOCATIONS {
        let doc = json(args);
        assert_eq!(doc["schema_version"], "1", "{args:?}");
        assert_eq!(doc["config"]["subcommand"], args[0]);
        assert!(doc["config"]["parameters"].is_object());
        assert!(!doc["rows"].as_array().unwrap().is_empty(), "{args:?}");
        assert!(doc["notes"].is_array());
    }
}

#[test]
fn rows_are_identical_across_worker_counts() {
    for args in INVOCATIONS {
        let mut one = args.to_vec();
        one.extend(["--workers", "1"]);
        let mut four = args.to_vec();
        four.extend(["--workers", "4"]);
        let (a, b) = (json(&one), json(&four));
        assert_eq!(
            serde_json::to_string(&a["rows"]).unwrap(),
            serde_json::to_string(&b["rows"]).unwrap(),
            "{args:?}"
        );
        assert_eq!(a["notes"], b["notes"]);
    }
}

#[test]
fn worker_count_from_environment() {
    let out = bin()
        .env("WEYLMOMENTS_WORKERS", "3")
        .args(["exponents", "--k", "3", "--format", "json"])
        .output()
        .unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["workers"], 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["jk", "--k", "2", "--s", "2", "--x", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["nosuch"]).status.code(), Some(2));
    assert_eq!(run(&["jk", "--k", "2", "--s", "2"]).status.code(), Some(2));
    assert_eq!(run(&["jk", "--k", "0", "--s", "2", "--x", "3"]).status.code(), Some(2));
    assert_eq!(
        run(&["jk", "--k", "2", "--s", "4", "--x", "30", "--budget", "1000"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["sieve", "--poly", "1/2,1", "--q", "2", "--n", "3"]).status.code(), Some(4));
    assert_eq!(run(&["sieve", "--poly", "0,2", "--q", "2", "--n", "3"]).status.code(), Some(4));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn csv_matches_json_rows() {
    for args in INVOCATIONS {
        let doc = json(args);
        let mut full = args.to_vec();
        full.extend(["--format", "csv"]);
        let out = run(&full);
        assert!(out.status.success());
        let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
        let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
        let mut sorted = header.clone();
        sorted.sort();
        assert_eq!(header, sorted, "alphabetical columns");
        let rows = doc["rows"].as_array().unwrap();
        let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(records.len(), rows.len());
        for (rec, row) in records.iter().zip(rows) {
            for (col, cell) in header.iter().zip(rec.iter()) {
                let want = match &row[col] {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    v => v.to_string(),
                };
                assert_eq!(cell, want, "{args:?} column {col}");
            }
        }
    }
}

#[test]
fn json_round_trips() {
    for args in INVOCATIONS {
        let doc = json(args);
        let again: Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(doc, again);
    }
}

#[test]
fn numeric_output_matches_library() {
    use weylmoments::bounds::{rhs_moment, RegimeInput, Theorem};
    let doc = json(&["regime", "--k", "3", "--x", "100", "--t", "1000", "--q", "100"]);
    let lib = rhs_moment(&RegimeInput::new(3, 100.0, 1000.0, 1, 100), Theorem::Standard).unwrap();
    assert_eq!(doc["rows"][0]["standard"].as_f64().unwrap(), lib.value);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nk = 2\ns=2\nx=3\nmethod=naive\n").unwrap();
    let c = cfg.to_str().unwrap();
    let doc = json(&["jk", "--config", c]);
    assert_eq!(doc["rows"][0]["j"], 15);
    assert_eq!(doc["rows"][0]["method"], "naive");
    // command line wins
    let doc = json(&["jk", "--config", c, "--x", "2"]);
    assert_eq!(doc["rows"][0]["j"], 6);

    std::fs::write(&cfg, "k=2\ns=2\nx=3\nfrobnicate=1\n").unwrap();
    assert_eq!(run(&["jk", "--config", c]).status.code(), Some(2));
    std::fs::write(&cfg, "k 2\n").unwrap();
    assert_eq!(run(&["jk", "--config", c]).status.code(), Some(2));
}

#[test]
fn output_path_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["exponents", "--k", "4", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(doc["rows"][0]["s0"], 4);
    assert_eq!(doc["rows"][0]["omega"], "1/8");
}

#[test]
fn decimal_inputs_are_exact() {
    let doc = json(&["arcs", "--alpha", "0.5", "--k", "2", "--x", "4", "--t", "1e3"]);
    assert_eq!(doc["rows"][0]["alpha"], "1/2");
    assert_eq!(doc["rows"][0]["witness_error"], "0");
}
