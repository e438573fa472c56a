use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qpac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpac"))
        .args(args)
        .env_remove("QPAC_GATE_TABLE")
        .output()
        .expect("binary runs")
}

fn golden(case: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/golden").join(case)
}

fn detect(case: &str, extra: &[&str]) -> Output {
    let dir = golden(case);
    let (b, f) = (dir.join("buggy.py"), dir.join("fixed.py"));
    let mut args = vec!["detect", "--buggy", b.to_str().unwrap(), "--fixed", f.to_str().unwrap()];
    args.extend_from_slice(extra);
    qpac(&args)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn detect_reports_unequal_bits() {
    let out = detect("unequal_bits_register", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let verdict = v["patterns"].as_array().unwrap().iter().find(|p| p["id"] == "unequal_bits").unwrap();
    assert_eq!(verdict["detected"], true);
    assert!(out.stdout.ends_with(b"\n"));
}

#[test]
fn evidence_points_at_changed_lines() {
    let v = json(&detect("wrong_qubit_init", &[]));
    let init = &v["patterns"][0];
    assert_eq!(init["id"], "incorrect_initialization");
    let lines: Vec<(String, u64)> = init["evidence"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["file"].as_str().unwrap().to_string(), e["line"].as_u64().unwrap()))
        .collect();
    assert_eq!(lines, [("buggy".to_string(), 3), ("fixed".to_string(), 7)]);
}

#[test]
fn identical_files_are_all_false() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("same.py");
    fs::write(&p, "qc = QuantumCircuit(2, 2)\nqc.h(0)\nqc.measure_all()\n").unwrap();
    let out = qpac(&["detect", "--buggy", p.to_str().unwrap(), "--fixed", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let patterns = v["patterns"].as_array().unwrap();
    assert_eq!(patterns.len(), 7);
    assert!(patterns.iter().all(|p| p["detected"] == false && p["evidence"].as_array().unwrap().is_empty()));
}

#[test]
fn patterns_flag_restricts_the_report() {
    let v = json(&detect("measure_bit_order", &["--patterns", "incorrect_measurement,unequal_bits"]));
    let ids: Vec<&str> = v["patterns"].as_array().unwrap().iter().map(|p| p["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["unequal_bits", "incorrect_measurement"]);
    assert_eq!(v["patterns"][1]["detected"], true);
}

#[test]
fn unknown_pattern_is_a_usage_error() {
    let out = detect("measure_bit_order", &["--patterns", "incorrect_measurement,bogus"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unreadable_path_exits_2() {
    let out = qpac(&["detect", "--buggy", "/no/such/buggy.py", "--fixed", "/no/such/fixed.py"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/buggy.py"));
}

#[test]
fn broken_source_exits_2_with_unanalyzable_report() {
    let tmp = tempfile::tempdir().unwrap();
    let (b, f) = (tmp.path().join("b.py"), tmp.path().join("f.py"));
    fs::write(&b, "qc = QuantumCircuit(2)\nqc.h(0]\n").unwrap();
    fs::write(&f, "qc = QuantumCircuit(2)\nqc.h(1)\n").unwrap();
    let out = qpac(&["detect", "--buggy", b.to_str().unwrap(), "--fixed", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["unanalyzable"], true);
}

#[test]
fn text_format_is_a_table() {
    let out = detect("hadamard_parity", &["--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("incorrect_hadamard")).unwrap();
    assert!(row.contains("yes"));
}

fn write_case(root: &Path, name: &str, buggy: &str, fixed: &str, expected: &str) {
    let dir = root.join(name);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("buggy.py"), buggy).unwrap();
    fs::write(dir.join("fixed.py"), fixed).unwrap();
    fs::write(dir.join("expected.json"), expected).unwrap();
}

#[test]
fn corpus_with_a_wrong_label_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let src = "qc = QuantumCircuit(2)\nqc.h(0)\n";
    write_case(tmp.path(), "a_clean", src, src, r#"{"patterns":[]}"#);
    write_case(tmp.path(), "b_wrong", src, src, r#"{"patterns":["incorrect_hadamard"]}"#);
    let out = qpac(&["corpus", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let mismatches = v["mismatches"].as_array().unwrap();
    assert_eq!(mismatches.len(), 1);
    assert_eq!(mismatches[0]["case"], "b_wrong");
}

#[test]
fn corpus_case_errors_fail_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let src = "qc = QuantumCircuit(2)\n";
    write_case(tmp.path(), "ok", src, src, r#"{"patterns":[]}"#);
    write_case(tmp.path(), "bad", src, src, "{oops");
    let out = qpac(&["corpus", tmp.path().to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("error bad:"));
}

#[test]
fn empty_corpus_exits_0() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qpac(&["corpus", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["cases"], 0);
}

#[test]
fn features_export() {
    let tmp = tempfile::tempdir().unwrap();
    let out_path = tmp.path().join("features.ndjson");
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/golden");
    let out = qpac(&["features", root.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&out_path).unwrap();
    let records: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 11 * 7);
    let feature = |case: &str, key: &str| {
        records.iter().find(|r| r["pair_id"] == case).unwrap()["features"][key].as_i64().unwrap()
    };
    assert_eq!(feature("excessive_loop_measures", "measure_count_delta"), -5);
    assert_eq!(feature("opaque_to_composite", "opaque_delta"), 1);
    assert_eq!(feature("opaque_to_composite", "composite_delta"), 1);
    let keys = |r: &serde_json::Value| r["features"].as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    assert!(records.iter().all(|r| keys(r) == keys(&records[0])));
}

#[test]
fn features_to_unwritable_path_exits_2() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/golden");
    let out = qpac(&["features", root.to_str().unwrap(), "--out", "/no/such/dir/f.ndjson"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gate_table_override() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("gates.txt");
    fs::write(&table, "# only these\nh\noracle\n").unwrap();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/negatives/gate_to_custom_method");
    let run = |env: Option<&Path>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpac"));
        cmd.args(["detect", "--patterns", "incorrect_standard_gate", "--buggy"])
            .arg(dir.join("buggy.py"))
            .arg("--fixed")
            .arg(dir.join("fixed.py"))
            .env_remove("QPAC_GATE_TABLE");
        if let Some(p) = env {
            cmd.env("QPAC_GATE_TABLE", p);
        }
        json(&cmd.output().unwrap())["patterns"][0]["detected"].clone()
    };
    assert_eq!(run(None), false);
    // x is no longer a standard gate, oracle now is.
    assert_eq!(run(Some(&table)), false);
    fs::write(&table, "x\noracle\n").unwrap();
    assert_eq!(run(Some(&table)), true);
}
