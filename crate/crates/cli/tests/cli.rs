use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use sepdisc::{ghz_state, Dims, HermitianOperator};

fn sepdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepdisc")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn schema_for(def: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/sepdisc.schema.json");
    let mut schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    if !def.is_empty() {
        schema["$ref"] = json!(format!("#/$defs/{def}"));
        schema.as_object_mut().unwrap().remove("oneOf");
    }
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(def: &str, doc: &Value) {
    let v = schema_for(def);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{def}: {errors:#?}");
    assert!(schema_for("").is_valid(doc), "top-level schema rejects a {def}");
}

fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    assert_valid("run_report", &v);
    v
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_operator(path: &Path, op: &HermitianOperator) {
    std::fs::write(path, serde_json::to_string(op).unwrap()).unwrap();
}

fn ghz_witness(m: usize, d: usize, j: i64) -> HermitianOperator {
    HermitianOperator::identity(Dims::uniform(m, d).unwrap())
        .add_scaled(-(d as f64), &ghz_state(m, d, j).unwrap().projector())
        .unwrap()
}

fn gen(dir: &Path, example: &str, m: &str, d: &str) -> Value {
    let out = sepdisc(&["gen", example, "--m", m, "--d", d, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    report(&out)
}

#[test]
fn gen_writes_valid_files() {
    let dir = tempfile::tempdir().unwrap();
    let r = gen(dir.path(), "example1", "2", "2");
    assert_eq!(r["command"], "gen");
    assert_eq!(r["outputs"]["states"], 4);
    assert_eq!(r["outputs"]["measurement_elements"], 4);
    let e = read(&dir.path().join("ensemble.json"));
    assert_valid("ensemble", &e);
    let etas: f64 = e["states"].as_array().unwrap().iter().map(|s| s["eta"].as_f64().unwrap()).sum();
    assert!((etas - 1.0).abs() < 1e-12);
    assert_valid("measurement", &read(&dir.path().join("measurement.json")));

    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "example2", "2", "2");
    assert_valid("operator", &read(&dir.path().join("h.json")));

    let dir = tempfile::tempdir().unwrap();
    let r = gen(dir.path(), "example3", "2", "3");
    assert_eq!(r["outputs"]["states"], 4);
    assert!(!dir.path().join("measurement.json").exists());
}

#[test]
fn gen_rejects_a_single_party() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepdisc(&["gen", "example1", "--m", "1", "--d", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 64);
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(code(&sepdisc(&["--help"])), 0);
    assert_eq!(code(&sepdisc(&["--version"])), 0);
    assert_eq!(code(&sepdisc(&["frobnicate"])), 64);
}

#[test]
fn solve_reports_a_measurement() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "example1", "2", "2");
    let ens = dir.path().join("ensemble.json");
    let out = sepdisc(&["solve", "--ensemble", ens.to_str().unwrap(), "--timing"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!(r["timing"]["elapsed_ms"].is_number());
    let p = r["outputs"]["p_value"].as_f64().unwrap();
    assert!(p > 2.0 / 3.0 + 1e-3, "p_G = {p}");
    assert_eq!(r["outputs"]["measurement"]["elements"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_exit_codes_follow_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "example1", "2", "2");
    let ens = dir.path().join("ensemble.json");
    let meas = dir.path().join("measurement.json");
    let (ens, meas) = (ens.to_str().unwrap(), meas.to_str().unwrap());

    let out = sepdisc(&["verify", "--theorem", "3", "--ensemble", ens, "--measurement", meas]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["outputs"]["holds"], true);
    assert_eq!(r["outputs"]["certified"], true);
    assert!((r["outputs"]["p_sep_value"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);

    assert_eq!(code(&sepdisc(&["verify", "--theorem", "3", "--ensemble", ens])), 64);
    assert_eq!(code(&sepdisc(&["verify", "--theorem", "c2", "--ensemble", ens])), 65);
    assert_eq!(code(&sepdisc(&["verify", "--theorem", "3", "--ensemble", "/nonexistent/e.json", "--measurement", meas])), 74);
    assert_eq!(code(&sepdisc(&["verify", "--theorem", "3", "--ensemble", meas, "--measurement", meas])), 65);

    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "example2", "2", "2");
    let ens = dir.path().join("ensemble.json");
    let meas = dir.path().join("measurement.json");
    let h = dir.path().join("h.json");
    let (ens, meas, h) = (ens.to_str().unwrap(), meas.to_str().unwrap(), h.to_str().unwrap());
    let out = sepdisc(&["verify", "--theorem", "3", "--ensemble", ens, "--measurement", meas]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["outputs"]["holds"], false);
    let out = sepdisc(&["verify", "--theorem", "4", "--ensemble", ens, "--H", h]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["outputs"]["theorem"], "4");
    for t in ["1", "2"] {
        let out = sepdisc(&["verify", "--theorem", t, "--ensemble", ens, "--measurement", meas, "--H", h]);
        assert_eq!(code(&out), 0, "{t}");
        assert_eq!(report(&out)["outputs"]["theorem"], t);
    }
    assert_eq!(code(&sepdisc(&["verify", "--theorem", "2", "--ensemble", ens, "--measurement", meas])), 64);
    assert_eq!(code(&sepdisc(&["verify", "--theorem", "4", "--ensemble", ens, "--H", h, "--q", "0.5"])), 65);

    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "example3", "2", "3");
    let ens = dir.path().join("ensemble.json");
    for t in ["c1", "c2"] {
        let out = sepdisc(&["verify", "--theorem", t, "--ensemble", ens.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{t}");
        let r = report(&out);
        assert!((r["outputs"]["p_sep_value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn construct_two_state_from_a_ghz_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let p = dir.path().join("p.json");
    let out = dir.path().join("two.json");
    write_operator(&w, &ghz_witness(2, 2, 0));
    write_operator(&p, &ghz_state(2, 2, 0).unwrap().projector().scale(2.0));
    let res = sepdisc(&["construct", "two-state", "--witness", w.to_str().unwrap(), "--P", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let r = report(&res);
    let priors: Vec<f64> = r["outputs"]["priors"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((priors[0] - 2.0 / 3.0).abs() < 1e-12 && (priors[1] - 1.0 / 3.0).abs() < 1e-12, "{priors:?}");
    assert_eq!(r["outputs"]["report"]["gap_certified"], true);
    assert_valid("ensemble", &read(&out));

    write_operator(&w, &HermitianOperator::identity(Dims::uniform(2, 2).unwrap()));
    let res = sepdisc(&["construct", "two-state", "--witness", w.to_str().unwrap(), "--P", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 65);
}

#[test]
fn construct_n_state_with_automatic_weights() {
    let dir = tempfile::tempdir().unwrap();
    let ws: Vec<String> = (0..2)
        .map(|j| {
            let path = dir.path().join(format!("w{j}.json"));
            write_operator(&path, &ghz_witness(2, 2, j));
            path.to_str().unwrap().to_owned()
        })
        .collect();
    let out = dir.path().join("many.json");
    let res = sepdisc(&["construct", "n-state", "--witness", &ws[0], &ws[1], "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    report(&res);
    let e = read(&out);
    assert_valid("ensemble", &e);
    assert_eq!(e["states"].as_array().unwrap().len(), 3);

    let res = sepdisc(&["construct", "n-state", "--witness", &ws[0], &ws[1], "--lambda", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 65);
}

#[test]
fn reproduce_matches_closed_forms() {
    let out = sepdisc(&["reproduce", "example1", "--pairs", "2,2"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["outputs"]["passed"], true);
    let rows = r["outputs"]["rows"].as_array().unwrap();
    let p = rows.iter().find(|row| row["check"] == "p_SEP").unwrap();
    assert_eq!(p["expected_label"], "2/3");

    let table = sepdisc(&["reproduce", "example1", "--pairs", "2,2", "--format", "table"]);
    assert_eq!(code(&table), 0);
    let text = String::from_utf8_lossy(&table.stdout);
    assert!(text.contains("0.666667") && text.contains("0 mismatches"), "{text}");

    assert_eq!(code(&sepdisc(&["reproduce", "example1", "--pairs", "1,2"])), 64);
}

#[test]
fn reproduce_all_is_deterministic() {
    let a = sepdisc(&["reproduce", "all"]);
    let b = sepdisc(&["reproduce", "all"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    let rows = r["outputs"]["rows"].as_array().unwrap();
    assert!(rows.iter().all(|row| row["pass"] == true));
    for example in ["example1", "example2", "example3", "two-state", "n-state"] {
        assert!(rows.iter().any(|row| row["example"] == example), "no {example} rows");
    }
}

#[test]
fn schema_rejects_malformed_documents() {
    assert!(!schema_for("ensemble").is_valid(&json!({ "states": [{ "eta": 1.0 }] })));
    assert!(!schema_for("operator").is_valid(&json!({ "dims": [2], "entries": [[1.0]] })));
    assert!(!schema_for("run_report").is_valid(&json!({
        "command": "solve", "argv": [], "inputs": {}, "outputs": { "p_value": 0.5 }, "tool_version": "0"
    })));
    assert!(!schema_for("").is_valid(&json!({ "unrelated": true })));
}
