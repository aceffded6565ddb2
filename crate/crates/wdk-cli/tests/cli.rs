//! End-to-end runs of the binary: outputs, exit codes, determinism.

use std::collections::BTreeMap;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn wdk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wdk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn hilbert_graded_table_of_the_rank_two_case() {
    let out = wdk(&["hilbert", "--partition", "1", "--max-degree", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("degree  dimension"), "{text}");
    assert!(text.contains("     0  0"), "{text}");
    assert!(text.contains("     1  1"), "{text}");
    assert!(text.contains("     6  1"), "{text}");
}

#[test]
fn hilbert_json_reports_dimensions() {
    let out = wdk(&["hilbert", "--partition", "2", "--max-degree", "8", "--json"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["dimensions"], json!([0, 1, 1, 2, 3, 4, 5, 6, 7]));
    assert!(doc["closed"].is_null());
}

#[test]
fn hilbert_attaches_the_closed_form_on_request() {
    let out = wdk(&[
        "hilbert",
        "--partition",
        "2",
        "--max-degree",
        "6",
        "--closed-form",
        "--json",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert!(doc["closed"].is_object());
    assert_eq!(doc["dimensions"], json!([0, 1, 1, 2, 3, 4, 5]));
}

fn weight_map_from_hilbert(doc: &Value) -> BTreeMap<(u64, u64, u64), i64> {
    doc["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| {
            (
                (
                    w["t1"].as_u64().unwrap(),
                    w["t2"].as_u64().unwrap(),
                    w["z"].as_u64().unwrap(),
                ),
                w["coeff"].as_str().unwrap().parse::<i64>().unwrap(),
            )
        })
        .filter(|&(_, c)| c != 0)
        .collect()
}

fn weight_map_from_kernel_dims(doc: &Value) -> BTreeMap<(u64, u64, u64), i64> {
    doc["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|d| {
            let z = d["z"].as_u64().unwrap();
            d["weights"].as_array().unwrap().iter().map(move |w| {
                (
                    (
                        w["t1"].as_u64().unwrap(),
                        w["t2"].as_u64().unwrap(),
                        z,
                    ),
                    w["dim"].as_i64().unwrap(),
                )
            })
        })
        .filter(|&(_, c)| c != 0)
        .collect()
}

#[test]
fn series_extraction_agrees_with_exact_kernel_dimensions() {
    let h = wdk(&[
        "hilbert",
        "--partition",
        "2",
        "--max-degree",
        "6",
        "--bigraded",
        "--json",
    ]);
    let k = wdk(&[
        "kernel-dims",
        "--partition",
        "2",
        "--max-degree",
        "6",
        "--bigraded",
        "--json",
    ]);
    assert!(h.status.success() && k.status.success());
    assert_eq!(
        weight_map_from_hilbert(&stdout_json(&h)),
        weight_map_from_kernel_dims(&stdout_json(&k))
    );
}

#[test]
fn usage_errors_exit_with_code_two() {
    let cases: [&[&str]; 4] = [
        &["hilbert", "--partition", "5", "--max-degree", "0"],
        &["hilbert", "--partition", "1,2"],
        &["generators", "--partition", "2", "--max-degree", "1"],
        &["generators", "--partition", "2,1", "--max-degree", "4", "--lift"],
    ];
    for args in cases {
        let out = wdk(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn generators_of_the_single_cell_of_size_two() {
    let out = wdk(&["generators", "--partition", "2", "--max-degree", "6", "--json"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["generators"].as_array().unwrap().len(), 2);
    assert!(doc["relations"].as_array().unwrap().is_empty());
    assert_eq!(doc["certified_to"], json!(6));
}

#[test]
fn generators_without_tabulated_invariants_need_the_compute_flag() {
    let out = wdk(&["generators", "--partition", "2,1", "--max-degree", "4"]);
    assert_eq!(out.status.code(), Some(4));
    let ok = wdk(&[
        "generators",
        "--partition",
        "2,1",
        "--max-degree",
        "4",
        "--compute-invariants",
        "--json",
    ]);
    assert!(ok.status.success());
    let doc = stdout_json(&ok);
    assert!(!doc["generators"].as_array().unwrap().is_empty());
}

#[test]
fn lift_produces_the_extended_generator_set() {
    let out = wdk(&[
        "generators",
        "--partition",
        "2,0",
        "--max-degree",
        "6",
        "--lift",
        "--json",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["generators"].as_array().unwrap().len(), 4);
    assert_eq!(doc["lifted_from"], json!([2]));
    assert_eq!(doc["invariants"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_reports_pass_and_rejects_unknown_ids() {
    let ok = wdk(&["verify", "--example", "delta-1", "--json"]);
    assert!(ok.status.success());
    assert_eq!(stdout_json(&ok)["status"], json!("pass"));
    let unknown = wdk(&["verify", "--example", "delta-9"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn pi_of_a_variable_is_a_bracket() {
    let out = wdk(&["pi", "x1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "[x2,x1]");
}

#[test]
fn pi_with_explicit_arity_appends_the_new_variable() {
    let out = wdk(&["pi", "x1", "--arity", "3", "--json"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["arity"], json!(4));
    assert_eq!(doc["render"], json!("[x4,x1]"));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = [
        "hilbert",
        "--partition",
        "1,1",
        "--max-degree",
        "6",
        "--bigraded",
        "--json",
    ];
    let a = wdk(&args);
    let b = wdk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn corpus_rebuild_writes_the_example_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = wdk(&["corpus", "rebuild", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 11);
    let text = std::fs::read_to_string(dir.path().join("delta-3.json")).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["module_relations"].as_array().unwrap().len(), 8);
    assert_eq!(doc["module_generators"].as_array().unwrap().len(), 7);
}

#[test]
fn out_flag_redirects_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dims.json");
    let out = wdk(&[
        "kernel-dims",
        "--partition",
        "2",
        "--max-degree",
        "5",
        "--json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["dimensions"], json!([0, 1, 1, 2, 3, 4]));
}
