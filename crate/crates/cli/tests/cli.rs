use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vkampen"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"));
    let text = std::fs::read_to_string(&path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn json_ok(out: &Output, schema_name: &str) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let validator = schema(schema_name);
    if let Err(e) = validator.validate(&v) {
        panic!("{schema_name} schema violation: {e}");
    }
    v
}

fn gallery(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let out = run(&["gallery", name, "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gallery_documents_validate() {
    let v = json_ok(&run(&["gallery", "skeleton-2-6"]), "complex");
    assert_eq!(v["maximal_simplices"].as_array().unwrap().len(), 35);
    let v = json_ok(&run(&["gallery", "fkt"]), "complex");
    assert_eq!(v["maximal_simplices"].as_array().unwrap().len(), 86);
    for label in ["p", "m", "S2_p", "S2_m", "meridian", "parallel"] {
        assert!(v["marked"][label].is_array(), "missing mark {label}");
    }
    json_ok(&run(&["gallery", "torus-3-3"]), "complex");
    let v = json_ok(&run(&["gallery", "product-ornament-2-3"]), "ornament");
    assert_eq!(v["components"].as_array().unwrap().len(), 3);
    assert_eq!(v["components"][0]["complex"]["maximal_simplices"].as_array().unwrap().len(), 48);
    json_ok(&run(&["gallery", "cnld1"]), "ornament");
}

#[test]
fn unknown_names_and_bad_files_exit_2() {
    assert_eq!(run(&["gallery", "no-such-thing"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"vertex_count\": 3, \"maximal_simplices\": [[0, 7]]}").unwrap();
    assert_eq!(run(&["obstruction", "--complex", p(&bad), "--k", "2", "--r", "2"]).status.code(), Some(2));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&["obstruction", "--complex", p(&bad), "--k", "2", "--r", "2"]).status.code(), Some(2));
    assert_eq!(run(&["obstruction", "--complex", "missing.json", "--k", "2", "--r", "2"]).status.code(), Some(2));
    assert_eq!(run(&["obstruction", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn obstruction_reports() {
    let dir = tempfile::tempdir().unwrap();
    let skel = gallery(dir.path(), "skeleton-2-6");
    let v = json_ok(&run(&["obstruction", "--complex", p(&skel), "--k", "2", "--r", "2", "--ring", "z2"]), "report");
    assert_eq!(v["class_trivial"], false);
    assert_eq!(v["ring"], "Z2");
    assert_eq!(v["seed"], 0);

    let out_file = dir.path().join("report.json");
    let out = run(&["obstruction", "--complex", p(&skel), "--k", "2", "--r", "2", "--seed", "9", "--out", p(&out_file)]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    assert!(schema("report").is_valid(&v));
    assert_eq!(v["class_trivial"], false);
    assert_eq!(v["seed"], 9);

    let simplex = gallery(dir.path(), "simplex-2");
    let v = json_ok(&run(&["obstruction", "--complex", p(&simplex), "--k", "2", "--r", "2"]), "report");
    assert_eq!(v["class_trivial"], true);
    assert_eq!(v["degenerate"], true);
}

#[test]
fn fkt_is_trivial_over_z_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let fkt = gallery(dir.path(), "fkt");
    let v = json_ok(&run(&["obstruction", "--complex", p(&fkt), "--k", "2", "--r", "2", "--witness"]), "report");
    assert_eq!(v["class_trivial"], true);
    assert_eq!(v["witness_included"], true);
    assert!(v["verdict"].as_str().unwrap().contains("inconclusive"));
}

#[test]
fn dimension_budget_and_genericity_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let skel = gallery(dir.path(), "skeleton-2-6");
    let dims = run(&["obstruction", "--complex", p(&skel), "--k", "1", "--r", "2"]);
    assert_eq!(dims.status.code(), Some(4));
    let budget = run(&["obstruction", "--complex", p(&skel), "--k", "2", "--r", "2", "--max-cells", "100"]);
    assert_eq!(budget.status.code(), Some(5));
    let budget = run(&["obstruction", "--complex", p(&skel), "--k", "2", "--r", "2", "--max-matrix", "1000"]);
    assert_eq!(budget.status.code(), Some(5));

    // an ornament whose two components coincide has a common point
    let hopf = gallery(dir.path(), "product-ornament-2-2");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&hopf).unwrap()).unwrap();
    let first = doc["components"][0].clone();
    doc["components"][1] = first;
    let bad = dir.path().join("bad-ornament.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    assert_eq!(run(&["linking", "--ornament", p(&bad)]).status.code(), Some(3));
}

#[test]
fn linking_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let hopf = gallery(dir.path(), "product-ornament-2-2");
    let v = json_ok(&run(&["linking", "--ornament", p(&hopf), "--repeat", "3"]), "linking");
    assert_eq!(v["linking_number"].as_i64().unwrap().abs(), 1);
    assert_eq!(v["apex_independent"], true);
    assert_eq!(v["per_seed"].as_array().unwrap().len(), 3);

    let cnld1 = gallery(dir.path(), "cnld1");
    let v = json_ok(&run(&["linking", "--ornament", p(&cnld1)]), "linking");
    assert_eq!(v["linking_number"], 0);

    let split = gallery(dir.path(), "split-ornament-1-3");
    let v = json_ok(&run(&["linking", "--ornament", p(&split), "--seed", "4"]), "linking");
    assert_eq!(v["linking_number"], 0);
}

#[test]
fn parity_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let skel = gallery(dir.path(), "skeleton-2-6");
    let args = ["parity", "--complex", p(&skel), "--d", "4", "--trials", "3", "--seed", "11"];
    let a = json_ok(&run(&args), "parity");
    let b = json_ok(&run(&args), "parity");
    assert_eq!(a, b);
    assert_eq!(a["odd"], 3);

    let tri = gallery(dir.path(), "two-triangles");
    let v = json_ok(&run(&["parity", "--complex", p(&tri), "--d", "4", "--trials", "5"]), "parity");
    assert_eq!(v["odd"].as_u64().unwrap() + v["even"].as_u64().unwrap(), 5);
}
