use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fssrec"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Drop the wall-clock runtime lines of a pretty-printed meta-db.
fn without_runtimes(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"t\":"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A directory with the bundled datasets plus one small CSV.
fn corpus(dir: &Path) -> PathBuf {
    let d = dir.join("datasets");
    fs::create_dir(&d).unwrap();
    for f in ["iris.arff", "logic.arff", "wine.arff"] {
        fs::copy(data(f), d.join(f)).unwrap();
    }
    let mut csv = String::from("u,v,label\n");
    for i in 0..60 {
        let u = (i * 37 % 11) as f64 / 2.0;
        let v = (i % 7) as f64;
        let label = if u + v > 6.0 { "hi" } else { "lo" };
        csv.push_str(&format!("{u},{v},{label}\n"));
    }
    fs::write(d.join("zeta.csv"), csv).unwrap();
    fs::write(d.join("notes.txt"), "ignored").unwrap();
    d
}

fn small_db(dir: &Path) -> PathBuf {
    let out = dir.join("db.json");
    let o = run(&[
        "build-db",
        "--datasets",
        corpus(dir).to_str().unwrap(),
        "--passes",
        "1",
        "--folds",
        "3",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn extract_meta_prints_json() {
    let o = run(&["extract-meta", "--dataset", data("iris.arff").to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dataset"], "iris");
    assert_eq!(v["meta"]["I"], 150);
    assert_eq!(v["meta"]["F"], 5);
    assert_eq!(v["meta"]["T"], 3);
    assert_eq!(v["meta"]["D"], 30.0);
}

#[test]
fn build_db_is_deterministic_apart_from_runtimes() {
    let dir = tempfile::tempdir().unwrap();
    let datasets = corpus(dir.path());
    let mut texts = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let o = run(&[
            "build-db",
            "--datasets",
            datasets.to_str().unwrap(),
            "--learner",
            "nb",
            "--seed",
            "7",
            "--passes",
            "2",
            "--folds",
            "3",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        texts.push(fs::read_to_string(out).unwrap());
    }
    assert_eq!(without_runtimes(&texts[0]), without_runtimes(&texts[1]));
    let v: Value = serde_json::from_str(&texts[0]).unwrap();
    let names: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["dataset"].as_str().unwrap()).collect();
    assert_eq!(names, ["iris", "logic", "wine", "zeta"]);
    assert_eq!(v["cv"]["seed"], 7);
    assert_eq!(v["entries"][0]["records"]["fcbf"].as_array().unwrap().len(), 6);
}

#[test]
fn recommend_defaults_to_top_three() {
    let dir = tempfile::tempdir().unwrap();
    let db = small_db(dir.path());
    let o = run(&["recommend", "--db", db.to_str().unwrap(), "--dataset", data("wine.arff").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["top"].as_array().unwrap().len(), 3);
    assert_eq!(v["ranking"].as_array().unwrap().len(), 7);
    // auto k over four entries: round(1.5) = 2
    assert_eq!(v["params"]["k"], 2);
    assert_eq!(v["neighbors"][0]["name"], "wine");
    assert!(v["query"]["rho_bar"].is_number());
}

#[test]
fn validate_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let db = small_db(dir.path());
    let csv = dir.path().join("v.csv");
    let o = run(&[
        "validate",
        "--db",
        db.to_str().unwrap(),
        "--alpha",
        "0.1",
        "--beta",
        "0.1",
        "--k",
        "2",
        "--top",
        "2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["G"], 4);
    assert_eq!(v["hit_ratio"].as_array().unwrap().len(), 2);
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "name,rec1,rec2,hit1,hit2,hit_top,rpr");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sensitivity_and_best_set() {
    let dir = tempfile::tempdir().unwrap();
    let db = small_db(dir.path());
    let json = dir.path().join("s.json");
    let o = run(&["sensitivity", "--db", db.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = String::from_utf8_lossy(&o.stdout);
    assert_eq!(csv.lines().next().unwrap(), "k,mean_rpr,acceptable");
    assert_eq!(csv.lines().count(), 4);
    let report: Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["advisory_band"], serde_json::json!([2, 1]));
    assert!(stderr(&o).contains("advisory band"));

    let o = run(&["best-set", "--db", db.to_str().unwrap(), "--dataset", "logic"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let sets: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(sets.as_array().unwrap().len(), 1);
    let members = sets[0]["members"].as_array().unwrap();
    assert!(members.contains(&sets[0]["best"]));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let db = small_db(dir.path());
    let db = db.to_str().unwrap();
    let iris = data("iris.arff");
    let iris = iris.to_str().unwrap();
    for args in [
        vec!["recommend", "--db", db, "--dataset", iris, "--k", "0"],
        vec!["recommend", "--db", db, "--dataset", iris, "--k", "5"],
        vec!["recommend", "--db", db, "--dataset", iris, "--top", "8"],
        vec!["recommend", "--db", db, "--dataset", iris, "--alpha", "-1"],
        vec!["validate", "--db", db, "--k", "4"],
        vec!["best-set", "--db", db, "--dataset", "nope"],
        vec!["build-db", "--datasets", ".", "--selectors", "fcbf"],
        vec!["frobnicate"],
        vec!["recommend", "--bogus"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_with_two_and_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let o = run(&["validate", "--db", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert_eq!(msg.trim_end().lines().count(), 1);
    assert!(msg.contains("missing.json"));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"schema_version\": 99}").unwrap();
    let o = run(&["validate", "--db", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schema_version"));

    let broken = dir.path().join("broken.arff");
    fs::write(&broken, "@relation r\n@attribute x numeric\n@attribute class {a,b}\n@data\nzz,a\n").unwrap();
    let o = run(&["extract-meta", "--dataset", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert_eq!(msg.trim_end().lines().count(), 1);
    assert!(msg.contains("broken.arff"));
}
