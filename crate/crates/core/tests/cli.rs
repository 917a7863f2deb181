use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rfinfer::data::load_feature_rows;
use rfinfer::experiments::content_digest;
use rfinfer::forest::Forest;

const TRAIN: &str = "\
size,color,age,price
50,red,3,210
62,blue,8,190
71,red,1,260
45,green,12,150
80,blue,4,280
55,green,6,200
90,red,2,320
66,blue,10,205
48,red,7,170
75,green,5,250
";

const SCHEMA: &str = r#"{"size": "numeric", "color": "categorical", "age": "numeric", "price": "response"}"#;

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("train.csv"), TRAIN).unwrap();
        fs::write(dir.path().join("schema.json"), SCHEMA).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn out(&self, name: &str) -> PathBuf {
        let p = self.path(name);
        fs::create_dir_all(&p).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_rfinfer"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) {
        let out = self.run(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }

    fn train(&self, out: &str, extra: &[&str]) -> Vec<u8> {
        let mut args = vec!["train", "--data", "train.csv", "--schema", "schema.json", "--b", "20", "--k", "6", "--min-leaf", "1", "--out", out];
        args.extend_from_slice(extra);
        self.out(out);
        self.ok(&args);
        fs::read(self.path(out).join("model.json")).unwrap()
    }
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn predict_round_trips_the_saved_model() {
    let fx = Fixture::new();
    fx.train("a", &[]);
    fx.ok(&["predict", "--model", "a/model.json", "--points", "train.csv", "--out", "a"]);
    let forest = Forest::from_json(&fs::read_to_string(fx.path("a/model.json")).unwrap()).unwrap();
    let xs = load_feature_rows(TRAIN.as_bytes(), &forest.schema).unwrap();
    let expected = forest.predict_many(&xs).unwrap();
    let mut rdr = csv::Reader::from_path(fx.path("a/predictions.csv")).unwrap();
    let got: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(got, expected);
    assert_eq!(got.len(), 10);
}

#[test]
fn reruns_and_worker_counts_are_byte_identical() {
    let fx = Fixture::new();
    let a = fx.train("a", &["--seed", "5"]);
    let b = fx.train("b", &["--seed", "5"]);
    let c = fx.train("c", &["--seed", "5", "--workers", "4"]);
    let d = fx.train("d", &["--seed", "6"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_ne!(a, d);
}

#[test]
fn intervals_and_tests_write_reports() {
    let fx = Fixture::new();
    fx.out("o");
    let common = ["--data", "train.csv", "--schema", "schema.json", "--k", "4", "--min-leaf", "1", "--n-z", "5", "--n-mc", "4", "--out", "o"];
    let mut ci = vec!["ci", "--points", "train.csv"];
    ci.extend_from_slice(&common);
    fx.ok(&ci);
    let mut rdr = csv::Reader::from_path(fx.path("o/intervals.csv")).unwrap();
    for r in rdr.records() {
        let r = r.unwrap();
        let (lo, hi): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(lo <= hi);
    }
    let mut test = vec!["test", "--method", "chi2", "--feature", "age"];
    test.extend_from_slice(&common);
    fx.ok(&test);
    let report: serde_json::Value = serde_json::from_slice(&read(&fx.path("o"), "report.json")).unwrap();
    let p = report["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn usage_errors_exit_two_and_runtime_errors_one() {
    let fx = Fixture::new();
    fs::write(fx.path("bad.json"), r#"{"size": "numeric", "color": "text", "price": "response"}"#).unwrap();
    let bad_schema = fx.run(&["train", "--data", "train.csv", "--schema", "bad.json"]);
    assert_eq!(code(&bad_schema), 2);
    assert_eq!(code(&fx.run(&["simulate", "nonexistent"])), 2);
    assert_eq!(code(&fx.run(&["frobnicate"])), 2);
    let unknown = fx.run(&["test", "--data", "train.csv", "--schema", "schema.json", "--method", "chi2", "--feature", "weight"]);
    assert_eq!(code(&unknown), 2);
    assert_eq!(code(&fx.run(&["predict", "--model", "missing.json", "--points", "train.csv"])), 1);
}

#[test]
fn sweep_writes_two_rows_per_level_with_a_stable_digest() {
    let fx = Fixture::new();
    let cfg = r#"{"snr_sweep": {"snrs": [0.5, 2.0, 4.0], "replicates": 20,
        "base": {"n": 60, "n_test": 40, "p": 4, "s": 2, "rho": 0.5},
        "forest": {"b": 10}, "bagging": {"b": 10, "tree": {"mtry": 4}}}}"#;
    fs::write(fx.path("small.json"), cfg).unwrap();
    for out in ["s1", "s2"] {
        fx.out(out);
        fx.ok(&["simulate", "snr_sweep", "--config", "small.json", "--out", out]);
    }
    let (d1, d2) = (fx.path("s1"), fx.path("s2"));
    let csv1 = read(&d1, "results.csv");
    assert_eq!(csv1, read(&d2, "results.csv"));
    assert_eq!(read(&d1, "manifest.json"), read(&d2, "manifest.json"));
    let rows = csv::Reader::from_reader(csv1.as_slice()).records().count();
    assert_eq!(rows, 3 * 2);
    let manifest: serde_json::Value = serde_json::from_slice(&read(&d1, "manifest.json")).unwrap();
    assert_eq!(manifest["digest"].as_str().unwrap(), content_digest(&csv1));
    assert_eq!(manifest["scenario"], "snr_sweep");
}

#[test]
fn saved_grouped_model_serves_intervals() {
    let fx = Fixture::new();
    fx.train("plain", &[]);
    fx.train("grouped", &["--grouped", "--n-z", "5", "--n-mc", "4"]);
    let plain = fx.run(&["ci", "--model", "plain/model.json", "--points", "train.csv", "--out", "plain"]);
    assert_eq!(code(&plain), 2);
    fx.ok(&["ci", "--model", "grouped/model.json", "--points", "train.csv", "--out", "grouped"]);
    let forest = Forest::from_json(&fs::read_to_string(fx.path("grouped/model.json")).unwrap()).unwrap();
    assert_eq!(forest.trees.len(), 20);
    let rows = csv::Reader::from_path(fx.path("grouped/intervals.csv")).unwrap().records().count();
    assert_eq!(rows, 10);
}
