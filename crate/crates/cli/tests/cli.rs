use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn intesn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intesn"))
        .args(args)
        .current_dir(dir)
        .env_remove("RESERVOIR_SEED")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL_RECALL: &[&str] = &["recall", "--n", "200", "--train-len", "600", "--test-len", "200"];

#[test]
fn zero_reservoir_size_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = intesn(dir.path(), &["recall", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n:"), "{}", stderr(&o));
    assert!(!dir.path().join("recall.json").exists());
}

#[test]
fn recall_writes_sixteen_delays_per_engine() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL_RECALL.to_vec();
    args.extend(["--seeds", "2"]);
    let o = intesn(dir.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&dir.path().join("recall.json"));
    assert_eq!(r["experiment"], "recall");
    for engine in ["esn", "intesn"] {
        let mean = r["summary"][engine]["accuracy"]["mean"].as_array().unwrap();
        assert_eq!(mean.len(), 16);
    }
    assert_eq!(r["runs"].as_array().unwrap().len(), 4);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().count(), 1);
}

#[test]
fn seed_list_and_environment_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL_RECALL.to_vec();
    args.extend(["--engine", "intesn", "--seeds", "7,9", "-o", "a.json"]);
    assert!(intesn(dir.path(), &args).status.success());
    assert_eq!(read_json(&dir.path().join("a.json"))["seeds"], serde_json::json!([7, 9]));

    let mut args = SMALL_RECALL.to_vec();
    args.extend(["--engine", "intesn", "--seeds", "1", "-o", "b.json"]);
    let o = Command::new(env!("CARGO_BIN_EXE_intesn"))
        .args(&args)
        .current_dir(dir.path())
        .env("RESERVOIR_SEED", "42")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(read_json(&dir.path().join("b.json"))["seeds"], serde_json::json!([42]));
}

#[test]
fn results_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a.json", "b.json"] {
        let mut args = SMALL_RECALL.to_vec();
        args.extend(["--seeds", "1", "-o", out]);
        assert!(intesn(dir.path(), &args).status.success());
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"n": 150, "max_delay": 4, "train_len": 600, "test_len": 200}"#)
        .unwrap();
    let o = intesn(dir.path(), &["recall", "--engine", "intesn", "--seeds", "1", "--config", "cfg.json", "--n", "180"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&dir.path().join("recall.json"));
    assert_eq!(r["config"]["n"], 180);
    assert_eq!(r["config"]["max_delay"], 4);
    assert_eq!(r["summary"]["intesn"]["accuracy"]["mean"].as_array().unwrap().len(), 5);

    std::fs::write(dir.path().join("bad.json"), r#"{"no_such_field": 1}"#).unwrap();
    let o = intesn(dir.path(), &["recall", "--config", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(dir.path().join("list.json"), "[1, 2]").unwrap();
    assert_eq!(intesn(dir.path(), &["recall", "--config", "list.json"]).status.code(), Some(2));
}

#[test]
fn kappa_with_float_engine_warns() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL_RECALL.to_vec();
    args.extend(["--engine", "esn", "--seeds", "1", "--kappa", "5"]);
    let o = intesn(dir.path(), &args);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL_RECALL.to_vec();
    args.extend(["--engine", "intesn", "--seeds", "1", "-o", "r.csv"]);
    assert!(intesn(dir.path(), &args).status.success());
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("experiment,seed,key,index,value"));
    assert!(lines.any(|l| l.starts_with("recall,1,accuracy,15,")));
}

#[test]
fn bench_rejects_zero_steps() {
    let dir = tempfile::tempdir().unwrap();
    let o = intesn(dir.path(), &["bench", "--steps", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("steps"));
}

#[test]
fn bench_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = intesn(dir.path(), &["bench", "--steps", "100", "-o", "b.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("speedup"));
    let r = read_json(&dir.path().join("b.json"));
    assert_eq!(r["packed_state_bytes"], 113);
}

#[test]
fn sine_with_both_engines_and_saved_models() {
    let dir = tempfile::tempdir().unwrap();
    let o = intesn(
        dir.path(),
        &[
            "sine",
            "--seeds",
            "1",
            "--n",
            "300",
            "--train-len",
            "800",
            "--washout",
            "200",
            "--horizon",
            "50",
            "--save-model",
            "m.bin",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&dir.path().join("sine.json"));
    assert_eq!(r["config"]["score_steps"], 50);
    for engine in ["esn", "intesn"] {
        assert!(r["summary"][engine]["nrmse"]["mean"][0].as_f64().unwrap().is_finite());
        let o = intesn(dir.path(), &["inspect-model", &format!("m-{engine}.bin")]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(text.contains(&format!("engine: {engine}")), "{text}");
        assert!(text.contains("N=300"), "{text}");
    }
}

#[test]
fn inspect_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("x.bin"), b"not a model").unwrap();
    let o = intesn(dir.path(), &["inspect-model", "x.bin"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_ucr_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut train = String::new();
    let mut test = String::new();
    for i in 0..6 {
        let jitter = i as f64 * 0.01;
        train.push_str(&format!("3,{},0.2,0.3,0.2\n7,{},0.8,0.7,0.9\n", 0.1 + jitter, 0.9 - jitter));
        test.push_str(&format!("3,{},0.22,0.3,0.2\n7,{},0.8,0.72,0.9\n", 0.12 + jitter, 0.88 - jitter));
    }
    std::fs::write(dir.path().join("train.tsv"), train.replace(',', "\t")).unwrap();
    std::fs::write(dir.path().join("test.tsv"), test.replace(',', "\t")).unwrap();
    let o = intesn(
        dir.path(),
        &["classify", "--train", "train.tsv", "--test", "test.tsv", "--remap-labels", "--seeds", "2", "--n", "200"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&dir.path().join("classify.json"));
    for engine in ["esn", "intesn"] {
        assert_eq!(r["summary"][engine]["accuracy"]["mean"][0], 1.0);
    }
}

#[test]
fn classify_rejects_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("train.csv"), "0,0.1,0.2\n1,0.5,abc\n").unwrap();
    std::fs::write(dir.path().join("test.csv"), "0,0.1,0.2\n").unwrap();
    let o = intesn(dir.path(), &["classify", "--train", "train.csv", "--test", "test.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("train.csv:2"), "{}", stderr(&o));
}

#[test]
fn classify_suite_writes_one_file_per_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let o = intesn(
        dir.path(),
        &["classify", "--synthetic", "suite", "--seeds", "1", "--n", "100", "--engine", "intesn", "-o", "s.json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("s-wafer.json").exists());
    assert!(dir.path().join("s-japanese-vowels.json").exists());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 7);
}

#[test]
fn patches_writes_reconstructions() {
    let dir = tempfile::tempdir().unwrap();
    let o = intesn(dir.path(), &["patches", "--reservoir", "2000:3", "--seeds", "1", "--images-out", "imgs"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let bytes = std::fs::read(dir.path().join("imgs/n2000_image1_d0.pgm")).unwrap();
    assert!(bytes.starts_with(b"P5"));
    let r = read_json(&dir.path().join("patches.json"));
    assert_eq!(r["summary"]["intesn"]["mse.n2000"]["mean"].as_array().unwrap().len(), 3);

    let o = intesn(dir.path(), &["patches", "--engine", "esn", "--reservoir", "2000:3"]);
    assert_eq!(o.status.code(), Some(2));
}
