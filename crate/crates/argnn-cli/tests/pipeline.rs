//! The full workbench path at toy scale: generate a corpus, label it,
//! train briefly, evaluate, and inspect a trace.

use std::path::Path;
use std::process::{Command, Output};

fn argnn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_argnn"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn check(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn generate_label_train_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    check(&argnn(
        &[
            "generate", "--family", "mixed", "--n", "3..6", "--count", "50", "--seed", "11",
            "--out", "corpus",
        ],
        dir.path(),
    ));
    assert!(dir.path().join("corpus/manifest.json").exists());
    for (out, seed) in [("train.jsonl", "1"), ("val.jsonl", "2")] {
        check(&argnn(
            &[
                "make-dataset", "--task", "credulous", "--semantics", "grd", "--in", "corpus",
                "--out", out, "--seed", seed,
            ],
            dir.path(),
        ));
    }
    std::fs::write(
        dir.path().join("config.json"),
        r#"{
            "train_data": "train.jsonl",
            "val_data": "val.jsonl",
            "out_dir": "run",
            "task": "credulous",
            "semantics": "grd",
            "dim": 8,
            "steps": 4,
            "batch_graphs": 10,
            "max_epochs": 2,
            "seed": 3
        }"#,
    )
    .unwrap();
    let summary = check(&argnn(&["train", "--config", "config.json"], dir.path()));
    let summary: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(summary["epochs"], 2);
    assert_eq!(summary["stop"], "max_epochs");
    for artifact in ["run/best.json", "run/last.json", "run/manifest.json"] {
        assert!(dir.path().join(artifact).exists(), "missing {artifact}");
    }

    let report = check(&argnn(
        &["eval", "--checkpoint", "run/best.json", "--dataset", "val.jsonl"],
        dir.path(),
    ));
    let report: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(report["records"], 50);
    assert_eq!(report["steps"], 4);
    let mcc = report["mcc"].as_f64().unwrap();
    let mae = report["mae"].as_f64().unwrap();
    assert!((-1.0..=1.0).contains(&mcc));
    assert!((0.0..=1.0).contains(&mae));
    let confusion = &report["confusion"];
    let total: u64 = ["true_positives", "true_negatives", "false_positives", "false_negatives"]
        .iter()
        .map(|k| confusion[*k].as_u64().unwrap())
        .sum();
    assert_eq!(total, report["arguments"].as_u64().unwrap());

    // Inference step counts beyond the trained horizon are accepted.
    let wide = check(&argnn(
        &["eval", "--checkpoint", "run/best.json", "--dataset", "val.jsonl", "--steps", "9"],
        dir.path(),
    ));
    let wide: serde_json::Value = serde_json::from_str(&wide).unwrap();
    assert_eq!(wide["steps"], 9);

    // The trace of any corpus framework parses back bit-exactly.
    let apx = std::fs::read_dir(dir.path().join("corpus"))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .find(|p| p.extension().is_some_and(|x| x == "apx"))
        .unwrap();
    let csv = check(&argnn(
        &["trace", "--checkpoint", "run/best.json", apx.to_str().unwrap()],
        dir.path(),
    ));
    let trace = argnn::model::parse_trace(&csv).unwrap();
    assert_eq!(trace.steps(), 4);
}

#[test]
fn training_reruns_are_bit_identical_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    check(&argnn(
        &[
            "generate", "--family", "mixed", "--n", "3..5", "--count", "20", "--seed", "4",
            "--out", "corpus",
        ],
        dir.path(),
    ));
    check(&argnn(
        &[
            "make-dataset", "--task", "credulous", "--semantics", "grd", "--in", "corpus",
            "--out", "data.jsonl",
        ],
        dir.path(),
    ));
    std::fs::write(
        dir.path().join("config.json"),
        r#"{
            "train_data": "data.jsonl",
            "val_data": "data.jsonl",
            "task": "credulous",
            "semantics": "grd",
            "dim": 6,
            "steps": 3,
            "batch_graphs": 10,
            "max_epochs": 4,
            "seed": 8
        }"#,
    )
    .unwrap();
    for out in ["run_a", "run_b"] {
        check(&argnn(&["train", "--config", "config.json", "--out", out], dir.path()));
    }
    let a = std::fs::read(dir.path().join("run_a/last.json")).unwrap();
    let b = std::fs::read(dir.path().join("run_b/last.json")).unwrap();
    assert_eq!(a, b);

    // Two epochs now, two more on resume: same bytes as four straight.
    check(&argnn(
        &["train", "--config", "config.json", "--out", "run_c", "--max-epochs", "2"],
        dir.path(),
    ));
    check(&argnn(
        &[
            "train", "--config", "config.json", "--out", "run_c", "--resume", "run_c/last.json",
            "--max-epochs", "4",
        ],
        dir.path(),
    ));
    let c = std::fs::read(dir.path().join("run_c/last.json")).unwrap();
    assert_eq!(a, c);
}
