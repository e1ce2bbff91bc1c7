use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: &str = r#"
seed = 4
[data.synth]
name = "small"
n_tasks = 2
classes_per_task = 3
instances_per_class = 15
mean_std_pairs = [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]
seed = 4
[hyperparams]
k_per_view = 6
max_iters = 5
[experiment]
noise_fractions = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
seeds = [1, 2, 3, 4, 5]
"#;

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtmvcsf"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    dir
}

#[test]
fn generate_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(
        dir.path(),
        &[
            "generate", "--preset", "synth1", "--seed", "7", "--out", "s1",
        ],
    );
    assert!(out.status.success());
    let m = json(dir.path().join("s1/manifest.json"));
    assert_eq!(
        (
            m["T"].as_u64(),
            m["V"].as_u64(),
            m["C"].as_u64(),
            m["N"].as_u64()
        ),
        (Some(3), Some(5), Some(3), Some(600))
    );
    assert!(m["dims"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap())
        .all(|d| d == 100));

    let out = cli(
        dir.path(),
        &[
            "generate", "--preset", "synth2", "--seed", "7", "--out", "s2",
        ],
    );
    assert!(out.status.success());
    let m = json(dir.path().join("s2/manifest.json"));
    assert_eq!((m["T"].as_u64(), m["N"].as_u64()), (Some(4), Some(800)));
    assert!(dir.path().join("s2/task3/view4.csv").is_file());
}

#[test]
fn train_writes_report_curve_and_features() {
    let dir = setup();
    let out = cli(
        dir.path(),
        &[
            "train",
            "--config",
            "small.toml",
            "--out",
            "tr",
            "--timings",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = json(dir.path().join("tr/report.json"));
    assert_eq!(r["format_version"], 1);
    assert_eq!(r["report"]["format_version"], 1);
    assert_eq!(r["config"]["hyperparams"]["k_per_view"], 6);
    assert!(r["report"]["timings_ms"].is_object());
    let iters = r["report"]["iterations"].as_u64().unwrap() as usize;
    assert_eq!(
        r["report"]["objective_trace"].as_array().unwrap().len(),
        iters + 1
    );

    let curve = std::fs::read_to_string(dir.path().join("tr/loss_curve.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("iter,objective,normalized"));
    assert_eq!(lines.count(), iters + 1);

    let blocks = json(dir.path().join("tr/features/blocks.json"));
    let t0 = &blocks["tasks"][0];
    assert_eq!(t0["k_joint"], 5 * 4 + 2);
    let csv = std::fs::read_to_string(dir.path().join("tr/features/task1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 45);
}

#[test]
fn zero_iterations_is_a_report_only_run() {
    let dir = setup();
    let out = cli(
        dir.path(),
        &[
            "train",
            "--config",
            "small.toml",
            "--out",
            "z",
            "--max-iters",
            "0",
        ],
    );
    assert!(out.status.success());
    let r = json(dir.path().join("z/report.json"));
    assert_eq!(r["report"]["iterations"], 0);
    assert_eq!(r["report"]["objective_trace"].as_array().unwrap().len(), 1);
    assert!(r["report"]["timings_ms"].is_null());
}

#[test]
fn noise_sweep_counts_rows() {
    let dir = setup();
    let out = cli(
        dir.path(),
        &["noise-sweep", "--config", "small.toml", "--out", "sw"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("algorithm,fraction,seed,accuracy"));
    assert_eq!(csv.lines().count(), 1 + 6 * 2 * 5);
    let s = json(dir.path().join("sw/summary.json"));
    assert_eq!(s["format_version"], 1);
    assert_eq!(s["summary"].as_array().unwrap().len(), 12);
}

#[test]
fn evaluate_modes() {
    let dir = setup();
    let out = cli(
        dir.path(),
        &[
            "evaluate",
            "--config",
            "small.toml",
            "--out",
            "ev",
            "--mode",
            "classify",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("ev/comparison.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("seed,task,arm,metric,value"));
    // 5 seeds x (2 tasks + mean) x 2 arms x 5 metrics
    assert_eq!(csv.lines().count(), 1 + 5 * 3 * 2 * 5);
    let c = json(dir.path().join("ev/comparison.json"));
    assert_eq!(c["mean_over_seeds"].as_array().unwrap().len(), 10);

    let out = cli(
        dir.path(),
        &[
            "evaluate",
            "--config",
            "small.toml",
            "--out",
            "cl",
            "--mode",
            "cluster",
        ],
    );
    assert!(out.status.success());
    let c = json(dir.path().join("cl/comparison.json"));
    let metrics: Vec<&str> = c["mean_over_seeds"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|m| m["arm"] == "latent")
        .map(|m| m["metric"].as_str().unwrap())
        .collect();
    assert_eq!(metrics, ["nmi", "ari", "homogeneity", "completeness"]);
}

#[test]
fn flags_override_config() {
    let dir = setup();
    let out = cli(
        dir.path(),
        &[
            "train",
            "--config",
            "small.toml",
            "--out",
            "f",
            "--seed",
            "99",
            "--algorithm",
            "an",
        ],
    );
    assert!(out.status.success());
    let r = json(dir.path().join("f/report.json"));
    assert_eq!(r["config"]["seed"], 99);
    assert_eq!(r["report"]["algorithm"], "an");
    assert_eq!(r["report"]["seed"], 99);
}

#[test]
fn exit_codes() {
    let dir = setup();
    assert_eq!(
        cli(dir.path(), &["train", "--data", "missing", "--out", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        cli(
            dir.path(),
            &["train", "--config", "nope.toml", "--out", "x"]
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(cli(dir.path(), &["frobnicate"]).status.code(), Some(1));
    std::fs::write(
        dir.path().join("bad.toml"),
        "[hyperparams]\nkc_per = 3.0\n[data]\npreset = \"synth1\"\n",
    )
    .unwrap();
    assert_eq!(
        cli(dir.path(), &["train", "--config", "bad.toml", "--out", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(cli(dir.path(), &["--help"]).status.code(), Some(0));

    // an existing file where the output directory should go is a runtime failure
    std::fs::write(dir.path().join("blocked"), "").unwrap();
    let out = cli(
        dir.path(),
        &[
            "train",
            "--config",
            "small.toml",
            "--out",
            "blocked",
            "--max-iters",
            "0",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_directory_trains() {
    let dir = setup();
    assert!(cli(
        dir.path(),
        &["generate", "--config", "small.toml", "--out", "ds"]
    )
    .status
    .success());
    let out = cli(
        dir.path(),
        &["train", "--data", "ds", "--out", "tr", "--max-iters", "2"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = std::fs::read(dir.path().join("tr/report.json")).unwrap();
    let out = cli(
        dir.path(),
        &["train", "--data", "ds", "--out", "tr", "--max-iters", "2"],
    );
    assert!(out.status.success());
    assert_eq!(a, std::fs::read(dir.path().join("tr/report.json")).unwrap());
}
