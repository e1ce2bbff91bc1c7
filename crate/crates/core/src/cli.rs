//! Command implementations behind the `mtmvcsf` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::{RunConfig, FORMAT_VERSION};
use crate::dataset::{save_dataset, Manifest};
use crate::error::{Error, Result};
use crate::eval::{
    compare_with_report, noise_sweep, Arm, ComparisonTable, SweepSummary, SweepTable,
};
use crate::factorization::BlockMap;
use crate::fsutil::write_atomic;
use crate::trainer::{fit, ReportSummary};

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format_version: u32,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn write_json<T: Serialize>(path: &Path, cfg: &RunConfig, body: T) -> Result<()> {
    let doc = Envelope {
        format_version: FORMAT_VERSION,
        config: cfg,
        body,
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn ensure_dir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

/// Writes a dataset directory and returns a one-line manifest summary.
pub fn cmd_generate(cfg: &RunConfig) -> Result<String> {
    if cfg.data.path.is_some() {
        return Err(Error::Config(
            "generate needs a preset or inline synth spec, not a dataset path".into(),
        ));
    }
    let ds = cfg.dataset()?;
    save_dataset(&ds, &cfg.out)?;
    let m = Manifest::of(&ds);
    Ok(format!(
        "{}: T={} V={} C={} N={} N_l={} -> {}",
        m.name,
        m.n_tasks,
        m.n_views,
        m.n_classes,
        m.n_total,
        m.n_labeled,
        cfg.out.display()
    ))
}

#[derive(Serialize)]
struct TrainBody<'a> {
    report: ReportSummary,
    predictions: &'a [Vec<usize>],
}

#[derive(Serialize)]
struct BlocksBody<'a> {
    tasks: &'a [BlockMap],
}

/// Trains the configured algorithm and writes the report, loss curve and
/// latent features.
pub fn cmd_train(cfg: &RunConfig, include_timings: bool) -> Result<String> {
    let ds = cfg.dataset()?;
    let report = fit(&ds, &cfg.hyperparams, cfg.algorithm)?;
    let out = &cfg.out;
    let feat_dir = out.join("features");
    ensure_dir(&feat_dir)?;

    let predictions = report.predict_unlabeled();
    write_json(
        &out.join("report.json"),
        cfg,
        TrainBody {
            report: report.summary(include_timings),
            predictions: &predictions,
        },
    )?;
    write_atomic(out.join("loss_curve.csv"), &report.loss_curve_csv())?;
    let mut maps = Vec::new();
    for (t, f) in report.features.iter().enumerate() {
        write_atomic(feat_dir.join(format!("task{t}.csv")), &f.to_csv())?;
        maps.push(f.block_map());
    }
    write_json(
        &feat_dir.join("blocks.json"),
        cfg,
        BlocksBody { tasks: &maps },
    )?;

    let last = report.objective_trace.last().copied().unwrap_or(f64::NAN);
    Ok(format!(
        "{} iterations={} converged={} objective={last:e}",
        cfg.algorithm.name(),
        report.iterations,
        report.converged
    ))
}

#[derive(Serialize)]
struct SweepBody<'a> {
    summary: &'a [SweepSummary],
    rows: &'a SweepTable,
}

/// Runs both algorithms over every noise fraction and seed.
pub fn cmd_noise_sweep(cfg: &RunConfig) -> Result<String> {
    let ds = cfg.dataset()?;
    let table = noise_sweep(
        &ds,
        &cfg.hyperparams_standard,
        &cfg.hyperparams_an,
        &cfg.noise_fractions,
        &cfg.seeds,
    )?;
    ensure_dir(&cfg.out)?;
    write_atomic(cfg.out.join("sweep.csv"), &table.to_csv())?;
    write_json(
        &cfg.out.join("summary.json"),
        cfg,
        SweepBody {
            summary: &table.summary,
            rows: &table,
        },
    )?;
    let mut msg = String::from("algorithm fraction mean std");
    for s in &table.summary {
        let _ = write!(
            msg,
            "\n{} {} {:.4} {:.4}",
            s.algorithm.name(),
            s.fraction,
            s.mean,
            s.std
        );
    }
    Ok(msg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedMean {
    pub arm: Arm,
    pub metric: String,
    pub mean: f64,
}

/// Mean over seeds of each arm's task-averaged metric.
pub fn seed_means(tables: &[ComparisonTable]) -> Vec<SeedMean> {
    let Some(first) = tables.first() else {
        return Vec::new();
    };
    first
        .rows
        .iter()
        .filter(|r| r.task.is_none())
        .map(|r| {
            let vals: Vec<f64> = tables
                .iter()
                .filter_map(|t| t.mean(r.arm, &r.metric))
                .collect();
            SeedMean {
                arm: r.arm,
                metric: r.metric.clone(),
                mean: vals.iter().sum::<f64>() / vals.len() as f64,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct CompareBody<'a> {
    mean_over_seeds: &'a [SeedMean],
    tables: &'a [ComparisonTable],
}

/// Compares latent features against the raw stacked views for every seed.
pub fn cmd_evaluate(cfg: &RunConfig) -> Result<String> {
    let ds = cfg.dataset()?;
    let tables = cfg
        .seeds
        .iter()
        .map(|&seed| {
            let mut hp = cfg.hyperparams.clone();
            hp.seed = seed;
            let report = fit(&ds, &hp, cfg.algorithm)?;
            compare_with_report(&ds, &report, cfg.mode, seed, &cfg.eval)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::from("seed,task,arm,metric,value\n");
    for t in &tables {
        let body = String::from_utf8(t.to_csv()).expect("ascii csv");
        for line in body.lines().skip(1) {
            let _ = writeln!(csv, "{},{line}", t.seed);
        }
    }
    let means = seed_means(&tables);
    ensure_dir(&cfg.out)?;
    write_atomic(cfg.out.join("comparison.csv"), csv.as_bytes())?;
    write_json(
        &cfg.out.join("comparison.json"),
        cfg,
        CompareBody {
            mean_over_seeds: &means,
            tables: &tables,
        },
    )?;
    let mut msg = String::from("arm metric mean");
    for m in &means {
        let arm = match m.arm {
            Arm::Latent => "latent",
            Arm::Raw => "raw",
        };
        let _ = write!(msg, "\n{arm} {} {:.4}", m.metric, m.mean);
    }
    Ok(msg)
}
