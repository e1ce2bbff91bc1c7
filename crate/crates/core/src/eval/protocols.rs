use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::learners::{kmeans, softmax_classifier, SoftmaxConfig};
use super::metrics::{
    classification_metrics, clustering_metrics, ClassificationMetrics, ClusteringMetrics,
};
use crate::dataset::io::format_value;
use crate::dataset::{inject_label_noise, MultiViewDataset};
use crate::error::{Error, Result};
use crate::trainer::{fit, Algorithm, Hyperparams, TrainReport};

pub const KMEANS_RESTARTS: usize = 10;

fn truths(ds: &MultiViewDataset) -> Result<Vec<&[usize]>> {
    ds.tasks
        .iter()
        .map(|t| {
            t.unlabeled_truth().ok_or_else(|| {
                Error::InvalidArgument("evaluation needs ground-truth labels for every task".into())
            })
        })
        .collect()
}

/// Fraction of unlabeled instances, pooled over tasks, predicted correctly.
pub fn unlabeled_accuracy(report: &TrainReport, ds: &MultiViewDataset) -> Result<f64> {
    let truth = truths(ds)?;
    let pred = report.predict_unlabeled();
    let mut correct = 0usize;
    let mut total = 0usize;
    for (t, p) in truth.iter().zip(&pred) {
        correct += t.iter().zip(p).filter(|(a, b)| a == b).count();
        total += t.len();
    }
    if total == 0 {
        return Err(Error::InvalidArgument("no unlabeled instances".into()));
    }
    Ok(correct as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub fraction: f64,
    pub seed: u64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub algorithm: Algorithm,
    pub fraction: f64,
    pub mean: f64,
    /// Sample standard deviation; zero for a single seed.
    pub std: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummary>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = String::from("algorithm,fraction,seed,accuracy\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.algorithm.name(),
                r.fraction,
                r.seed,
                format_value(r.accuracy)
            );
        }
        out.into_bytes()
    }

    pub fn summary_for(&self, algorithm: Algorithm, fraction: f64) -> Option<&SweepSummary> {
        self.summary
            .iter()
            .find(|s| s.algorithm == algorithm && s.fraction == fraction)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Noise injection seed and training seed are both the cell's seed; accuracy
/// is measured against the clean ground truth.
pub fn noise_sweep(
    ds: &MultiViewDataset,
    hp_std: &Hyperparams,
    hp_an: &Hyperparams,
    fractions: &[f64],
    seeds: &[u64],
) -> Result<SweepTable> {
    if let Some(f) = fractions.iter().find(|f| !(0.0..=0.5).contains(*f)) {
        return Err(Error::InvalidArgument(format!(
            "noise fraction {f} outside [0, 0.5]"
        )));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidArgument(
            "noise sweep needs at least one seed".into(),
        ));
    }
    truths(ds)?;
    let mut cells = Vec::new();
    for &fraction in fractions {
        for alg in [Algorithm::Standard, Algorithm::AntiNoise] {
            for &seed in seeds {
                cells.push((alg, fraction, seed));
            }
        }
    }
    let rows = cells
        .par_iter()
        .map(|&(algorithm, fraction, seed)| {
            let noisy = inject_label_noise(ds, fraction, seed)?;
            let mut hp = match algorithm {
                Algorithm::Standard => hp_std.clone(),
                Algorithm::AntiNoise => hp_an.clone(),
            };
            hp.seed = seed;
            let report = fit(&noisy, &hp, algorithm)?;
            Ok(SweepRow {
                algorithm,
                fraction,
                seed,
                accuracy: unlabeled_accuracy(&report, ds)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = rows
        .chunks(seeds.len())
        .map(|chunk| {
            let acc: Vec<f64> = chunk.iter().map(|r| r.accuracy).collect();
            let (mean, std) = mean_std(&acc);
            SweepSummary {
                algorithm: chunk[0].algorithm,
                fraction: chunk[0].fraction,
                mean,
                std,
                runs: acc.len(),
            }
        })
        .collect();
    Ok(SweepTable { rows, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Classify,
    Cluster,
}

impl std::str::FromStr for EvalMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(EvalMode::Classify),
            "cluster" => Ok(EvalMode::Cluster),
            other => Err(Error::Config(format!("unknown evaluation mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Latent,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    /// Task index, or `None` for the mean over tasks.
    pub task: Option<usize>,
    pub arm: Arm,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub mode: EvalMode,
    pub seed: u64,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = String::from("task,arm,metric,value\n");
        for r in &self.rows {
            let task = r
                .task
                .map(|t| t.to_string())
                .unwrap_or_else(|| "mean".into());
            let arm = match r.arm {
                Arm::Latent => "latent",
                Arm::Raw => "raw",
            };
            let _ = writeln!(out, "{task},{arm},{},{}", r.metric, format_value(r.value));
        }
        out.into_bytes()
    }

    pub fn mean(&self, arm: Arm, metric: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.task.is_none() && r.arm == arm && r.metric == metric)
            .map(|r| r.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    pub softmax: SoftmaxConfig,
    pub kmeans_restarts: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            softmax: SoftmaxConfig::default(),
            kmeans_restarts: KMEANS_RESTARTS,
        }
    }
}

fn select_columns(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), idx.len(), |i, j| m[(i, idx[j])])
}

fn arm_scores(
    features: &DMatrix<f64>,
    truth: &[usize],
    n_classes: usize,
    mode: EvalMode,
    seed: u64,
    opts: &EvalOptions,
) -> Result<Vec<f64>> {
    match mode {
        EvalMode::Classify => {
            let n = truth.len();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let (train, test) = order.split_at(n / 2);
            if train.is_empty() || test.is_empty() {
                return Err(Error::InvalidArgument(
                    "too few unlabeled instances to split".into(),
                ));
            }
            let train_y: Vec<usize> = train.iter().map(|&j| truth[j]).collect();
            let test_y: Vec<usize> = test.iter().map(|&j| truth[j]).collect();
            let pred = softmax_classifier(
                &select_columns(features, train),
                &train_y,
                n_classes,
                &select_columns(features, test),
                &opts.softmax,
            )?;
            Ok(classification_metrics(&test_y, &pred, n_classes)?
                .values()
                .to_vec())
        }
        EvalMode::Cluster => {
            let r = kmeans(features, n_classes, seed, opts.kmeans_restarts)?;
            Ok(clustering_metrics(truth, &r.assignments)?.values().to_vec())
        }
    }
}

/// Scores the unlabeled latent features of a fitted model against the
/// column-stacked raw views, with identical seeds and splits in both arms.
pub fn latent_vs_raw(
    ds: &MultiViewDataset,
    hp: &Hyperparams,
    algorithm: Algorithm,
    mode: EvalMode,
    seed: u64,
    opts: &EvalOptions,
) -> Result<ComparisonTable> {
    let truth = truths(ds)?;
    let mut hp = hp.clone();
    hp.seed = seed;
    let report = fit(ds, &hp, algorithm)?;
    compare_report(ds, &report, mode, seed, opts, &truth)
}

/// [`latent_vs_raw`] for an already fitted report.
pub fn compare_with_report(
    ds: &MultiViewDataset,
    report: &TrainReport,
    mode: EvalMode,
    seed: u64,
    opts: &EvalOptions,
) -> Result<ComparisonTable> {
    let truth = truths(ds)?;
    compare_report(ds, report, mode, seed, opts, &truth)
}

fn compare_report(
    ds: &MultiViewDataset,
    report: &TrainReport,
    mode: EvalMode,
    seed: u64,
    opts: &EvalOptions,
    truth: &[&[usize]],
) -> Result<ComparisonTable> {
    let names: Vec<&str> = match mode {
        EvalMode::Classify => ClassificationMetrics::NAMES.to_vec(),
        EvalMode::Cluster => ClusteringMetrics::NAMES.to_vec(),
    };
    let nl = ds.n_labeled;
    let nu = ds.n_unlabeled();
    let mut rows = Vec::new();
    for arm in [Arm::Latent, Arm::Raw] {
        let mut sums = vec![0.0; names.len()];
        for t in 0..ds.n_tasks() {
            let features = match arm {
                Arm::Latent => report.features[t].unlabeled().into_owned(),
                Arm::Raw => ds.stacked_views(t).columns(nl, nu).into_owned(),
            };
            let scores = arm_scores(&features, truth[t], ds.n_classes, mode, seed, opts)?;
            for (i, (name, v)) in names.iter().zip(&scores).enumerate() {
                sums[i] += v;
                rows.push(ComparisonRow {
                    task: Some(t),
                    arm,
                    metric: name.to_string(),
                    value: *v,
                });
            }
        }
        for (name, s) in names.iter().zip(&sums) {
            rows.push(ComparisonRow {
                task: None,
                arm,
                metric: name.to_string(),
                value: s / ds.n_tasks() as f64,
            });
        }
    }
    Ok(ComparisonTable { mode, seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synth, SynthSpec};

    fn ds() -> MultiViewDataset {
        let mut spec = SynthSpec::synth1(2);
        spec.n_tasks = 2;
        spec.instances_per_class = 12;
        spec.patch_side = 4;
        spec.labeled_fraction = 0.5;
        let mut ds = generate_synth(&spec).unwrap();
        for t in &mut ds.tasks {
            t.views.truncate(2);
        }
        ds
    }

    fn hp() -> Hyperparams {
        Hyperparams {
            beta: 0.1,
            gamma: 0.1,
            lambda: 1.0,
            mu: 0.1,
            k_per_view: 4,
            kc_per: 0.5,
            max_iters: 15,
            rel_tol: 1e-6,
            seed: 0,
            ..Hyperparams::default()
        }
    }

    #[test]
    fn sweep_shape_and_clean_cell() {
        let ds = ds();
        let table = noise_sweep(&ds, &hp(), &hp(), &[0.0, 0.2], &[1, 2]).unwrap();
        assert_eq!(table.rows.len(), 2 * 2 * 2);
        assert_eq!(table.summary.len(), 2 * 2);
        let direct = {
            let mut h = hp();
            h.seed = 1;
            unlabeled_accuracy(&fit(&ds, &h, Algorithm::Standard).unwrap(), &ds).unwrap()
        };
        let cell = table
            .rows
            .iter()
            .find(|r| r.algorithm == Algorithm::Standard && r.fraction == 0.0 && r.seed == 1)
            .unwrap();
        assert_eq!(cell.accuracy, direct);
        let csv = String::from_utf8(table.to_csv()).unwrap();
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn sweep_rejects_bad_fraction() {
        assert!(noise_sweep(&ds(), &hp(), &hp(), &[0.6], &[1]).is_err());
    }

    #[test]
    fn comparison_rows() {
        let ds = ds();
        let opts = EvalOptions::default();
        let t = latent_vs_raw(
            &ds,
            &hp(),
            Algorithm::Standard,
            EvalMode::Classify,
            3,
            &opts,
        )
        .unwrap();
        // 2 arms x (2 tasks + mean) x 5 metrics
        assert_eq!(t.rows.len(), 2 * 3 * 5);
        assert!(t.mean(Arm::Raw, "accuracy").is_some());
        let t =
            latent_vs_raw(&ds, &hp(), Algorithm::Standard, EvalMode::Cluster, 3, &opts).unwrap();
        assert_eq!(t.rows.len(), 2 * 3 * 4);
        let again =
            latent_vs_raw(&ds, &hp(), Algorithm::Standard, EvalMode::Cluster, 3, &opts).unwrap();
        assert_eq!(t.to_csv(), again.to_csv());
    }

    #[test]
    fn mean_std_of_samples() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
    }
}
