use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `C x C` counts, rows = true class, columns = predicted class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionCounts {
    pub fn new(truth: &[usize], pred: &[usize], n_classes: usize) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::InvalidArgument(format!(
                "{} true labels but {} predictions",
                truth.len(),
                pred.len()
            )));
        }
        let mut counts = vec![vec![0u64; n_classes]; n_classes];
        for (i, (&t, &p)) in truth.iter().zip(pred).enumerate() {
            for x in [t, p] {
                if x >= n_classes {
                    return Err(Error::ClassOutOfRange {
                        index: i,
                        classes: n_classes,
                    });
                }
            }
            counts[t][p] += 1;
        }
        Ok(Self { counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn true_positives(&self, c: usize) -> u64 {
        self.counts[c][c]
    }

    pub fn false_positives(&self, c: usize) -> u64 {
        self.counts.iter().map(|row| row[c]).sum::<u64>() - self.counts[c][c]
    }

    pub fn false_negatives(&self, c: usize) -> u64 {
        self.counts[c].iter().sum::<u64>() - self.counts[c][c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub macro_dice: f64,
    pub sample_jaccard: f64,
}

impl ClassificationMetrics {
    pub const NAMES: [&'static str; 5] = ["accuracy", "precision", "f1", "dice", "jaccard"];

    /// Values in the order of [`ClassificationMetrics::NAMES`].
    pub fn values(&self) -> [f64; 5] {
        [
            self.accuracy,
            self.macro_precision,
            self.macro_f1,
            self.macro_dice,
            self.sample_jaccard,
        ]
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Macro scores average over the classes that occur in `truth` or `pred`.
pub fn classification_metrics(
    truth: &[usize],
    pred: &[usize],
    n_classes: usize,
) -> Result<ClassificationMetrics> {
    if truth.is_empty() {
        return Err(Error::InvalidArgument("no instances to score".into()));
    }
    let cm = ConfusionCounts::new(truth, pred, n_classes)?;
    let present: BTreeSet<usize> = truth.iter().chain(pred).copied().collect();
    let (mut p, mut r, mut f1, mut dice) = (0.0, 0.0, 0.0, 0.0);
    for &c in &present {
        let tp = cm.true_positives(c) as f64;
        let fp = cm.false_positives(c) as f64;
        let fn_ = cm.false_negatives(c) as f64;
        let prec = ratio(tp, tp + fp);
        let rec = ratio(tp, tp + fn_);
        p += prec;
        r += rec;
        f1 += ratio(2.0 * prec * rec, prec + rec);
        dice += ratio(2.0 * tp, 2.0 * tp + fp + fn_);
    }
    let k = present.len() as f64;
    let correct: u64 = (0..n_classes).map(|c| cm.true_positives(c)).sum();
    // single-label sets: |{y} & {y_hat}| / |{y} | {y_hat}| is 1 or 0
    let jaccard = truth
        .iter()
        .zip(pred)
        .map(|(a, b)| if a == b { 1.0 } else { 0.0 })
        .sum::<f64>()
        / truth.len() as f64;
    Ok(ClassificationMetrics {
        accuracy: correct as f64 / cm.total() as f64,
        macro_precision: p / k,
        macro_recall: r / k,
        macro_f1: f1 / k,
        macro_dice: dice / k,
        sample_jaccard: jaccard,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringMetrics {
    pub nmi: f64,
    pub ari: f64,
    pub homogeneity: f64,
    pub completeness: f64,
}

impl ClusteringMetrics {
    pub const NAMES: [&'static str; 4] = ["nmi", "ari", "homogeneity", "completeness"];

    pub fn values(&self) -> [f64; 4] {
        [self.nmi, self.ari, self.homogeneity, self.completeness]
    }
}

fn entropy(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn choose2(x: u64) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// NMI with arithmetic-mean normalization, pair-counting ARI, homogeneity
/// and completeness. Zero-entropy partitions score 1.
pub fn clustering_metrics(truth: &[usize], assigned: &[usize]) -> Result<ClusteringMetrics> {
    if truth.is_empty() {
        return Err(Error::InvalidArgument("no instances to score".into()));
    }
    if truth.len() != assigned.len() {
        return Err(Error::InvalidArgument(format!(
            "{} true labels but {} assignments",
            truth.len(),
            assigned.len()
        )));
    }
    let n = truth.len() as f64;
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut rows: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cols: BTreeMap<usize, u64> = BTreeMap::new();
    for (&t, &a) in truth.iter().zip(assigned) {
        *joint.entry((t, a)).or_default() += 1;
        *rows.entry(t).or_default() += 1;
        *cols.entry(a).or_default() += 1;
    }
    let h_c = entropy(rows.values().copied(), n);
    let h_k = entropy(cols.values().copied(), n);
    let mut mi = 0.0;
    for (&(t, a), &nij) in &joint {
        let pij = nij as f64 / n;
        let pi = rows[&t] as f64 / n;
        let pj = cols[&a] as f64 / n;
        mi += pij * (pij / (pi * pj)).ln();
    }
    let mi = mi.max(0.0);
    let h_c_given_k = (h_c - mi).max(0.0);
    let h_k_given_c = (h_k - mi).max(0.0);
    let homogeneity = if h_c == 0.0 {
        1.0
    } else {
        1.0 - h_c_given_k / h_c
    };
    let completeness = if h_k == 0.0 {
        1.0
    } else {
        1.0 - h_k_given_c / h_k
    };
    let nmi = if h_c == 0.0 && h_k == 0.0 {
        1.0
    } else {
        (mi / ((h_c + h_k) / 2.0)).min(1.0)
    };

    let index: f64 = joint.values().map(|&x| choose2(x)).sum();
    let a: f64 = rows.values().map(|&x| choose2(x)).sum();
    let b: f64 = cols.values().map(|&x| choose2(x)).sum();
    let total = choose2(truth.len() as u64);
    let expected = if total > 0.0 { a * b / total } else { 0.0 };
    let max = (a + b) / 2.0;
    let ari = if max == expected {
        1.0
    } else {
        (index - expected) / (max - expected)
    };
    Ok(ClusteringMetrics {
        nmi,
        ari,
        homogeneity: homogeneity.clamp(0.0, 1.0),
        completeness: completeness.clamp(0.0, 1.0),
    })
}
