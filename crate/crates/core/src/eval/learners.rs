use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::TaskWeights;

/// Column-wise argmax with ties to the lowest index.
pub fn argmax_columns(scores: &DMatrix<f64>) -> Vec<usize> {
    scores
        .column_iter()
        .map(|col| {
            let mut best = 0;
            for (i, &s) in col.iter().enumerate() {
                if s > col[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

/// Classes of `argmax W^T F`, one per column of `f`.
pub fn predict_labels(w: &TaskWeights, f: &DMatrix<f64>) -> Vec<usize> {
    argmax_columns(&(w.w.transpose() * f))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: DMatrix<f64>,
    pub inertia: f64,
    /// Inertia after every Lloyd iteration of the kept restart.
    pub inertia_trace: Vec<f64>,
}

const KMEANS_MAX_ITERS: usize = 300;

fn sq_dist(points: &DMatrix<f64>, j: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    points
        .column(j)
        .iter()
        .zip(centroids.column(c).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn nearest(points: &DMatrix<f64>, j: usize, centroids: &DMatrix<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.ncols() {
        let d = sq_dist(points, j, centroids, c);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn seed_centroids(points: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = points.ncols();
    let mut centroids = DMatrix::zeros(points.nrows(), k);
    centroids.set_column(0, &points.column(rng.random_range(0..n)));
    let mut d2: Vec<f64> = (0..n).map(|j| sq_dist(points, j, &centroids, 0)).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (j, &d) in d2.iter().enumerate() {
                if target < d {
                    idx = j;
                    break;
                }
                target -= d;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        centroids.set_column(c, &points.column(pick));
        for (j, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, j, &centroids, c));
        }
    }
    centroids
}

fn lloyd(points: &DMatrix<f64>, mut centroids: DMatrix<f64>) -> KMeansResult {
    let (dim, n, k) = (points.nrows(), points.ncols(), centroids.ncols());
    let mut assignments = vec![usize::MAX; n];
    let mut trace = Vec::new();
    for _ in 0..KMEANS_MAX_ITERS {
        let mut changed = false;
        let mut inertia = 0.0;
        for (j, slot) in assignments.iter_mut().enumerate() {
            let (c, d) = nearest(points, j, &centroids);
            inertia += d;
            if *slot != c {
                *slot = c;
                changed = true;
            }
        }
        trace.push(inertia);
        if !changed {
            break;
        }
        let mut sums = DMatrix::zeros(dim, k);
        let mut counts = vec![0usize; k];
        for (j, &c) in assignments.iter().enumerate() {
            let mut col = sums.column_mut(c);
            col += points.column(j);
            counts[c] += 1;
        }
        for c in 0..k {
            // an empty cluster keeps its previous centroid
            if counts[c] > 0 {
                centroids.set_column(c, &(sums.column(c) / counts[c] as f64));
            }
        }
    }
    let inertia = (0..n)
        .map(|j| sq_dist(points, j, &centroids, assignments[j]))
        .sum();
    trace.push(inertia);
    KMeansResult {
        assignments,
        centroids,
        inertia,
        inertia_trace: trace,
    }
}

/// k-means on the columns of `points` with distance-weighted seeding; the
/// restart with the lowest inertia is kept.
pub fn kmeans(points: &DMatrix<f64>, k: usize, seed: u64, restarts: usize) -> Result<KMeansResult> {
    if k < 1 {
        return Err(Error::InvalidArgument("k-means needs k >= 1".into()));
    }
    if k > points.ncols() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds {} points",
            points.ncols()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..restarts.max(1) {
        let run = lloyd(points, seed_centroids(points, k, &mut rng));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SoftmaxConfig {
    pub l2: f64,
    pub epochs: usize,
    pub step: f64,
}

impl Default for SoftmaxConfig {
    fn default() -> Self {
        Self {
            l2: 1e-3,
            epochs: 500,
            step: 0.5,
        }
    }
}

/// Per-feature standardization fitted on training columns.
#[derive(Debug, Clone)]
pub struct Standardizer {
    mean: DVector<f64>,
    scale: DVector<f64>,
}

impl Standardizer {
    pub fn fit(x: &DMatrix<f64>) -> Self {
        let n = x.ncols().max(1) as f64;
        let mean = x.column_mean();
        let mut scale = DVector::zeros(x.nrows());
        for i in 0..x.nrows() {
            let var = x.row(i).iter().map(|v| (v - mean[i]).powi(2)).sum::<f64>() / n;
            scale[i] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        Self { mean, scale }
    }

    /// Standardized columns with a trailing row of ones.
    pub fn transform(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let d = x.nrows();
        DMatrix::from_fn(d + 1, x.ncols(), |i, j| {
            if i == d {
                1.0
            } else {
                (x[(i, j)] - self.mean[i]) / self.scale[i]
            }
        })
    }
}

fn softmax_columns(scores: &DMatrix<f64>) -> DMatrix<f64> {
    let mut p = scores.clone();
    for mut col in p.column_iter_mut() {
        let m = col.max();
        col.apply(|v| *v = (*v - m).exp());
        let s = col.sum();
        col /= s;
    }
    p
}

/// Mean cross-entropy plus `l2/2 |W|^2` (bias row excluded) and its gradient.
///
/// `x` carries the bias as its last row; `w` is `(d+1) x C`.
pub fn softmax_loss_and_gradient(
    x: &DMatrix<f64>,
    y: &[usize],
    w: &DMatrix<f64>,
    l2: f64,
) -> (f64, DMatrix<f64>) {
    let n = x.ncols() as f64;
    let p = softmax_columns(&(w.transpose() * x));
    let mut loss = 0.0;
    let mut resid = p.clone();
    for (j, &c) in y.iter().enumerate() {
        loss -= p[(c, j)].max(f64::MIN_POSITIVE).ln();
        resid[(c, j)] -= 1.0;
    }
    let mut grad = x * resid.transpose() / n;
    let d = w.nrows() - 1;
    let reg = w.rows(0, d).norm_squared();
    let mut g = grad.rows_mut(0, d);
    g += w.rows(0, d) * l2;
    (loss / n + 0.5 * l2 * reg, grad)
}

/// Multinomial logistic regression by full-batch gradient descent from zero weights.
pub fn softmax_classifier(
    train_x: &DMatrix<f64>,
    train_y: &[usize],
    n_classes: usize,
    test_x: &DMatrix<f64>,
    cfg: &SoftmaxConfig,
) -> Result<Vec<usize>> {
    if train_x.ncols() != train_y.len() || train_x.nrows() != test_x.nrows() {
        return Err(Error::InvalidArgument(
            "classifier inputs have inconsistent shapes".into(),
        ));
    }
    if let Some(i) = train_y.iter().position(|&c| c >= n_classes) {
        return Err(Error::ClassOutOfRange {
            index: i,
            classes: n_classes,
        });
    }
    let st = Standardizer::fit(train_x);
    let x = st.transform(train_x);
    let mut w = DMatrix::zeros(x.nrows(), n_classes);
    if !train_y.is_empty() {
        for _ in 0..cfg.epochs {
            let (_, g) = softmax_loss_and_gradient(&x, train_y, &w, cfg.l2);
            w -= g * cfg.step;
        }
    }
    Ok(argmax_columns(&(w.transpose() * st.transform(test_x))))
}
