//! Synthetic multi-task multi-view data.
//!
//! Every instance is a square patch of i.i.d. normal draws whose mean and
//! standard deviation depend on the class. Five views are built by filtering
//! the patch with fixed 3x3 filters (replicate border) and flattening the
//! result row-major; each view is then min-max scaled to `[0, 1]`.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{LabelSet, MultiViewDataset, TaskData, ViewMatrix};
use crate::error::{Error, Result};

pub type Kernel3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SynthSpec {
    pub name: String,
    pub n_tasks: usize,
    pub classes_per_task: usize,
    pub instances_per_class: usize,
    /// `(mean, std)` of the patch entries for each class.
    pub mean_std_pairs: Vec<(f64, f64)>,
    #[serde(default = "default_patch_side")]
    pub patch_side: usize,
    /// Fraction of each task's instances that carry a label.
    #[serde(default = "default_labeled_fraction")]
    pub labeled_fraction: f64,
    pub seed: u64,
}

fn default_patch_side() -> usize {
    10
}

fn default_labeled_fraction() -> f64 {
    0.2
}

impl SynthSpec {
    /// Three tasks, three classes of 200 instances, `(1,1), (2,2), (3,3)`.
    pub fn synth1(seed: u64) -> Self {
        Self {
            name: "synth1".into(),
            n_tasks: 3,
            classes_per_task: 3,
            instances_per_class: 200,
            mean_std_pairs: vec![(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)],
            patch_side: default_patch_side(),
            labeled_fraction: default_labeled_fraction(),
            seed,
        }
    }

    /// Four tasks, four classes of 200 instances, `(1,1)` through `(4,4)`.
    pub fn synth2(seed: u64) -> Self {
        Self {
            name: "synth2".into(),
            n_tasks: 4,
            classes_per_task: 4,
            instances_per_class: 200,
            mean_std_pairs: vec![(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 4.0)],
            patch_side: default_patch_side(),
            labeled_fraction: default_labeled_fraction(),
            seed,
        }
    }

    pub fn n_instances(&self) -> usize {
        self.classes_per_task * self.instances_per_class
    }

    pub fn n_labeled(&self) -> usize {
        ((self.labeled_fraction * self.n_instances() as f64).round() as usize).max(1)
    }

    fn validate(&self) -> Result<()> {
        if self.n_tasks == 0 || self.classes_per_task == 0 || self.instances_per_class == 0 {
            return Err(Error::InvalidArgument(
                "synthetic spec needs at least one task, class and instance".into(),
            ));
        }
        if self.mean_std_pairs.len() != self.classes_per_task {
            return Err(Error::InvalidArgument(format!(
                "{} (mean, std) pairs given for {} classes",
                self.mean_std_pairs.len(),
                self.classes_per_task
            )));
        }
        if let Some(&(_, s)) = self.mean_std_pairs.iter().find(|&&(_, s)| !(s > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "standard deviation must be positive, got {s}"
            )));
        }
        if self.patch_side < 3 {
            return Err(Error::InvalidArgument(format!(
                "patch side must be at least 3, got {}",
                self.patch_side
            )));
        }
        if !(self.labeled_fraction > 0.0 && self.labeled_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "labeled fraction must lie in (0, 1], got {}",
                self.labeled_fraction
            )));
        }
        Ok(())
    }
}

/// The five feature extractors used to derive views from a patch.
#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    Linear(Kernel3),
    Maximum,
}

pub struct SynthKernels;

impl SynthKernels {
    pub fn averaging() -> Kernel3 {
        [[1.0 / 9.0; 3]; 3]
    }

    /// Normalized 3x3 Gaussian.
    pub fn gaussian(sigma: f64) -> Kernel3 {
        let mut k = [[0.0; 3]; 3];
        let mut sum = 0.0;
        for (i, row) in k.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let dx = i as f64 - 1.0;
                let dy = j as f64 - 1.0;
                *cell = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
                sum += *cell;
            }
        }
        for row in &mut k {
            for cell in row {
                *cell /= sum;
            }
        }
        k
    }

    /// 3x3 approximation of the 2-D Laplacian with shape parameter `alpha`.
    pub fn laplacian(alpha: f64) -> Kernel3 {
        let s = 4.0 / (1.0 + alpha);
        let a = alpha / 4.0;
        let b = (1.0 - alpha) / 4.0;
        [
            [s * a, s * b, s * a],
            [s * b, -s, s * b],
            [s * a, s * b, s * a],
        ]
    }

    pub fn prewitt_horizontal() -> Kernel3 {
        [[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -1.0, -1.0]]
    }

    /// Views in order: averaging, maximum, Gaussian, Laplacian, Prewitt.
    pub fn views() -> Vec<Filter> {
        vec![
            Filter::Linear(Self::averaging()),
            Filter::Maximum,
            Filter::Linear(Self::gaussian(0.5)),
            Filter::Linear(Self::laplacian(0.2)),
            Filter::Linear(Self::prewitt_horizontal()),
        ]
    }
}

/// Filters a row-major `side x side` patch with replicate padding.
pub(crate) fn apply_filter(patch: &[f64], side: usize, filter: &Filter) -> Vec<f64> {
    let at = |r: isize, c: isize| {
        let r = r.clamp(0, side as isize - 1) as usize;
        let c = c.clamp(0, side as isize - 1) as usize;
        patch[r * side + c]
    };
    let mut out = Vec::with_capacity(side * side);
    for r in 0..side as isize {
        for c in 0..side as isize {
            let v = match filter {
                Filter::Linear(k) => {
                    let mut acc = 0.0;
                    for (i, row) in k.iter().enumerate() {
                        for (j, w) in row.iter().enumerate() {
                            acc += w * at(r + i as isize - 1, c + j as isize - 1);
                        }
                    }
                    acc
                }
                Filter::Maximum => {
                    let mut m = f64::NEG_INFINITY;
                    for dr in -1..=1 {
                        for dc in -1..=1 {
                            m = m.max(at(r + dr, c + dc));
                        }
                    }
                    m
                }
            };
            out.push(v);
        }
    }
    out
}

fn min_max_scale(m: &mut DMatrix<f64>) {
    let lo = m.min();
    let hi = m.max();
    let range = hi - lo;
    if range > 0.0 {
        m.apply(|x| *x = (*x - lo) / range);
    } else {
        m.fill(0.0);
    }
}

/// Generates a dataset from `spec`; deterministic in `spec.seed`.
pub fn generate_synth(spec: &SynthSpec) -> Result<MultiViewDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let side = spec.patch_side;
    let dim = side * side;
    let n = spec.n_instances();
    let n_labeled = spec.n_labeled();
    let filters = SynthKernels::views();

    let mut tasks = Vec::with_capacity(spec.n_tasks);
    for _ in 0..spec.n_tasks {
        let mut patches = Vec::with_capacity(n);
        let mut classes = Vec::with_capacity(n);
        for (c, &(mean, std)) in spec.mean_std_pairs.iter().enumerate() {
            let normal = Normal::new(mean, std).expect("validated std");
            for _ in 0..spec.instances_per_class {
                let patch: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
                patches.push(patch);
                classes.push(c);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);

        let views = filters
            .iter()
            .map(|f| {
                let mut m = DMatrix::zeros(dim, n);
                for (col, &src) in order.iter().enumerate() {
                    let feat = apply_filter(&patches[src], side, f);
                    m.column_mut(col).copy_from_slice(&feat);
                }
                min_max_scale(&mut m);
                ViewMatrix::new(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let truth: Vec<usize> = order.iter().map(|&i| classes[i]).collect();
        let labels = LabelSet::new(truth[..n_labeled].to_vec(), spec.classes_per_task)?;
        tasks.push(TaskData {
            views,
            labels,
            truth: Some(truth),
        });
    }
    MultiViewDataset::new(spec.name.clone(), spec.classes_per_task, n_labeled, tasks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_kernel_values() {
        // oracle: evaluate exp(-(dx^2+dy^2)/(2*0.25)) at the three distances and normalize
        let (c, e, k) = (1.0f64, (-2.0f64).exp(), (-4.0f64).exp());
        let sum = c + 4.0 * e + 4.0 * k;
        let g = SynthKernels::gaussian(0.5);
        assert!((g[1][1] - c / sum).abs() < 1e-15);
        assert!((g[0][1] - e / sum).abs() < 1e-15);
        assert!((g[0][0] - k / sum).abs() < 1e-15);
        assert!((g[1][1] - 0.6193).abs() < 1e-4);
        assert!((g[0][1] - 0.0838).abs() < 1e-4);
        assert!((g[0][0] - 0.0113).abs() < 1e-4);
    }

    #[test]
    fn laplacian_center_and_sum() {
        let l = SynthKernels::laplacian(0.2);
        let total: f64 = l.iter().flatten().sum();
        assert!(total.abs() < 1e-15);
        assert!((l[1][1] + 4.0 / 1.2).abs() < 1e-15);
        assert!((l[0][0] - 4.0 / 1.2 * 0.05).abs() < 1e-15);
    }

    #[test]
    fn replicate_padding_keeps_constant_patch() {
        let patch = vec![2.5; 16];
        for f in SynthKernels::views() {
            let out = apply_filter(&patch, 4, &f);
            let expected = match &f {
                Filter::Linear(k) => 2.5 * k.iter().flatten().sum::<f64>(),
                Filter::Maximum => 2.5,
            };
            for v in out {
                assert!((v - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn maximum_filter_spreads_peak() {
        let mut patch = vec![0.0; 9];
        patch[0] = 1.0;
        let out = apply_filter(&patch, 3, &Filter::Maximum);
        assert_eq!(out, vec![1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn prewitt_on_vertical_ramp() {
        // row r holds value r; correlation gives 3(r-1) - 3(r+1) = -6 away from borders
        let patch: Vec<f64> = (0..25).map(|i| (i / 5) as f64).collect();
        let out = apply_filter(
            &patch,
            5,
            &Filter::Linear(SynthKernels::prewitt_horizontal()),
        );
        assert!((out[2 * 5 + 2] + 6.0).abs() < 1e-12);
    }

    #[test]
    fn synth1_shape() {
        let ds = generate_synth(&SynthSpec::synth1(7)).unwrap();
        assert_eq!(ds.n_tasks(), 3);
        assert_eq!(ds.n_views(), 5);
        assert_eq!(ds.n_classes, 3);
        assert_eq!(ds.n_total(), 600);
        assert!(ds.dims().iter().flatten().all(|&d| d == 100));
        for task in &ds.tasks {
            for view in &task.views {
                assert_eq!(view.values().min(), 0.0);
                assert_eq!(view.values().max(), 1.0);
            }
            let truth = task.truth.as_ref().unwrap();
            assert_eq!(&truth[..ds.n_labeled], task.labels.classes());
            for c in 0..3 {
                assert_eq!(truth.iter().filter(|&&x| x == c).count(), 200);
            }
        }
    }

    #[test]
    fn synth2_shape() {
        let ds = generate_synth(&SynthSpec::synth2(7)).unwrap();
        assert_eq!(
            (ds.n_tasks(), ds.n_views(), ds.n_classes, ds.n_total()),
            (4, 5, 4, 800)
        );
    }

    #[test]
    fn deterministic_per_seed() {
        let mut spec = SynthSpec::synth1(3);
        spec.instances_per_class = 20;
        let a = generate_synth(&spec).unwrap();
        let b = generate_synth(&spec).unwrap();
        assert_eq!(a, b);
        spec.seed = 4;
        let c = generate_synth(&spec).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = SynthSpec::synth1(0);
        spec.mean_std_pairs[1].1 = 0.0;
        assert!(generate_synth(&spec).is_err());
        let mut spec = SynthSpec::synth1(0);
        spec.patch_side = 2;
        assert!(generate_synth(&spec).is_err());
        let mut spec = SynthSpec::synth1(0);
        spec.mean_std_pairs.pop();
        assert!(generate_synth(&spec).is_err());
    }
}
