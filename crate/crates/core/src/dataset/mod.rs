//! Multi-task multi-view data model.
//!
//! A dataset holds `T` tasks, each observed through `V` views of the same `N`
//! instances. Every view is a nonnegative `M x N` matrix with one instance per
//! column; the first `N_l` columns of every view are the labeled instances.

pub(crate) mod io;
mod noise;
mod synth;

pub use io::{load_dataset, save_dataset, Manifest};
pub use noise::inject_label_noise;
pub use synth::{generate_synth, SynthKernels, SynthSpec};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// One view of one task: rows are features, columns are instances.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewMatrix {
    values: DMatrix<f64>,
}

impl ViewMatrix {
    /// Wraps a matrix after checking every entry is finite and nonnegative.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        check_nonnegative(&values)?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }

    pub fn n_features(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_instances(&self) -> usize {
        self.values.ncols()
    }

    /// Column-normalized copy plus the number of all-zero columns left as is.
    pub fn normalized(&self) -> (ViewMatrix, usize) {
        let (values, zeros) = scale_columns(&self.values);
        (ViewMatrix { values }, zeros)
    }
}

/// Result of [`normalize_columns`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedColumns {
    pub matrix: DMatrix<f64>,
    /// Columns that were entirely zero and therefore left untouched.
    pub zero_columns: usize,
}

/// Scales every nonzero column of a nonnegative matrix to sum to one.
pub fn normalize_columns(x: &DMatrix<f64>) -> Result<NormalizedColumns> {
    check_nonnegative(x)?;
    let (matrix, zero_columns) = scale_columns(x);
    Ok(NormalizedColumns {
        matrix,
        zero_columns,
    })
}

fn scale_columns(x: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let mut out = x.clone();
    let mut zeros = 0;
    for mut col in out.column_iter_mut() {
        let sum: f64 = col.iter().sum();
        if sum > 0.0 {
            col /= sum;
        } else {
            zeros += 1;
        }
    }
    (out, zeros)
}

pub(crate) fn check_nonnegative(x: &DMatrix<f64>) -> Result<()> {
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            let v = x[(i, j)];
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// Class indices of the labeled prefix of a task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    classes: Vec<usize>,
    n_classes: usize,
}

impl LabelSet {
    pub fn new(classes: Vec<usize>, n_classes: usize) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::EmptyLabeledSet);
        }
        if let Some(&bad) = classes.iter().find(|&&c| c >= n_classes) {
            return Err(Error::ClassOutOfRange {
                index: bad,
                classes: n_classes,
            });
        }
        Ok(Self { classes, n_classes })
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `C x N_l` indicator matrix with a single one per column.
    pub fn one_hot(&self) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(self.n_classes, self.classes.len());
        for (j, &c) in self.classes.iter().enumerate() {
            y[(c, j)] = 1.0;
        }
        y
    }
}

/// All views and labels of one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskData {
    pub views: Vec<ViewMatrix>,
    pub labels: LabelSet,
    /// Ground-truth class of every instance (length `N`), when known.
    /// Used only for evaluation; training reads `labels`.
    pub truth: Option<Vec<usize>>,
}

impl TaskData {
    /// Ground truth of the unlabeled suffix, if recorded.
    pub fn unlabeled_truth(&self) -> Option<&[usize]> {
        self.truth.as_deref().map(|t| &t[self.labels.len()..])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    pub name: String,
    pub n_classes: usize,
    pub n_labeled: usize,
    pub tasks: Vec<TaskData>,
}

impl MultiViewDataset {
    /// Builds a dataset and checks all structural invariants.
    pub fn new(
        name: impl Into<String>,
        n_classes: usize,
        n_labeled: usize,
        tasks: Vec<TaskData>,
    ) -> Result<Self> {
        let ds = Self {
            name: name.into(),
            n_classes,
            n_labeled,
            tasks,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn n_views(&self) -> usize {
        self.tasks.first().map_or(0, |t| t.views.len())
    }

    pub fn n_total(&self) -> usize {
        self.tasks
            .first()
            .and_then(|t| t.views.first())
            .map_or(0, ViewMatrix::n_instances)
    }

    pub fn n_unlabeled(&self) -> usize {
        self.n_total() - self.n_labeled
    }

    /// Feature dimension `M_t^v` of every (task, view).
    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.tasks
            .iter()
            .map(|t| t.views.iter().map(ViewMatrix::n_features).collect())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::InvalidArgument("dataset has no tasks".into()));
        }
        if self.n_labeled == 0 {
            return Err(Error::EmptyLabeledSet);
        }
        let n_views = self.n_views();
        let n = self.n_total();
        if n_views == 0 {
            return Err(Error::InvalidArgument("dataset has no views".into()));
        }
        if self.n_labeled > n {
            return Err(Error::InvalidArgument(format!(
                "labeled count {} exceeds instance count {n}",
                self.n_labeled
            )));
        }
        for (t, task) in self.tasks.iter().enumerate() {
            if task.views.len() != n_views {
                return Err(Error::InvalidArgument(format!(
                    "task {t} has {} views, expected {n_views}",
                    task.views.len()
                )));
            }
            for (v, view) in task.views.iter().enumerate() {
                if view.n_instances() != n {
                    return Err(Error::ViewShape {
                        task: t,
                        view: v,
                        expected_rows: view.n_features(),
                        expected_cols: n,
                        actual_rows: view.n_features(),
                        actual_cols: view.n_instances(),
                    });
                }
            }
            if task.labels.len() != self.n_labeled {
                return Err(Error::InvalidArgument(format!(
                    "task {t} has {} labels, expected {}",
                    task.labels.len(),
                    self.n_labeled
                )));
            }
            if task.labels.n_classes() != self.n_classes {
                return Err(Error::InvalidArgument(format!(
                    "task {t} labels declare {} classes, dataset has {}",
                    task.labels.n_classes(),
                    self.n_classes
                )));
            }
            if let Some(truth) = &task.truth {
                if truth.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "task {t} ground truth has {} entries, expected {n}",
                        truth.len()
                    )));
                }
                if let Some(&bad) = truth.iter().find(|&&c| c >= self.n_classes) {
                    return Err(Error::ClassOutOfRange {
                        index: bad,
                        classes: self.n_classes,
                    });
                }
            }
        }
        Ok(())
    }

    /// Copy of the dataset with every view column-normalized.
    /// Returns the total number of all-zero columns encountered.
    pub fn column_normalized(&self) -> (MultiViewDataset, usize) {
        let mut zeros = 0;
        let tasks = self
            .tasks
            .iter()
            .map(|task| TaskData {
                views: task
                    .views
                    .iter()
                    .map(|v| {
                        let (nv, z) = v.normalized();
                        zeros += z;
                        nv
                    })
                    .collect(),
                labels: task.labels.clone(),
                truth: task.truth.clone(),
            })
            .collect();
        (
            MultiViewDataset {
                name: self.name.clone(),
                n_classes: self.n_classes,
                n_labeled: self.n_labeled,
                tasks,
            },
            zeros,
        )
    }

    /// Vertically stacks the views of task `t` into one `sum(M) x N` matrix.
    pub fn stacked_views(&self, t: usize) -> DMatrix<f64> {
        let task = &self.tasks[t];
        let rows: usize = task.views.iter().map(ViewMatrix::n_features).sum();
        let mut out = DMatrix::zeros(rows, self.n_total());
        let mut r = 0;
        for view in &task.views {
            let m = view.n_features();
            out.rows_mut(r, m).copy_from(view.values());
            r += m;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_simple_column() {
        let x = DMatrix::from_column_slice(2, 1, &[1.0, 3.0]);
        let out = normalize_columns(&x).unwrap();
        assert_eq!(out.matrix.as_slice(), &[0.25, 0.75]);
        assert_eq!(out.zero_columns, 0);
    }

    #[test]
    fn normalize_zero_column_is_flagged() {
        let x = DMatrix::from_column_slice(2, 2, &[0.0, 0.0, 2.0, 2.0]);
        let out = normalize_columns(&x).unwrap();
        assert_eq!(out.matrix.column(0).as_slice(), &[0.0, 0.0]);
        assert_eq!(out.matrix.column(1).as_slice(), &[0.5, 0.5]);
        assert_eq!(out.zero_columns, 1);
    }

    #[test]
    fn normalize_rejects_negative() {
        let x = DMatrix::from_column_slice(2, 1, &[1.0, -3.0]);
        assert!(matches!(
            normalize_columns(&x),
            Err(Error::NegativeEntry { row: 1, col: 0, .. })
        ));
    }

    #[test]
    fn one_hot_has_single_one_per_column() {
        let l = LabelSet::new(vec![2, 0, 1, 2], 3).unwrap();
        let y = l.one_hot();
        for col in y.column_iter() {
            assert_eq!(col.iter().sum::<f64>(), 1.0);
        }
        assert_eq!(y[(2, 0)], 1.0);
        assert_eq!(y[(0, 1)], 1.0);
    }

    #[test]
    fn label_set_rejects_empty_and_out_of_range() {
        assert!(matches!(
            LabelSet::new(vec![], 3),
            Err(Error::EmptyLabeledSet)
        ));
        assert!(matches!(
            LabelSet::new(vec![0, 3], 3),
            Err(Error::ClassOutOfRange { index: 3, .. })
        ));
    }

    proptest! {
        #[test]
        fn random_columns_sum_to_one(vals in proptest::collection::vec(0.0f64..10.0, 20)) {
            let x = DMatrix::from_vec(5, 4, vals);
            let out = normalize_columns(&x).unwrap();
            for (j, col) in out.matrix.column_iter().enumerate() {
                // oracle: independent re-summation of the input column
                let orig: f64 = x.column(j).iter().sum();
                let s: f64 = col.iter().sum();
                if orig > 0.0 {
                    prop_assert!((s - 1.0).abs() < 1e-12);
                } else {
                    prop_assert_eq!(s, 0.0);
                }
            }
        }

        #[test]
        fn normalization_is_idempotent(vals in proptest::collection::vec(0.0f64..10.0, 12)) {
            let x = DMatrix::from_vec(3, 4, vals);
            let once = normalize_columns(&x).unwrap().matrix;
            let twice = normalize_columns(&once).unwrap().matrix;
            for (a, b) in once.iter().zip(twice.iter()) {
                prop_assert!((a - b).abs() < 1e-15);
            }
        }
    }
}
