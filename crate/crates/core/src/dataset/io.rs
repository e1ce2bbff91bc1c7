//! Directory layout:
//!
//! ```text
//! <root>/manifest.json          {name, T, V, C, N, N_l, dims}
//! <root>/task<t>/view<v>.csv    M_t^v rows x N columns, no header
//! <root>/task<t>/labels.csv     one row of N_l class indices
//! <root>/task<t>/truth.csv      optional, one row of N class indices
//! ```

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{LabelSet, MultiViewDataset, TaskData, ViewMatrix};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    #[serde(rename = "T")]
    pub n_tasks: usize,
    #[serde(rename = "V")]
    pub n_views: usize,
    #[serde(rename = "C")]
    pub n_classes: usize,
    #[serde(rename = "N")]
    pub n_total: usize,
    #[serde(rename = "N_l")]
    pub n_labeled: usize,
    pub dims: Vec<Vec<usize>>,
}

impl Manifest {
    pub fn of(ds: &MultiViewDataset) -> Self {
        Self {
            name: ds.name.clone(),
            n_tasks: ds.n_tasks(),
            n_views: ds.n_views(),
            n_classes: ds.n_classes,
            n_total: ds.n_total(),
            n_labeled: ds.n_labeled,
            dims: ds.dims(),
        }
    }

    fn check(&self, path: &Path) -> Result<()> {
        if self.n_labeled == 0 {
            return Err(Error::EmptyLabeledSet);
        }
        if self.n_labeled > self.n_total {
            return Err(Error::parse(path, "N_l exceeds N"));
        }
        if self.dims.len() != self.n_tasks || self.dims.iter().any(|d| d.len() != self.n_views) {
            return Err(Error::parse(path, "dims must be a T x V array"));
        }
        Ok(())
    }
}

/// Reads and validates a dataset directory.
pub fn load_dataset(root: impl AsRef<Path>) -> Result<MultiViewDataset> {
    let root = root.as_ref();
    let manifest_path = root.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::parse(&manifest_path, e.to_string()))?;
    manifest.check(&manifest_path)?;

    let mut tasks = Vec::with_capacity(manifest.n_tasks);
    for t in 0..manifest.n_tasks {
        let dir = root.join(format!("task{t}"));
        let mut views = Vec::with_capacity(manifest.n_views);
        for v in 0..manifest.n_views {
            let path = dir.join(format!("view{v}.csv"));
            let rows = read_rows(&path)?;
            let expected_rows = manifest.dims[t][v];
            let actual_cols = rows.iter().map(Vec::len).find(|&c| c != manifest.n_total);
            if rows.len() != expected_rows || actual_cols.is_some() {
                return Err(Error::ViewShape {
                    task: t,
                    view: v,
                    expected_rows,
                    expected_cols: manifest.n_total,
                    actual_rows: rows.len(),
                    actual_cols: actual_cols.unwrap_or(manifest.n_total),
                });
            }
            let m = DMatrix::from_fn(expected_rows, manifest.n_total, |i, j| rows[i][j]);
            let view = ViewMatrix::new(m).map_err(|e| match e {
                Error::NegativeEntry { row, col, value } => Error::parse(
                    &path,
                    format!("negative entry {value} at row {row}, column {col}"),
                ),
                other => other,
            })?;
            views.push(view);
        }

        let labels_path = dir.join("labels.csv");
        let classes = read_indices(&labels_path)?;
        if classes.len() != manifest.n_labeled {
            return Err(Error::parse(
                &labels_path,
                format!(
                    "expected {} labels, found {}",
                    manifest.n_labeled,
                    classes.len()
                ),
            ));
        }
        let labels = LabelSet::new(classes, manifest.n_classes)?;

        let truth_path = dir.join("truth.csv");
        let truth = if truth_path.exists() {
            Some(read_indices(&truth_path)?)
        } else {
            None
        };
        tasks.push(TaskData {
            views,
            labels,
            truth,
        });
    }
    MultiViewDataset::new(manifest.name, manifest.n_classes, manifest.n_labeled, tasks)
}

/// Writes a dataset in the directory layout read by [`load_dataset`].
///
/// Values are written with 17 significant digits so a reload is bit-exact.
pub fn save_dataset(ds: &MultiViewDataset, root: impl AsRef<Path>) -> Result<()> {
    let root = root.as_ref();
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let manifest = Manifest::of(ds);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(root.join("manifest.json"), json.as_bytes())?;

    for (t, task) in ds.tasks.iter().enumerate() {
        let dir = root.join(format!("task{t}"));
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (v, view) in task.views.iter().enumerate() {
            write_atomic(dir.join(format!("view{v}.csv")), &matrix_csv(view.values()))?;
        }
        write_atomic(dir.join("labels.csv"), &index_csv(task.labels.classes()))?;
        if let Some(truth) = &task.truth {
            write_atomic(dir.join("truth.csv"), &index_csv(truth))?;
        }
    }
    Ok(())
}

/// Renders a matrix as headerless CSV, one matrix row per line.
pub(crate) fn matrix_csv(m: &DMatrix<f64>) -> Vec<u8> {
    let mut out = String::with_capacity(m.len() * 24);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_value(m[(i, j)]));
        }
        out.push('\n');
    }
    out.into_bytes()
}

pub(crate) fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn index_csv(idx: &[usize]) -> Vec<u8> {
    let mut s = idx
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",");
    s.push('\n');
    s.into_bytes()
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

pub(crate) fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rdr = reader(path)?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| {
                    Error::parse(
                        path,
                        format!("row {i}, column {j}: not a number: {field:?}"),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn read_indices(path: &Path) -> Result<Vec<usize>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
        for field in rec.iter().filter(|f| !f.is_empty()) {
            let idx = field
                .parse::<usize>()
                .map_err(|_| Error::parse(path, format!("not a class index: {field:?}")))?;
            out.push(idx);
        }
    }
    Ok(out)
}
