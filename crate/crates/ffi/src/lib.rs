//! C interface to the `mtmvcsf` library.
//!
//! Every function returns an [`MtmvStatus`]. On failure a message is kept
//! per thread and can be read with [`mtmv_last_error`]. Handles are opaque
//! and must be released with the matching `_free` function. Matrices are
//! copied out column-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mtmvcsf::dataset::{generate_synth, load_dataset, MultiViewDataset, SynthSpec};
use mtmvcsf::eval::unlabeled_accuracy;
use mtmvcsf::trainer::{fit, Algorithm, Hyperparams, Preset, TrainReport};
use mtmvcsf::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtmvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Bad input data or configuration.
    Validation = 3,
    /// Numerical failure, divergence or I/O error.
    Runtime = 4,
    /// The caller's buffer is too small; the required length was written.
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtmvAlgorithm {
    Standard = 0,
    AntiNoise = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtmvPreset {
    Synth1 = 0,
    Synth2 = 1,
}

/// Plain-data mirror of the training hyperparameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtmvHyperparams {
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub mu: f64,
    pub k_per_view: usize,
    pub kc_per: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub seed: u64,
    pub ridge_eps: f64,
    /// Nonzero to scale instance columns to unit sum.
    pub normalize_columns: u8,
}

impl From<&Hyperparams> for MtmvHyperparams {
    fn from(h: &Hyperparams) -> Self {
        Self {
            beta: h.beta,
            gamma: h.gamma,
            lambda: h.lambda,
            mu: h.mu,
            k_per_view: h.k_per_view,
            kc_per: h.kc_per,
            max_iters: h.max_iters,
            rel_tol: h.rel_tol,
            seed: h.seed,
            ridge_eps: h.ridge_eps,
            normalize_columns: h.normalize_columns as u8,
        }
    }
}

impl From<&MtmvHyperparams> for Hyperparams {
    fn from(h: &MtmvHyperparams) -> Self {
        Self {
            beta: h.beta,
            gamma: h.gamma,
            lambda: h.lambda,
            mu: h.mu,
            k_per_view: h.k_per_view,
            kc_per: h.kc_per,
            max_iters: h.max_iters,
            rel_tol: h.rel_tol,
            seed: h.seed,
            ridge_eps: h.ridge_eps,
            normalize_columns: h.normalize_columns != 0,
        }
    }
}

impl From<MtmvAlgorithm> for Algorithm {
    fn from(a: MtmvAlgorithm) -> Self {
        match a {
            MtmvAlgorithm::Standard => Algorithm::Standard,
            MtmvAlgorithm::AntiNoise => Algorithm::AntiNoise,
        }
    }
}

impl From<MtmvPreset> for Preset {
    fn from(p: MtmvPreset) -> Self {
        match p {
            MtmvPreset::Synth1 => Preset::Synth1,
            MtmvPreset::Synth2 => Preset::Synth2,
        }
    }
}

/// Opaque dataset handle.
pub struct MtmvDataset(MultiViewDataset);

/// Opaque fitted-model handle.
pub struct MtmvModel(TrainReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul removed")));
}

struct Fail(MtmvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = if e.is_validation() {
            MtmvStatus::Validation
        } else {
            MtmvStatus::Runtime
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MtmvStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MtmvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MtmvStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MtmvStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Copies `src` into `buf` when it fits; always reports the length.
unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize, len: *mut usize) -> Result<(), Fail> {
    *out_ref(len, "len")? = src.len();
    if src.len() > cap {
        return Err(Fail(
            MtmvStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Last error message on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn mtmv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Fills `out` with the built-in hyperparameters of a preset.
///
/// # Safety
/// `out` must be null or point to writable memory for one struct.
#[no_mangle]
pub unsafe extern "C" fn mtmv_hyperparams_preset(
    preset: MtmvPreset,
    algorithm: MtmvAlgorithm,
    out: *mut MtmvHyperparams,
) -> MtmvStatus {
    guard(|| {
        *out_ref(out, "out")? = (&Hyperparams::preset(preset.into(), algorithm.into())).into();
        Ok(())
    })
}

/// Loads a dataset directory.
///
/// # Safety
/// `path` must be null or a nul-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_dataset_load(
    path: *const c_char,
    out: *mut *mut MtmvDataset,
) -> MtmvStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Fail(MtmvStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let ds = load_dataset(path)?;
        *out = Box::into_raw(Box::new(MtmvDataset(ds)));
        Ok(())
    })
}

/// Generates a synthetic preset dataset.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_dataset_generate(
    preset: MtmvPreset,
    seed: u64,
    out: *mut *mut MtmvDataset,
) -> MtmvStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = match preset {
            MtmvPreset::Synth1 => SynthSpec::synth1(seed),
            MtmvPreset::Synth2 => SynthSpec::synth2(seed),
        };
        *out = Box::into_raw(Box::new(MtmvDataset(generate_synth(&spec)?)));
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn mtmv_dataset_free(ds: *mut MtmvDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Task, view, class, instance and labeled-instance counts.
///
/// # Safety
/// `ds` must be a live handle; each output must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_dataset_shape(
    ds: *const MtmvDataset,
    n_tasks: *mut usize,
    n_views: *mut usize,
    n_classes: *mut usize,
    n_total: *mut usize,
    n_labeled: *mut usize,
) -> MtmvStatus {
    guard(|| {
        let ds = &deref(ds, "ds")?.0;
        *out_ref(n_tasks, "n_tasks")? = ds.n_tasks();
        *out_ref(n_views, "n_views")? = ds.n_views();
        *out_ref(n_classes, "n_classes")? = ds.n_classes;
        *out_ref(n_total, "n_total")? = ds.n_total();
        *out_ref(n_labeled, "n_labeled")? = ds.n_labeled;
        Ok(())
    })
}

/// Trains a model on `ds`.
///
/// # Safety
/// `ds` must be a live handle, `hp` readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_fit(
    ds: *const MtmvDataset,
    hp: *const MtmvHyperparams,
    algorithm: MtmvAlgorithm,
    out: *mut *mut MtmvModel,
) -> MtmvStatus {
    guard(|| {
        let ds = &deref(ds, "ds")?.0;
        let hp: Hyperparams = deref(hp, "hp")?.into();
        let out = out_ref(out, "out")?;
        let report = fit(ds, &hp, algorithm.into())?;
        *out = Box::into_raw(Box::new(MtmvModel(report)));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn mtmv_model_free(model: *mut MtmvModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Iterations run and whether the tolerance was reached.
///
/// # Safety
/// `model` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_model_status(
    model: *const MtmvModel,
    iterations: *mut usize,
    converged: *mut u8,
) -> MtmvStatus {
    guard(|| {
        let r = &deref(model, "model")?.0;
        *out_ref(iterations, "iterations")? = r.iterations;
        *out_ref(converged, "converged")? = r.converged as u8;
        Ok(())
    })
}

/// Objective value at initialization and after each iteration.
///
/// # Safety
/// `buf` must hold `cap` doubles; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_model_objective_trace(
    model: *const MtmvModel,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> MtmvStatus {
    guard(|| copy_out(&deref(model, "model")?.0.objective_trace, buf, cap, len))
}

fn task_index(r: &TrainReport, task: usize) -> Result<(), Fail> {
    if task >= r.features.len() {
        return Err(Fail(
            MtmvStatus::InvalidArgument,
            format!("task {task} out of range for {} tasks", r.features.len()),
        ));
    }
    Ok(())
}

/// Joint latent features of one task, `K_joint x N`, column-major.
///
/// # Safety
/// `buf` must hold `cap` doubles; other outputs writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_model_features(
    model: *const MtmvModel,
    task: usize,
    buf: *mut f64,
    cap: usize,
    rows: *mut usize,
    cols: *mut usize,
) -> MtmvStatus {
    guard(|| {
        let r = &deref(model, "model")?.0;
        task_index(r, task)?;
        let f = r.features[task].matrix();
        *out_ref(rows, "rows")? = f.nrows();
        *out_ref(cols, "cols")? = f.ncols();
        let mut len = 0;
        copy_out(f.as_slice(), buf, cap, &mut len)
    })
}

/// Predicted classes of one task's unlabeled instances.
///
/// # Safety
/// `buf` must hold `cap` entries; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_model_predict(
    model: *const MtmvModel,
    task: usize,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> MtmvStatus {
    guard(|| {
        let r = &deref(model, "model")?.0;
        task_index(r, task)?;
        let pred = &r.predict_unlabeled()[task];
        *out_ref(len, "len")? = pred.len();
        if pred.len() > cap {
            return Err(Fail(
                MtmvStatus::BufferTooSmall,
                format!("buffer holds {cap} values, {} needed", pred.len()),
            ));
        }
        if !pred.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(pred.as_ptr(), buf, pred.len());
        }
        Ok(())
    })
}

/// Unlabeled accuracy against the dataset's recorded ground truth.
///
/// # Safety
/// Both handles must be live; `accuracy` writable.
#[no_mangle]
pub unsafe extern "C" fn mtmv_model_accuracy(
    model: *const MtmvModel,
    ds: *const MtmvDataset,
    accuracy: *mut f64,
) -> MtmvStatus {
    guard(|| {
        let r = &deref(model, "model")?.0;
        let ds = &deref(ds, "ds")?.0;
        *out_ref(accuracy, "accuracy")? = unlabeled_accuracy(r, ds)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperparams_round_trip() {
        let h = Hyperparams::preset(Preset::Synth2, Algorithm::AntiNoise);
        let c: MtmvHyperparams = (&h).into();
        assert_eq!(Hyperparams::from(&c), h);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), MtmvStatus::Panic);
        let msg = unsafe { CStr::from_ptr(mtmv_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn short_buffer_reports_length() {
        let mut len = 0;
        let mut buf = [0.0; 1];
        let s = guard(|| unsafe { copy_out(&[1.0, 2.0], buf.as_mut_ptr(), 1, &mut len) });
        assert_eq!(s, MtmvStatus::BufferTooSmall);
        assert_eq!(len, 2);
    }
}
