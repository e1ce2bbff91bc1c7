//! Closed-form updates for the multi-task regression block.
//!
//! Each task predicts its one-hot labels as `W_t^T F_{t,l}`. The tasks are
//! coupled through a unit-trace PSD matrix `D` that penalizes
//! `tr(W_t^T DD W_t)` with `DD = D^-1 + D^-T`; the anti-noise variant adds a
//! shared offset `W_d` with a row-sparse L2,1 penalty.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inverse_spd, matrix_sqrt_psd, solve_spd};

pub const DEFAULT_RIDGE_EPS: f64 = 1e-8;
pub const DEFAULT_IRLS_EPS: f64 = 1e-8;

/// Regression weights of one task, `K_joint x C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskWeights {
    pub w: DMatrix<f64>,
}

impl TaskWeights {
    pub fn zeros(k: usize, c: usize) -> Self {
        Self {
            w: DMatrix::zeros(k, c),
        }
    }
}

/// Shared noise-absorbing weights, `K_joint x C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseWeights {
    pub wd: DMatrix<f64>,
    pub irls_eps: f64,
}

impl NoiseWeights {
    pub fn zeros(k: usize, c: usize) -> Self {
        Self {
            wd: DMatrix::zeros(k, c),
            irls_eps: DEFAULT_IRLS_EPS,
        }
    }

    /// IRLS reweighting diagonal `1 / (2 max(|row_k|, eps))`.
    pub fn reweighting(&self) -> Vec<f64> {
        self.wd
            .row_iter()
            .map(|r| 1.0 / (2.0 * r.norm().max(self.irls_eps)))
            .collect()
    }
}

/// Task coupling matrix: symmetric, PSD, unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    d: DMatrix<f64>,
    pub ridge_eps: f64,
}

impl CouplingMatrix {
    /// `I / k`, the initial coupling.
    pub fn scaled_identity(k: usize) -> Self {
        Self {
            d: DMatrix::identity(k, k) / k as f64,
            ridge_eps: DEFAULT_RIDGE_EPS,
        }
    }

    /// Wraps `d` after checking symmetry, trace and spectrum.
    pub fn new(d: DMatrix<f64>, ridge_eps: f64) -> Result<Self> {
        if !d.is_square() {
            return Err(Error::InvalidArgument(
                "coupling matrix must be square".into(),
            ));
        }
        let asym = crate::linalg::max_asymmetry(&d);
        if asym > 1e-12 {
            return Err(Error::NotSymmetric(asym));
        }
        if (d.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "coupling matrix trace is {}, expected 1",
                d.trace()
            )));
        }
        let min_eig = crate::linalg::min_eigenvalue(&d);
        if min_eig < -1e-10 {
            return Err(Error::Indefinite(min_eig));
        }
        if !(ridge_eps > 0.0) {
            return Err(Error::InvalidArgument(
                "ridge epsilon must be positive".into(),
            ));
        }
        Ok(Self { d, ridge_eps })
    }

    pub fn with_ridge(mut self, ridge_eps: f64) -> Self {
        self.ridge_eps = ridge_eps;
        self
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.d.nrows()
    }

    /// `(D + eps I)^-1`.
    pub fn ridged_inverse(&self) -> Result<DMatrix<f64>> {
        let k = self.dim();
        inverse_spd(&(&self.d + DMatrix::identity(k, k) * self.ridge_eps))
    }
}

/// `D~^-1 + (D~^-1)^T` with `D~ = D + eps I`.
pub fn compute_dd(d: &CouplingMatrix) -> Result<DMatrix<f64>> {
    let inv = d.ridged_inverse()?;
    Ok(&inv + inv.transpose())
}

fn check_shapes(f_l: &DMatrix<f64>, y: &DMatrix<f64>, k: usize) -> Result<()> {
    if f_l.ncols() != y.ncols() {
        return Err(Error::InvalidArgument(format!(
            "features have {} labeled columns, labels have {}",
            f_l.ncols(),
            y.ncols()
        )));
    }
    if f_l.nrows() != k {
        return Err(Error::InvalidArgument(format!(
            "features have {} rows, coupling matrix is {k}x{k}",
            f_l.nrows()
        )));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{name} must be positive, got {v}"
        )));
    }
    Ok(())
}

/// Solves `(F F^T + gamma DD) W = rhs`, with `DD` supplied.
pub(crate) fn solve_regularized(
    gram: &DMatrix<f64>,
    dd: &DMatrix<f64>,
    gamma: f64,
    rhs: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let a = gram + dd * gamma;
    solve_spd(&a, rhs)
}

/// `W_t = (F F^T + gamma DD)^-1 F Y^T`.
pub fn update_task_weights(
    f_l: &DMatrix<f64>,
    y: &DMatrix<f64>,
    d: &CouplingMatrix,
    gamma: f64,
) -> Result<TaskWeights> {
    check_positive("gamma", gamma)?;
    check_shapes(f_l, y, d.dim())?;
    let dd = compute_dd(d)?;
    let gram = f_l * f_l.transpose();
    let rhs = f_l * y.transpose();
    Ok(TaskWeights {
        w: solve_regularized(&gram, &dd, gamma, &rhs)?,
    })
}

/// `W_t = (F F^T + gamma DD)^-1 (F Y^T - F F^T W_d)`.
pub fn update_task_weights_noisy(
    f_l: &DMatrix<f64>,
    y: &DMatrix<f64>,
    d: &CouplingMatrix,
    wd: &NoiseWeights,
    gamma: f64,
) -> Result<TaskWeights> {
    check_positive("gamma", gamma)?;
    check_shapes(f_l, y, d.dim())?;
    let dd = compute_dd(d)?;
    let gram = f_l * f_l.transpose();
    let rhs = f_l * y.transpose() - &gram * &wd.wd;
    Ok(TaskWeights {
        w: solve_regularized(&gram, &dd, gamma, &rhs)?,
    })
}

/// One IRLS step for the shared noise weights:
/// `W_d = (sum F F^T + mu E_d)^-1 (sum F Y^T - sum F F^T W_t)`,
/// with `E_d` built from `wd_prev`.
pub fn update_noise_weights(
    f_l_all: &[DMatrix<f64>],
    y_all: &[DMatrix<f64>],
    w_all: &[TaskWeights],
    mu: f64,
    wd_prev: &NoiseWeights,
) -> Result<NoiseWeights> {
    check_positive("mu", mu)?;
    if f_l_all.is_empty() || f_l_all.len() != y_all.len() || f_l_all.len() != w_all.len() {
        return Err(Error::InvalidArgument(
            "noise update needs matching per-task features, labels and weights".into(),
        ));
    }
    let k = wd_prev.wd.nrows();
    let c = wd_prev.wd.ncols();
    let mut lhs = DMatrix::zeros(k, k);
    let mut rhs = DMatrix::zeros(k, c);
    for ((f, y), w) in f_l_all.iter().zip(y_all).zip(w_all) {
        check_shapes(f, y, k)?;
        let gram = f * f.transpose();
        rhs += f * y.transpose() - &gram * &w.w;
        lhs += gram;
    }
    for (i, e) in wd_prev.reweighting().into_iter().enumerate() {
        lhs[(i, i)] += mu * e;
    }
    Ok(NoiseWeights {
        wd: solve_spd(&lhs, &rhs)?,
        irls_eps: wd_prev.irls_eps,
    })
}

/// Result of [`update_coupling`].
#[derive(Debug, Clone)]
pub struct CouplingUpdate {
    pub coupling: CouplingMatrix,
    /// `(tr (W W^T)^{1/2})^2`, the minimum of `sum_t tr(W_t^T D^+ W_t)`.
    pub optimal_value: f64,
}

/// `D = (W W^T)^{1/2} / tr (W W^T)^{1/2}` with `W = [W_1, ..., W_T]`.
///
/// An all-zero `W` yields `I / K`.
pub fn update_coupling(w_all: &[TaskWeights]) -> Result<CouplingUpdate> {
    let first = w_all
        .first()
        .ok_or_else(|| Error::InvalidArgument("no task weights".into()))?;
    let k = first.w.nrows();
    let mut wwt = DMatrix::zeros(k, k);
    for w in w_all {
        if w.w.nrows() != k {
            return Err(Error::InvalidArgument(
                "task weights differ in row count".into(),
            ));
        }
        wwt += &w.w * w.w.transpose();
    }
    let root = matrix_sqrt_psd(&wwt)?;
    let tr = root.trace();
    if !(tr > 0.0) {
        return Ok(CouplingUpdate {
            coupling: CouplingMatrix::scaled_identity(k),
            optimal_value: 0.0,
        });
    }
    let mut d = root / tr;
    // exact symmetry and unit trace up to rounding
    let dt = d.transpose();
    d = (d + dt) * 0.5;
    let t = d.trace();
    d /= t;
    Ok(CouplingUpdate {
        coupling: CouplingMatrix {
            d,
            ridge_eps: DEFAULT_RIDGE_EPS,
        },
        optimal_value: tr * tr,
    })
}

/// `|Y - W^T F|_F^2 + gamma tr(W^T DD W)`: the terms minimized by [`update_task_weights`].
pub fn task_regression_loss(
    f_l: &DMatrix<f64>,
    y: &DMatrix<f64>,
    w: &DMatrix<f64>,
    dd: &DMatrix<f64>,
    gamma: f64,
) -> f64 {
    let resid = y - w.transpose() * f_l;
    resid.norm_squared() + gamma * (w.transpose() * dd * w).trace()
}
