//! View-weight subproblem: minimize `f . pi + lambda * |pi|^2` over the
//! probability simplex. Completing the square turns it into the Euclidean
//! projection of `-f / (2 lambda)` onto the simplex, solved exactly by sorting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simplex-constrained weights, one per (task, view), task-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewWeights {
    pub pi: Vec<f64>,
    pub lambda: f64,
}

impl ViewWeights {
    pub fn uniform(n: usize, lambda: f64) -> Self {
        Self {
            pi: vec![1.0 / n as f64; n],
            lambda,
        }
    }

    /// `f . pi + lambda * |pi|^2`.
    pub fn objective(&self, f: &[f64]) -> f64 {
        view_weight_objective(f, &self.pi, self.lambda)
    }
}

pub fn view_weight_objective(f: &[f64], pi: &[f64], lambda: f64) -> f64 {
    let lin: f64 = f.iter().zip(pi).map(|(a, b)| a * b).sum();
    let sq: f64 = pi.iter().map(|p| p * p).sum();
    lin + lambda * sq
}

/// Euclidean projection onto `{x >= 0, sum x = 1}`.
pub fn project_to_simplex(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot project an empty vector".into(),
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite entry in projection input".into(),
        ));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    Ok(v.iter().map(|x| (x - theta).max(0.0)).collect())
}

/// Exact minimizer of the view-weight subproblem for reconstruction errors `f`.
pub fn solve_view_weights(f: &[f64], lambda: f64) -> Result<ViewWeights> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if let Some(&bad) = f.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "reconstruction errors must be finite and nonnegative, got {bad}"
        )));
    }
    let shifted: Vec<f64> = f.iter().map(|x| -x / (2.0 * lambda)).collect();
    Ok(ViewWeights {
        pi: project_to_simplex(&shifted)?,
        lambda,
    })
}
