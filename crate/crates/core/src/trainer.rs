//! Alternating optimization for the standard and anti-noise models.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::factorization::{
    assemble_joint_features, compute_h_split, factor_ratios, update_basis, update_factor_blocks,
    BasisMatrix, FactorBlocks, FactorSweep, HSplit, JointFeatures,
};
use crate::linalg::l21_norm;
use crate::regression::{
    compute_dd, update_coupling, update_noise_weights, update_task_weights,
    update_task_weights_noisy, CouplingMatrix, NoiseWeights, TaskWeights, DEFAULT_RIDGE_EPS,
};
use crate::simplex::{solve_view_weights, ViewWeights};

/// Objective increase ratio that aborts a run.
const DIVERGENCE_RATIO: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Standard,
    #[serde(rename = "an")]
    AntiNoise,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Standard => "standard",
            Algorithm::AntiNoise => "an",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Algorithm::Standard),
            "an" => Ok(Algorithm::AntiNoise),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Synth1,
    Synth2,
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synth1" => Ok(Preset::Synth1),
            "synth2" => Ok(Preset::Synth2),
            other => Err(Error::Config(format!("unknown preset {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// Row-sparsity weight of the noise weights; ignored by the standard model.
    pub mu: f64,
    /// Factor dimension of each view, `Ks + Kc`.
    pub k_per_view: usize,
    /// Fraction of `k_per_view` assigned to the common block.
    pub kc_per: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub seed: u64,
    /// Ridge added to `D` before inversion.
    pub ridge_eps: f64,
    /// Scale every instance column of every view to unit sum before training.
    pub normalize_columns: bool,
}

pub const DEFAULT_LAMBDA: f64 = 1.0;

impl Default for Hyperparams {
    fn default() -> Self {
        Self::preset(Preset::Synth1, Algorithm::Standard)
    }
}

impl Hyperparams {
    pub fn preset(preset: Preset, algorithm: Algorithm) -> Self {
        let (beta, gamma, mu, k, kc_per) = match (preset, algorithm) {
            (Preset::Synth1, Algorithm::Standard) => (1e-5, 1e-4, 1e-4, 50, 0.4),
            (Preset::Synth1, Algorithm::AntiNoise) => (1e-5, 1e-4, 1e-4, 40, 0.8),
            (Preset::Synth2, Algorithm::Standard) => (1e-5, 1e-2, 1e-4, 50, 0.4),
            (Preset::Synth2, Algorithm::AntiNoise) => (1e-4, 1e-4, 1.0, 30, 0.5),
        };
        Self {
            beta,
            gamma,
            lambda: DEFAULT_LAMBDA,
            mu,
            k_per_view: k,
            kc_per,
            max_iters: 100,
            rel_tol: 1e-5,
            seed: 0,
            ridge_eps: DEFAULT_RIDGE_EPS,
            normalize_columns: true,
        }
    }

    pub fn kc(&self) -> usize {
        (self.kc_per * self.k_per_view as f64).round() as usize
    }

    pub fn ks(&self) -> usize {
        self.k_per_view.saturating_sub(self.kc())
    }

    pub fn k_joint(&self, n_views: usize) -> usize {
        self.ks() * n_views + self.kc()
    }

    pub fn validate(&self, algorithm: Algorithm) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be >= 0, got {}", self.beta));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be > 0, got {}", self.gamma));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be > 0, got {}", self.lambda));
        }
        if algorithm == Algorithm::AntiNoise && !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be > 0, got {}", self.mu));
        }
        if self.k_per_view < 2 {
            return bad(format!("k_per_view must be >= 2, got {}", self.k_per_view));
        }
        if !(self.kc_per > 0.0 && self.kc_per < 1.0) {
            return bad(format!("kc_per must lie in (0, 1), got {}", self.kc_per));
        }
        if self.ks() < 1 || self.kc() < 1 {
            return bad(format!(
                "k_per_view {} with kc_per {} leaves Ks = {}, Kc = {}",
                self.k_per_view,
                self.kc_per,
                self.ks(),
                self.kc()
            ));
        }
        if !(self.ridge_eps > 0.0 && self.ridge_eps.is_finite()) {
            return bad(format!("ridge_eps must be > 0, got {}", self.ridge_eps));
        }
        if !(self.rel_tol >= 0.0) {
            return bad(format!("rel_tol must be >= 0, got {}", self.rel_tol));
        }
        Ok(())
    }
}

/// Objective split into its terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTerms {
    /// `sum pi |X - B F|^2`.
    pub reconstruction: f64,
    /// `lambda |pi|^2`.
    pub view_penalty: f64,
    /// `sum_t |Y_t - W^T F_l|^2`, with `W = W_t (+ W_d)`.
    pub prediction: f64,
    /// `sum_t tr(W_t^T DD W_t)`.
    pub coupling: f64,
    /// `|W_d|_{2,1}`.
    pub noise: f64,
}

impl ObjectiveTerms {
    pub fn total(&self, hp: &Hyperparams) -> f64 {
        self.reconstruction
            + self.view_penalty
            + hp.beta * (self.prediction + hp.gamma * self.coupling + hp.mu * self.noise)
    }
}

/// Accumulated wall-clock time per phase, in milliseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub weights: f64,
    pub noise: f64,
    pub coupling: f64,
    pub basis: f64,
    pub factors: f64,
    pub view_weights: f64,
    pub objective: f64,
}

fn timed<T>(slot: &mut f64, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed().as_secs_f64() * 1e3;
    out
}

/// Everything that changes during training.
#[derive(Debug, Clone)]
pub struct TrainState {
    algorithm: Algorithm,
    views: Vec<Vec<DMatrix<f64>>>,
    labels: Vec<DMatrix<f64>>,
    bases: Vec<Vec<BasisMatrix>>,
    factors: Vec<FactorBlocks>,
    weights: Vec<TaskWeights>,
    noise: Option<NoiseWeights>,
    coupling: CouplingMatrix,
    view_weights: ViewWeights,
    iteration: usize,
    zero_columns: usize,
}

impl TrainState {
    /// Normalizes the views if `hp.normalize_columns` and draws the initial
    /// factors from `hp.seed`.
    pub fn new(ds: &MultiViewDataset, hp: &Hyperparams, algorithm: Algorithm) -> Result<Self> {
        ds.validate()?;
        hp.validate(algorithm)?;
        if hp.normalize_columns {
            let (norm, zero_columns) = ds.column_normalized();
            Self::build(&norm, hp, algorithm, zero_columns)
        } else {
            Self::build(ds, hp, algorithm, 0)
        }
    }

    fn build(
        ds: &MultiViewDataset,
        hp: &Hyperparams,
        algorithm: Algorithm,
        zero_columns: usize,
    ) -> Result<Self> {
        let (nt, nv, n, nl, c) = (
            ds.n_tasks(),
            ds.n_views(),
            ds.n_total(),
            ds.n_labeled,
            ds.n_classes,
        );
        let (ks, kc) = (hp.ks(), hp.kc());
        let k_joint = hp.k_joint(nv);
        let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
        let mut uniform =
            |r: usize, cols: usize| DMatrix::from_fn(r, cols, |_, _| rng.random::<f64>());

        let views: Vec<Vec<DMatrix<f64>>> = ds
            .tasks
            .iter()
            .map(|t| t.views.iter().map(|v| v.values().clone()).collect())
            .collect();
        let mut bases = Vec::with_capacity(nt);
        for task in &views {
            let mut row = Vec::with_capacity(nv);
            for x in task {
                row.push(BasisMatrix::new(uniform(x.nrows(), ks + kc), ks)?);
            }
            bases.push(row);
        }
        let mut factors = Vec::with_capacity(nt);
        for _ in 0..nt {
            let specific = (0..nv).map(|_| uniform(ks, n)).collect();
            factors.push(FactorBlocks::new(specific, uniform(kc, n), nl)?);
        }
        Ok(Self {
            algorithm,
            views,
            labels: ds.tasks.iter().map(|t| t.labels.one_hot()).collect(),
            bases,
            factors,
            weights: (0..nt).map(|_| TaskWeights::zeros(k_joint, c)).collect(),
            noise: match algorithm {
                Algorithm::AntiNoise => Some(NoiseWeights::zeros(k_joint, c)),
                Algorithm::Standard => None,
            },
            coupling: CouplingMatrix::scaled_identity(k_joint).with_ridge(hp.ridge_eps),
            view_weights: ViewWeights::uniform(nt * nv, hp.lambda),
            iteration: 0,
            zero_columns,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }
    pub fn n_tasks(&self) -> usize {
        self.views.len()
    }
    pub fn n_views(&self) -> usize {
        self.views[0].len()
    }
    pub fn iteration(&self) -> usize {
        self.iteration
    }
    pub fn zero_columns(&self) -> usize {
        self.zero_columns
    }
    /// Training views after normalization, `[task][view]`.
    pub fn views(&self) -> &[Vec<DMatrix<f64>>] {
        &self.views
    }
    pub fn labels(&self) -> &[DMatrix<f64>] {
        &self.labels
    }
    pub fn bases(&self) -> &[Vec<BasisMatrix>] {
        &self.bases
    }
    pub fn factors(&self) -> &[FactorBlocks] {
        &self.factors
    }
    pub fn weights(&self) -> &[TaskWeights] {
        &self.weights
    }
    pub fn noise_weights(&self) -> Option<&NoiseWeights> {
        self.noise.as_ref()
    }
    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }
    pub fn view_weights(&self) -> &ViewWeights {
        &self.view_weights
    }

    /// Replaces the view weights, keeping `lambda`.
    pub fn set_view_weights(&mut self, pi: Vec<f64>) -> Result<()> {
        if pi.len() != self.view_weights.pi.len() {
            return Err(Error::InvalidArgument("view weight count mismatch".into()));
        }
        self.view_weights.pi = pi;
        Ok(())
    }

    pub fn joint_features(&self) -> Vec<JointFeatures> {
        self.factors.iter().map(assemble_joint_features).collect()
    }

    fn labeled_features(&self) -> Vec<DMatrix<f64>> {
        self.joint_features()
            .iter()
            .map(|j| j.labeled().into_owned())
            .collect()
    }

    fn task_pi(&self, t: usize) -> &[f64] {
        let nv = self.n_views();
        &self.view_weights.pi[t * nv..(t + 1) * nv]
    }

    /// `|X - B F|^2` per (task, view), task-major.
    pub fn reconstruction_errors(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_tasks() * self.n_views());
        for (t, task) in self.views.iter().enumerate() {
            for (v, x) in task.iter().enumerate() {
                let f = self.factors[t].view_factor(v);
                out.push((x - self.bases[t][v].matrix() * f).norm_squared());
            }
        }
        out
    }

    /// Regression weights `W_t`: the exact minimizer given features, `D` and `W_d`.
    pub fn update_weights(&mut self, hp: &Hyperparams) -> Result<()> {
        let fl = self.labeled_features();
        let weights = (0..self.n_tasks())
            .into_par_iter()
            .map(|t| match &self.noise {
                Some(wd) => {
                    update_task_weights_noisy(&fl[t], &self.labels[t], &self.coupling, wd, hp.gamma)
                }
                None => update_task_weights(&fl[t], &self.labels[t], &self.coupling, hp.gamma),
            })
            .collect::<Result<Vec<_>>>()?;
        self.weights = weights;
        Ok(())
    }

    /// One reweighted step on `W_d`; a no-op for the standard model.
    pub fn update_noise(&mut self, hp: &Hyperparams) -> Result<()> {
        if let Some(prev) = &self.noise {
            let fl = self.labeled_features();
            let next = update_noise_weights(&fl, &self.labels, &self.weights, hp.mu, prev)?;
            self.noise = Some(next);
        }
        Ok(())
    }

    pub fn update_coupling(&mut self) -> Result<()> {
        let eps = self.coupling.ridge_eps;
        self.coupling = update_coupling(&self.weights)?.coupling.with_ridge(eps);
        Ok(())
    }

    pub fn update_bases(&mut self) -> Result<()> {
        let bases = (0..self.n_tasks())
            .into_par_iter()
            .map(|t| {
                (0..self.n_views())
                    .map(|v| {
                        update_basis(
                            &self.bases[t][v],
                            &self.views[t][v],
                            &self.factors[t].view_factor(v),
                        )
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        self.bases = bases;
        Ok(())
    }

    fn h_splits(&self) -> Result<Vec<HSplit>> {
        let fl = self.labeled_features();
        (0..self.n_tasks())
            .map(|t| {
                compute_h_split(
                    &self.weights[t],
                    &fl[t],
                    &self.labels[t],
                    self.noise.as_ref(),
                )
            })
            .collect()
    }

    /// Snapshot sweep over every factor block of every task.
    pub fn update_factors(&mut self, hp: &Hyperparams) -> Result<()> {
        let h = self.h_splits()?;
        let factors = (0..self.n_tasks())
            .into_par_iter()
            .map(|t| {
                let views: Vec<&DMatrix<f64>> = self.views[t].iter().collect();
                let sweep = FactorSweep {
                    bases: &self.bases[t],
                    views: &views,
                    pi: self.task_pi(t),
                    h: Some(&h[t]),
                    beta: hp.beta,
                };
                update_factor_blocks(&sweep, &self.factors[t])
            })
            .collect::<Result<Vec<_>>>()?;
        self.factors = factors;
        Ok(())
    }

    pub fn update_view_weights(&mut self, hp: &Hyperparams) -> Result<()> {
        self.view_weights = solve_view_weights(&self.reconstruction_errors(), hp.lambda)?;
        Ok(())
    }

    /// Multiplicative factors the next factor sweep would apply, for every
    /// entry whose current value exceeds `threshold`.
    pub fn stationarity_ratios(&self, hp: &Hyperparams, threshold: f64) -> Result<Vec<f64>> {
        let h = self.h_splits()?;
        let mut out = Vec::new();
        for t in 0..self.n_tasks() {
            let views: Vec<&DMatrix<f64>> = self.views[t].iter().collect();
            let sweep = FactorSweep {
                bases: &self.bases[t],
                views: &views,
                pi: self.task_pi(t),
                h: Some(&h[t]),
                beta: hp.beta,
            };
            let ratios = factor_ratios(&sweep, &self.factors[t])?;
            let fb = &self.factors[t];
            for v in 0..self.n_views() {
                for (f, r) in fb.specific(v).iter().zip(ratios.specific[v].iter()) {
                    if *f > threshold {
                        out.push(*r);
                    }
                }
            }
            for (f, r) in fb.common().iter().zip(ratios.common.iter()) {
                if *f > threshold {
                    out.push(*r);
                }
            }
        }
        Ok(out)
    }

    fn terms(&self, hp: &Hyperparams, with_noise: bool) -> Result<ObjectiveTerms> {
        let errors = self.reconstruction_errors();
        let pi = &self.view_weights.pi;
        let reconstruction = errors.iter().zip(pi).map(|(e, p)| e * p).sum();
        let view_penalty = hp.lambda * pi.iter().map(|p| p * p).sum::<f64>();
        let dd = compute_dd(&self.coupling)?;
        let fl = self.labeled_features();
        let noise = self.noise.as_ref().filter(|_| with_noise);
        let mut prediction = 0.0;
        let mut coupling = 0.0;
        for t in 0..self.n_tasks() {
            let w = &self.weights[t].w;
            let resid = match noise {
                Some(wd) => &self.labels[t] - (w + &wd.wd).transpose() * &fl[t],
                None => &self.labels[t] - w.transpose() * &fl[t],
            };
            prediction += resid.norm_squared();
            coupling += (w.transpose() * &dd * w).trace();
        }
        Ok(ObjectiveTerms {
            reconstruction,
            view_penalty,
            prediction,
            coupling,
            noise: noise.map(|wd| l21_norm(&wd.wd)).unwrap_or(0.0),
        })
    }

    /// Standard objective; noise weights are ignored.
    pub fn objective(&self, hp: &Hyperparams) -> Result<f64> {
        Ok(self.terms(hp, false)?.total(hp))
    }

    /// Anti-noise objective; equals [`TrainState::objective`] when `W_d = 0`.
    pub fn objective_noisy(&self, hp: &Hyperparams) -> Result<f64> {
        Ok(self.terms(hp, true)?.total(hp))
    }

    pub fn objective_terms(&self, hp: &Hyperparams) -> Result<ObjectiveTerms> {
        self.terms(hp, self.algorithm == Algorithm::AntiNoise)
    }

    /// Objective of the model being trained.
    pub fn current_objective(&self, hp: &Hyperparams) -> Result<f64> {
        Ok(self.objective_terms(hp)?.total(hp))
    }

    /// One outer iteration: weights, noise weights, coupling, bases, factors, view weights.
    pub fn iterate(&mut self, hp: &Hyperparams, timings: &mut PhaseTimings) -> Result<()> {
        timed(&mut timings.weights, || self.update_weights(hp))?;
        timed(&mut timings.noise, || self.update_noise(hp))?;
        timed(&mut timings.coupling, || self.update_coupling())?;
        timed(&mut timings.basis, || self.update_bases())?;
        timed(&mut timings.factors, || self.update_factors(hp))?;
        timed(&mut timings.view_weights, || self.update_view_weights(hp))?;
        self.iteration += 1;
        Ok(())
    }
}

/// Outcome of a training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub algorithm: Algorithm,
    pub hyperparams: Hyperparams,
    pub objective_trace: Vec<f64>,
    pub normalized_trace: Vec<f64>,
    pub timings_ms: PhaseTimings,
    pub converged: bool,
    pub iterations: usize,
    pub features: Vec<JointFeatures>,
    pub weights: Vec<TaskWeights>,
    pub noise_weights: Option<NoiseWeights>,
    pub coupling: CouplingMatrix,
    pub view_weights: ViewWeights,
    pub zero_columns: usize,
}

/// Serialized form of a report; matrices are exported separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub format_version: u32,
    pub algorithm: Algorithm,
    pub objective_trace: Vec<f64>,
    pub normalized_trace: Vec<f64>,
    pub timings_ms: Option<PhaseTimings>,
    pub converged: bool,
    pub iterations: usize,
    pub hyperparams: Hyperparams,
    pub seed: u64,
    pub view_weights: Vec<f64>,
    pub zero_columns: usize,
}

impl TrainReport {
    pub fn summary(&self, include_timings: bool) -> ReportSummary {
        ReportSummary {
            format_version: 1,
            algorithm: self.algorithm,
            objective_trace: self.objective_trace.clone(),
            normalized_trace: self.normalized_trace.clone(),
            timings_ms: include_timings.then(|| self.timings_ms.clone()),
            converged: self.converged,
            iterations: self.iterations,
            hyperparams: self.hyperparams.clone(),
            seed: self.hyperparams.seed,
            view_weights: self.view_weights.pi.clone(),
            zero_columns: self.zero_columns,
        }
    }

    /// Predicted classes of the unlabeled instances of each task.
    pub fn predict_unlabeled(&self) -> Vec<Vec<usize>> {
        self.features
            .iter()
            .zip(&self.weights)
            .map(|(f, w)| crate::eval::predict_labels(w, &f.unlabeled().into_owned()))
            .collect()
    }

    /// `iter,objective,normalized` rows.
    pub fn loss_curve_csv(&self) -> Vec<u8> {
        let mut out = String::from("iter,objective,normalized\n");
        for (i, (o, n)) in self
            .objective_trace
            .iter()
            .zip(&self.normalized_trace)
            .enumerate()
        {
            out.push_str(&format!(
                "{i},{},{}\n",
                crate::dataset::io::format_value(*o),
                crate::dataset::io::format_value(*n)
            ));
        }
        out.into_bytes()
    }
}

/// Min-max scaling of a trace to `[0, 1]`; a flat trace maps to zeros.
pub fn normalize_trace(trace: &[f64]) -> Vec<f64> {
    let lo = trace.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = trace.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.0; trace.len()];
    }
    trace.iter().map(|x| (x - lo) / (hi - lo)).collect()
}

fn check_finite(value: f64, iteration: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteObjective { iteration })
    }
}

/// Runs the configured schedule from an existing state until convergence or `max_iters`.
pub fn run(mut state: TrainState, hp: &Hyperparams) -> Result<TrainReport> {
    let mut timings = PhaseTimings::default();
    let first = timed(&mut timings.objective, || state.current_objective(hp))?;
    let mut trace = vec![check_finite(first, 0)?];
    let mut converged = false;
    while state.iteration() < hp.max_iters {
        state.iterate(hp, &mut timings)?;
        let it = state.iteration();
        let value = check_finite(
            timed(&mut timings.objective, || state.current_objective(hp))?,
            it,
        )?;
        let prev = *trace.last().unwrap();
        trace.push(value);
        if value > prev * DIVERGENCE_RATIO {
            return Err(Error::Diverged {
                iteration: it,
                previous: prev,
                current: value,
            });
        }
        if (prev - value).abs() <= hp.rel_tol * prev.abs() {
            converged = true;
            break;
        }
    }
    Ok(TrainReport {
        algorithm: state.algorithm,
        hyperparams: hp.clone(),
        normalized_trace: normalize_trace(&trace),
        objective_trace: trace,
        timings_ms: timings,
        converged,
        iterations: state.iteration,
        features: state.joint_features(),
        weights: state.weights.clone(),
        noise_weights: state.noise.clone(),
        coupling: state.coupling.clone(),
        view_weights: state.view_weights.clone(),
        zero_columns: state.zero_columns,
    })
}

pub fn fit(ds: &MultiViewDataset, hp: &Hyperparams, algorithm: Algorithm) -> Result<TrainReport> {
    run(TrainState::new(ds, hp, algorithm)?, hp)
}

pub fn fit_mtmvcsf(ds: &MultiViewDataset, hp: &Hyperparams) -> Result<TrainReport> {
    fit(ds, hp, Algorithm::Standard)
}

pub fn fit_an_mtmvcsf(ds: &MultiViewDataset, hp: &Hyperparams) -> Result<TrainReport> {
    fit(ds, hp, Algorithm::AntiNoise)
}
