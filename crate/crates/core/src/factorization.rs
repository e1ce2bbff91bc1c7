//! Nonnegative bases and factors with a specific/common block partition.
//!
//! For task `t` and view `v` the view matrix is approximated as
//! `X ~ B [F_spec_v; F_common]`; the common block has one storage per task.
//! Columns of every factor are ordered labeled first.

use nalgebra::{DMatrix, DMatrixView};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::{NoiseWeights, TaskWeights};

pub use crate::linalg::pos_neg_split;

/// Guard added to every multiplicative denominator.
pub const EPS_DEN: f64 = 1e-12;

/// Nonnegative basis `M x (Ks + Kc)`; the first `Ks` columns are specific.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisMatrix {
    b: DMatrix<f64>,
    ks: usize,
}

impl BasisMatrix {
    pub fn new(b: DMatrix<f64>, ks: usize) -> Result<Self> {
        if ks == 0 || ks >= b.ncols() {
            return Err(Error::InvalidArgument(format!(
                "specific width {ks} must lie in 1..{}",
                b.ncols()
            )));
        }
        crate::dataset::check_nonnegative(&b)?;
        Ok(Self { b, ks })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn ks(&self) -> usize {
        self.ks
    }

    pub fn kc(&self) -> usize {
        self.b.ncols() - self.ks
    }

    pub fn specific(&self) -> DMatrixView<'_, f64> {
        self.b.columns(0, self.ks)
    }

    pub fn common(&self) -> DMatrixView<'_, f64> {
        self.b.columns(self.ks, self.kc())
    }
}

/// Factor blocks of one task: one specific block per view and a single
/// common block, each with all `N` columns (labeled prefix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorBlocks {
    specific: Vec<DMatrix<f64>>,
    common: DMatrix<f64>,
    n_labeled: usize,
}

impl FactorBlocks {
    pub fn new(
        specific: Vec<DMatrix<f64>>,
        common: DMatrix<f64>,
        n_labeled: usize,
    ) -> Result<Self> {
        let n = common.ncols();
        let ks = specific.first().map(|s| s.nrows()).unwrap_or(0);
        if specific.is_empty() || ks == 0 || common.nrows() == 0 {
            return Err(Error::InvalidArgument(
                "factor blocks need Ks >= 1, Kc >= 1 and a view".into(),
            ));
        }
        if specific.iter().any(|s| s.nrows() != ks || s.ncols() != n) {
            return Err(Error::InvalidArgument(
                "specific blocks differ in shape".into(),
            ));
        }
        if n_labeled > n {
            return Err(Error::InvalidArgument(format!(
                "{n_labeled} labeled of {n} columns"
            )));
        }
        for s in &specific {
            crate::dataset::check_nonnegative(s)?;
        }
        crate::dataset::check_nonnegative(&common)?;
        Ok(Self {
            specific,
            common,
            n_labeled,
        })
    }

    pub fn n_views(&self) -> usize {
        self.specific.len()
    }
    pub fn ks(&self) -> usize {
        self.specific[0].nrows()
    }
    pub fn kc(&self) -> usize {
        self.common.nrows()
    }
    pub fn n_total(&self) -> usize {
        self.common.ncols()
    }
    pub fn n_labeled(&self) -> usize {
        self.n_labeled
    }
    pub fn specific(&self, v: usize) -> &DMatrix<f64> {
        &self.specific[v]
    }
    pub fn common(&self) -> &DMatrix<f64> {
        &self.common
    }
    pub fn specific_labeled(&self, v: usize) -> DMatrixView<'_, f64> {
        self.specific[v].columns(0, self.n_labeled)
    }
    pub fn specific_unlabeled(&self, v: usize) -> DMatrixView<'_, f64> {
        self.specific[v].columns(self.n_labeled, self.n_total() - self.n_labeled)
    }
    pub fn common_labeled(&self) -> DMatrixView<'_, f64> {
        self.common.columns(0, self.n_labeled)
    }
    pub fn common_unlabeled(&self) -> DMatrixView<'_, f64> {
        self.common
            .columns(self.n_labeled, self.n_total() - self.n_labeled)
    }

    /// `F_t^v = [F_spec_v; F_common]`, `(Ks + Kc) x N`.
    pub fn view_factor(&self, v: usize) -> DMatrix<f64> {
        let (ks, kc, n) = (self.ks(), self.kc(), self.n_total());
        let mut f = DMatrix::zeros(ks + kc, n);
        f.rows_mut(0, ks).copy_from(&self.specific[v]);
        f.rows_mut(ks, kc).copy_from(&self.common);
        f
    }

    pub fn min_entry(&self) -> f64 {
        self.specific
            .iter()
            .map(|s| s.min())
            .fold(self.common.min(), f64::min)
    }
}

/// Named row range of a [`JointFeatures`] matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowBlock {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

/// Row layout of the joint features of one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMap {
    pub k_joint: usize,
    pub n_total: usize,
    pub n_labeled: usize,
    pub blocks: Vec<RowBlock>,
}

/// `F_t = [F^{1,s}; ...; F^{V,s}; F^c]`, `K_joint x N` with `K_joint = Ks V + Kc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointFeatures {
    f: DMatrix<f64>,
    ks: usize,
    kc: usize,
    n_views: usize,
    n_labeled: usize,
}

impl JointFeatures {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.f
    }
    pub fn k_joint(&self) -> usize {
        self.f.nrows()
    }
    pub fn n_labeled(&self) -> usize {
        self.n_labeled
    }
    pub fn labeled(&self) -> DMatrixView<'_, f64> {
        self.f.columns(0, self.n_labeled)
    }
    pub fn unlabeled(&self) -> DMatrixView<'_, f64> {
        self.f
            .columns(self.n_labeled, self.f.ncols() - self.n_labeled)
    }

    pub fn block_map(&self) -> BlockMap {
        let mut blocks: Vec<RowBlock> = (0..self.n_views)
            .map(|v| RowBlock {
                name: format!("view{}_specific", v + 1),
                start: v * self.ks,
                end: (v + 1) * self.ks,
            })
            .collect();
        blocks.push(RowBlock {
            name: "common".into(),
            start: self.n_views * self.ks,
            end: self.n_views * self.ks + self.kc,
        });
        BlockMap {
            k_joint: self.k_joint(),
            n_total: self.f.ncols(),
            n_labeled: self.n_labeled,
            blocks,
        }
    }

    /// CSV with `K_joint` rows and `N` columns.
    pub fn to_csv(&self) -> Vec<u8> {
        crate::dataset::io::matrix_csv(&self.f)
    }
}

pub fn assemble_joint_features(blocks: &FactorBlocks) -> JointFeatures {
    let (ks, kc, v, n) = (blocks.ks(), blocks.kc(), blocks.n_views(), blocks.n_total());
    let mut f = DMatrix::zeros(ks * v + kc, n);
    for (i, s) in blocks.specific.iter().enumerate() {
        f.rows_mut(i * ks, ks).copy_from(s);
    }
    f.rows_mut(ks * v, kc).copy_from(&blocks.common);
    JointFeatures {
        f,
        ks,
        kc,
        n_views: v,
        n_labeled: blocks.n_labeled,
    }
}

pub fn disassemble_joint_features(joint: &JointFeatures) -> FactorBlocks {
    let ks = joint.ks;
    FactorBlocks {
        specific: (0..joint.n_views)
            .map(|v| joint.f.rows(v * ks, ks).into_owned())
            .collect(),
        common: joint.f.rows(joint.n_views * ks, joint.kc).into_owned(),
        n_labeled: joint.n_labeled,
    }
}

/// `H+` and `H-` over the joint rows and labeled columns.
#[derive(Debug, Clone, PartialEq)]
pub struct HSplit {
    pub plus: DMatrix<f64>,
    pub minus: DMatrix<f64>,
}

/// Splits `H = W W^T F_l - W Y` into nonnegative parts, with `W` replaced by
/// `W_t + W_d` when noise weights are given.
pub fn compute_h_split(
    w_t: &TaskWeights,
    f_l: &DMatrix<f64>,
    y: &DMatrix<f64>,
    wd: Option<&NoiseWeights>,
) -> Result<HSplit> {
    let w = match wd {
        Some(wd) => {
            if wd.wd.shape() != w_t.w.shape() {
                return Err(Error::InvalidArgument(
                    "noise weights differ in shape".into(),
                ));
            }
            &w_t.w + &wd.wd
        }
        None => w_t.w.clone(),
    };
    if w.nrows() != f_l.nrows() || w.ncols() != y.nrows() || f_l.ncols() != y.ncols() {
        return Err(Error::InvalidArgument(format!(
            "weights {}x{}, features {}x{}, labels {}x{} are inconsistent",
            w.nrows(),
            w.ncols(),
            f_l.nrows(),
            f_l.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    let (gp, gn) = pos_neg_split(&(&w * w.transpose()));
    let (wp, wn) = pos_neg_split(&w);
    Ok(HSplit {
        plus: gp * f_l + wn * y,
        minus: gn * f_l + wp * y,
    })
}

/// `B <- B .* (X F^T) ./ (B F F^T + eps)`.
pub fn update_basis(b: &BasisMatrix, x: &DMatrix<f64>, f: &DMatrix<f64>) -> Result<BasisMatrix> {
    if x.nrows() != b.b.nrows() || f.nrows() != b.b.ncols() || x.ncols() != f.ncols() {
        return Err(Error::InvalidArgument(
            "basis, view and factor shapes disagree".into(),
        ));
    }
    let num = x * f.transpose();
    let den = &b.b * (f * f.transpose());
    let mut out = b.b.clone();
    for ((o, n), d) in out.iter_mut().zip(num.iter()).zip(den.iter()) {
        *o *= n / (d + EPS_DEN);
    }
    Ok(BasisMatrix { b: out, ks: b.ks })
}

/// Everything the factor sweep of one task reads.
pub struct FactorSweep<'a> {
    pub bases: &'a [BasisMatrix],
    pub views: &'a [&'a DMatrix<f64>],
    /// View weights of this task.
    pub pi: &'a [f64],
    pub h: Option<&'a HSplit>,
    pub beta: f64,
}

/// Square-root ratio with the denominator guard; `0/0` leaves the entry as is.
fn sq_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        1.0
    } else {
        (num / (den + EPS_DEN)).sqrt()
    }
}

/// Numerators and denominators of every block's ratio, from a snapshot.
pub struct SweepRatios {
    pub specific: Vec<DMatrix<f64>>,
    pub common: DMatrix<f64>,
}

/// Per-entry multiplicative factors of one sweep, computed from `blocks`.
///
/// The supervised part enters as `beta H-` in numerators and `beta H+` in
/// denominators of the labeled columns.
pub fn factor_ratios(sweep: &FactorSweep<'_>, blocks: &FactorBlocks) -> Result<SweepRatios> {
    let nv = blocks.n_views();
    if sweep.bases.len() != nv || sweep.views.len() != nv || sweep.pi.len() != nv {
        return Err(Error::InvalidArgument(format!(
            "sweep has {} bases, {} views and {} weights for {nv} views",
            sweep.bases.len(),
            sweep.views.len(),
            sweep.pi.len()
        )));
    }
    let (ks, kc, n, nl) = (
        blocks.ks(),
        blocks.kc(),
        blocks.n_total(),
        blocks.n_labeled(),
    );
    let k_joint = ks * nv + kc;
    if let Some(h) = sweep.h {
        if h.plus.shape() != (k_joint, nl) || h.minus.shape() != (k_joint, nl) {
            return Err(Error::InvalidArgument("H split has the wrong shape".into()));
        }
    }
    let mut common_num = DMatrix::zeros(kc, n);
    let mut common_den = DMatrix::zeros(kc, n);
    let mut specific = Vec::with_capacity(nv);
    for v in 0..nv {
        let b = sweep.bases[v].matrix();
        let x = sweep.views[v];
        if b.ncols() != ks + kc || x.nrows() != b.nrows() || x.ncols() != n {
            return Err(Error::InvalidArgument(format!("view {v} shapes disagree")));
        }
        let pi = sweep.pi[v];
        let f = blocks.view_factor(v);
        let btx = b.transpose() * x * pi;
        let btbf = b.transpose() * (b * f) * pi;
        let mut num = btx.rows(0, ks).into_owned();
        let mut den = btbf.rows(0, ks).into_owned();
        if let Some(h) = sweep.h {
            let mut nl_num = num.columns_mut(0, nl);
            nl_num += h.minus.rows(v * ks, ks) * sweep.beta;
            let mut nl_den = den.columns_mut(0, nl);
            nl_den += h.plus.rows(v * ks, ks) * sweep.beta;
        }
        specific.push(num.zip_map(&den, sq_ratio));
        common_num += btx.rows(ks, kc);
        common_den += btbf.rows(ks, kc);
    }
    if let Some(h) = sweep.h {
        let mut c = common_num.columns_mut(0, nl);
        c += h.minus.rows(nv * ks, kc) * sweep.beta;
        let mut c = common_den.columns_mut(0, nl);
        c += h.plus.rows(nv * ks, kc) * sweep.beta;
    }
    Ok(SweepRatios {
        specific,
        common: common_num.zip_map(&common_den, sq_ratio),
    })
}

/// One snapshot sweep over the four block families of a task.
pub fn update_factor_blocks(
    sweep: &FactorSweep<'_>,
    blocks: &FactorBlocks,
) -> Result<FactorBlocks> {
    let ratios = factor_ratios(sweep, blocks)?;
    Ok(FactorBlocks {
        specific: blocks
            .specific
            .iter()
            .zip(&ratios.specific)
            .map(|(s, r)| s.component_mul(r))
            .collect(),
        common: blocks.common.component_mul(&ratios.common),
        n_labeled: blocks.n_labeled,
    })
}

/// `sum_v pi_v |X_v - B_v F_v|^2` for one task.
pub fn weighted_reconstruction(
    bases: &[BasisMatrix],
    views: &[&DMatrix<f64>],
    pi: &[f64],
    blocks: &FactorBlocks,
) -> f64 {
    (0..blocks.n_views())
        .map(|v| pi[v] * reconstruction_error(bases[v].matrix(), views[v], &blocks.view_factor(v)))
        .sum()
}

/// `|X - B F|_F^2`.
pub fn reconstruction_error(b: &DMatrix<f64>, x: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
    (x - b * f).norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random::<f64>())
    }

    fn signed(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    fn one_hot(rng: &mut ChaCha8Rng, c: usize, n: usize) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(c, n);
        for j in 0..n {
            y[(rng.random_range(0..c), j)] = 1.0;
        }
        y
    }

    fn blocks(
        rng: &mut ChaCha8Rng,
        nv: usize,
        ks: usize,
        kc: usize,
        n: usize,
        nl: usize,
    ) -> FactorBlocks {
        let specific = (0..nv).map(|_| uniform(rng, ks, n)).collect();
        FactorBlocks::new(specific, uniform(rng, kc, n), nl).unwrap()
    }

    #[test]
    fn joint_layout_small() {
        let b = FactorBlocks::new(
            vec![
                DMatrix::from_element(1, 4, 1.0),
                DMatrix::from_element(1, 4, 2.0),
            ],
            DMatrix::from_element(1, 4, 3.0),
            2,
        )
        .unwrap();
        let j = assemble_joint_features(&b);
        assert_eq!(j.k_joint(), 3);
        assert_eq!(j.matrix().column(0).as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(j.labeled().ncols(), 2);
        assert_eq!(j.unlabeled().ncols(), 2);
        let map = j.block_map();
        let names: Vec<_> = map.blocks.iter().map(|b| b.name.as_str()).collect();
        assert_eq!(names, ["view1_specific", "view2_specific", "common"]);
        assert_eq!((map.blocks[2].start, map.blocks[2].end), (2, 3));
    }

    #[test]
    fn joint_width_for_five_views() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = blocks(&mut rng, 5, 30, 20, 6, 2);
        assert_eq!(assemble_joint_features(&b).k_joint(), 30 * 5 + 20);
    }

    #[test]
    fn disassemble_inverts_assemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = blocks(&mut rng, 3, 2, 4, 7, 3);
        assert_eq!(disassemble_joint_features(&assemble_joint_features(&b)), b);
    }

    #[test]
    fn view_factor_shares_common_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = blocks(&mut rng, 3, 2, 2, 5, 2);
        for v in 0..3 {
            assert_eq!(b.view_factor(v).rows(2, 2), b.common().rows(0, 2));
        }
    }

    #[test]
    fn h_split_of_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = uniform(&mut rng, 4, 5);
        let y = one_hot(&mut rng, 3, 5);
        let h = compute_h_split(&TaskWeights::zeros(4, 3), &f, &y, None).unwrap();
        assert_eq!(h.plus.amax() + h.minus.amax(), 0.0);
    }

    #[test]
    fn h_split_reproduces_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = uniform(&mut rng, 6, 8);
        let y = one_hot(&mut rng, 3, 8);
        let w = TaskWeights {
            w: signed(&mut rng, 6, 3),
        };
        let wd = NoiseWeights {
            wd: signed(&mut rng, 6, 3),
            irls_eps: 1e-8,
        };
        let h = compute_h_split(&w, &f, &y, None).unwrap();
        let direct = &w.w * w.w.transpose() * &f - &w.w * &y;
        assert!((&h.plus - &h.minus - direct).amax() < 1e-12);
        assert!(h.plus.min() >= 0.0 && h.minus.min() >= 0.0);

        let h = compute_h_split(&w, &f, &y, Some(&wd)).unwrap();
        let wt = &w.w + &wd.wd;
        let direct = &wt * wt.transpose() * &f - &wt * &y;
        assert!((&h.plus - &h.minus - direct).amax() < 1e-12);
    }

    #[test]
    fn h_split_noise_free_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = uniform(&mut rng, 5, 6);
        let y = one_hot(&mut rng, 2, 6);
        let w = TaskWeights {
            w: signed(&mut rng, 5, 2),
        };
        let a = compute_h_split(&w, &f, &y, None).unwrap();
        let b = compute_h_split(&w, &f, &y, Some(&NoiseWeights::zeros(5, 2))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn basis_fixed_point_and_zeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut bm = uniform(&mut rng, 4, 3);
        bm[(1, 2)] = 0.0;
        let b = BasisMatrix::new(bm, 1).unwrap();
        let f = uniform(&mut rng, 3, 6);
        let x = b.matrix() * &f;
        let nb = update_basis(&b, &x, &f).unwrap();
        assert!((nb.matrix() - b.matrix()).amax() < 1e-10);
        assert_eq!(nb.matrix()[(1, 2)], 0.0);
    }

    #[test]
    fn basis_updates_descend() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = uniform(&mut rng, 4, 6);
        let f = uniform(&mut rng, 3, 6);
        let mut b = BasisMatrix::new(uniform(&mut rng, 4, 3), 2).unwrap();
        let mut last = reconstruction_error(b.matrix(), &x, &f);
        for _ in 0..100 {
            b = update_basis(&b, &x, &f).unwrap();
            let e = reconstruction_error(b.matrix(), &x, &f);
            assert!(e <= last + 1e-12);
            last = e;
        }
        assert!(b.matrix().min() >= 0.0);
    }

    #[test]
    fn factor_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let fb = blocks(&mut rng, 2, 1, 1, 6, 3);
        let bases: Vec<_> = (0..2)
            .map(|_| BasisMatrix::new(uniform(&mut rng, 4, 2), 1).unwrap())
            .collect();
        let xs: Vec<_> = (0..2)
            .map(|v| bases[v].matrix() * fb.view_factor(v))
            .collect();
        let views: Vec<_> = xs.iter().collect();
        let h = HSplit {
            plus: DMatrix::from_element(3, 3, 0.7),
            minus: DMatrix::from_element(3, 3, 0.7),
        };
        let sweep = FactorSweep {
            bases: &bases,
            views: &views,
            pi: &[0.5, 0.5],
            h: Some(&h),
            beta: 0.3,
        };
        let next = update_factor_blocks(&sweep, &fb).unwrap();
        for v in 0..2 {
            assert!((next.specific(v) - fb.specific(v)).amax() < 1e-10);
        }
        assert!((next.common() - fb.common()).amax() < 1e-10);
    }

    #[test]
    fn zero_beta_treats_labeled_like_unlabeled() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fb = blocks(&mut rng, 2, 2, 1, 5, 5);
        let bases: Vec<_> = (0..2)
            .map(|_| BasisMatrix::new(uniform(&mut rng, 4, 3), 2).unwrap())
            .collect();
        let xs: Vec<_> = (0..2).map(|_| uniform(&mut rng, 4, 5)).collect();
        let views: Vec<_> = xs.iter().collect();
        let h = HSplit {
            plus: uniform(&mut rng, 5, 5),
            minus: uniform(&mut rng, 5, 5),
        };
        let with_h = FactorSweep {
            bases: &bases,
            views: &views,
            pi: &[0.4, 0.6],
            h: Some(&h),
            beta: 0.0,
        };
        let without = FactorSweep { h: None, ..with_h };
        let without = FactorSweep {
            beta: 0.0,
            ..without
        };
        assert_eq!(
            update_factor_blocks(&with_h, &fb).unwrap(),
            update_factor_blocks(&without, &fb).unwrap()
        );
    }

    #[test]
    fn zero_view_weight_keeps_unlabeled_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let fb = blocks(&mut rng, 2, 1, 1, 4, 2);
        let bases: Vec<_> = (0..2)
            .map(|_| BasisMatrix::new(uniform(&mut rng, 3, 2), 1).unwrap())
            .collect();
        let xs: Vec<_> = (0..2).map(|_| uniform(&mut rng, 3, 4)).collect();
        let views: Vec<_> = xs.iter().collect();
        let sweep = FactorSweep {
            bases: &bases,
            views: &views,
            pi: &[1.0, 0.0],
            h: None,
            beta: 0.0,
        };
        let next = update_factor_blocks(&sweep, &fb).unwrap();
        assert_eq!(next.specific(1), fb.specific(1));
        assert!(next.min_entry() >= 0.0);
    }

    /// Full objective of the two-view unit, evaluated term by term.
    fn unit_objective(
        bases: &[BasisMatrix],
        views: &[&DMatrix<f64>],
        pi: &[f64],
        fb: &FactorBlocks,
        w: &DMatrix<f64>,
        y: &DMatrix<f64>,
        beta: f64,
    ) -> f64 {
        let mut total = 0.0;
        for v in 0..views.len() {
            let f = fb.view_factor(v);
            let r = views[v] - bases[v].matrix() * f;
            total += pi[v] * r.iter().map(|e| e * e).sum::<f64>();
        }
        let j = assemble_joint_features(fb);
        let p = y - w.transpose() * j.labeled();
        total + beta * p.iter().map(|e| e * e).sum::<f64>()
    }

    #[test]
    fn sweeps_descend_on_small_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (m, n, nl, ks, kc, beta) = (4, 6, 3, 1, 1, 0.1);
        let mut fb = blocks(&mut rng, 2, ks, kc, n, nl);
        let mut bases: Vec<_> = (0..2)
            .map(|_| BasisMatrix::new(uniform(&mut rng, m, ks + kc), ks).unwrap())
            .collect();
        let xs: Vec<_> = (0..2).map(|_| uniform(&mut rng, m, n)).collect();
        let views: Vec<_> = xs.iter().collect();
        let y = one_hot(&mut rng, 2, nl);
        let w = TaskWeights {
            w: signed(&mut rng, 3, 2) * 0.5,
        };
        let pi = [0.5, 0.5];
        let mut last = unit_objective(&bases, &views, &pi, &fb, &w.w, &y, beta);
        for _ in 0..50 {
            for v in 0..2 {
                bases[v] = update_basis(&bases[v], views[v], &fb.view_factor(v)).unwrap();
            }
            let after_b = unit_objective(&bases, &views, &pi, &fb, &w.w, &y, beta);
            assert!(after_b <= last * (1.0 + 1e-9));
            let j = assemble_joint_features(&fb);
            let h = compute_h_split(&w, &j.labeled().into_owned(), &y, None).unwrap();
            let sweep = FactorSweep {
                bases: &bases,
                views: &views,
                pi: &pi,
                h: Some(&h),
                beta,
            };
            fb = update_factor_blocks(&sweep, &fb).unwrap();
            let after_f = unit_objective(&bases, &views, &pi, &fb, &w.w, &y, beta);
            assert!(after_f <= after_b * (1.0 + 1e-9), "{after_b} -> {after_f}");
            assert!(fb.min_entry() >= 0.0);
            last = after_f;
        }
    }

    #[test]
    fn block_map_and_csv_export() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let j = assemble_joint_features(&blocks(&mut rng, 2, 2, 3, 4, 1));
        let csv = String::from_utf8(j.to_csv()).unwrap();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.lines().all(|l| l.split(',').count() == 4));
        let json = serde_json::to_string(&j.block_map()).unwrap();
        let back: BlockMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, j.block_map());
    }

    #[test]
    fn shape_errors() {
        assert!(BasisMatrix::new(DMatrix::from_element(3, 2, 1.0), 2).is_err());
        assert!(BasisMatrix::new(DMatrix::from_element(3, 2, -1.0), 1).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = uniform(&mut rng, 4, 5);
        let y = one_hot(&mut rng, 3, 4);
        assert!(compute_h_split(&TaskWeights::zeros(4, 3), &f, &y, None).is_err());
    }
}
