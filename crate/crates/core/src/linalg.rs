//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Absolute tolerance on symmetry, scaled by the largest entry.
const SYMMETRY_TOL: f64 = 1e-10;
/// Eigenvalues between `-NEG_EIG_TOL * scale` and 0 are clamped to 0.
const NEG_EIG_TOL: f64 = 1e-10;

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    let asym = max_asymmetry(m);
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Principal square root of a symmetric positive semidefinite matrix.
pub fn matrix_sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(m)?;
    let eig = SymmetricEigen::new(symmetrize(m));
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut roots = eig.eigenvalues.clone();
    for l in roots.iter_mut() {
        if *l < -NEG_EIG_TOL * scale {
            return Err(Error::Indefinite(*l));
        }
        *l = l.max(0.0).sqrt();
    }
    let q = &eig.eigenvectors;
    let s = q * DMatrix::from_diagonal(&roots) * q.transpose();
    Ok(symmetrize(&s))
}

/// Solves `a x = b` for symmetric positive definite `a`.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match a.clone().cholesky() {
        Some(ch) => Ok(ch.solve(b)),
        None => Err(Error::Singular {
            condition: condition_estimate(a),
        }),
    }
}

/// Ratio of extreme absolute eigenvalues of the symmetric part.
pub fn condition_estimate(a: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(symmetrize(a));
    let abs: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
    let hi = abs.iter().cloned().fold(0.0, f64::max);
    let lo = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Inverse of a symmetric positive definite matrix.
pub fn inverse_spd(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = solve_spd(a, &DMatrix::identity(a.nrows(), a.ncols()))?;
    Ok(symmetrize(&inv))
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(m)).eigenvalues.min()
}

/// `(|M| + M) / 2` and `(|M| - M) / 2`.
pub fn pos_neg_split(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let pos = m.map(|x| (x.abs() + x) / 2.0);
    let neg = m.map(|x| (x.abs() - x) / 2.0);
    (pos, neg)
}

/// Sum of row-wise Euclidean norms.
pub fn l21_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.norm()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn sqrt_of_identity() {
        let s = matrix_sqrt_psd(&DMatrix::identity(4, 4)).unwrap();
        assert!((s - DMatrix::<f64>::identity(4, 4)).amax() < 1e-14);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![9.0, 16.0]));
        let s = matrix_sqrt_psd(&m).unwrap();
        assert!((s[(0, 0)] - 3.0).abs() < 1e-14);
        assert!((s[(1, 1)] - 4.0).abs() < 1e-14);
        assert!(s[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn sqrt_multiplies_back() {
        for seed in 0..10 {
            let a = random(7, 5, seed);
            let m = a.transpose() * &a;
            let s = matrix_sqrt_psd(&m).unwrap();
            let err = (&s * &s - &m).norm() / m.norm();
            assert!(err < 1e-8, "seed {seed}: {err}");
        }
    }

    #[test]
    fn sqrt_rejects_bad_input() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            matrix_sqrt_psd(&asym),
            Err(Error::NotSymmetric(_))
        ));
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(matrix_sqrt_psd(&indef), Err(Error::Indefinite(_))));
        let tiny = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-12]);
        let s = matrix_sqrt_psd(&tiny).unwrap();
        assert_eq!(s[(1, 1)], 0.0);
    }

    #[test]
    fn pos_neg_example() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.0, 3.0]);
        let (p, n) = pos_neg_split(&m);
        assert_eq!(p, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]));
        assert_eq!(n, DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]));
        let (p, n) = pos_neg_split(&DMatrix::zeros(3, 2));
        assert_eq!(p.amax() + n.amax(), 0.0);
    }

    #[test]
    fn pos_neg_recombines() {
        let m = random(6, 4, 3);
        let (p, n) = pos_neg_split(&m);
        assert_eq!(&p - &n, m);
        assert!(p.min() >= 0.0 && n.min() >= 0.0);
    }

    #[test]
    fn l21_of_example() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 4.0, 0.0, 0.0]);
        assert_eq!(l21_norm(&m), 5.0);
    }

    #[test]
    fn singular_system_reports_condition() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        match solve_spd(&a, &DMatrix::identity(2, 2)) {
            Err(Error::Singular { condition }) => assert!(condition > 1e10),
            other => panic!("expected singular, got {other:?}"),
        }
    }
}
