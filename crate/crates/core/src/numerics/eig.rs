//! Dense symmetric eigen-solver wrapper with symmetry and residual checks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("symmetry defect {defect:e} exceeds tolerance")]
    Asymmetric { defect: f64 },
    #[error("eigenpair residual {residual:e} exceeds 1e-8 ||A||")]
    Residual { residual: f64 },
}

/// Relative symmetry defect max|A − Aᵀ| / max|A|.
pub fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let mut d: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..i {
            d = d.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    d / scale
}

/// Eigenpairs of a symmetric (typically banded) matrix, ascending.
pub fn eig_banded_symmetric(a: &DMatrix<f64>) -> Result<Vec<(f64, DVector<f64>)>, EigError> {
    if a.nrows() != a.ncols() {
        return Err(EigError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    let defect = symmetry_defect(a);
    if defect > 1e-12 {
        return Err(EigError::Asymmetric { defect });
    }
    let sym = (a + a.transpose()) * 0.5;
    let norm = sym.norm();
    let eig = SymmetricEigen::new(sym.clone());
    let mut pairs: Vec<(f64, DVector<f64>)> =
        eig.eigenvalues.iter().enumerate().map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned())).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (l, v) in &pairs {
        let residual = (&sym * v - v * *l).norm();
        if residual > 1e-8 * norm.max(f64::MIN_POSITIVE) {
            return Err(EigError::Residual { residual });
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        let e = eig_banded_symmetric(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(e.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1.0, 1.0]);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = eig_banded_symmetric(&d).unwrap();
        let vals: Vec<f64> = e.iter().map(|p| p.0).collect();
        assert!(vals.iter().zip([1.0, 2.0, 3.0]).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn tridiagonal_closed_form() {
        let a = DMatrix::from_fn(4, 4, |i, j| match i.abs_diff(j) {
            0 => -2.0,
            1 => 1.0,
            _ => 0.0,
        });
        let e = eig_banded_symmetric(&a).unwrap();
        let mut exact: Vec<f64> =
            (1..=4).map(|k| -2.0 + 2.0 * (k as f64 * std::f64::consts::PI / 5.0).cos()).collect();
        exact.sort_by(f64::total_cmp);
        for (p, x) in e.iter().zip(exact) {
            assert!((p.0 - x).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(eig_banded_symmetric(&a), Err(EigError::Asymmetric { .. })));
    }
}
