//! Thin wrappers over dense and sparse factorizations.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Factorization of a square matrix, solving for single right-hand sides.
pub enum Factor {
    /// Dense symmetric-indefinite `L B Lᵀ` with Bunch-Kaufman pivoting.
    DenseSymmetric(faer::linalg::solvers::Lblt<f64>),
    /// Sparse LU with partial pivoting and a fill-reducing column ordering.
    SparseLu(faer::sparse::linalg::solvers::Lu<usize, f64>),
    /// Sparse Cholesky.
    SparseCholesky(faer::sparse::linalg::solvers::Llt<usize, f64>),
}

fn to_faer_sparse(m: &CsrMatrix, lower_only: bool) -> Result<SparseColMat<usize, f64>> {
    let triplets: Vec<Triplet<usize, usize, f64>> =
        m.iter().filter(|&(i, j, _)| !lower_only || i >= j).map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    SparseColMat::try_new_from_triplets(m.nrows, m.ncols, &triplets)
        .map_err(|e| Error::Singular { cause: format!("sparse matrix construction failed: {e:?}") })
}

pub fn to_faer_dense(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

impl Factor {
    pub fn dense_symmetric(m: &DMatrix<f64>) -> Factor {
        Factor::DenseSymmetric(to_faer_dense(m).lblt(Side::Lower))
    }

    pub fn sparse_lu(m: &CsrMatrix) -> Result<Factor> {
        let a = to_faer_sparse(m, false)?;
        a.sp_lu().map(Factor::SparseLu).map_err(|e| Error::Singular { cause: format!("sparse LU failed: {e:?}") })
    }

    /// Fails with [`Error::Coercivity`] when the matrix is not numerically positive definite.
    pub fn sparse_cholesky(m: &CsrMatrix) -> Result<Factor> {
        let a = to_faer_sparse(m, true)?;
        a.sp_cholesky(Side::Lower)
            .map(Factor::SparseCholesky)
            .map_err(|e| Error::Coercivity(format!("Cholesky factorization failed: {e:?}")))
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        match self {
            Factor::DenseSymmetric(f) => f.solve_in_place(x.as_mut()),
            Factor::SparseLu(f) => f.solve_in_place(x.as_mut()),
            Factor::SparseCholesky(f) => f.solve_in_place(x.as_mut()),
        }
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 2.0)],
        )
    }

    #[test]
    fn factorizations_agree() {
        let m = sample();
        let b = [1.0, -2.0, 0.5];
        let dense = Factor::dense_symmetric(&m.to_dense()).solve(&b);
        for f in [Factor::sparse_lu(&m).unwrap(), Factor::sparse_cholesky(&m).unwrap()] {
            let x = f.solve(&b);
            for (p, q) in x.iter().zip(&dense) {
                assert!((p - q).abs() < 1e-14);
            }
        }
        let r = m.matvec(&dense);
        for (p, q) in r.iter().zip(&b) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn indefinite_matrix_fails_cholesky() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(Factor::sparse_cholesky(&m), Err(Error::Coercivity(_))));
        let x = Factor::dense_symmetric(&m.to_dense()).solve(&[3.0, 3.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }
}
