//! Generalized symmetric eigenvalue tools: dense reductions for small
//! problems and a shift-invert Lanczos iteration for the smallest eigenvalue
//! of a definite pencil.

use nalgebra::{DMatrix, DVector};

use super::factor::Factor;
use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Largest system accepted by the dense stability computation.
pub const STABILITY_SIZE_LIMIT: usize = 3000;

/// Eigenvalues of `A x = λ B x` for symmetric `A` and SPD `B`, ascending.
pub fn dense_generalized_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DVector<f64>> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Coercivity("metric matrix of the eigenproblem is not positive definite".into()))?;
    let l = chol.l();
    let n = a.nrows();
    let linv = l
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::Singular { cause: "triangular factor is singular".into() })?;
    let mut m = &linv * a * linv.transpose();
    // Symmetrize away rounding before the symmetric solver.
    let mt = m.transpose();
    m = (m + mt) * 0.5;
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(DVector::from_vec(ev))
}

/// Number of generalized eigenvalues with `|λ| < tolerance`.
pub fn kernel_dimension(a: &DMatrix<f64>, b: &DMatrix<f64>, tolerance: f64) -> Result<usize> {
    Ok(dense_generalized_eigenvalues(a, b)?.iter().filter(|l| l.abs() < tolerance).count())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    pub max_steps: usize,
    pub tolerance: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { max_steps: 150, tolerance: 1e-12 }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smallest eigenvalue of `A x = λ G x` with both matrices SPD. Runs Lanczos
/// on `A⁻¹ G` in the `G` inner product with full reorthogonalization and
/// returns the reciprocal of the largest Ritz value. Fails with
/// [`Error::Coercivity`] when `A` cannot be Cholesky-factored.
pub fn lanczos_min_generalized(a: &CsrMatrix, g: &CsrMatrix, options: LanczosOptions) -> Result<f64> {
    let n = a.nrows;
    let fa = Factor::sparse_cholesky(a)?;
    // Deterministic start vector with components in every direction.
    let mut q: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    let mut gq = g.matvec(&q);
    let s = dot(&q, &gq).sqrt();
    q.iter_mut().for_each(|x| *x /= s);
    gq.iter_mut().for_each(|x| *x /= s);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut gbasis: Vec<Vec<f64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut previous = f64::NAN;
    let steps = options.max_steps.min(n);
    for j in 0..steps {
        let mut w = fa.solve(&gq);
        basis.push(q.clone());
        gbasis.push(gq.clone());
        alpha.push(dot(&w, &gq));
        for _ in 0..2 {
            for (b, gb) in basis.iter().zip(&gbasis) {
                let c = dot(&w, gb);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let t = DMatrix::from_fn(j + 1, j + 1, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let theta = t.symmetric_eigenvalues().max();
        let gw = g.matvec(&w);
        let b = dot(&w, &gw).max(0.0).sqrt();
        let converged = ((theta - previous) / theta).abs() < options.tolerance;
        if converged || b <= 1e-14 * theta || j + 1 == steps {
            if !(theta > 0.0) {
                return Err(Error::Coercivity("Lanczos produced a non-positive Ritz value".into()));
            }
            return Ok(1.0 / theta);
        }
        previous = theta;
        beta.push(b);
        q = w.into_iter().map(|x| x / b).collect();
        gq = gw.into_iter().map(|x| x / b).collect();
    }
    Err(Error::Coercivity("Lanczos did not run".into()))
}

/// `|q| = √(qᵀ B G⁻¹ Bᵀ q)`, the Riesz realization of the weak stress seminorm.
pub fn weak_seminorm(q: &[f64], b: &CsrMatrix, g_h: &CsrMatrix) -> Result<f64> {
    let f = Factor::sparse_cholesky(g_h)
        .map_err(|_| Error::Config("the H Gram matrix is singular; the weak seminorm is undefined".into()))?;
    let y = b.tr_matvec(q);
    let z = f.solve(&y);
    Ok(dot(&y, &z).max(0.0).sqrt())
}

/// Smallest singular value of the saddle operator measured in the norm
/// `‖v‖²_H + |q|²_weak + ε²‖q‖²_V`, computed densely.
pub fn stability_constant(system: &AssembledSystem, g_h: &CsrMatrix, g_v: &CsrMatrix) -> Result<f64> {
    let nh = system.a.nrows;
    let nv = system.c.nrows;
    let n = nh + nv;
    if n > STABILITY_SIZE_LIMIT {
        return Err(Error::SizeGuard { dofs: n, limit: STABILITY_SIZE_LIMIT });
    }
    let m = super::saddle_matrix(&system.a, &system.b, &system.c, system.epsilon).to_dense();
    let gh = g_h.to_dense();
    let bd = system.b.to_dense();
    let chol =
        gh.clone().cholesky().ok_or_else(|| Error::Config("the H Gram matrix is not positive definite".into()))?;
    let schur = &bd * chol.solve(&bd.transpose());
    let e2 = system.epsilon * system.epsilon;
    let mut metric = DMatrix::zeros(n, n);
    metric.view_mut((0, 0), (nh, nh)).copy_from(&gh);
    let lower = schur + g_v.to_dense() * e2;
    metric.view_mut((nh, nh), (nv, nv)).copy_from(&((&lower + lower.transpose()) * 0.5));
    let ev = dense_generalized_eigenvalues(&m, &metric)?;
    Ok(ev.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min))
}
