//! Solution of the symmetric indefinite saddle-point system and the
//! eigenvalue diagnostics built on the same factorizations.

pub mod eigen;
pub mod factor;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub use eigen::{
    dense_generalized_eigenvalues, kernel_dimension, lanczos_min_generalized, stability_constant, weak_seminorm,
};
pub use factor::Factor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative block residual required of the solution.
    pub tolerance: f64,
    /// Systems up to this many unknowns use the dense factorization.
    pub dense_limit: usize,
    pub max_refinements: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tolerance: 1e-10, dense_limit: 2000, max_refinements: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorMethod {
    DenseSymmetric,
    SparseLu,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorStats {
    pub method: FactorMethod,
    pub unknowns: usize,
    pub nonzeros: usize,
    pub refinements: usize,
    /// Estimate of `‖K‖ ‖K⁻¹‖` from one seeded inverse-iteration step.
    pub condition_estimate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleSolution {
    pub h: Vec<f64>,
    pub v: Vec<f64>,
    /// Relative residual of the first block equation.
    pub residual_h: f64,
    /// Relative residual of the second block equation.
    pub residual_v: f64,
    pub stats: FactorStats,
}

impl SaddleSolution {
    pub fn residual(&self) -> f64 {
        self.residual_h.max(self.residual_v)
    }
}

/// The full matrix `[A Bᵀ; B −ε²C]`.
pub fn saddle_matrix(a: &CsrMatrix, b: &CsrMatrix, c: &CsrMatrix, epsilon: f64) -> CsrMatrix {
    let nh = a.nrows;
    let nv = c.nrows;
    let bt = b.transpose();
    let e2 = epsilon * epsilon;
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(nh + nv);
    for i in 0..nh {
        let mut r: Vec<(usize, f64)> = (a.indptr[i]..a.indptr[i + 1]).map(|p| (a.indices[p], a.values[p])).collect();
        r.extend((bt.indptr[i]..bt.indptr[i + 1]).map(|p| (nh + bt.indices[p], bt.values[p])));
        rows.push(r);
    }
    for i in 0..nv {
        let mut r: Vec<(usize, f64)> = (b.indptr[i]..b.indptr[i + 1]).map(|p| (b.indices[p], b.values[p])).collect();
        r.extend((c.indptr[i]..c.indptr[i + 1]).map(|p| (nh + c.indices[p], -e2 * c.values[p])));
        rows.push(r);
    }
    let pattern: Vec<Vec<usize>> = rows.iter().map(|r| r.iter().map(|e| e.0).collect()).collect();
    let mut k = CsrMatrix::from_pattern(nh + nv, &pattern);
    k.values = rows.into_iter().flatten().map(|e| e.1).collect();
    k
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Residuals of both block equations relative to the combined size of all
/// terms of the system, so a block whose data vanishes is not measured
/// against round-off alone.
pub fn block_residuals(system: &AssembledSystem, h: &[f64], v: &[f64]) -> (f64, f64) {
    let ax = system.a.matvec(h);
    let btp = system.b.tr_matvec(v);
    let r1: Vec<f64> = (0..h.len()).map(|i| system.f[i] - ax[i] - btp[i]).collect();
    let bx = system.b.matvec(h);
    let e2 = system.epsilon * system.epsilon;
    let cp: Vec<f64> = system.c.matvec(v).into_iter().map(|x| e2 * x).collect();
    let r2: Vec<f64> = (0..v.len()).map(|i| system.g[i] - bx[i] + cp[i]).collect();
    let scale = norm(&system.f) + norm(&ax) + norm(&btp) + norm(&system.g) + norm(&bx) + norm(&cp);
    let rel = |r: &[f64]| if scale > 0.0 { norm(r) / scale } else { norm(r) };
    (rel(&r1), rel(&r2))
}

fn inf_norm(m: &CsrMatrix) -> f64 {
    (0..m.nrows)
        .map(|i| m.values[m.indptr[i]..m.indptr[i + 1]].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Condition numbers beyond this are treated as a singular system.
const SINGULAR_CONDITION: f64 = 1e14;

pub fn solve(system: &AssembledSystem) -> Result<SaddleSolution> {
    solve_with(system, &SolverOptions::default())
}

pub fn solve_with(system: &AssembledSystem, options: &SolverOptions) -> Result<SaddleSolution> {
    if !(system.epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {}", system.epsilon)));
    }
    let nh = system.a.nrows;
    let nv = system.c.nrows;
    if system.b.nrows != nv || system.b.ncols != nh || system.f.len() != nh || system.g.len() != nv {
        return Err(Error::Config("mismatched block sizes in the assembled system".into()));
    }
    let k = saddle_matrix(&system.a, &system.b, &system.c, system.epsilon);
    let n = nh + nv;
    let (factor, method) = if n <= options.dense_limit {
        (Factor::dense_symmetric(&k.to_dense()), FactorMethod::DenseSymmetric)
    } else {
        (Factor::sparse_lu(&k)?, FactorMethod::SparseLu)
    };

    // One step of inverse iteration from a seeded vector estimates ‖K⁻¹‖ and
    // exposes rank deficiency that a pivoted factorization would hide.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let probe: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y = factor.solve(&probe);
    let condition_estimate = inf_norm(&k) * norm(&y) / norm(&probe);
    if !condition_estimate.is_finite() || condition_estimate > SINGULAR_CONDITION {
        return Err(Error::Singular {
            cause: format!(
                "condition estimate {condition_estimate:.3e}; probable causes: rigid motions not \
                 restrained (no clamped or soft-support edges) or penalty constant too small"
            ),
        });
    }

    let rhs: Vec<f64> = system.f.iter().chain(&system.g).copied().collect();
    let mut x = factor.solve(&rhs);
    let mut refinements = 0;
    let split = |x: &[f64]| (x[..nh].to_vec(), x[nh..].to_vec());
    let (mut h, mut v) = split(&x);
    let (mut r1, mut r2) = block_residuals(system, &h, &v);
    while r1.max(r2) > options.tolerance && refinements < options.max_refinements {
        let kx = k.matvec(&x);
        let r: Vec<f64> = rhs.iter().zip(&kx).map(|(a, b)| a - b).collect();
        let dx = factor.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
        refinements += 1;
        (h, v) = split(&x);
        (r1, r2) = block_residuals(system, &h, &v);
    }
    let residual = r1.max(r2);
    if !residual.is_finite() {
        return Err(Error::Singular { cause: "factorization produced non-finite values".into() });
    }
    if residual > options.tolerance {
        return Err(Error::Residual { residual, tolerance: options.tolerance });
    }
    let stats = FactorStats { method, unknowns: n, nonzeros: k.nnz(), refinements, condition_estimate };
    Ok(SaddleSolution { h, v, residual_h: r1, residual_v: r2, stats })
}

/// Solves `K x = rhs` for a symmetric positive definite sparse `K`.
pub fn solve_spd(k: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let f = Factor::sparse_cholesky(k)?;
    Ok(f.solve(rhs))
}
