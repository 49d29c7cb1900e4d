//! Korn, coercivity and continuity diagnostics on an assembled discretization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_a, assemble_b, assemble_norm_grams, Discretization, NormGrams};
use crate::error::{Error, Result};
use crate::solver::eigen::{dense_generalized_eigenvalues, lanczos_min_generalized, LanczosOptions};
use crate::solver::Factor;
use crate::sparse::CsrMatrix;

/// Above this many H unknowns the Korn constant uses Lanczos instead of a dense eigensolve.
pub const DENSE_EIGEN_LIMIT: usize = 1200;

/// Tolerance on generalized eigenvalues counted as kernel.
pub const KERNEL_TOLERANCE: f64 = 1e-8;

/// Smallest eigenvalue of the strain Gram matrix relative to the broken H¹ Gram matrix.
pub fn korn_constant(d: &Discretization) -> Result<f64> {
    let g = assemble_norm_grams(d);
    korn_from_grams(&g)
}

pub fn korn_from_grams(g: &NormGrams) -> Result<f64> {
    if g.h.nrows <= DENSE_EIGEN_LIMIT {
        let ev = dense_generalized_eigenvalues(&g.a.to_dense(), &g.h.to_dense())?;
        return Ok(ev[0].max(0.0));
    }
    match lanczos_min_generalized(&g.a, &g.h, LanczosOptions::default()) {
        Ok(l) => Ok(l),
        // The strain Gram matrix is singular: rigid motions are not restrained.
        Err(Error::Coercivity(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Dimension of the kernel of the strain Gram matrix; small meshes only.
pub fn strain_kernel_dimension(d: &Discretization) -> Result<usize> {
    if d.n_h() > DENSE_EIGEN_LIMIT * 2 {
        return Err(Error::SizeGuard { dofs: d.n_h(), limit: DENSE_EIGEN_LIMIT * 2 });
    }
    let g = assemble_norm_grams(d);
    let ev = dense_generalized_eigenvalues(&g.a.to_dense(), &g.h.to_dense())?;
    Ok(ev.iter().filter(|l| l.abs() < KERNEL_TOLERANCE).count())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoercivityProbe {
    pub passed: bool,
    /// `λ_min(A, G_H)` when the problem is small enough for a dense solve.
    pub min_eigenvalue: Option<f64>,
    pub penalty: f64,
}

/// Checks that the a-form is nonnegative relative to the broken H¹ norm.
/// A Cholesky factorization of `A + s G_H` with a tiny shift `s` must succeed;
/// small problems also report the dense smallest eigenvalue.
pub fn coercivity_probe(d: &Discretization, penalty: f64) -> Result<CoercivityProbe> {
    let a = assemble_a(d, penalty)?;
    let g = assemble_norm_grams(d);
    probe_matrices(&a, &g.h, penalty)
}

pub fn probe_matrices(a: &CsrMatrix, g_h: &CsrMatrix, penalty: f64) -> Result<CoercivityProbe> {
    let diag_max = |m: &CsrMatrix| (0..m.nrows).map(|i| m.get(i, i).abs()).fold(0.0, f64::max);
    let shift = 1e-10 * diag_max(a) / diag_max(g_h);
    let shifted = combine_same_rows(a, g_h, shift);
    let factored = Factor::sparse_cholesky(&shifted).is_ok();
    let min_eigenvalue = if a.nrows <= DENSE_EIGEN_LIMIT {
        Some(dense_generalized_eigenvalues(&a.to_dense(), &g_h.to_dense())?[0])
    } else {
        None
    };
    let passed = factored && min_eigenvalue.is_none_or(|l| l > -1e-9);
    if !passed {
        log::warn!(
            "coercivity probe failed for penalty {penalty:e}; increase the penalty constant (default 10(3λ+2μ))"
        );
    }
    Ok(CoercivityProbe { passed, min_eigenvalue, penalty })
}

/// `a + s g`, the pattern of `g` being contained in that of `a`.
fn combine_same_rows(a: &CsrMatrix, g: &CsrMatrix, s: f64) -> CsrMatrix {
    let mut out = a.clone();
    for (i, j, v) in g.iter() {
        out.add(i, j, s * v);
    }
    out
}

/// Largest sampled `|b(q; X)| / (‖X‖_H ‖q‖_V)` over seeded random coefficient vectors.
pub fn b_continuity_ratio(d: &Discretization, samples: usize, seed: u64) -> f64 {
    let b = assemble_b(d);
    let g = assemble_norm_grams(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..d.n_h()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let q: Vec<f64> = (0..d.n_v()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let num = b.bilinear(&q, &x).abs();
        let den = g.h.bilinear(&x, &x).sqrt() * g.v.bilinear(&q, &q).sqrt();
        worst = worst.max(num / den);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;
    use crate::material::ElasticModuli;
    use crate::mesh::{BoundaryKind, Mesh, Rect, SideLabels};

    fn disc(n: usize, labels: SideLabels, chart: Chart) -> Discretization {
        let mesh = Mesh::structured(Rect::default(), n, labels).unwrap();
        Discretization::new(mesh, chart, ElasticModuli::default(), 2).unwrap()
    }

    #[test]
    fn free_flat_plate_has_six_rigid_motions() {
        let d = disc(2, SideLabels::all(BoundaryKind::Free), Chart::FlatPlate);
        assert_eq!(strain_kernel_dimension(&d).unwrap(), 6);
    }

    #[test]
    fn korn_positive_with_clamped_side() {
        for chart in [Chart::FlatPlate, Chart::Cylinder { radius: 1.0 }, Chart::HyperbolicParaboloid { c: 0.5 }] {
            let d = disc(2, SideLabels::default(), chart);
            let k = korn_constant(&d).unwrap();
            assert!(k > 1e-4, "{k}");
        }
    }

    #[test]
    fn lanczos_agrees_with_dense_korn() {
        let d = disc(2, SideLabels::default(), Chart::Cylinder { radius: 1.0 });
        let g = assemble_norm_grams(&d);
        let dense = korn_from_grams(&g).unwrap();
        let lz = lanczos_min_generalized(&g.a, &g.h, LanczosOptions::default()).unwrap();
        assert!((dense - lz).abs() < 1e-8 * dense, "{dense} vs {lz}");
    }

    #[test]
    fn probe_detects_tiny_penalty() {
        let d = disc(2, SideLabels::default(), Chart::FlatPlate);
        let good = coercivity_probe(&d, d.moduli.default_penalty()).unwrap();
        assert!(good.passed, "{good:?}");
        let bad = coercivity_probe(&d, 1e-6).unwrap();
        assert!(!bad.passed, "{bad:?}");
    }

    #[test]
    fn b_continuity_ratio_is_mesh_stable() {
        let r2 = b_continuity_ratio(&disc(2, SideLabels::default(), Chart::FlatPlate), 20, 1);
        let r4 = b_continuity_ratio(&disc(4, SideLabels::default(), Chart::FlatPlate), 20, 1);
        assert!(r2 > 0.0 && r4 > 0.0);
        assert!(r4 < 4.0 * r2 && r2 < 4.0 * r4, "{r2} {r4}");
    }
}
