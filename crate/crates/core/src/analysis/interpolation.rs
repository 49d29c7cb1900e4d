//! Interpolation of exact fields into the discrete spaces.
//!
//! Rotations, and displacements on elements without free edges, use the
//! per-element √a-weighted L² projection onto `P^k`. Elements with free edges
//! additionally match √a-weighted moments of the displacements on each free
//! edge. Stresses use the nodal Lagrange interpolant.

use nalgebra::{DMatrix, DVector};

use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::spaces::DisplacementKind;

/// Field returning the jets of `(θ1, θ2, u1, u2, w)`.
pub type JetField<'a> = &'a (dyn Fn([f64; 2]) -> [Jet; 5] + Sync);

#[derive(Clone, Debug, PartialEq)]
pub struct Interpolant {
    pub h: Vec<f64>,
    pub v: Vec<f64>,
}

/// Degree of the edge polynomials tested on each free edge.
fn edge_moment_degree(k: usize) -> usize {
    if k == 2 {
        1
    } else {
        k + 1
    }
}

/// Points `(x, s, flat weight, √a)` along local edge `j` of element `t`, with `s ∈ [0, 1]`.
fn edge_samples(d: &Discretization, t: usize, j: usize) -> Vec<([f64; 2], f64, f64, f64)> {
    let pts = d.spaces.elements[t].geometry.points;
    let (a, b) = (pts[(j + 1) % 3], pts[(j + 2) % 3]);
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let rule = &d.quadrature.edge;
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(&s, &w)| {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            (x, s, w * len, d.frame(x).sqrt_a)
        })
        .collect()
}

/// Moment conditions of component `c` on element `t`: one row per condition,
/// the basis moments and the field moments.
fn conditions(d: &Discretization, t: usize, c: usize, field: JetField<'_>) -> (DMatrix<f64>, DVector<f64>) {
    let el = &d.spaces.elements[t];
    let basis = el.basis(c);
    let tests = &el.rotation;
    let k = d.degree();
    let edges: &[usize] = if c >= 2 && el.kind != DisplacementKind::Standard { &el.free_edges } else { &[] };
    let m = edge_moment_degree(k) + 1;
    let rows = tests.len() + edges.len() * m;
    let mut mat = DMatrix::zeros(rows, basis.len());
    let mut rhs = DVector::zeros(rows);
    for qp in d.volume_points(t) {
        let phi = basis.eval(&el.geometry, qp.bary, false).values;
        let q = tests.eval(&el.geometry, qp.bary, false).values;
        let f = field(qp.x)[c].value;
        let w = qp.weight * qp.frame.sqrt_a;
        for (r, qr) in q.iter().enumerate() {
            rhs[r] += w * qr * f;
            for (j, p) in phi.iter().enumerate() {
                mat[(r, j)] += w * qr * p;
            }
        }
    }
    for (i, &j) in edges.iter().enumerate() {
        for (x, s, w, sa) in edge_samples(d, t, j) {
            let bary = el.geometry.to_bary(x);
            let phi = basis.eval(&el.geometry, bary, false).values;
            let f = field(x)[c].value;
            for p in 0..m {
                let r = tests.len() + i * m + p;
                let sp = s.powi(p as i32) * w * sa;
                rhs[r] += sp * f;
                for (col, v) in phi.iter().enumerate() {
                    mat[(r, col)] += sp * v;
                }
            }
        }
    }
    (mat, rhs)
}

fn solve_local(mat: DMatrix<f64>, rhs: DVector<f64>, t: usize, c: usize) -> Result<DVector<f64>> {
    let singular = || Error::SingularLocal { context: format!("interpolation on triangle {t}, component {c}") };
    if mat.nrows() == mat.ncols() {
        return mat.lu().solve(&rhs).ok_or_else(singular);
    }
    // Over- or under-determined moment sets (k ≥ 3 with free edges): least
    // squares, minimum norm.
    let full = mat.nrows().min(mat.ncols());
    let svd = mat.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-12 * smax).count();
    if rank < full {
        return Err(singular());
    }
    svd.solve(&rhs, 1e-12 * smax).map_err(|_| singular())
}

/// Interpolates an H field given by its jets.
pub fn interpolate_h(d: &Discretization, field: JetField<'_>) -> Result<Vec<f64>> {
    let mut out = vec![0.0; d.n_h()];
    for t in 0..d.mesh.triangles.len() {
        let el = &d.spaces.elements[t];
        let base = d.spaces.offsets[t];
        for c in 0..5 {
            let (mat, rhs) = conditions(d, t, c, field);
            let x = solve_local(mat, rhs, t, c)?;
            let off = base + el.component_offset(c);
            out[off..off + x.len()].copy_from_slice(x.as_slice());
        }
    }
    Ok(out)
}

/// Nodal interpolant of the five stress fields.
pub fn interpolate_v(d: &Discretization, field: impl Fn([f64; 2]) -> [f64; 5]) -> Vec<f64> {
    let st = &d.spaces.stress;
    let mut out = vec![0.0; st.n_dofs()];
    for (g, &x) in st.node_points.iter().enumerate() {
        for (f, v) in field(x).into_iter().enumerate() {
            out[st.dof(f, g)] = v;
        }
    }
    out
}

/// Interpolant of the exact pair `(X, P)`.
pub fn interpolate(d: &Discretization, exact: &crate::analysis::ExactFields) -> Result<Interpolant> {
    let h = interpolate_h(d, &|x| exact.jets(x))?;
    let v = interpolate_v(d, |x| {
        let s = exact.stresses(&d.frame(x), x);
        std::array::from_fn(|f| s.field(f))
    });
    Ok(Interpolant { h, v })
}

/// Largest relative violation of the moment conditions over all elements and
/// components, normalized by the size of the field moments.
pub fn moment_defect(d: &Discretization, field: JetField<'_>, coeffs: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for t in 0..d.mesh.triangles.len() {
        let el = &d.spaces.elements[t];
        for c in 0..5 {
            let (mat, rhs) = conditions(d, t, c, field);
            let off = d.spaces.offsets[t] + el.component_offset(c);
            let x = DVector::from_column_slice(&coeffs[off..off + mat.ncols()]);
            let r = &mat * x - &rhs;
            let scale = rhs.amax().max(1.0);
            worst = worst.max(r.amax() / scale);
        }
    }
    worst
}

/// `Σ_τ Σ_{m=0}^{2} h_τ^{2m−2} |X − X_h|²_{m,τ}` over all five H components.
pub fn weighted_seminorm_sum(d: &Discretization, field: JetField<'_>, coeffs: &[f64]) -> f64 {
    let mut total = 0.0;
    for t in 0..d.mesh.triangles.len() {
        let el = &d.spaces.elements[t];
        let h = d.mesh.diameters[t];
        let mut s = [0.0; 3];
        for qp in d.volume_points(t) {
            let exact = field(qp.x);
            let rot = el.rotation.eval(&el.geometry, qp.bary, true);
            let disp = el.displacement.eval(&el.geometry, qp.bary, true);
            for (c, ex) in exact.iter().enumerate() {
                let ev = if c < 2 { &rot } else { &disp };
                let off = d.spaces.offsets[t] + el.component_offset(c);
                let mut v = ex.value;
                let mut g = ex.grad;
                let mut hs = ex.hess;
                for i in 0..ev.values.len() {
                    let a = coeffs[off + i];
                    v -= a * ev.values[i];
                    for k in 0..2 {
                        g[k] -= a * ev.grads[i][k];
                        for l in 0..2 {
                            hs[k][l] -= a * ev.hessians[i][k][l];
                        }
                    }
                }
                s[0] += qp.weight * v * v;
                s[1] += qp.weight * (g[0] * g[0] + g[1] * g[1]);
                s[2] += qp.weight * hs.iter().flatten().map(|x| x * x).sum::<f64>();
            }
        }
        total += s[0] / (h * h) + s[1] + h * h * s[2];
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;
    use crate::material::ElasticModuli;
    use crate::mesh::{BoundaryKind, Mesh, Rect, SideLabels};

    fn disc(chart: Chart, labels: SideLabels) -> Discretization {
        let mesh = Mesh::structured(Rect::default(), 2, labels).unwrap();
        Discretization::new(mesh, chart, ElasticModuli::default(), 2).unwrap()
    }

    fn quadratic(x: [Jet; 2]) -> [Jet; 5] {
        let [a, b] = x;
        [a * b + 1.0, a * a - b, b * b * 0.5, a + b * 2.0, a * b - a * a]
    }

    #[test]
    fn quadratics_are_reproduced() {
        for chart in [Chart::FlatPlate, Chart::HyperbolicParaboloid { c: 0.4 }] {
            let d = disc(chart, SideLabels { right: BoundaryKind::Free, ..SideLabels::all(BoundaryKind::Clamped) });
            let f = |x: [f64; 2]| quadratic(Jet::coords(x));
            let c = interpolate_h(&d, &f).unwrap();
            assert!(weighted_seminorm_sum(&d, &f, &c) < 1e-20);
        }
    }

    #[test]
    fn free_edge_moments_match_for_cubics() {
        // Two free sides give both one- and two-free-edge elements.
        let labels = SideLabels { top: BoundaryKind::Free, right: BoundaryKind::Free, ..SideLabels::default() };
        let d = disc(Chart::FlatPlate, labels);
        let f = |x: [f64; 2]| {
            let [a, b] = Jet::coords(x);
            let cubic = a * a * a - a * b * b * 2.0 + b;
            [a, b, cubic, cubic * 0.5, (a * 3.0).sin()]
        };
        let c = interpolate_h(&d, &f).unwrap();
        assert!(moment_defect(&d, &f, &c) < 1e-10);
        // Independent check of the zeroth and first edge moments of u1.
        for t in 0..d.mesh.triangles.len() {
            let el = &d.spaces.elements[t];
            for &j in &el.free_edges {
                let pts = el.geometry.points;
                let (a, b) = (pts[(j + 1) % 3], pts[(j + 2) % 3]);
                let rule = crate::quadrature::gauss_legendre(6);
                let mut m = [0.0; 2];
                for (s, w) in rule.points.iter().zip(&rule.weights) {
                    let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                    let p = d.h_field(&c, t, el.geometry.to_bary(x));
                    let e = f(x)[2].value - p.u[0];
                    m[0] += w * e;
                    m[1] += w * s * e;
                }
                assert!(m[0].abs() < 1e-12 && m[1].abs() < 1e-12, "{m:?}");
            }
        }
    }

    #[test]
    fn linear_stresses_are_reproduced() {
        let d = disc(Chart::Cylinder { radius: 2.0 }, SideLabels::default());
        let f = |x: [f64; 2]| [x[0], 1.0 - x[1], 2.0 * x[0] + x[1], 0.5, -x[0]];
        let v = interpolate_v(&d, f);
        for t in 0..d.mesh.triangles.len() {
            let b = [0.2, 0.3, 0.5];
            let x = d.spaces.elements[t].geometry.to_point(b);
            let got = d.v_field(&v, t, b);
            for (g, e) in got.iter().zip(f(x)) {
                assert!((g - e).abs() < 1e-13);
            }
        }
    }
}
