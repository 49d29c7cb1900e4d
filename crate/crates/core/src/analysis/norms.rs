//! Discrete norms of the difference between exact and discrete fields.

use serde::{Deserialize, Serialize};

use crate::assembly::kernels::EdgeMask;
use crate::assembly::{Discretization, V_FIELD_WEIGHTS};
use crate::material::{contract, strains, PointValues};

use super::ExactFields;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// Piecewise H¹ plus jump and boundary penalties.
    Broken,
    /// Strains plus the same penalties.
    Energy,
    /// Component L² of the stresses.
    Stress,
}

/// Norm of `exact − discrete`. The exact field is jump-free, so interior edge
/// terms see only the discrete jumps, and boundary terms see the trace of the
/// difference.
pub fn error_norm(d: &Discretization, exact: &ExactFields, h: &[f64], v: &[f64], which: NormKind) -> f64 {
    let mut total = 0.0;
    for t in 0..d.mesh.triangles.len() {
        for qp in d.volume_points(t) {
            match which {
                NormKind::Broken | NormKind::Energy => {
                    let e = exact.point_values(qp.x).sub(&d.h_field(h, t, qp.bary));
                    total += qp.weight * volume_density(d, &qp.frame, &e, which);
                }
                NormKind::Stress => {
                    let ex = exact.stresses(&qp.frame, qp.x);
                    let dh = d.v_field(v, t, qp.bary);
                    for (f, w) in V_FIELD_WEIGHTS.iter().enumerate() {
                        total += qp.weight * w * (ex.field(f) - dh[f]).powi(2);
                    }
                }
            }
        }
    }
    if which != NormKind::Stress {
        total += edge_penalty(d, h, |x| exact.point_values(x));
    }
    total.max(0.0).sqrt()
}

fn volume_density(_d: &Discretization, frame: &crate::geometry::GeomFrame, e: &PointValues, which: NormKind) -> f64 {
    match which {
        NormKind::Broken => {
            let (v, g) = (e.values(), e.grads());
            (0..5).map(|c| v[c] * v[c] + g[c][0] * g[c][0] + g[c][1] * g[c][1]).sum()
        }
        NormKind::Energy => {
            let s = strains(frame, e);
            contract(&s.rho, &s.rho) + contract(&s.gamma, &s.gamma) + s.tau.dot(&s.tau)
        }
        NormKind::Stress => 0.0,
    }
}

/// `Σ_e h_e^{-1} ∫_e |[[·]]|²` with the edge masks of the a-form.
fn edge_penalty(d: &Discretization, h: &[f64], exact: impl Fn([f64; 2]) -> PointValues) -> f64 {
    let mut total = 0.0;
    for (e, edge) in d.mesh.edges.iter().enumerate() {
        let mask = EdgeMask::for_label(edge.label);
        if mask.is_empty() {
            continue;
        }
        for p in d.edge_points(e) {
            let (t1, _) = edge.side1;
            let v1 = d.h_field(h, t1, d.spaces.elements[t1].geometry.to_bary(p.x));
            let jump = match edge.side2 {
                Some((t2, _)) => v1.sub(&d.h_field(h, t2, d.spaces.elements[t2].geometry.to_bary(p.x))),
                None => exact(p.x).sub(&v1),
            };
            let mut s = 0.0;
            if mask.rotation {
                s += jump.theta[0].powi(2) + jump.theta[1].powi(2);
            }
            if mask.displacement {
                s += jump.u[0].powi(2) + jump.u[1].powi(2) + jump.w.powi(2);
            }
            total += p.weight * s / edge.length;
        }
    }
    total
}

/// Norm of a discrete H field alone.
pub fn h_norm(d: &Discretization, h: &[f64], which: NormKind) -> f64 {
    let zero = ExactFields::zero(1.0, d.moduli);
    error_norm(d, &zero, h, &[], which)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::interpolation::interpolate;
    use crate::analysis::FieldFn;
    use crate::assembly::assemble_norm_grams;
    use crate::geometry::Chart;
    use crate::jet::Jet;
    use crate::material::ElasticModuli;
    use crate::mesh::{BoundaryKind, Mesh, Rect, SideLabels};
    use std::sync::Arc;

    fn field() -> FieldFn {
        Arc::new(|x: [Jet; 2]| {
            let [a, b] = x;
            [a * b, (a * 2.0).sin(), b * b, a - b, (a + b).cos()]
        })
    }

    #[test]
    fn norms_match_gram_quadratic_forms() {
        let labels = SideLabels { top: BoundaryKind::SoftSupport, ..SideLabels::default() };
        let mesh = Mesh::structured(Rect::default(), 2, labels).unwrap();
        let d = Discretization::new(mesh, Chart::Cylinder { radius: 1.5 }, ElasticModuli::default(), 2).unwrap();
        let ex = ExactFields::new("f", field(), None, 0.5, d.moduli);
        let i = interpolate(&d, &ex).unwrap();
        let g = assemble_norm_grams(&d);
        for (kind, gram, x) in [(NormKind::Broken, &g.h, &i.h), (NormKind::Energy, &g.a, &i.h)] {
            let direct = h_norm(&d, x, kind);
            let quad = gram.bilinear(x, x).sqrt();
            assert!((direct - quad).abs() < 1e-10 * quad, "{kind:?}: {direct} vs {quad}");
        }
        let zero = ExactFields::zero(0.5, d.moduli);
        let direct = error_norm(&d, &zero, &[], &i.v, NormKind::Stress);
        let quad = g.v.bilinear(&i.v, &i.v).sqrt();
        assert!((direct - quad).abs() < 1e-10 * quad);
    }

    #[test]
    fn interpolant_of_space_member_has_zero_error() {
        let mesh = Mesh::structured(Rect::default(), 2, SideLabels::default()).unwrap();
        let d = Discretization::new(mesh, Chart::FlatPlate, ElasticModuli::default(), 2).unwrap();
        let f: FieldFn = Arc::new(|x: [Jet; 2]| {
            let [a, b] = x;
            [a * b, a * a, b * b - a, a - b, a * b * 3.0]
        });
        let ex = ExactFields::new("q", f, None, 1.0, d.moduli);
        let i = interpolate(&d, &ex).unwrap();
        for kind in [NormKind::Broken, NormKind::Energy] {
            assert!(error_norm(&d, &ex, &i.h, &i.v, kind) < 1e-12);
        }
        // Zero discrete field: error equals the norm of the exact field by direct quadrature.
        let zeros = vec![0.0; d.n_h()];
        let e = error_norm(&d, &ex, &zeros, &vec![0.0; d.n_v()], NormKind::Broken);
        let mut direct = 0.0;
        let rule = crate::quadrature::triangle_rule(10);
        for t in 0..d.mesh.triangles.len() {
            let geom = &d.spaces.elements[t].geometry;
            for (b, w) in rule.points.iter().zip(&rule.weights) {
                let p = ex.point_values(geom.to_point(*b));
                let (v, g) = (p.values(), p.grads());
                direct += w * geom.area * (0..5).map(|c| v[c] * v[c] + g[c][0].powi(2) + g[c][1].powi(2)).sum::<f64>();
            }
        }
        // Left edge is clamped: add the trace penalty of the exact field.
        for (k, edge) in d.mesh.edges.iter().enumerate() {
            if edge.label.is(BoundaryKind::Clamped) {
                for p in d.edge_points(k) {
                    let v = ex.point_values(p.x).values();
                    direct += p.weight * v.iter().map(|x| x * x).sum::<f64>() / edge.length;
                }
            }
        }
        assert!((e - direct.sqrt()).abs() < 1e-12 * e);
    }
}
