//! Pointwise integrands of the bilinear forms.

use nalgebra::{Matrix2, Vector2};

use crate::geometry::GeomFrame;
use crate::material::{
    compliance_apply, contract, elastic_apply, shear_apply, shear_compliance, strains, ElasticModuli, PointValues,
    StrainSet,
};
use crate::mesh::{BoundaryKind, EdgeLabel};

/// Strains of a field together with the stresses they induce.
#[derive(Clone, Copy, Debug)]
pub struct Stressed {
    pub strain: StrainSet,
    pub bending: Matrix2<f64>,
    pub membrane: Matrix2<f64>,
    pub shear: Vector2<f64>,
}

impl Stressed {
    pub fn new(frame: &GeomFrame, moduli: &ElasticModuli, p: &PointValues) -> Stressed {
        let strain = strains(frame, p);
        Stressed {
            bending: elastic_apply(frame, moduli, &strain.rho),
            membrane: elastic_apply(frame, moduli, &strain.gamma),
            shear: shear_apply(frame, moduli, &strain.tau),
            strain,
        }
    }
}

/// Volume integrand of the a-form.
pub fn a_volume(x: &Stressed, y: &Stressed) -> f64 {
    (contract(&x.bending, &y.strain.rho) + contract(&x.membrane, &y.strain.gamma) + x.shear.dot(&y.strain.tau)) / 3.0
}

/// Membrane plus shear energy density, unweighted.
pub fn membrane_shear_volume(x: &Stressed, y: &Stressed) -> f64 {
    contract(&x.membrane, &y.strain.gamma) + x.shear.dot(&y.strain.tau)
}

/// Which unknowns an edge couples: rotations and/or displacements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeMask {
    pub rotation: bool,
    pub displacement: bool,
}

impl EdgeMask {
    pub fn for_label(label: EdgeLabel) -> EdgeMask {
        match label {
            EdgeLabel::Interior | EdgeLabel::Boundary(BoundaryKind::Clamped) => {
                EdgeMask { rotation: true, displacement: true }
            }
            EdgeLabel::Boundary(BoundaryKind::SoftSupport) => EdgeMask { rotation: false, displacement: true },
            EdgeLabel::Boundary(BoundaryKind::Free) => EdgeMask { rotation: false, displacement: false },
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.rotation && !self.displacement
    }
}

/// Jumps and averaged conormal fluxes of one field at an edge point.
#[derive(Clone, Copy, Debug, Default)]
pub struct EdgeTrace {
    pub jump_theta: [f64; 2],
    pub jump_u: [f64; 2],
    pub jump_w: f64,
    /// Flux paired with the rotation jump.
    pub flux_theta: [f64; 2],
    /// Flux paired with the displacement jump (bending-curvature coupling minus membrane).
    pub flux_u: [f64; 2],
    pub flux_w: f64,
    /// Membrane-only flux paired with the displacement jump.
    pub membrane_u: [f64; 2],
}

/// `jump` is the sign (or zero) of the field's contribution to the jump,
/// `avg` its weight in the average, `conormal` the weighted conormal `n̄ √a`.
pub fn edge_trace(
    frame: &GeomFrame,
    s: &Stressed,
    p: &PointValues,
    jump: f64,
    avg: f64,
    conormal: [f64; 2],
) -> EdgeTrace {
    let n = conormal;
    let mr = &s.bending;
    let mg = &s.membrane;
    let mut t = EdgeTrace {
        jump_theta: [jump * p.theta[0], jump * p.theta[1]],
        jump_u: [jump * p.u[0], jump * p.u[1]],
        jump_w: jump * p.w,
        ..Default::default()
    };
    for a in 0..2 {
        t.flux_theta[a] = avg * (mr[(a, 0)] * n[0] + mr[(a, 1)] * n[1]);
    }
    for d in 0..2 {
        let mut coupled = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                coupled += mr[(a, b)] * frame.b_mixed[(d, a)] * n[b];
            }
        }
        let membrane = mg[(d, 0)] * n[0] + mg[(d, 1)] * n[1];
        t.flux_u[d] = avg * (coupled - membrane);
        t.membrane_u[d] = -avg * membrane;
    }
    t.flux_w = avg * (s.shear[0] * n[0] + s.shear[1] * n[1]);
    t
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Edge consistency integrand of the a-form (with the one-third weight) plus
/// the penalty integrand scaled by `penalty`, which already carries `1/h_e`.
/// Consistency terms carry `√a` through the conormal; penalties are flat.
pub fn a_edge(x: &EdgeTrace, y: &EdgeTrace, mask: EdgeMask, penalty: f64) -> f64 {
    let mut consistency = 0.0;
    let mut pen = 0.0;
    if mask.rotation {
        consistency -= dot(x.flux_theta, y.jump_theta) + dot(y.flux_theta, x.jump_theta);
        pen += dot(x.jump_theta, y.jump_theta);
    }
    if mask.displacement {
        consistency -= x.flux_w * y.jump_w + y.flux_w * x.jump_w;
        consistency += dot(x.flux_u, y.jump_u) + dot(y.flux_u, x.jump_u);
        pen += dot(x.jump_u, y.jump_u) + x.jump_w * y.jump_w;
    }
    consistency / 3.0 + penalty * pen
}

/// Edge integrand of the membrane/shear part of the primal form.
pub fn membrane_shear_edge(x: &EdgeTrace, y: &EdgeTrace, mask: EdgeMask, penalty: f64) -> f64 {
    if !mask.displacement {
        return 0.0;
    }
    -(x.flux_w * y.jump_w + y.flux_w * x.jump_w)
        + dot(x.membrane_u, y.jump_u)
        + dot(y.membrane_u, x.jump_u)
        + penalty * (dot(x.jump_u, y.jump_u) + x.jump_w * y.jump_w)
}

/// Strain functionals paired with the stress fields `ℳ¹¹, ℳ¹², ℳ²², ξ¹, ξ²` in the b-form volume term.
pub fn b_volume(strain: &StrainSet) -> [f64; 5] {
    [strain.gamma[(0, 0)], 2.0 * strain.gamma[(0, 1)], strain.gamma[(1, 1)], strain.tau[0], strain.tau[1]]
}

/// Jump functionals paired with the stress fields in the b-form edge term (to be subtracted).
pub fn b_edge(t: &EdgeTrace, conormal: [f64; 2]) -> [f64; 5] {
    let n = conormal;
    let (u, w) = (t.jump_u, t.jump_w);
    [u[0] * n[0], u[0] * n[1] + u[1] * n[0], u[1] * n[1], w * n[0], w * n[1]]
}

/// Unit stress of field `f`.
pub fn unit_stress(f: usize) -> (Matrix2<f64>, Vector2<f64>) {
    let mut m = Matrix2::zeros();
    let mut v = Vector2::zeros();
    match f {
        0 => m[(0, 0)] = 1.0,
        1 => {
            m[(0, 1)] = 1.0;
            m[(1, 0)] = 1.0;
        }
        2 => m[(1, 1)] = 1.0,
        3 => v[0] = 1.0,
        _ => v[1] = 1.0,
    }
    (m, v)
}

/// Pointwise c-form between unit stress fields.
pub fn c_local(frame: &GeomFrame, moduli: &ElasticModuli) -> [[f64; 5]; 5] {
    let mut out = [[0.0; 5]; 5];
    for f in 0..5 {
        let (mf, vf) = unit_stress(f);
        for g in 0..=f {
            let (mg, vg) = unit_stress(g);
            out[f][g] =
                contract(&compliance_apply(frame, moduli, &mg), &mf) + shear_compliance(frame, moduli, &vg).dot(&vf);
            out[g][f] = out[f][g];
        }
    }
    out
}

/// Pointwise c-form of a stress with each unit field.
pub fn c_against_units(frame: &GeomFrame, moduli: &ElasticModuli, m: &Matrix2<f64>, xi: &Vector2<f64>) -> [f64; 5] {
    let cm = compliance_apply(frame, moduli, m);
    let cx = shear_compliance(frame, moduli, xi);
    [cm[(0, 0)], cm[(0, 1)] + cm[(1, 0)], cm[(1, 1)], cx[0], cx[1]]
}
