//! Right-hand sides: functional loads built from exact fields, and loads
//! built from analytic surface and boundary densities.

use std::fmt;
use std::sync::Arc;

use super::kernels::{a_edge, a_volume, b_edge, b_volume, c_against_units, edge_trace, EdgeMask, Stressed};
use super::{accumulate_vector, Discretization};
use crate::analysis::exact::{ExactFields, StressValue};
use crate::material::strains;
use crate::mesh::BoundaryKind;

/// Density evaluated at a parameter point.
pub type PointData<const N: usize> = Arc<dyn Fn([f64; 2]) -> [f64; N] + Send + Sync>;
/// Boundary density evaluated at a point with the flat outward unit normal.
pub type BoundaryData<const N: usize> = Arc<dyn Fn([f64; 2], [f64; 2]) -> [f64; N] + Send + Sync>;

/// Applied loads. Surface densities are per unit area of the shell;
/// boundary densities per unit arc length.
#[derive(Clone, Default)]
pub struct LoadData {
    /// `(p¹, p², p³)`.
    pub surface: Option<PointData<3>>,
    /// Distributed moment `m^α` paired with the rotations.
    pub moment: Option<PointData<2>>,
    /// Boundary moment `r^α`, applied on soft-support and free edges.
    pub boundary_moment: Option<BoundaryData<2>>,
    /// Boundary force `(q¹, q², q³)`, applied on free edges.
    pub boundary_force: Option<BoundaryData<3>>,
}

impl fmt::Debug for LoadData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoadData")
            .field("surface", &self.surface.is_some())
            .field("moment", &self.moment.is_some())
            .field("boundary_moment", &self.boundary_moment.is_some())
            .field("boundary_force", &self.boundary_force.is_some())
            .finish()
    }
}

/// Right-hand side of the mixed system.
#[derive(Clone, Debug, Default)]
pub struct LoadVector {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub warnings: Vec<String>,
}

/// `f(Y) = a(X;Y) + b(P;Y)` and `g(Q) = b(Q;X) − ε² c(P;Q)` for the exact pair `(X, P)`.
/// The exact fields are continuous, so interior jumps vanish and averages are
/// full values; on clamped and soft-support edges the jumps are the traces.
pub fn functional_load(d: &Discretization, exact: &ExactFields, penalty: f64) -> (Vec<f64>, Vec<f64>) {
    let mut f = vec![0.0; d.n_h()];
    let mut g = vec![0.0; d.n_v()];
    let moduli = d.moduli;
    let e2 = exact.epsilon * exact.epsilon;
    let stress = &d.spaces.stress;

    accumulate_vector(&mut f, d.mesh.triangles.len(), |t| {
        let dofs: Vec<usize> = d.spaces.h_range(t).collect();
        let mut out = vec![0.0; dofs.len()];
        for qp in d.volume_points(t) {
            let xs = Stressed::new(&qp.frame, &moduli, &exact.point_values(qp.x));
            let ps = exact.stresses(&qp.frame, qp.x);
            let w = qp.weight * qp.frame.sqrt_a;
            for (o, v) in out.iter_mut().zip(d.local_values(t, qp.bary)) {
                let y = Stressed::new(&qp.frame, &moduli, &v);
                *o += w * (a_volume(&xs, &y) + pair(&ps, &b_volume(&y.strain)));
            }
        }
        Some((dofs, out))
    });
    accumulate_vector(&mut f, d.mesh.edges.len(), |e| {
        let edge = &d.mesh.edges[e];
        let mask = EdgeMask::for_label(edge.label);
        if mask.is_empty() {
            return None;
        }
        let pen = penalty / edge.length;
        let exact_jump = if edge.is_interior() { 0.0 } else { 1.0 };
        let mut dofs = Vec::new();
        let mut out = Vec::new();
        for p in d.edge_points(e) {
            let xv = exact.point_values(p.x);
            let xs = Stressed::new(&p.frame, &moduli, &xv);
            let xt = edge_trace(&p.frame, &xs, &xv, exact_jump, 1.0, p.surface.conormal);
            let ps = exact.stresses(&p.frame, p.x);
            let sides = d.edge_sides(e, p.x);
            if dofs.is_empty() {
                dofs = sides.dofs.clone();
                out = vec![0.0; dofs.len()];
            }
            for (i, (v, &s)) in sides.values.iter().zip(&sides.signs).enumerate() {
                let y = Stressed::new(&p.frame, &moduli, v);
                let yt = edge_trace(&p.frame, &y, v, s, sides.average, p.surface.conormal);
                let mut val = a_edge(&xt, &yt, mask, pen);
                if mask.displacement {
                    val -= pair(&ps, &b_edge(&yt, p.surface.conormal));
                }
                out[i] += p.weight * val;
            }
        }
        Some((dofs, out))
    });

    accumulate_vector(&mut g, d.mesh.triangles.len(), |t| {
        let nodes = &stress.element_nodes[t];
        let geom = &d.spaces.elements[t].geometry;
        let mut rows = Vec::with_capacity(5 * nodes.len());
        for field in 0..5 {
            rows.extend(nodes.iter().map(|&n| stress.dof(field, n)));
        }
        let mut out = vec![0.0; rows.len()];
        for qp in d.volume_points(t) {
            let psi = stress.eval(geom, qp.bary).values;
            let xb = b_volume(&strains(&qp.frame, &exact.point_values(qp.x)));
            let ps = exact.stresses(&qp.frame, qp.x);
            let cp = c_against_units(&qp.frame, &moduli, &ps.membrane, &ps.shear);
            let w = qp.weight * qp.frame.sqrt_a;
            for field in 0..5 {
                for (k, phi) in psi.iter().enumerate() {
                    out[field * nodes.len() + k] += w * phi * (xb[field] - e2 * cp[field]);
                }
            }
        }
        Some((rows, out))
    });
    accumulate_vector(&mut g, d.mesh.edges.len(), |e| {
        let edge = &d.mesh.edges[e];
        if edge.is_interior() || !EdgeMask::for_label(edge.label).displacement {
            return None;
        }
        let (t, _) = edge.side1;
        let nodes = &stress.element_nodes[t];
        let geom = &d.spaces.elements[t].geometry;
        let mut rows = Vec::with_capacity(5 * nodes.len());
        for field in 0..5 {
            rows.extend(nodes.iter().map(|&n| stress.dof(field, n)));
        }
        let mut out = vec![0.0; rows.len()];
        for p in d.edge_points(e) {
            let psi = stress.eval(geom, geom.to_bary(p.x)).values;
            let xv = exact.point_values(p.x);
            let tr = super::kernels::EdgeTrace { jump_u: xv.u, jump_w: xv.w, ..Default::default() };
            let jb = b_edge(&tr, p.surface.conormal);
            for field in 0..5 {
                for (k, phi) in psi.iter().enumerate() {
                    out[field * nodes.len() + k] -= p.weight * phi * jb[field];
                }
            }
        }
        Some((rows, out))
    });
    (f, g)
}

fn pair(p: &StressValue, functionals: &[f64; 5]) -> f64 {
    (0..5).map(|f| p.field(f) * functionals[f]).sum()
}

/// Consistent load of the primal baseline: the primal form applied to the exact field.
/// The `ε^{-2}` membrane and shear stresses are taken from the split exact stresses.
pub fn primal_load(d: &Discretization, exact: &ExactFields, penalty: f64) -> Vec<f64> {
    let (mut f, _) = functional_load(d, exact, penalty);
    let moduli = d.moduli;
    let scale = 1.0 / (exact.epsilon * exact.epsilon);
    // Boundary terms of the membrane/shear form that involve the exact traces.
    accumulate_vector(&mut f, d.mesh.edges.len(), |e| {
        let edge = &d.mesh.edges[e];
        let mask = EdgeMask::for_label(edge.label);
        if edge.is_interior() || !mask.displacement {
            return None;
        }
        let pen = penalty / edge.length;
        let mut dofs = Vec::new();
        let mut out = Vec::new();
        for p in d.edge_points(e) {
            let xv = exact.point_values(p.x);
            let sides = d.edge_sides(e, p.x);
            if dofs.is_empty() {
                dofs = sides.dofs.clone();
                out = vec![0.0; dofs.len()];
            }
            for (i, (v, &s)) in sides.values.iter().zip(&sides.signs).enumerate() {
                let y = Stressed::new(&p.frame, &moduli, v);
                let yt = edge_trace(&p.frame, &y, v, s, sides.average, p.surface.conormal);
                let val = -yt.flux_w * xv.w
                    + yt.membrane_u[0] * xv.u[0]
                    + yt.membrane_u[1] * xv.u[1]
                    + pen * (yt.jump_u[0] * xv.u[0] + yt.jump_u[1] * xv.u[1] + yt.jump_w * xv.w);
                out[i] += p.weight * scale * val;
            }
        }
        Some((dofs, out))
    });
    f
}

/// Load vector from analytic densities. `g` is zero. Densities supplied for
/// edge kinds absent from the mesh produce warnings and are ignored.
pub fn assemble_load(d: &Discretization, load: &LoadData) -> LoadVector {
    let mut out = LoadVector { f: vec![0.0; d.n_h()], g: vec![0.0; d.n_v()], warnings: Vec::new() };
    let has = |kinds: &[BoundaryKind]| d.mesh.edges.iter().any(|e| e.label.kind().is_some_and(|k| kinds.contains(&k)));
    if load.boundary_moment.is_some() && !has(&[BoundaryKind::SoftSupport, BoundaryKind::Free]) {
        out.warnings.push("boundary moment given but the mesh has no soft-support or free edges".into());
    }
    if load.boundary_force.is_some() && !has(&[BoundaryKind::Free]) {
        out.warnings.push("boundary force given but the mesh has no free edges".into());
    }
    for w in &out.warnings {
        log::warn!("{w}");
    }

    if load.surface.is_some() || load.moment.is_some() {
        accumulate_vector(&mut out.f, d.mesh.triangles.len(), |t| {
            let dofs: Vec<usize> = d.spaces.h_range(t).collect();
            let mut v = vec![0.0; dofs.len()];
            for qp in d.volume_points(t) {
                let p = load.surface.as_ref().map_or([0.0; 3], |s| s(qp.x));
                let m = load.moment.as_ref().map_or([0.0; 2], |s| s(qp.x));
                let w = qp.weight * qp.frame.sqrt_a;
                for (o, y) in v.iter_mut().zip(d.local_values(t, qp.bary)) {
                    *o += w * (p[0] * y.u[0] + p[1] * y.u[1] + p[2] * y.w + m[0] * y.theta[0] + m[1] * y.theta[1]);
                }
            }
            Some((dofs, v))
        });
    }

    if load.boundary_moment.is_some() || load.boundary_force.is_some() {
        accumulate_vector(&mut out.f, d.mesh.edges.len(), |e| {
            let edge = &d.mesh.edges[e];
            let kind = edge.label.kind()?;
            let moment = load.boundary_moment.as_ref().filter(|_| kind != BoundaryKind::Clamped);
            let force = load.boundary_force.as_ref().filter(|_| kind == BoundaryKind::Free);
            if moment.is_none() && force.is_none() {
                return None;
            }
            let n = d.mesh.edge_normal(e);
            let t = edge.side1.0;
            let dofs: Vec<usize> = d.spaces.h_range(t).collect();
            let mut v = vec![0.0; dofs.len()];
            for p in d.edge_points(e) {
                let r = moment.map_or([0.0; 2], |m| m(p.x, n));
                let q = force.map_or([0.0; 3], |f| f(p.x, n));
                let w = p.weight * p.surface.arc;
                let geom = &d.spaces.elements[t].geometry;
                for (o, y) in v.iter_mut().zip(d.local_values(t, geom.to_bary(p.x))) {
                    *o += w * (r[0] * y.theta[0] + r[1] * y.theta[1] + q[0] * y.u[0] + q[1] * y.u[1] + q[2] * y.w);
                }
            }
            Some((dofs, v))
        });
    }
    out
}
