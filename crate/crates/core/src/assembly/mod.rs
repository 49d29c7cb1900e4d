//! Assembly of the mixed system, the primal baseline and the norm Gram matrices.
//!
//! Local element and edge blocks are computed in parallel chunks and merged
//! into a fixed sparsity pattern in element/edge order, so the result does not
//! depend on the number of worker threads.

pub mod kernels;
pub mod load;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{edge_weights, Chart, EdgeWeights, GeomFrame};
use crate::material::{contract, strains, ElasticModuli, PointValues};
use crate::mesh::Mesh;
use crate::quadrature::QuadratureRule;
use crate::spaces::{build_spaces, SpacePair};
use crate::sparse::CsrMatrix;

use kernels::{
    a_edge, a_volume, b_edge, b_volume, c_local, edge_trace, membrane_shear_edge, membrane_shear_volume, EdgeMask,
    EdgeTrace, Stressed,
};

pub use load::{assemble_load, functional_load, primal_load, BoundaryData, LoadData, LoadVector, PointData};

/// Mesh, chart, moduli, spaces and quadrature of one discrete problem.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Mesh,
    pub chart: Chart,
    pub moduli: ElasticModuli,
    pub spaces: SpacePair,
    pub quadrature: QuadratureRule,
}

#[derive(Clone, Debug)]
pub struct VolumePoint {
    pub bary: [f64; 3],
    pub x: [f64; 2],
    /// Flat weight: rule weight times element area.
    pub weight: f64,
    pub frame: GeomFrame,
}

#[derive(Clone, Debug)]
pub struct EdgePoint {
    pub x: [f64; 2],
    /// Flat weight: rule weight times edge length.
    pub weight: f64,
    pub frame: GeomFrame,
    pub surface: EdgeWeights,
}

/// Values of every local function of the elements adjacent to an edge.
#[derive(Clone, Debug)]
pub struct EdgeSides {
    pub dofs: Vec<usize>,
    pub values: Vec<PointValues>,
    /// `+1` on side 1, `-1` on side 2.
    pub signs: Vec<f64>,
    /// Weight of each side in the average.
    pub average: f64,
}

struct LocalBlock {
    rows: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

const CHUNK: usize = 64;

fn accumulate<F>(target: &mut CsrMatrix, count: usize, local: F)
where
    F: Fn(usize) -> Option<LocalBlock> + Sync,
{
    for start in (0..count).step_by(CHUNK) {
        let end = (start + CHUNK).min(count);
        let blocks: Vec<Option<LocalBlock>> = (start..end).into_par_iter().map(&local).collect();
        for b in blocks.into_iter().flatten() {
            target.add_block(&b.rows, &b.cols, &b.values);
        }
    }
}

pub(crate) fn accumulate_vector<F>(target: &mut [f64], count: usize, local: F)
where
    F: Fn(usize) -> Option<(Vec<usize>, Vec<f64>)> + Sync,
{
    for start in (0..count).step_by(CHUNK) {
        let end = (start + CHUNK).min(count);
        let blocks: Vec<_> = (start..end).into_par_iter().map(&local).collect();
        for (rows, vals) in blocks.into_iter().flatten() {
            for (r, v) in rows.into_iter().zip(vals) {
                target[r] += v;
            }
        }
    }
}

/// Fills the upper triangle of a row-major square block from its lower triangle.
fn mirror(block: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..i {
            block[j * n + i] = block[i * n + j];
        }
    }
}

impl Discretization {
    pub fn new(mesh: Mesh, chart: Chart, moduli: ElasticModuli, degree: usize) -> Result<Discretization> {
        Discretization::with_quadrature(mesh, chart, moduli, degree, QuadratureRule::for_degree(degree))
    }

    pub fn with_quadrature(
        mesh: Mesh,
        chart: Chart,
        moduli: ElasticModuli,
        degree: usize,
        quadrature: QuadratureRule,
    ) -> Result<Discretization> {
        chart.validate()?;
        moduli.validate()?;
        let spaces = build_spaces(&mesh, &chart, degree, &quadrature.triangle)?;
        for edge in &mesh.edges {
            let [a, b] = edge.vertices.map(|v| mesh.vertices[v]);
            for &s in &quadrature.edge.points {
                chart.frame([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])])?;
            }
        }
        Ok(Discretization { mesh, chart, moduli, spaces, quadrature })
    }

    pub fn degree(&self) -> usize {
        self.spaces.degree
    }

    pub fn n_h(&self) -> usize {
        self.spaces.n_h
    }

    pub fn n_v(&self) -> usize {
        self.spaces.n_v()
    }

    pub fn frame(&self, x: [f64; 2]) -> GeomFrame {
        self.chart.frame(x).expect("chart validated at every quadrature point during setup")
    }

    pub fn volume_points(&self, t: usize) -> Vec<VolumePoint> {
        let geom = &self.spaces.elements[t].geometry;
        let rule = &self.quadrature.triangle;
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(&bary, &w)| {
                let x = geom.to_point(bary);
                VolumePoint { bary, x, weight: w * geom.area, frame: self.frame(x) }
            })
            .collect()
    }

    pub fn edge_points(&self, e: usize) -> Vec<EdgePoint> {
        let edge = &self.mesh.edges[e];
        let [a, b] = edge.vertices.map(|v| self.mesh.vertices[v]);
        let t = [(b[0] - a[0]) / edge.length, (b[1] - a[1]) / edge.length];
        let rule = &self.quadrature.edge;
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(&s, &w)| {
                let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                let frame = self.frame(x);
                let surface = edge_weights(&frame, t);
                EdgePoint { x, weight: w * edge.length, frame, surface }
            })
            .collect()
    }

    /// Values of the local H functions of element `t` at a barycentric point, in DOF order.
    pub fn local_values(&self, t: usize, bary: [f64; 3]) -> Vec<PointValues> {
        let el = &self.spaces.elements[t];
        let rot = el.rotation.eval(&el.geometry, bary, false);
        let disp = el.displacement.eval(&el.geometry, bary, false);
        let mut out = Vec::with_capacity(el.n_local());
        for c in 0..5 {
            let ev = if c < 2 { &rot } else { &disp };
            for (v, g) in ev.values.iter().zip(&ev.grads) {
                out.push(PointValues::component(c, *v, *g));
            }
        }
        out
    }

    pub fn edge_sides(&self, e: usize, x: [f64; 2]) -> EdgeSides {
        let edge = &self.mesh.edges[e];
        let mut sides = vec![(edge.side1.0, 1.0)];
        if let Some((t2, _)) = edge.side2 {
            sides.push((t2, -1.0));
        }
        let mut out = EdgeSides {
            dofs: Vec::new(),
            values: Vec::new(),
            signs: Vec::new(),
            average: if edge.is_interior() { 0.5 } else { 1.0 },
        };
        for (t, sign) in sides {
            let bary = self.spaces.elements[t].geometry.to_bary(x);
            let vals = self.local_values(t, bary);
            out.dofs.extend(self.spaces.h_range(t));
            out.signs.extend(std::iter::repeat_n(sign, vals.len()));
            out.values.extend(vals);
        }
        out
    }

    /// Evaluates a discrete H field at a point of element `t`.
    pub fn h_field(&self, coeffs: &[f64], t: usize, bary: [f64; 3]) -> PointValues {
        let vals = self.local_values(t, bary);
        let base = self.spaces.offsets[t];
        let mut p = PointValues::default();
        for (i, v) in vals.iter().enumerate() {
            let c = coeffs[base + i];
            if c == 0.0 {
                continue;
            }
            for k in 0..2 {
                p.theta[k] += c * v.theta[k];
                p.u[k] += c * v.u[k];
                p.dw[k] += c * v.dw[k];
                for l in 0..2 {
                    p.dtheta[k][l] += c * v.dtheta[k][l];
                    p.du[k][l] += c * v.du[k][l];
                }
            }
            p.w += c * v.w;
        }
        p
    }

    /// Evaluates the discrete stress fields at a point of element `t`.
    pub fn v_field(&self, coeffs: &[f64], t: usize, bary: [f64; 3]) -> [f64; 5] {
        let st = &self.spaces.stress;
        let psi = st.eval(&self.spaces.elements[t].geometry, bary).values;
        std::array::from_fn(|f| psi.iter().zip(&st.element_nodes[t]).map(|(p, &g)| p * coeffs[st.dof(f, g)]).sum())
    }

    fn element_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb: Vec<Vec<usize>> = (0..self.mesh.triangles.len()).map(|t| vec![t]).collect();
        for edge in &self.mesh.edges {
            if let Some((t2, _)) = edge.side2 {
                let t1 = edge.side1.0;
                nb[t1].push(t2);
                nb[t2].push(t1);
            }
        }
        for n in nb.iter_mut() {
            n.sort_unstable();
        }
        nb
    }

    fn h_pattern(&self) -> Vec<Vec<usize>> {
        let mut rows = Vec::with_capacity(self.n_h());
        for (t, nb) in self.element_neighbors().into_iter().enumerate() {
            let cols: Vec<usize> = nb.iter().flat_map(|&s| self.spaces.h_range(s)).collect();
            for _ in self.spaces.h_range(t) {
                rows.push(cols.clone());
            }
        }
        rows
    }

    fn node_elements(&self) -> Vec<Vec<usize>> {
        let st = &self.spaces.stress;
        let mut out = vec![Vec::new(); st.n_nodes];
        for (t, nodes) in st.element_nodes.iter().enumerate() {
            for &g in nodes {
                out[g].push(t);
            }
        }
        out
    }

    fn vh_pattern(&self) -> Vec<Vec<usize>> {
        let st = &self.spaces.stress;
        let per_node: Vec<Vec<usize>> =
            self.node_elements().iter().map(|els| els.iter().flat_map(|&t| self.spaces.h_range(t)).collect()).collect();
        (0..5).flat_map(|_| per_node.iter().cloned()).take(st.n_dofs()).collect()
    }

    fn vv_pattern(&self) -> Vec<Vec<usize>> {
        let st = &self.spaces.stress;
        let per_node: Vec<Vec<usize>> = self
            .node_elements()
            .iter()
            .map(|els| {
                let mut nodes: Vec<usize> = els.iter().flat_map(|&t| st.element_nodes[t].iter().copied()).collect();
                nodes.sort_unstable();
                nodes.dedup();
                (0..5).flat_map(|f| nodes.iter().map(move |&g| f * st.n_nodes + g)).collect()
            })
            .collect();
        (0..5).flat_map(|_| per_node.iter().cloned()).collect()
    }

    fn v_dofs(&self, t: usize) -> Vec<usize> {
        let st = &self.spaces.stress;
        (0..5).flat_map(|f| st.element_nodes[t].iter().map(move |&g| st.dof(f, g))).collect()
    }

    /// Local stress nodes of element `t` lying on its local edge `j`.
    fn edge_stress_nodes(&self, j: usize) -> Vec<usize> {
        let st = &self.spaces.stress;
        st.local_nodes.iter().enumerate().filter(|(_, b)| b[j] == 0.0).map(|(k, _)| k).collect()
    }

    fn check_penalty(penalty: f64) -> Result<()> {
        if penalty > 0.0 && penalty.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("penalty must be positive, got {penalty}")))
        }
    }
}

/// Assembled mixed system `[A Bᵀ; B −ε²C]` with its right-hand side.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub c: CsrMatrix,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub epsilon: f64,
    pub penalty: f64,
}

/// Gram matrices of the three discrete norms.
#[derive(Clone, Debug)]
pub struct NormGrams {
    pub h: CsrMatrix,
    pub a: CsrMatrix,
    pub v: CsrMatrix,
}

fn element_block<F>(d: &Discretization, t: usize, mut integrand: F) -> LocalBlock
where
    F: FnMut(&VolumePoint, &[PointValues], &mut [f64], usize),
{
    let dofs: Vec<usize> = d.spaces.h_range(t).collect();
    let n = dofs.len();
    let mut k = vec![0.0; n * n];
    for qp in d.volume_points(t) {
        let vals = d.local_values(t, qp.bary);
        integrand(&qp, &vals, &mut k, n);
    }
    mirror(&mut k, n);
    LocalBlock { rows: dofs.clone(), cols: dofs, values: k }
}

fn edge_block<F>(d: &Discretization, e: usize, mut integrand: F) -> LocalBlock
where
    F: FnMut(&EdgePoint, &EdgeSides, &mut [f64], usize),
{
    let mut dofs = Vec::new();
    let mut k = Vec::new();
    let mut n = 0;
    for p in d.edge_points(e) {
        let sides = d.edge_sides(e, p.x);
        if dofs.is_empty() {
            dofs = sides.dofs.clone();
            n = dofs.len();
            k = vec![0.0; n * n];
        }
        integrand(&p, &sides, &mut k, n);
    }
    mirror(&mut k, n);
    LocalBlock { rows: dofs.clone(), cols: dofs, values: k }
}

fn traces(d: &Discretization, p: &EdgePoint, sides: &EdgeSides) -> Vec<EdgeTrace> {
    sides
        .values
        .iter()
        .zip(&sides.signs)
        .map(|(v, &s)| {
            let st = Stressed::new(&p.frame, &d.moduli, v);
            edge_trace(&p.frame, &st, v, s, sides.average, p.surface.conormal)
        })
        .collect()
}

/// The a-form: one-third weighted bending, membrane and shear terms with their
/// edge consistency terms, plus interior and boundary penalties.
pub fn assemble_a(d: &Discretization, penalty: f64) -> Result<CsrMatrix> {
    Discretization::check_penalty(penalty)?;
    let mut a = CsrMatrix::from_pattern(d.n_h(), &d.h_pattern());
    let moduli = d.moduli;
    accumulate(&mut a, d.mesh.triangles.len(), |t| {
        Some(element_block(d, t, |qp, vals, k, n| {
            let st: Vec<Stressed> = vals.iter().map(|v| Stressed::new(&qp.frame, &moduli, v)).collect();
            let w = qp.weight * qp.frame.sqrt_a;
            for i in 0..n {
                for j in 0..=i {
                    k[i * n + j] += w * a_volume(&st[j], &st[i]);
                }
            }
        }))
    });
    accumulate(&mut a, d.mesh.edges.len(), |e| {
        let edge = &d.mesh.edges[e];
        let mask = EdgeMask::for_label(edge.label);
        if mask.is_empty() {
            return None;
        }
        let pen = penalty / edge.length;
        Some(edge_block(d, e, |p, sides, k, n| {
            let tr = traces(d, p, sides);
            for i in 0..n {
                for j in 0..=i {
                    k[i * n + j] += p.weight * a_edge(&tr[j], &tr[i], mask, pen);
                }
            }
        }))
    });
    Ok(a)
}

/// Membrane and shear part of the primal form, including its own edge terms
/// and penalty; the primal stiffness is `A + ε^{-2} M`.
pub fn assemble_membrane_shear(d: &Discretization, penalty: f64) -> Result<CsrMatrix> {
    Discretization::check_penalty(penalty)?;
    let mut m = CsrMatrix::from_pattern(d.n_h(), &d.h_pattern());
    let moduli = d.moduli;
    accumulate(&mut m, d.mesh.triangles.len(), |t| {
        Some(element_block(d, t, |qp, vals, k, n| {
            let st: Vec<Stressed> = vals.iter().map(|v| Stressed::new(&qp.frame, &moduli, v)).collect();
            let w = qp.weight * qp.frame.sqrt_a;
            for i in 0..n {
                for j in 0..=i {
                    k[i * n + j] += w * membrane_shear_volume(&st[j], &st[i]);
                }
            }
        }))
    });
    accumulate(&mut m, d.mesh.edges.len(), |e| {
        let edge = &d.mesh.edges[e];
        let mask = EdgeMask::for_label(edge.label);
        if !mask.displacement {
            return None;
        }
        let pen = penalty / edge.length;
        Some(edge_block(d, e, |p, sides, k, n| {
            let tr = traces(d, p, sides);
            for i in 0..n {
                for j in 0..=i {
                    k[i * n + j] += p.weight * membrane_shear_edge(&tr[j], &tr[i], mask, pen);
                }
            }
        }))
    });
    Ok(m)
}

/// Primal baseline stiffness `A + ε^{-2} M`.
pub fn assemble_primal(d: &Discretization, penalty: f64, epsilon: f64) -> Result<CsrMatrix> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let a = assemble_a(d, penalty)?;
    let m = assemble_membrane_shear(d, penalty)?;
    Ok(combine(&a, &m, 1.0 / (epsilon * epsilon)))
}

/// `a + s m` for matrices sharing a pattern.
pub fn combine(a: &CsrMatrix, m: &CsrMatrix, s: f64) -> CsrMatrix {
    assert_eq!(a.indices, m.indices, "patterns differ");
    let mut out = a.clone();
    for (o, v) in out.values.iter_mut().zip(&m.values) {
        *o += s * v;
    }
    out
}

/// The b-form: rows are stress DOFs, columns H DOFs.
pub fn assemble_b(d: &Discretization) -> CsrMatrix {
    let mut b = CsrMatrix::from_pattern(d.n_h(), &d.vh_pattern());
    let st = &d.spaces.stress;
    accumulate(&mut b, d.mesh.triangles.len(), |t| {
        let rows = d.v_dofs(t);
        let cols: Vec<usize> = d.spaces.h_range(t).collect();
        let (nr, nc) = (rows.len(), cols.len());
        let nloc = nr / 5;
        let mut k = vec![0.0; nr * nc];
        let geom = &d.spaces.elements[t].geometry;
        for qp in d.volume_points(t) {
            let psi = st.eval(geom, qp.bary).values;
            let w = qp.weight * qp.frame.sqrt_a;
            for (i, v) in d.local_values(t, qp.bary).iter().enumerate() {
                let g = b_volume(&strains(&qp.frame, v));
                for f in 0..5 {
                    for (kk, p) in psi.iter().enumerate() {
                        k[(f * nloc + kk) * nc + i] += w * p * g[f];
                    }
                }
            }
        }
        Some(LocalBlock { rows, cols, values: k })
    });
    accumulate(&mut b, d.mesh.edges.len(), |e| {
        let edge = &d.mesh.edges[e];
        if !EdgeMask::for_label(edge.label).displacement {
            return None;
        }
        let (t1, j1) = edge.side1;
        let local_nodes = d.edge_stress_nodes(j1);
        let rows: Vec<usize> =
            (0..5).flat_map(|f| local_nodes.iter().map(move |&k| st.dof(f, st.element_nodes[t1][k]))).collect();
        let geom = &d.spaces.elements[t1].geometry;
        let mut cols = Vec::new();
        let mut k = Vec::new();
        let nl = local_nodes.len();
        for p in d.edge_points(e) {
            let sides = d.edge_sides(e, p.x);
            if cols.is_empty() {
                cols = sides.dofs.clone();
                k = vec![0.0; rows.len() * cols.len()];
            }
            let nc = cols.len();
            let psi = st.eval(geom, geom.to_bary(p.x)).values;
            for (i, (v, &s)) in sides.values.iter().zip(&sides.signs).enumerate() {
                let tr = EdgeTrace { jump_u: [s * v.u[0], s * v.u[1]], jump_w: s * v.w, ..Default::default() };
                let g = b_edge(&tr, p.surface.conormal);
                for f in 0..5 {
                    for (r, &kk) in local_nodes.iter().enumerate() {
                        k[(f * nl + r) * nc + i] -= p.weight * psi[kk] * g[f];
                    }
                }
            }
        }
        Some(LocalBlock { rows, cols, values: k })
    });
    b
}

/// The c-form on the stress space.
pub fn assemble_c(d: &Discretization) -> CsrMatrix {
    let mut c = CsrMatrix::from_pattern(d.n_v(), &d.vv_pattern());
    let st = &d.spaces.stress;
    accumulate(&mut c, d.mesh.triangles.len(), |t| {
        let dofs = d.v_dofs(t);
        let n = dofs.len();
        let nloc = n / 5;
        let mut k = vec![0.0; n * n];
        let geom = &d.spaces.elements[t].geometry;
        for qp in d.volume_points(t) {
            let psi = st.eval(geom, qp.bary).values;
            let cl = c_local(&qp.frame, &d.moduli);
            let w = qp.weight * qp.frame.sqrt_a;
            for f in 0..5 {
                for g in 0..5 {
                    if cl[f][g] == 0.0 {
                        continue;
                    }
                    for a in 0..nloc {
                        for b in 0..nloc {
                            k[(f * nloc + a) * n + g * nloc + b] += w * cl[f][g] * (psi[a] * psi[b]);
                        }
                    }
                }
            }
        }
        Some(LocalBlock { rows: dofs.clone(), cols: dofs, values: k })
    });
    c
}

/// Gram matrices of the piecewise-H¹ norm with jump penalties, the strain norm
/// with the same penalties, and the component L² norm of the stresses.
/// All use the flat measure.
pub fn assemble_norm_grams(d: &Discretization) -> NormGrams {
    let jump_block = |e: usize| -> Option<LocalBlock> {
        let edge = &d.mesh.edges[e];
        let mask = EdgeMask::for_label(edge.label);
        if mask.is_empty() {
            return None;
        }
        let inv_h = 1.0 / edge.length;
        Some(edge_block(d, e, |p, sides, k, n| {
            for i in 0..n {
                let (vi, si) = (&sides.values[i], sides.signs[i]);
                for j in 0..=i {
                    let (vj, sj) = (&sides.values[j], sides.signs[j]);
                    let mut s = 0.0;
                    if mask.rotation {
                        s += vi.theta[0] * vj.theta[0] + vi.theta[1] * vj.theta[1];
                    }
                    if mask.displacement {
                        s += vi.u[0] * vj.u[0] + vi.u[1] * vj.u[1] + vi.w * vj.w;
                    }
                    k[i * n + j] += p.weight * inv_h * si * sj * s;
                }
            }
        }))
    };

    let mut h = CsrMatrix::from_pattern(d.n_h(), &d.h_pattern());
    accumulate(&mut h, d.mesh.triangles.len(), |t| {
        Some(element_block(d, t, |qp, vals, k, n| {
            for i in 0..n {
                let (vi, gi) = (vals[i].values(), vals[i].grads());
                for j in 0..=i {
                    let (vj, gj) = (vals[j].values(), vals[j].grads());
                    let mut s = 0.0;
                    for c in 0..5 {
                        s += vi[c] * vj[c] + gi[c][0] * gj[c][0] + gi[c][1] * gj[c][1];
                    }
                    k[i * n + j] += qp.weight * s;
                }
            }
        }))
    });
    accumulate(&mut h, d.mesh.edges.len(), jump_block);

    let mut a = CsrMatrix::from_pattern(d.n_h(), &d.h_pattern());
    accumulate(&mut a, d.mesh.triangles.len(), |t| {
        Some(element_block(d, t, |qp, vals, k, n| {
            let st: Vec<_> = vals.iter().map(|v| strains(&qp.frame, v)).collect();
            for i in 0..n {
                for j in 0..=i {
                    let s = contract(&st[i].rho, &st[j].rho)
                        + contract(&st[i].gamma, &st[j].gamma)
                        + st[i].tau.dot(&st[j].tau);
                    k[i * n + j] += qp.weight * s;
                }
            }
        }))
    });
    accumulate(&mut a, d.mesh.edges.len(), jump_block);

    let stress = &d.spaces.stress;
    let mut v = CsrMatrix::from_pattern(d.n_v(), &d.vv_pattern());
    accumulate(&mut v, d.mesh.triangles.len(), |t| {
        let dofs = d.v_dofs(t);
        let n = dofs.len();
        let nloc = n / 5;
        let mut k = vec![0.0; n * n];
        let geom = &d.spaces.elements[t].geometry;
        for qp in d.volume_points(t) {
            let psi = stress.eval(geom, qp.bary).values;
            for (f, weight) in V_FIELD_WEIGHTS.iter().enumerate() {
                for a in 0..nloc {
                    for b in 0..nloc {
                        k[(f * nloc + a) * n + f * nloc + b] += qp.weight * weight * (psi[a] * psi[b]);
                    }
                }
            }
        }
        Some(LocalBlock { rows: dofs.clone(), cols: dofs, values: k })
    });
    NormGrams { h, a, v }
}

/// Weights of the stress fields in the V norm; the off-diagonal membrane
/// component appears twice in the double index sum.
pub const V_FIELD_WEIGHTS: [f64; 5] = [1.0, 2.0, 1.0, 1.0, 1.0];

/// Assembles the mixed system with the consistency-functional load of `exact`.
pub fn assemble_system(
    d: &Discretization,
    exact: &crate::analysis::ExactFields,
    penalty: f64,
) -> Result<AssembledSystem> {
    let a = assemble_a(d, penalty)?;
    let b = assemble_b(d);
    let c = assemble_c(d);
    let (f, g) = functional_load(d, exact, penalty);
    Ok(AssembledSystem { a, b, c, f, g, epsilon: exact.epsilon, penalty })
}
