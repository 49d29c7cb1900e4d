//! The discontinuous displacement/rotation space and the continuous stress space.
//!
//! Every local displacement basis is ordered as an orthonormal basis of `P^k`
//! followed by complement functions orthogonal to `P^k`, all with respect to
//! the `√a`-weighted inner product on the element.

pub mod poly;
mod stress;

use nalgebra::{DMatrix, DVector};

pub use stress::StressSpace;

use crate::error::{Error, Result};
use crate::geometry::Chart;
use crate::mesh::Mesh;
use crate::quadrature::TriangleRule;

pub const COMPONENTS: usize = 5;
pub const COMPONENT_NAMES: [&str; COMPONENTS] = ["theta1", "theta2", "u1", "u2", "w"];

/// Affine map of a triangle and the gradients of its barycentric coordinates.
#[derive(Clone, Debug)]
pub struct ElementGeometry {
    pub points: [[f64; 2]; 3],
    pub area: f64,
    /// `grad[i]` is the gradient of `λ_i`.
    pub grad: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(points: [[f64; 2]; 3]) -> ElementGeometry {
        let [p0, p1, p2] = points;
        let j = [[p1[0] - p0[0], p2[0] - p0[0]], [p1[1] - p0[1], p2[1] - p0[1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let g1 = [j[1][1] / det, -j[0][1] / det];
        let g2 = [-j[1][0] / det, j[0][0] / det];
        ElementGeometry { points, area: 0.5 * det, grad: [[-g1[0] - g2[0], -g1[1] - g2[1]], g1, g2] }
    }

    pub fn to_point(&self, bary: [f64; 3]) -> [f64; 2] {
        let p = &self.points;
        [
            bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
            bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
        ]
    }

    pub fn to_bary(&self, x: [f64; 2]) -> [f64; 3] {
        let d = [x[0] - self.points[0][0], x[1] - self.points[0][1]];
        let l1 = self.grad[1][0] * d[0] + self.grad[1][1] * d[1];
        let l2 = self.grad[2][0] * d[0] + self.grad[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }
}

/// Values, parameter gradients and optionally Hessians of a set of local functions.
#[derive(Clone, Debug, Default)]
pub struct BasisEval {
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
    pub hessians: Vec<[[f64; 2]; 2]>,
}

/// Local functions expressed in barycentric monomials up to `degree`.
#[derive(Clone, Debug)]
pub struct LocalBasis {
    pub degree: usize,
    /// Leading functions spanning `P^k`.
    pub n_base: usize,
    /// Row `f` holds the monomial coefficients of function `f`.
    pub coeffs: DMatrix<f64>,
}

impl LocalBasis {
    pub fn len(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.nrows() == 0
    }

    pub fn eval(&self, geom: &ElementGeometry, bary: [f64; 3], hessian: bool) -> BasisEval {
        let m = poly::eval(self.degree, bary[1], bary[2], hessian);
        let (g1, g2) = (geom.grad[1], geom.grad[2]);
        let n = self.len();
        let mut out = BasisEval {
            values: Vec::with_capacity(n),
            grads: Vec::with_capacity(n),
            hessians: Vec::with_capacity(if hessian { n } else { 0 }),
        };
        for f in 0..n {
            let row = self.coeffs.row(f);
            let (mut v, mut a, mut b) = (0.0, 0.0, 0.0);
            let (mut h11, mut h12, mut h22) = (0.0, 0.0, 0.0);
            for (i, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                v += c * m.value[i];
                a += c * m.d1[i];
                b += c * m.d2[i];
                if hessian {
                    h11 += c * m.d11[i];
                    h12 += c * m.d12[i];
                    h22 += c * m.d22[i];
                }
            }
            out.values.push(v);
            out.grads.push([a * g1[0] + b * g2[0], a * g1[1] + b * g2[1]]);
            if hessian {
                let mut h = [[0.0; 2]; 2];
                for (k, row) in h.iter_mut().enumerate() {
                    for (l, x) in row.iter_mut().enumerate() {
                        *x = h11 * g1[k] * g1[l] + h12 * (g1[k] * g2[l] + g2[k] * g1[l]) + h22 * g2[k] * g2[l];
                    }
                }
                out.hessians.push(h);
            }
        }
        out
    }
}

/// Which displacement space an element carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisplacementKind {
    Standard,
    /// `P^k` plus two cubic functions for one free edge (`k = 2`).
    Enriched {
        free_edge: usize,
    },
    /// Full `P^{k+1}`.
    NextDegree,
}

/// The two enrichment functions of a one-free-edge element, as cubic coefficients.
#[derive(Clone, Debug)]
pub struct EnrichmentBasis {
    pub free_edge: usize,
    pub functions: [Vec<f64>; 2],
}

#[derive(Clone, Debug)]
pub struct ElementSpace {
    pub geometry: ElementGeometry,
    pub kind: DisplacementKind,
    pub free_edges: Vec<usize>,
    pub rotation: LocalBasis,
    pub displacement: LocalBasis,
    pub enrichment: Option<EnrichmentBasis>,
}

impl ElementSpace {
    pub fn n_local(&self) -> usize {
        2 * self.rotation.len() + 3 * self.displacement.len()
    }

    pub fn basis(&self, component: usize) -> &LocalBasis {
        if component < 2 {
            &self.rotation
        } else {
            &self.displacement
        }
    }

    /// Local offset of the first function of `component`.
    pub fn component_offset(&self, component: usize) -> usize {
        let nr = self.rotation.len();
        let nd = self.displacement.len();
        if component < 2 {
            component * nr
        } else {
            2 * nr + (component - 2) * nd
        }
    }

    /// `(component, function)` of each local DOF in order.
    pub fn dof_table(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_local());
        for c in 0..COMPONENTS {
            for f in 0..self.basis(c).len() {
                out.push((c, f));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SpacePair {
    pub degree: usize,
    pub elements: Vec<ElementSpace>,
    /// First global H DOF of each element.
    pub offsets: Vec<usize>,
    pub n_h: usize,
    pub stress: StressSpace,
}

impl SpacePair {
    pub fn n_v(&self) -> usize {
        self.stress.n_dofs()
    }

    pub fn h_range(&self, t: usize) -> std::ops::Range<usize> {
        self.offsets[t]..self.offsets[t] + self.elements[t].n_local()
    }
}

/// Samples `√a` at the rule's points on an element.
pub fn sqrt_a_samples(chart: &Chart, geom: &ElementGeometry, rule: &TriangleRule) -> Result<Vec<f64>> {
    rule.points.iter().map(|&b| chart.frame(geom.to_point(b)).map(|f| f.sqrt_a)).collect()
}

/// `∫ weight(λ) m_i m_j √a` over the element for monomials up to `degree`.
fn weighted_gram(
    geom: &ElementGeometry,
    rule: &TriangleRule,
    sqrt_a: &[f64],
    degree: usize,
    weight: impl Fn([f64; 3]) -> f64,
) -> DMatrix<f64> {
    let n = poly::dim(degree);
    let mut g = DMatrix::zeros(n, n);
    for ((b, w), sa) in rule.points.iter().zip(&rule.weights).zip(sqrt_a) {
        let m = poly::eval(degree, b[1], b[2], false).value;
        let s = w * geom.area * sa * weight(*b);
        for i in 0..n {
            for j in 0..=i {
                g[(i, j)] += s * m[i] * m[j];
            }
        }
    }
    g.fill_upper_triangle_with_lower_triangle();
    g
}

fn orthonormal_monomials(gram: DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    let chol = gram.cholesky().ok_or_else(|| Error::SingularLocal { context: context.into() })?;
    let l = chol.l();
    let n = l.nrows();
    l.solve_lower_triangular(&DMatrix::identity(n, n)).ok_or_else(|| Error::SingularLocal { context: context.into() })
}

/// Solves the two weighted Gram systems defining the cubic enrichment of a
/// one-free-edge element.
pub fn enrichment(
    geom: &ElementGeometry,
    free_edge: usize,
    rule: &TriangleRule,
    sqrt_a: &[f64],
) -> Result<EnrichmentBasis> {
    let vanishing = poly::barycentric(free_edge);
    let next = poly::barycentric((free_edge + 1) % 3);
    let lam = |b: [f64; 3]| b[free_edge];
    let gram = weighted_gram(geom, rule, sqrt_a, 2, lam);
    let chol = gram.cholesky().ok_or_else(|| Error::SingularLocal { context: "enrichment Gram".into() })?;
    let n = poly::dim(2);
    let mut rhs_one = DVector::zeros(n);
    let mut rhs_next = DVector::zeros(n);
    for ((b, w), sa) in rule.points.iter().zip(&rule.weights).zip(sqrt_a) {
        let m = poly::eval(2, b[1], b[2], false).value;
        let s = w * geom.area * sa;
        for i in 0..n {
            rhs_one[i] -= s * m[i];
            rhs_next[i] -= s * b[(free_edge + 1) % 3] * m[i];
        }
    }
    let p_one = chol.solve(&rhs_one);
    let p_next = chol.solve(&rhs_next);
    let mut f1 = poly::mul(&vanishing, 1, p_one.as_slice(), 2);
    f1[0] += 1.0;
    let mut f2 = poly::mul(&vanishing, 1, p_next.as_slice(), 2);
    for (c, n) in f2.iter_mut().zip(poly::lift(&next, 3)) {
        *c += n;
    }
    Ok(EnrichmentBasis { free_edge, functions: [f1, f2] })
}

fn standard_basis(geom: &ElementGeometry, rule: &TriangleRule, sqrt_a: &[f64], k: usize) -> Result<LocalBasis> {
    let coeffs = orthonormal_monomials(weighted_gram(geom, rule, sqrt_a, k, |_| 1.0), "element Gram")?;
    Ok(LocalBasis { degree: k, n_base: poly::dim(k), coeffs })
}

fn next_degree_basis(geom: &ElementGeometry, rule: &TriangleRule, sqrt_a: &[f64], k: usize) -> Result<LocalBasis> {
    let coeffs = orthonormal_monomials(weighted_gram(geom, rule, sqrt_a, k + 1, |_| 1.0), "element Gram")?;
    Ok(LocalBasis { degree: k + 1, n_base: poly::dim(k), coeffs })
}

fn enriched_basis(
    base: &LocalBasis,
    extra: &EnrichmentBasis,
    geom: &ElementGeometry,
    rule: &TriangleRule,
    sqrt_a: &[f64],
) -> Result<LocalBasis> {
    // Orthonormalize the two enrichment functions among themselves.
    let mut g = DMatrix::zeros(2, 2);
    for ((b, w), sa) in rule.points.iter().zip(&rule.weights).zip(sqrt_a) {
        let m = poly::eval(3, b[1], b[2], false).value;
        let v: Vec<f64> = extra.functions.iter().map(|f| f.iter().zip(&m).map(|(c, x)| c * x).sum()).collect();
        let s = w * geom.area * sa;
        for i in 0..2 {
            for j in 0..2 {
                g[(i, j)] += s * v[i] * v[j];
            }
        }
    }
    let t = orthonormal_monomials(g, "enrichment normalization")?;
    let n_base = base.len();
    let mut coeffs = DMatrix::zeros(n_base + 2, poly::dim(3));
    coeffs.view_mut((0, 0), (n_base, base.coeffs.ncols())).copy_from(&base.coeffs);
    for i in 0..2 {
        for j in 0..2 {
            for (c, f) in extra.functions[j].iter().enumerate() {
                coeffs[(n_base + i, c)] += t[(i, j)] * f;
            }
        }
    }
    Ok(LocalBasis { degree: 3, n_base, coeffs })
}

/// Builds both spaces on `mesh`. Elements with one free edge get the enriched
/// displacement space when `k = 2` and `P^{k+1}` otherwise; two free edges get `P^{k+1}`.
pub fn build_spaces(mesh: &Mesh, chart: &Chart, k: usize, rule: &TriangleRule) -> Result<SpacePair> {
    if k < 2 {
        return Err(Error::Config(format!("polynomial degree must be at least 2, got {k}")));
    }
    let mut elements = Vec::with_capacity(mesh.triangles.len());
    let mut offsets = Vec::with_capacity(mesh.triangles.len());
    let mut n_h = 0;
    for t in 0..mesh.triangles.len() {
        let geometry = ElementGeometry::new(mesh.points(t));
        let sqrt_a = sqrt_a_samples(chart, &geometry, rule)?;
        let free_edges = mesh.free_edges(t);
        let rotation = standard_basis(&geometry, rule, &sqrt_a, k)?;
        let (kind, displacement, enrichment_basis) = match free_edges.len() {
            0 => (DisplacementKind::Standard, rotation.clone(), None),
            1 if k == 2 => {
                let e = free_edges[0];
                let extra = enrichment(&geometry, e, rule, &sqrt_a)?;
                let disp = enriched_basis(&rotation, &extra, &geometry, rule, &sqrt_a)?;
                (DisplacementKind::Enriched { free_edge: e }, disp, Some(extra))
            }
            1 | 2 => (DisplacementKind::NextDegree, next_degree_basis(&geometry, rule, &sqrt_a, k)?, None),
            _ => {
                return Err(Error::Unsupported(format!(
                    "triangle {t} has three free edges; refine the mesh so no element is isolated"
                )))
            }
        };
        let el = ElementSpace { geometry, kind, free_edges, rotation, displacement, enrichment: enrichment_basis };
        offsets.push(n_h);
        n_h += el.n_local();
        elements.push(el);
    }
    let stress = StressSpace::new(mesh, k - 1)?;
    Ok(SpacePair { degree: k, elements, offsets, n_h, stress })
}
