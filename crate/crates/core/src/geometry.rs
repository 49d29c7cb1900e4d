//! Midsurface charts and the pointwise differential geometry of the surface.

use nalgebra::{Matrix2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One term `coef * x1^i * x2^j` of a graph surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphTerm {
    pub i: u32,
    pub j: u32,
    pub coef: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Chart {
    FlatPlate,
    /// `(R cos(x1/R), R sin(x1/R), x2)`.
    Cylinder {
        radius: f64,
    },
    /// `(x1, x2, c x1 x2)`.
    HyperbolicParaboloid {
        c: f64,
    },
    /// `(x1, x2, Σ coef x1^i x2^j)`.
    PolynomialGraph {
        terms: Vec<GraphTerm>,
    },
}

/// Chart value with its first and second parameter derivatives.
#[derive(Clone, Copy, Debug)]
pub struct ChartJet {
    pub point: Vector3<f64>,
    pub d: [Vector3<f64>; 2],
    /// `dd[α][β] = ∂_α ∂_β φ`.
    pub dd: [[Vector3<f64>; 2]; 2],
}

impl Chart {
    pub fn name(&self) -> &'static str {
        match self {
            Chart::FlatPlate => "flat-plate",
            Chart::Cylinder { .. } => "cylinder",
            Chart::HyperbolicParaboloid { .. } => "hyperbolic-paraboloid",
            Chart::PolynomialGraph { .. } => "polynomial-graph",
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> Vector3<f64> {
        self.jet(x).point
    }

    pub fn jet(&self, x: [f64; 2]) -> ChartJet {
        let z = Vector3::zeros();
        match self {
            Chart::FlatPlate => {
                ChartJet { point: Vector3::new(x[0], x[1], 0.0), d: [Vector3::x(), Vector3::y()], dd: [[z; 2]; 2] }
            }
            Chart::Cylinder { radius } => {
                let r = *radius;
                let (s, c) = (x[0] / r).sin_cos();
                ChartJet {
                    point: Vector3::new(r * c, r * s, x[1]),
                    d: [Vector3::new(-s, c, 0.0), Vector3::z()],
                    dd: [[Vector3::new(-c / r, -s / r, 0.0), z], [z, z]],
                }
            }
            Chart::HyperbolicParaboloid { c } => ChartJet {
                point: Vector3::new(x[0], x[1], c * x[0] * x[1]),
                d: [Vector3::new(1.0, 0.0, c * x[1]), Vector3::new(0.0, 1.0, c * x[0])],
                dd: [[z, Vector3::new(0.0, 0.0, *c)], [Vector3::new(0.0, 0.0, *c), z]],
            },
            Chart::PolynomialGraph { terms } => {
                let mut h = 0.0;
                let mut dh = [0.0; 2];
                let mut ddh = [[0.0; 2]; 2];
                for t in terms {
                    let (i, j) = (t.i as i32, t.j as i32);
                    let p = |base: f64, e: i32| if e < 0 { 0.0 } else { base.powi(e) };
                    let fi = t.i as f64;
                    let fj = t.j as f64;
                    h += t.coef * p(x[0], i) * p(x[1], j);
                    dh[0] += t.coef * fi * p(x[0], i - 1) * p(x[1], j);
                    dh[1] += t.coef * fj * p(x[0], i) * p(x[1], j - 1);
                    ddh[0][0] += t.coef * fi * (fi - 1.0) * p(x[0], i - 2) * p(x[1], j);
                    ddh[0][1] += t.coef * fi * fj * p(x[0], i - 1) * p(x[1], j - 1);
                    ddh[1][1] += t.coef * fj * (fj - 1.0) * p(x[0], i) * p(x[1], j - 2);
                }
                ddh[1][0] = ddh[0][1];
                let e3 = Vector3::z();
                ChartJet {
                    point: Vector3::new(x[0], x[1], h),
                    d: [Vector3::new(1.0, 0.0, dh[0]), Vector3::new(0.0, 1.0, dh[1])],
                    dd: [[e3 * ddh[0][0], e3 * ddh[0][1]], [e3 * ddh[1][0], e3 * ddh[1][1]]],
                }
            }
        }
    }

    /// Geometric coefficients at a parameter point.
    pub fn frame(&self, x: [f64; 2]) -> Result<GeomFrame> {
        GeomFrame::from_jet(&self.jet(x), x)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Chart::Cylinder { radius } if !(*radius > 0.0 && radius.is_finite()) => {
                Err(Error::Config(format!("cylinder radius must be positive, got {radius}")))
            }
            Chart::HyperbolicParaboloid { c } if !c.is_finite() => {
                Err(Error::Config("hyperbolic paraboloid coefficient must be finite".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Pointwise geometric coefficients of the midsurface.
#[derive(Clone, Debug)]
pub struct GeomFrame {
    pub a_cov: Matrix2<f64>,
    pub a_con: Matrix2<f64>,
    pub sqrt_a: f64,
    pub b_cov: Matrix2<f64>,
    /// `b_mixed[(α, β)] = b^α_β`.
    pub b_mixed: Matrix2<f64>,
    pub c_cov: Matrix2<f64>,
    /// `christoffel[γ][(α, β)] = Γ^γ_{αβ}`.
    pub christoffel: [Matrix2<f64>; 2],
    /// Covariant basis `a_1, a_2, a_3`.
    pub basis: [Vector3<f64>; 3],
    /// Contravariant basis `a^1, a^2, a^3`.
    pub dual_basis: [Vector3<f64>; 3],
}

impl GeomFrame {
    pub fn from_jet(jet: &ChartJet, x: [f64; 2]) -> Result<GeomFrame> {
        let [a1, a2] = jet.d;
        let normal = a1.cross(&a2);
        let norm = normal.norm();
        if !(norm > 1e-12 * a1.norm() * a2.norm()) {
            return Err(Error::DegenerateChart { x: x[0], y: x[1], norm });
        }
        let a3 = normal / norm;
        let a_cov = Matrix2::new(a1.dot(&a1), a1.dot(&a2), a2.dot(&a1), a2.dot(&a2));
        let det = a_cov[(0, 0)] * a_cov[(1, 1)] - a_cov[(0, 1)] * a_cov[(1, 0)];
        let a_con = Matrix2::new(a_cov[(1, 1)], -a_cov[(0, 1)], -a_cov[(1, 0)], a_cov[(0, 0)]) / det;
        let up = [a1 * a_con[(0, 0)] + a2 * a_con[(0, 1)], a1 * a_con[(1, 0)] + a2 * a_con[(1, 1)]];
        let mut b_cov = Matrix2::zeros();
        let mut christoffel = [Matrix2::zeros(); 2];
        for al in 0..2 {
            for be in 0..2 {
                let dd = jet.dd[al][be];
                b_cov[(al, be)] = a3.dot(&dd);
                for (g, gamma) in christoffel.iter_mut().enumerate() {
                    gamma[(al, be)] = up[g].dot(&dd);
                }
            }
        }
        let b_mixed = a_con * b_cov;
        let c_cov = b_mixed.transpose() * b_cov;
        Ok(GeomFrame {
            a_cov,
            a_con,
            sqrt_a: det.sqrt(),
            b_cov,
            b_mixed,
            c_cov,
            christoffel,
            basis: [a1, a2, a3],
            dual_basis: [up[0], up[1], a3],
        })
    }

    /// `b_α^γ` as a matrix indexed `(α, γ)`; equals the transpose of `b_mixed`.
    pub fn b_lower_upper(&self) -> Matrix2<f64> {
        self.b_mixed.transpose()
    }
}

/// `u_{α|β}` indexed `(α, β)`, from the covariant components and their partials
/// `du[(α, β)] = ∂_β u_α`.
pub fn covariant_derivative_covector(frame: &GeomFrame, u: Vector2<f64>, du: &Matrix2<f64>) -> Matrix2<f64> {
    let mut out = *du;
    for al in 0..2 {
        for be in 0..2 {
            for g in 0..2 {
                out[(al, be)] -= frame.christoffel[g][(al, be)] * u[g];
            }
        }
    }
    out
}

/// `η^α|_β` indexed `(α, β)`, with `deta[(α, β)] = ∂_β η^α`.
pub fn covariant_derivative_vector(frame: &GeomFrame, eta: Vector2<f64>, deta: &Matrix2<f64>) -> Matrix2<f64> {
    let mut out = *deta;
    for al in 0..2 {
        for be in 0..2 {
            for d in 0..2 {
                out[(al, be)] += frame.christoffel[al][(be, d)] * eta[d];
            }
        }
    }
    out
}

/// `σ^{αβ}|_γ` for each `γ`, with `dsigma[γ] = ∂_γ σ`.
pub fn covariant_derivative_tensor(
    frame: &GeomFrame,
    sigma: &Matrix2<f64>,
    dsigma: &[Matrix2<f64>; 2],
) -> [Matrix2<f64>; 2] {
    let mut out = *dsigma;
    for (g, o) in out.iter_mut().enumerate() {
        for al in 0..2 {
            for be in 0..2 {
                let mut s = 0.0;
                for l in 0..2 {
                    s += frame.christoffel[al][(g, l)] * sigma[(l, be)];
                    s += frame.christoffel[be][(g, l)] * sigma[(al, l)];
                }
                o[(al, be)] += s;
            }
        }
    }
    out
}

/// Surface weights along a flat edge with unit tangent `t` traversed with the
/// element on its left.
#[derive(Clone, Copy, Debug)]
pub struct EdgeWeights {
    /// `ds̃/ds`.
    pub arc: f64,
    /// Flat outward unit normal.
    pub flat_normal: [f64; 2],
    /// `n_α ds̃/ds = n̄_α √a`.
    pub conormal: [f64; 2],
}

pub fn edge_weights(frame: &GeomFrame, t: [f64; 2]) -> EdgeWeights {
    let tv = Vector2::new(t[0], t[1]);
    let arc = (tv.transpose() * frame.a_cov * tv)[(0, 0)].sqrt();
    let flat_normal = [t[1], -t[0]];
    EdgeWeights { arc, flat_normal, conormal: [flat_normal[0] * frame.sqrt_a, flat_normal[1] * frame.sqrt_a] }
}
