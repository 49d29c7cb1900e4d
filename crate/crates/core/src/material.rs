//! Strain operators and the elastic and compliance tensors of the shell.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{covariant_derivative_covector, GeomFrame};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ElasticModuli {
    pub lambda: f64,
    pub mu: f64,
    /// Shear correction factor.
    pub kappa: f64,
}

impl Default for ElasticModuli {
    fn default() -> Self {
        ElasticModuli { lambda: 1.0, mu: 1.0, kappa: 1.0 }
    }
}

impl ElasticModuli {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !(self.lambda >= 0.0) || !(self.kappa > 0.0) {
            return Err(Error::Config(format!(
                "moduli need mu > 0, lambda >= 0, kappa > 0 (got {}, {}, {})",
                self.mu, self.lambda, self.kappa
            )));
        }
        Ok(())
    }

    /// Default interior penalty `10 (3λ + 2μ)`.
    pub fn default_penalty(&self) -> f64 {
        10.0 * (3.0 * self.lambda + 2.0 * self.mu)
    }

    fn plane_lambda(&self) -> f64 {
        2.0 * self.mu * self.lambda / (2.0 * self.mu + self.lambda)
    }
}

/// Values and parameter gradients of `(θ, u, w)` at one point.
/// `dtheta[α][β] = ∂_β θ_α`, likewise `du`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointValues {
    pub theta: [f64; 2],
    pub dtheta: [[f64; 2]; 2],
    pub u: [f64; 2],
    pub du: [[f64; 2]; 2],
    pub w: f64,
    pub dw: [f64; 2],
}

impl PointValues {
    /// One scalar component (0..5 for θ1, θ2, u1, u2, w) set to `value`, `grad`.
    pub fn component(c: usize, value: f64, grad: [f64; 2]) -> PointValues {
        let mut p = PointValues::default();
        match c {
            0 | 1 => {
                p.theta[c] = value;
                p.dtheta[c] = grad;
            }
            2 | 3 => {
                p.u[c - 2] = value;
                p.du[c - 2] = grad;
            }
            _ => {
                p.w = value;
                p.dw = grad;
            }
        }
        p
    }

    pub fn values(&self) -> [f64; 5] {
        [self.theta[0], self.theta[1], self.u[0], self.u[1], self.w]
    }

    pub fn grads(&self) -> [[f64; 2]; 5] {
        [self.dtheta[0], self.dtheta[1], self.du[0], self.du[1], self.dw]
    }

    pub fn sub(&self, other: &PointValues) -> PointValues {
        let d2 = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
            [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
        };
        PointValues {
            theta: [self.theta[0] - other.theta[0], self.theta[1] - other.theta[1]],
            dtheta: d2(self.dtheta, other.dtheta),
            u: [self.u[0] - other.u[0], self.u[1] - other.u[1]],
            du: d2(self.du, other.du),
            w: self.w - other.w,
            dw: [self.dw[0] - other.dw[0], self.dw[1] - other.dw[1]],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrainSet {
    pub rho: Matrix2<f64>,
    pub gamma: Matrix2<f64>,
    pub tau: Vector2<f64>,
}

fn mat(d: [[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(d[0][0], d[0][1], d[1][0], d[1][1])
}

fn sym(m: Matrix2<f64>) -> Matrix2<f64> {
    (m + m.transpose()) * 0.5
}

pub fn strains(frame: &GeomFrame, p: &PointValues) -> StrainSet {
    let theta_cov = covariant_derivative_covector(frame, Vector2::from(p.theta), &mat(p.dtheta));
    let u_vec = Vector2::from(p.u);
    let u_cov = covariant_derivative_covector(frame, u_vec, &mat(p.du));
    let bl = frame.b_lower_upper();
    let bu = bl * u_cov;
    let rho = sym(theta_cov) - sym(bu) + frame.c_cov * p.w;
    let gamma = sym(u_cov) - frame.b_cov * p.w;
    let tau = Vector2::from(p.dw) + bl * u_vec + Vector2::from(p.theta);
    StrainSet { rho, gamma, tau }
}

/// Full double contraction `Σ s_{αβ} t_{αβ}`.
pub fn contract(s: &Matrix2<f64>, t: &Matrix2<f64>) -> f64 {
    s[(0, 0)] * t[(0, 0)] + s[(0, 1)] * t[(0, 1)] + s[(1, 0)] * t[(1, 0)] + s[(1, 1)] * t[(1, 1)]
}

/// Contravariant stress of a covariant strain.
pub fn elastic_apply(frame: &GeomFrame, moduli: &ElasticModuli, gamma: &Matrix2<f64>) -> Matrix2<f64> {
    let a = &frame.a_con;
    let aga = a * gamma * a;
    (aga + aga.transpose()) * moduli.mu + a * (moduli.plane_lambda() * contract(a, gamma))
}

/// Covariant strain of a contravariant stress; inverse of [`elastic_apply`].
pub fn compliance_apply(frame: &GeomFrame, moduli: &ElasticModuli, sigma: &Matrix2<f64>) -> Matrix2<f64> {
    let a = &frame.a_cov;
    let mixed = (a * sigma.transpose() * a + a * sigma * a) * 0.5;
    let trace_coef = moduli.lambda / (2.0 * moduli.mu + 3.0 * moduli.lambda);
    (mixed - a * (trace_coef * contract(a, sigma))) / (2.0 * moduli.mu)
}

/// `κμ a^{αβ} τ_β`.
pub fn shear_apply(frame: &GeomFrame, moduli: &ElasticModuli, tau: &Vector2<f64>) -> Vector2<f64> {
    frame.a_con * tau * (moduli.kappa * moduli.mu)
}

/// `(κμ)^{-1} a_{αβ} ξ^β`.
pub fn shear_compliance(frame: &GeomFrame, moduli: &ElasticModuli, xi: &Vector2<f64>) -> Vector2<f64> {
    frame.a_cov * xi / (moduli.kappa * moduli.mu)
}

/// Flat symmetric gradient of an in-plane field.
pub fn symmetric_gradient(du: [[f64; 2]; 2]) -> Matrix2<f64> {
    sym(mat(du))
}
