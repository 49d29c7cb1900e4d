//! Analytic displacement/rotation fields and the stresses they induce.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use crate::geometry::GeomFrame;
use crate::jet::Jet;
use crate::material::{elastic_apply, shear_apply, strains, ElasticModuli, PointValues};

/// Maps the coordinate jets to `(θ1, θ2, u1, u2, w)`.
pub type FieldFn = Arc<dyn Fn([Jet; 2]) -> [Jet; 5] + Send + Sync>;

/// Scaled stresses `(ℳ, ξ)` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressValue {
    pub membrane: Matrix2<f64>,
    pub shear: Vector2<f64>,
}

impl StressValue {
    /// Component `f` in the order `ℳ¹¹, ℳ¹², ℳ²², ξ¹, ξ²`.
    pub fn field(&self, f: usize) -> f64 {
        match f {
            0 => self.membrane[(0, 0)],
            1 => self.membrane[(0, 1)],
            2 => self.membrane[(1, 1)],
            3 => self.shear[0],
            _ => self.shear[1],
        }
    }
}

/// Exact fields `X = X⁰ + ε² X¹` with `ℳ = ε^{-2} Aγ(X)` and `ξ = ε^{-2} κμ a τ(X)`.
/// The two parts are kept apart so a pure-bending `X⁰` contributes no rounding
/// noise amplified by `ε^{-2}`.
#[derive(Clone)]
pub struct ExactFields {
    pub name: String,
    base: FieldFn,
    correction: Option<FieldFn>,
    pub epsilon: f64,
    pub moduli: ElasticModuli,
}

impl fmt::Debug for ExactFields {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactFields").field("name", &self.name).field("epsilon", &self.epsilon).finish()
    }
}

pub fn jets_to_values(j: &[Jet; 5]) -> PointValues {
    PointValues {
        theta: [j[0].value, j[1].value],
        dtheta: [j[0].grad, j[1].grad],
        u: [j[2].value, j[3].value],
        du: [j[2].grad, j[3].grad],
        w: j[4].value,
        dw: j[4].grad,
    }
}

impl ExactFields {
    pub fn new(
        name: impl Into<String>,
        base: FieldFn,
        correction: Option<FieldFn>,
        epsilon: f64,
        moduli: ElasticModuli,
    ) -> ExactFields {
        ExactFields { name: name.into(), base, correction, epsilon, moduli }
    }

    pub fn zero(epsilon: f64, moduli: ElasticModuli) -> ExactFields {
        ExactFields::new("zero", Arc::new(|_| [Jet::ZERO; 5]), None, epsilon, moduli)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> ExactFields {
        ExactFields { epsilon, ..self.clone() }
    }

    pub fn base_jets(&self, x: [f64; 2]) -> [Jet; 5] {
        (self.base)(Jet::coords(x))
    }

    pub fn correction_jets(&self, x: [f64; 2]) -> [Jet; 5] {
        match &self.correction {
            Some(c) => c(Jet::coords(x)),
            None => [Jet::ZERO; 5],
        }
    }

    pub fn jets(&self, x: [f64; 2]) -> [Jet; 5] {
        let b = self.base_jets(x);
        if self.correction.is_none() {
            return b;
        }
        let c = self.correction_jets(x);
        let e2 = self.epsilon * self.epsilon;
        std::array::from_fn(|i| b[i] + c[i] * e2)
    }

    pub fn point_values(&self, x: [f64; 2]) -> PointValues {
        jets_to_values(&self.jets(x))
    }

    pub fn stresses(&self, frame: &GeomFrame, x: [f64; 2]) -> StressValue {
        let m = &self.moduli;
        let sb = strains(frame, &jets_to_values(&self.base_jets(x)));
        let scale = 1.0 / (self.epsilon * self.epsilon);
        let mut membrane = elastic_apply(frame, m, &sb.gamma) * scale;
        let mut shear = shear_apply(frame, m, &sb.tau) * scale;
        if self.correction.is_some() {
            let sc = strains(frame, &jets_to_values(&self.correction_jets(x)));
            membrane += elastic_apply(frame, m, &sc.gamma);
            shear += shear_apply(frame, m, &sc.tau);
        }
        StressValue { membrane, shear }
    }
}

/// Flat-plate divergence helpers on Hessians.
mod flat {
    use crate::jet::Jet;

    /// `∂_β (A e(v))^{αβ}` for the in-plane pair `v`, with `A e = 2μ e + λ' tr(e) I`.
    pub fn div_elastic(v: [&Jet; 2], mu: f64, plane_lambda: f64) -> [f64; 2] {
        let div_grad = |a: usize| v[0].hess[0][a] + v[1].hess[1][a];
        std::array::from_fn(|a| {
            let lap = v[a].hess[0][0] + v[a].hess[1][1];
            mu * (lap + div_grad(a)) + plane_lambda * div_grad(a)
        })
    }

    /// `A e(v) n` for the in-plane pair `v`.
    pub fn traction(v: [&Jet; 2], mu: f64, plane_lambda: f64, n: [f64; 2]) -> [f64; 2] {
        let e =
            [[v[0].grad[0], 0.5 * (v[0].grad[1] + v[1].grad[0])], [0.5 * (v[0].grad[1] + v[1].grad[0]), v[1].grad[1]]];
        let tr = e[0][0] + e[1][1];
        std::array::from_fn(|a| 2.0 * mu * (e[a][0] * n[0] + e[a][1] * n[1]) + plane_lambda * tr * n[a])
    }
}

/// Strong-form load densities of a flat plate. Returns
/// `(moment m^α, surface p^α, p³)` at an interior point.
pub fn flat_strong_interior(exact: &ExactFields, x: [f64; 2]) -> ([f64; 2], [f64; 2], f64) {
    let m = &exact.moduli;
    let lp = 2.0 * m.mu * m.lambda / (2.0 * m.mu + m.lambda);
    let km = m.kappa * m.mu;
    let e2 = exact.epsilon * exact.epsilon;
    let j = exact.jets(x);
    let b = exact.base_jets(x);
    let c = exact.correction_jets(x);
    let tau = |f: &[Jet; 5]| [f[4].grad[0] + f[0].value, f[4].grad[1] + f[1].value];
    let div_tau = |f: &[Jet; 5]| f[4].hess[0][0] + f[4].hess[1][1] + f[0].grad[0] + f[1].grad[1];
    let div_rho = flat::div_elastic([&j[0], &j[1]], m.mu, lp);
    let div_gamma = flat::div_elastic([&j[2], &j[3]], m.mu, lp);
    let div_m_base = flat::div_elastic([&b[2], &b[3]], m.mu, lp);
    let div_m_corr = flat::div_elastic([&c[2], &c[3]], m.mu, lp);
    let t = tau(&j);
    let (tb, tc) = (tau(&b), tau(&c));
    let moment = std::array::from_fn(|a| {
        let xi = km * (tb[a] / e2 + tc[a]);
        (-div_rho[a] + km * t[a]) / 3.0 + xi
    });
    let surface = std::array::from_fn(|a| -div_gamma[a] / 3.0 - (div_m_base[a] / e2 + div_m_corr[a]));
    let p3 = -km * div_tau(&j) / 3.0 - km * (div_tau(&b) / e2 + div_tau(&c));
    (moment, surface, p3)
}

/// Natural boundary data of a flat plate at `x` with outward normal `n`:
/// `(r^α, q^α, q³)`.
pub fn flat_strong_boundary(exact: &ExactFields, x: [f64; 2], n: [f64; 2]) -> ([f64; 2], [f64; 2], f64) {
    let m = &exact.moduli;
    let lp = 2.0 * m.mu * m.lambda / (2.0 * m.mu + m.lambda);
    let km = m.kappa * m.mu;
    let e2 = exact.epsilon * exact.epsilon;
    let j = exact.jets(x);
    let b = exact.base_jets(x);
    let c = exact.correction_jets(x);
    let r = flat::traction([&j[0], &j[1]], m.mu, lp, n).map(|v| v / 3.0);
    let tg = flat::traction([&j[2], &j[3]], m.mu, lp, n);
    let tb = flat::traction([&b[2], &b[3]], m.mu, lp, n);
    let tc = flat::traction([&c[2], &c[3]], m.mu, lp, n);
    let q = std::array::from_fn(|a| tg[a] / 3.0 + tb[a] / e2 + tc[a]);
    let tn = |f: &[Jet; 5]| (f[4].grad[0] + f[0].value) * n[0] + (f[4].grad[1] + f[1].value) * n[1];
    let q3 = km * tn(&j) / 3.0 + km * (tn(&b) / e2 + tn(&c));
    (r, q, q3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;

    #[test]
    fn stresses_follow_constitutive_blocks() {
        let f: FieldFn = Arc::new(|x: [Jet; 2]| {
            let [a, b] = x;
            [a * b, b.sin(), (a * 2.0).cos(), a * a * b, (a + b).exp()]
        });
        let eps = 0.1;
        let ex = ExactFields::new("t", f.clone(), None, eps, ElasticModuli::default());
        let chart = Chart::HyperbolicParaboloid { c: 0.5 };
        let x = [0.3, 0.6];
        let frame = chart.frame(x).unwrap();
        let s = ex.stresses(&frame, x);
        let st = strains(&frame, &ex.point_values(x));
        let expect = elastic_apply(&frame, &ex.moduli, &st.gamma) / (eps * eps);
        assert!((s.membrane - expect).norm() < 1e-12 * expect.norm());
        // Splitting into base plus correction gives the same total.
        let split = ExactFields::new("t", f.clone(), Some(f), eps, ElasticModuli::default());
        let total = split.point_values(x);
        let scaled = ex.point_values(x);
        assert!((total.w - scaled.w * (1.0 + eps * eps)).abs() < 1e-14);
    }
}
