//! Built-in manufactured solutions.
//!
//! Bending-dominated cases split the exact fields as `X⁰ + ε² X¹` with
//! `γ(X⁰) = τ(X⁰) = 0`, so the scaled stresses stay bounded as ε shrinks.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{ExactFields, FieldFn};
use crate::error::{Error, Result};
use crate::geometry::{Chart, GraphTerm};
use crate::jet::Jet;
use crate::material::ElasticModuli;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseName {
    /// Flat plate, exact fields inside the degree-2 space.
    Patch,
    SmoothPlate,
    SmoothCylinder,
    SmoothHypar,
    /// Polynomial fields read from the `[custom]` table.
    Custom,
    Zero,
}

impl CaseName {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseName::Patch => "patch",
            CaseName::SmoothPlate => "smooth-plate",
            CaseName::SmoothCylinder => "smooth-cylinder",
            CaseName::SmoothHypar => "smooth-hypar",
            CaseName::Custom => "custom",
            CaseName::Zero => "zero",
        }
    }

    /// Chart used when the configuration does not name one.
    pub fn default_chart(self) -> Chart {
        match self {
            CaseName::SmoothCylinder => Chart::Cylinder { radius: 1.0 },
            CaseName::SmoothHypar => Chart::HyperbolicParaboloid { c: 0.5 },
            _ => Chart::FlatPlate,
        }
    }
}

/// Polynomial exact fields, one term list per component.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CustomFields {
    pub theta1: Vec<GraphTerm>,
    pub theta2: Vec<GraphTerm>,
    pub u1: Vec<GraphTerm>,
    pub u2: Vec<GraphTerm>,
    pub w: Vec<GraphTerm>,
}

fn polynomial(terms: &[GraphTerm], x: [Jet; 2]) -> Jet {
    terms.iter().fold(Jet::ZERO, |acc, t| acc + x[0].powi(t.i as i32) * x[1].powi(t.j as i32) * t.coef)
}

/// `θ = −∇w` for a quadratic `w`, exact to the last bit so `τ = 0` exactly.
fn negated_gradient(w: Jet, i: usize) -> Jet {
    Jet { value: -w.grad[i], grad: [-w.hess[i][0], -w.hess[i][1]], hess: [[0.0; 2]; 2] }
}

fn patch_base() -> FieldFn {
    Arc::new(|x: [Jet; 2]| {
        let [a, b] = x;
        let w = a * a * 0.5 + a * b - b * b * 0.25;
        [negated_gradient(w, 0), negated_gradient(w, 1), Jet::ZERO, Jet::ZERO, w]
    })
}

fn patch_correction() -> FieldFn {
    Arc::new(|x: [Jet; 2]| {
        let [a, b] = x;
        [a * 0.5 - b, b * 0.3 + 0.1, a * a - a * b, b * b * 0.5 + a, a * b + a * a * 0.25 - b]
    })
}

/// A generic smooth field with every component active.
fn smooth_generic(x: [Jet; 2]) -> [Jet; 5] {
    let [a, b] = x;
    [
        (a + 0.3).sin() * b.cos(),
        (a * 0.7 + b * 1.1).cos() * 0.5,
        (a + b * 0.5).sin(),
        (a * 2.0).cos() * (b + 0.2).sin() * 0.5,
        (a * 1.5).exp() * (b * 1.3).sin() * 0.2,
    ]
}

fn plate_base() -> FieldFn {
    // w = sin(1.3 a + 0.2) cos(0.9 b) + 0.3 a²
    Arc::new(|x: [Jet; 2]| {
        let [a, b] = x;
        let s = a * 1.3 + 0.2;
        let w = s.sin() * (b * 0.9).cos() + a * a * 0.3;
        let t1 = -(s.cos() * (b * 0.9).cos() * 1.3 + a * 0.6);
        let t2 = s.sin() * (b * 0.9).sin() * 0.9;
        [t1, t2, Jet::ZERO, Jet::ZERO, w]
    })
}

/// Inextensional, shear-free motion of the cylinder `(R cos(x1/R), R sin(x1/R), x2)`:
/// `u2 = g(x1)`, `u1 = −x2 g' + h`, `w = R (x2 g'' − h')`.
fn cylinder_base(radius: f64) -> FieldFn {
    Arc::new(move |x: [Jet; 2]| {
        let [a, b] = x;
        let (cg, ch) = (1.2, 0.8);
        let sg = (a * cg).sin();
        let kg = (a * cg).cos();
        let g = sg;
        let g1 = kg * cg;
        let g2 = sg * (-cg * cg);
        let g3 = kg * (-cg * cg * cg);
        let sh = (a * ch).sin();
        let kh = (a * ch).cos();
        let h = kh * 0.5;
        let h1 = sh * (-0.5 * ch);
        let h2 = kh * (-0.5 * ch * ch);
        let u1 = -(b * g1) + h;
        let w = (b * g2 - h1) * radius;
        let t1 = -((b * g3 - h2) * radius) + u1 * (1.0 / radius);
        let t2 = g2 * (-radius);
        [t1, t2, u1, g, w]
    })
}

/// Exact fields of a built-in case.
pub fn exact_fields(
    case: CaseName,
    chart: &Chart,
    epsilon: f64,
    moduli: ElasticModuli,
    custom: Option<&CustomFields>,
) -> Result<ExactFields> {
    let smooth: FieldFn = Arc::new(smooth_generic);
    let fields = match case {
        CaseName::Patch => {
            if *chart != Chart::FlatPlate {
                return Err(Error::Config("the patch case needs the flat-plate chart".into()));
            }
            ExactFields::new("patch", patch_base(), Some(patch_correction()), epsilon, moduli)
        }
        CaseName::SmoothPlate => {
            if *chart != Chart::FlatPlate {
                return Err(Error::Config("the smooth-plate case needs the flat-plate chart".into()));
            }
            ExactFields::new("smooth-plate", plate_base(), Some(smooth), epsilon, moduli)
        }
        CaseName::SmoothCylinder => {
            let Chart::Cylinder { radius } = *chart else {
                return Err(Error::Config("the smooth-cylinder case needs the cylinder chart".into()));
            };
            ExactFields::new("smooth-cylinder", cylinder_base(radius), Some(smooth), epsilon, moduli)
        }
        // No closed-form inextensional motion is used here; the fields carry
        // membrane and shear strain of order one.
        CaseName::SmoothHypar => ExactFields::new("smooth-hypar", smooth, None, epsilon, moduli),
        CaseName::Custom => {
            let c = custom
                .ok_or_else(|| Error::Config("case 'custom' needs a [custom] table of polynomial terms".into()))?
                .clone();
            let f: FieldFn = Arc::new(move |x: [Jet; 2]| {
                [
                    polynomial(&c.theta1, x),
                    polynomial(&c.theta2, x),
                    polynomial(&c.u1, x),
                    polynomial(&c.u2, x),
                    polynomial(&c.w, x),
                ]
            });
            ExactFields::new("custom", f, None, epsilon, moduli)
        }
        CaseName::Zero => ExactFields::zero(epsilon, moduli),
    };
    Ok(fields)
}
