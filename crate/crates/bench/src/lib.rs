//! Shared fixtures for the benchmarks.

use naghdi_core::analysis::ExactFields;
use naghdi_core::assembly::Discretization;
use naghdi_core::geometry::Chart;
use naghdi_core::harness::{exact_fields, CaseName};
use naghdi_core::material::ElasticModuli;
use naghdi_core::mesh::{Mesh, Rect, SideLabels};

/// Cylinder discretization on an `n × n` structured mesh with the smooth
/// manufactured solution at thickness `epsilon`.
pub fn cylinder(n: usize, epsilon: f64) -> (Discretization, ExactFields) {
    let chart = Chart::Cylinder { radius: 1.0 };
    let moduli = ElasticModuli::default();
    let mesh = Mesh::structured(Rect::default(), n, SideLabels::default()).expect("structured mesh");
    let exact = exact_fields(CaseName::SmoothCylinder, &chart, epsilon, moduli, None).expect("built-in case");
    let d = Discretization::new(mesh, chart, moduli, 2).expect("valid discretization");
    (d, exact)
}
