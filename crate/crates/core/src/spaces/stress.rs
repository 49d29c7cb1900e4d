//! Continuous Lagrange space for the five stress fields.

use nalgebra::DMatrix;

use super::{poly, BasisEval, ElementGeometry, LocalBasis};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Number of scalar stress fields: `ℳ¹¹, ℳ¹², ℳ²², ξ¹, ξ²`.
pub const STRESS_FIELDS: usize = 5;

#[derive(Clone, Debug)]
pub struct StressSpace {
    pub degree: usize,
    pub n_nodes: usize,
    /// Global node of each local node, per element.
    pub element_nodes: Vec<Vec<usize>>,
    pub node_points: Vec<[f64; 2]>,
    /// Barycentric coordinates of the local nodes.
    pub local_nodes: Vec<[f64; 3]>,
    /// Nodal basis shared by all elements.
    pub basis: LocalBasis,
}

impl StressSpace {
    pub fn new(mesh: &Mesh, degree: usize) -> Result<StressSpace> {
        if degree == 0 {
            return Err(Error::Config("stress space degree must be at least 1".into()));
        }
        let m = degree;
        let mf = m as f64;
        let mut local_nodes = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            for t in 1..m {
                let mut p = [0.0; 3];
                p[a] = 1.0 - t as f64 / mf;
                p[b] = t as f64 / mf;
                local_nodes.push(p);
            }
        }
        for j in 1..m {
            for i in 1..m {
                if i + j < m {
                    let (l1, l2) = (i as f64 / mf, j as f64 / mf);
                    local_nodes.push([1.0 - l1 - l2, l1, l2]);
                }
            }
        }
        let n_loc = poly::dim(m);
        debug_assert_eq!(local_nodes.len(), n_loc);
        let mut vander = DMatrix::zeros(n_loc, n_loc);
        for (k, b) in local_nodes.iter().enumerate() {
            let v = poly::eval(m, b[1], b[2], false).value;
            for (i, x) in v.into_iter().enumerate() {
                vander[(i, k)] = x;
            }
        }
        let coeffs =
            vander.try_inverse().ok_or_else(|| Error::SingularLocal { context: "Lagrange Vandermonde".into() })?;
        let basis = LocalBasis { degree: m, n_base: n_loc, coeffs };

        let nv = mesh.vertices.len();
        let ne = mesh.edges.len();
        let per_edge = m - 1;
        let per_cell = n_loc - 3 - 3 * per_edge;
        let n_nodes = nv + ne * per_edge + mesh.triangles.len() * per_cell;
        let mut node_points = vec![[0.0; 2]; n_nodes];
        let mut element_nodes = Vec::with_capacity(mesh.triangles.len());
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let geom = ElementGeometry::new(mesh.points(t));
            let mut nodes = Vec::with_capacity(n_loc);
            nodes.extend_from_slice(tri);
            for j in 0..3 {
                let e = mesh.triangle_edges[t][j];
                let same = mesh.edges[e].vertices[0] == tri[(j + 1) % 3];
                for s in 1..m {
                    let pos = if same { s - 1 } else { m - 1 - s };
                    nodes.push(nv + e * per_edge + pos);
                }
            }
            for s in 0..per_cell {
                nodes.push(nv + ne * per_edge + t * per_cell + s);
            }
            for (&g, b) in nodes.iter().zip(&local_nodes) {
                node_points[g] = geom.to_point(*b);
            }
            element_nodes.push(nodes);
        }
        Ok(StressSpace { degree, n_nodes, element_nodes, node_points, local_nodes, basis })
    }

    pub fn n_dofs(&self) -> usize {
        STRESS_FIELDS * self.n_nodes
    }

    pub fn dof(&self, field: usize, node: usize) -> usize {
        field * self.n_nodes + node
    }

    pub fn eval(&self, geom: &ElementGeometry, bary: [f64; 3]) -> BasisEval {
        self.basis.eval(geom, bary, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Rect, SideLabels};

    #[test]
    fn nodal_basis_is_kronecker_and_interpolates_linears() {
        let mesh = Mesh::structured(Rect::default(), 2, SideLabels::default()).unwrap();
        for m in 1..=3 {
            let s = StressSpace::new(&mesh, m).unwrap();
            let geom = ElementGeometry::new(mesh.points(3));
            for (k, b) in s.local_nodes.iter().enumerate() {
                let ev = s.eval(&geom, *b);
                for (j, v) in ev.values.iter().enumerate() {
                    assert!((v - if j == k { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
            let f = |x: [f64; 2]| 0.3 + 2.0 * x[0] - x[1];
            let coef: Vec<f64> = s.node_points.iter().map(|&p| f(p)).collect();
            for t in 0..mesh.triangles.len() {
                let geom = ElementGeometry::new(mesh.points(t));
                let b = [0.2, 0.5, 0.3];
                let ev = s.eval(&geom, b);
                let v: f64 = ev.values.iter().zip(&s.element_nodes[t]).map(|(a, &g)| a * coef[g]).sum();
                assert!((v - f(geom.to_point(b))).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn shared_nodes_agree_on_interior_edges() {
        let mesh = Mesh::structured(Rect::default(), 2, SideLabels::default()).unwrap();
        let s = StressSpace::new(&mesh, 3).unwrap();
        for t in 0..mesh.triangles.len() {
            let geom = ElementGeometry::new(mesh.points(t));
            for (b, &g) in s.local_nodes.iter().zip(&s.element_nodes[t]) {
                let p = geom.to_point(*b);
                assert!((p[0] - s.node_points[g][0]).abs() < 1e-14);
                assert!((p[1] - s.node_points[g][1]).abs() < 1e-14);
            }
        }
        assert_eq!(StressSpace::new(&mesh, 1).unwrap().n_nodes, 9);
    }
}
