//! Gauss rules on the unit interval and collapsed Gauss rules on triangles.
//!
//! Triangle weights are fractions of the element area (they sum to 1), edge
//! weights are fractions of the edge length.

#[derive(Clone, Debug)]
pub struct TriangleRule {
    /// Barycentric coordinates `[λ0, λ1, λ2]` of each point.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

#[derive(Clone, Debug)]
pub struct EdgeRule {
    /// Positions in `[0, 1]` along the edge.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EdgeRule {
    pub fn exact_degree(&self) -> usize {
        2 * self.points.len() - 1
    }
}

/// Triangle and edge rules used for every element and edge integral.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub triangle: TriangleRule,
    pub edge: EdgeRule,
}

impl QuadratureRule {
    /// Default rule for polynomial degree `k`: triangle degree `2k + 4`, `k + 3` edge points.
    pub fn for_degree(k: usize) -> QuadratureRule {
        QuadratureRule { triangle: triangle_rule(2 * k + 4), edge: gauss_legendre(k + 3) }
    }

    pub fn with_orders(triangle_degree: usize, edge_points: usize) -> QuadratureRule {
        QuadratureRule { triangle: triangle_rule(triangle_degree), edge: gauss_legendre(edge_points) }
    }
}

/// Gauss-Legendre rule with `n` points mapped to `[0, 1]`.
pub fn gauss_legendre(n: usize) -> EdgeRule {
    assert!(n >= 1);
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like starting guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = 0.5 * (1.0 - x);
        points[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    EdgeRule { points, weights }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Collapsed (Duffy) Gauss rule exact for polynomials of total degree `degree`.
pub fn triangle_rule(degree: usize) -> TriangleRule {
    let n = (degree + 2).div_ceil(2);
    let g = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&s, &ws) in g.points.iter().zip(&g.weights) {
        for (&t, &wt) in g.points.iter().zip(&g.weights) {
            let l1 = s;
            let l2 = t * (1.0 - s);
            points.push([1.0 - l1 - l2, l1, l2]);
            weights.push(2.0 * ws * wt * (1.0 - s));
        }
    }
    TriangleRule { points, weights, degree }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn gauss_weights_positive_and_exact() {
        for n in 1..=10 {
            let g = gauss_legendre(n);
            assert!(g.weights.iter().all(|&w| w > 0.0));
            for p in 0..=(2 * n - 1) {
                let q: f64 = g.points.iter().zip(&g.weights).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn triangle_rule_integrates_monomials() {
        // Area fraction of λ1^a λ2^b is 2 a! b! / (a + b + 2)!.
        for degree in [2, 4, 8, 10] {
            let r = triangle_rule(degree);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let total: f64 = r.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-14);
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let q: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    let exact = 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert!((q - exact).abs() < 1e-14, "deg {degree}: {a},{b}");
                }
            }
        }
    }

    #[test]
    fn default_rule_orders() {
        let r = QuadratureRule::for_degree(2);
        assert_eq!(r.triangle.degree, 8);
        assert_eq!(r.edge.points.len(), 5);
        assert!(r.edge.exact_degree() >= 2 * 2 + 3);
    }
}
