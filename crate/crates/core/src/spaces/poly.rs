//! Polynomials in the barycentric monomials `λ1^i λ2^j`, graded by total degree.

pub fn dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Position of `λ1^i λ2^j`.
pub fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    if d == 0 {
        0
    } else {
        dim(d - 1) + j
    }
}

pub fn exponents(degree: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim(degree));
    for d in 0..=degree {
        for j in 0..=d {
            out.push((d - j, j));
        }
    }
    out
}

/// Monomial values and derivatives with respect to `λ1`, `λ2`.
#[derive(Clone, Debug, Default)]
pub struct MonomialEval {
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d11: Vec<f64>,
    pub d12: Vec<f64>,
    pub d22: Vec<f64>,
}

fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    for k in 1..=n {
        p[k] = p[k - 1] * x;
    }
    p
}

pub fn eval(degree: usize, l1: f64, l2: f64, hessian: bool) -> MonomialEval {
    let n = dim(degree);
    let p1 = powers(l1, degree);
    let p2 = powers(l2, degree);
    let pw = |p: &[f64], e: isize| if e < 0 { 0.0 } else { p[e as usize] };
    let mut out = MonomialEval {
        value: Vec::with_capacity(n),
        d1: Vec::with_capacity(n),
        d2: Vec::with_capacity(n),
        ..Default::default()
    };
    for (i, j) in exponents(degree) {
        let (fi, fj) = (i as f64, j as f64);
        let (ii, jj) = (i as isize, j as isize);
        out.value.push(p1[i] * p2[j]);
        out.d1.push(fi * pw(&p1, ii - 1) * p2[j]);
        out.d2.push(fj * p1[i] * pw(&p2, jj - 1));
        if hessian {
            out.d11.push(fi * (fi - 1.0) * pw(&p1, ii - 2) * p2[j]);
            out.d12.push(fi * fj * pw(&p1, ii - 1) * pw(&p2, jj - 1));
            out.d22.push(fj * (fj - 1.0) * p1[i] * pw(&p2, jj - 2));
        }
    }
    out
}

/// Product of two coefficient vectors of degrees `da` and `db`.
pub fn mul(a: &[f64], da: usize, b: &[f64], db: usize) -> Vec<f64> {
    let ea = exponents(da);
    let eb = exponents(db);
    let mut out = vec![0.0; dim(da + db)];
    for (ca, &(ia, ja)) in a.iter().zip(&ea) {
        if *ca == 0.0 {
            continue;
        }
        for (cb, &(ib, jb)) in b.iter().zip(&eb) {
            out[index(ia + ib, ja + jb)] += ca * cb;
        }
    }
    out
}

/// Pads a coefficient vector of degree `from` to degree `to`.
pub fn lift(a: &[f64], to: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim(to)];
    out[..a.len()].copy_from_slice(a);
    out
}

/// Barycentric coordinate of local vertex `v` as a degree-1 polynomial.
pub fn barycentric(v: usize) -> Vec<f64> {
    match v {
        0 => vec![1.0, -1.0, -1.0],
        1 => vec![0.0, 1.0, 0.0],
        _ => vec![0.0, 0.0, 1.0],
    }
}

pub fn value(coeffs: &[f64], degree: usize, l1: f64, l2: f64) -> f64 {
    eval(degree, l1, l2, false).value.iter().zip(coeffs).map(|(m, c)| m * c).sum()
}
