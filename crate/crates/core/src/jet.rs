//! Second-order forward-mode jets in two variables.
//!
//! Exact fields are written once as ordinary arithmetic on `Jet`s and yield
//! values, gradients and Hessians together.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

impl Jet {
    pub const ZERO: Jet = Jet { value: 0.0, grad: [0.0; 2], hess: [[0.0; 2]; 2] };

    pub fn constant(value: f64) -> Jet {
        Jet { value, ..Jet::ZERO }
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn variable(value: f64, i: usize) -> Jet {
        let mut grad = [0.0; 2];
        grad[i] = 1.0;
        Jet { value, grad, hess: [[0.0; 2]; 2] }
    }

    pub fn coords(x: [f64; 2]) -> [Jet; 2] {
        [Jet::variable(x[0], 0), Jet::variable(x[1], 1)]
    }

    /// Compose with a scalar function given its value and first two derivatives.
    fn compose(self, f0: f64, f1: f64, f2: f64) -> Jet {
        let g = self.grad;
        let mut hess = [[0.0; 2]; 2];
        for (i, row) in hess.iter_mut().enumerate() {
            for (j, h) in row.iter_mut().enumerate() {
                *h = f2 * g[i] * g[j] + f1 * self.hess[i][j];
            }
        }
        Jet { value: f0, grad: [f1 * g[0], f1 * g[1]], hess }
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn exp(self) -> Jet {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn powi(self, n: i32) -> Jet {
        let v = self.value;
        let nf = n as f64;
        let f2 = if !(0..2).contains(&n) { nf * (nf - 1.0) * v.powi(n - 2) } else { 0.0 };
        let f1 = if n != 0 { nf * v.powi(n - 1) } else { 0.0 };
        self.compose(v.powi(n), f1, f2)
    }

    pub fn recip(self) -> Jet {
        let v = self.value;
        self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn scale(self, s: f64) -> Jet {
        let mut out = self;
        out.value *= s;
        for i in 0..2 {
            out.grad[i] *= s;
            for j in 0..2 {
                out.hess[i][j] *= s;
            }
        }
        out
    }
}

impl From<f64> for Jet {
    fn from(value: f64) -> Jet {
        Jet::constant(value)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self += rhs;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        self.value += rhs.value;
        for i in 0..2 {
            self.grad[i] += rhs.grad[i];
            for j in 0..2 {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let (a, b) = (self, rhs);
        let mut hess = [[0.0; 2]; 2];
        for (i, row) in hess.iter_mut().enumerate() {
            for (j, h) in row.iter_mut().enumerate() {
                *h = a.hess[i][j] * b.value + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i] + a.value * b.hess[i][j];
            }
        }
        Jet {
            value: a.value * b.value,
            grad: [a.grad[0] * b.value + a.value * b.grad[0], a.grad[1] * b.value + a.value * b.grad[1]],
            hess,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}
