//! Second-order forward-mode differentiation.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar function of
//! `n` variables at a fixed point. Arithmetic on jets propagates all three
//! exactly (up to floating point rounding); there is no truncation error.
//!
//! Only the upper triangle of the Hessian is computed; the lower triangle is
//! mirrored, so the Hessian is symmetric bit for bit.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value, gradient and Hessian of a scalar at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Row-major `n x n`.
    pub hessian: Vec<f64>,
}

impl Jet2 {
    /// A constant in `n` variables.
    pub fn constant(value: f64, n: usize) -> Self {
        Self {
            value,
            gradient: vec![0.0; n],
            hessian: vec![0.0; n * n],
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(value: f64, index: usize, n: usize) -> Self {
        let mut jet = Self::constant(value, n);
        jet.gradient[index] = 1.0;
        jet
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hessian[i * self.dim() + j]
    }

    /// Apply a univariate function given its value and first two derivatives
    /// at `self.value`.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let n = self.dim();
        let gradient = self.gradient.iter().map(|g| df * g).collect();
        let mut hessian = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut h = 0.0;
                if df != 0.0 {
                    h += df * self.hessian[i * n + j];
                }
                if d2f != 0.0 {
                    h += d2f * self.gradient[i] * self.gradient[j];
                }
                hessian[i * n + j] = h;
                hessian[j * n + i] = h;
            }
        }
        Self {
            value: f,
            gradient,
            hessian,
        }
    }

    /// Integer power. Returns `None` for a negative exponent at zero.
    pub fn powi(&self, k: i32) -> Option<Self> {
        let x = self.value;
        if k < 0 && x == 0.0 {
            return None;
        }
        let kf = k as f64;
        let f = x.powi(k);
        let df = if k == 0 { 0.0 } else { kf * x.powi(k - 1) };
        let d2f = if k == 0 || k == 1 {
            0.0
        } else {
            kf * (kf - 1.0) * x.powi(k - 2)
        };
        Some(self.chain(f, df, d2f))
    }

    pub fn recip(&self) -> Option<Self> {
        let x = self.value;
        if x == 0.0 {
            return None;
        }
        let r = 1.0 / x;
        Some(self.chain(r, -r * r, 2.0 * r * r * r))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    /// Natural logarithm; `None` off the positive reals.
    pub fn ln(&self) -> Option<Self> {
        let x = self.value;
        if x <= 0.0 {
            return None;
        }
        let r = 1.0 / x;
        Some(self.chain(x.ln(), r, -r * r))
    }

    /// Square root; `None` unless the argument is strictly positive, since the
    /// derivative is unbounded at zero.
    pub fn sqrt(&self) -> Option<Self> {
        let x = self.value;
        if x <= 0.0 {
            return None;
        }
        let s = x.sqrt();
        Some(self.chain(s, 0.5 / s, -0.25 / (s * x)))
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient.iter().all(|v| v.is_finite())
            && self.hessian.iter().all(|v| v.is_finite())
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            gradient: zip_with(&self.gradient, &rhs.gradient, |a, b| a + b),
            hessian: zip_with(&self.hessian, &rhs.hessian, |a, b| a + b),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value - rhs.value,
            gradient: zip_with(&self.gradient, &rhs.gradient, |a, b| a - b),
            hessian: zip_with(&self.hessian, &rhs.hessian, |a, b| a - b),
        }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        let n = self.dim();
        let (a, b) = (self.value, rhs.value);
        let gradient = zip_with(&self.gradient, &rhs.gradient, |ga, gb| ga * b + a * gb);
        let mut hessian = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let h = self.hessian[i * n + j] * b
                    + a * rhs.hessian[i * n + j]
                    + self.gradient[i] * rhs.gradient[j]
                    + rhs.gradient[i] * self.gradient[j];
                hessian[i * n + j] = h;
                hessian[j * n + i] = h;
            }
        }
        Jet2 {
            value: a * b,
            gradient,
            hessian,
        }
    }
}

impl Mul<f64> for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        Jet2 {
            value: self.value * rhs,
            gradient: self.gradient.iter().map(|g| g * rhs).collect(),
            hessian: self.hessian.iter().map(|h| h * rhs).collect(),
        }
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self * -1.0
    }
}

impl Div for &Jet2 {
    type Output = Option<Jet2>;
    fn div(self, rhs: &Jet2) -> Option<Jet2> {
        rhs.recip().map(|r| self * &r)
    }
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Jet2::variable(2.0, 0, 2);
        let y = Jet2::variable(3.0, 1, 2);
        let p = &(&x * &x) * &y;
        assert_eq!(p.value, 12.0);
        assert_eq!(p.gradient, vec![12.0, 4.0]);
        assert_eq!(p.hessian, vec![6.0, 4.0, 4.0, 0.0]);
    }

    #[test]
    fn powi_at_zero() {
        let x = Jet2::variable(0.0, 0, 1);
        let sq = x.powi(2).unwrap();
        assert_eq!((sq.value, sq.gradient[0], sq.hessian[0]), (0.0, 0.0, 2.0));
        let lin = x.powi(1).unwrap();
        assert_eq!(
            (lin.value, lin.gradient[0], lin.hessian[0]),
            (0.0, 1.0, 0.0)
        );
        assert!(x.powi(0).unwrap().is_finite());
        assert!(x.powi(-1).is_none());
    }

    #[test]
    fn domain_failures() {
        let z = Jet2::variable(0.0, 0, 1);
        assert!(z.recip().is_none());
        assert!(z.ln().is_none());
        assert!(z.sqrt().is_none());
        assert!(Jet2::variable(-1.0, 0, 1).ln().is_none());
    }

    #[test]
    fn quotient() {
        let x = Jet2::variable(2.0, 0, 1);
        let one = Jet2::constant(1.0, 1);
        let q = (&one / &x).unwrap();
        assert_eq!(q.value, 0.5);
        assert_eq!(q.gradient[0], -0.25);
        assert_eq!(q.hessian[0], 0.25);
    }
}
