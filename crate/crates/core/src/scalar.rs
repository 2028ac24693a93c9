//! Scalar abstractions.
//!
//! [`Scalar`] is the floating-point bound used by the numerical machinery
//! (grids, tridiagonal operators, bisection). [`Real`] is the smaller surface
//! needed to evaluate closed-form wavefunctions; besides the primitive floats
//! it is implemented by [`Jet`], a second-order forward-mode dual number, so
//! that evaluating a closed form on a jet yields its first and second radial
//! derivatives exactly.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FromPrimitive};

/// Floating-point type the numerical core is generic over (f32 or f64).
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn cst(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Arithmetic needed by the closed-form evaluators.
pub trait Real:
    Copy + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Value part (the point of evaluation for jets).
    fn value(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn powi(self, n: i32) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn abs(self) -> Self;

    fn scale(self, c: f64) -> Self {
        self * Self::from_f64(c)
    }
    fn shift(self, c: f64) -> Self {
        self + Self::from_f64(c)
    }
}

impl<T: Scalar> Real for T {
    fn from_f64(v: f64) -> Self {
        T::cst(v)
    }
    fn value(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn exp(self) -> Self {
        Float::exp(self)
    }
    fn ln(self) -> Self {
        Float::ln(self)
    }
    fn sqrt(self) -> Self {
        Float::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        Float::powf(self, T::cst(p))
    }
    fn powi(self, n: i32) -> Self {
        Float::powi(self, n)
    }
    fn sin(self) -> Self {
        Float::sin(self)
    }
    fn cos(self) -> Self {
        Float::cos(self)
    }
    fn abs(self) -> Self {
        Float::abs(self)
    }
}

/// Truncated Taylor jet `v + d1·dt + d2·dt²/2` carrying value, first and
/// second derivative with respect to one independent variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Scalar> Jet<T> {
    pub fn new(v: T, d1: T, d2: T) -> Self {
        Self { v, d1, d2 }
    }

    /// The independent variable evaluated at `x`.
    pub fn variable(x: T) -> Self {
        Self::new(x, T::one(), T::zero())
    }

    pub fn constant(x: T) -> Self {
        Self::new(x, T::zero(), T::zero())
    }

    /// Chain rule for a scalar function with derivatives `(f, f', f'')` at `self.v`.
    fn chain(self, f: T, df: T, ddf: T) -> Self {
        Self::new(f, df * self.d1, ddf * self.d1 * self.d1 + df * self.d2)
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = T::cst(2.0);
        Self::new(self.v * o.v, self.d1 * o.v + self.v * o.d1, self.d2 * o.v + two * self.d1 * o.d1 + self.v * o.d2)
    }
}

impl<T: Scalar> Div for Jet<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        let recip = o.chain(inv, -inv * inv, T::cst(2.0) * inv * inv * inv);
        self * recip
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2)
    }
}

impl<T: Scalar> Real for Jet<T> {
    fn from_f64(v: f64) -> Self {
        Self::constant(T::cst(v))
    }
    fn value(self) -> f64 {
        self.v.to_f64().unwrap_or(f64::NAN)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let inv = self.v.recip();
        self.chain(self.v.ln(), inv, -inv * inv)
    }
    fn sqrt(self) -> Self {
        self.powf(0.5)
    }
    fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Self::constant(T::one());
        }
        let pt = T::cst(p);
        let f = self.v.powf(pt);
        let df = pt * self.v.powf(pt - T::one());
        let ddf = pt * (pt - T::one()) * self.v.powf(pt - T::cst(2.0));
        self.chain(f, df, ddf)
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(T::one()),
            1 => self,
            _ => {
                let nt = T::cst(n as f64);
                let f = self.v.powi(n);
                let df = nt * self.v.powi(n - 1);
                let ddf = nt * (nt - T::one()) * self.v.powi(n - 2);
                self.chain(f, df, ddf)
            }
        }
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn abs(self) -> Self {
        if self.v < T::zero() {
            -self
        } else {
            self
        }
    }
}

/// Value, first and second derivative of `f` at `x`.
pub fn derivatives<F>(f: F, x: f64) -> (f64, f64, f64)
where
    F: Fn(Jet<f64>) -> Jet<f64>,
{
    let j = f(Jet::variable(x));
    (j.v, j.d1, j.d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_product_and_quotient_rules() {
        // f = x^3 / (1 + x), at x = 2
        let (v, d1, d2) = derivatives(|x| x.powi(3) / (x + Jet::from_f64(1.0)), 2.0);
        assert!((v - 8.0 / 3.0).abs() < 1e-14);
        // f' = (2x^3 + 3x^2)/(1+x)^2
        assert!((d1 - 28.0 / 9.0).abs() < 1e-14);
        // f'' = 2x(x^2 + 3x + 3)/(1+x)^3
        assert!((d2 - 2.0 * 2.0 * 13.0 / 27.0).abs() < 1e-13);
    }

    #[test]
    fn jet_transcendentals_match_closed_derivatives() {
        let x = 0.7;
        let (v, d1, d2) = derivatives(|t| (t.scale(-0.5) * t).exp() * t.sin(), x);
        let g = (-0.5 * x * x).exp();
        assert!((v - g * x.sin()).abs() < 1e-15);
        assert!((d1 - g * (x.cos() - x * x.sin())).abs() < 1e-14);
        let dd = g * ((x * x - 1.0) * x.sin() - 2.0 * x * x.cos() - x.sin());
        assert!((d2 - dd).abs() < 1e-14);

        let (_, p1, p2) = derivatives(|t| t.powf(2.5), x);
        assert!((p1 - 2.5 * x.powf(1.5)).abs() < 1e-14);
        assert!((p2 - 3.75 * x.powf(0.5)).abs() < 1e-14);
        let (_, l1, l2) = derivatives(|t| t.ln(), x);
        assert!((l1 - 1.0 / x).abs() < 1e-14 && (l2 + 1.0 / (x * x)).abs() < 1e-13);
    }

    #[test]
    fn f32_is_a_scalar() {
        let x: f32 = Real::powf(2.0f32, 3.0);
        assert_eq!(x, 8.0);
    }
}
