//! Scalar types the expression evaluator is generic over.
//!
//! Higher derivatives come from nesting: `Dual<Dual<Dual<f64>>>` seeded in
//! three coordinate directions carries every partial derivative up to third
//! order along those directions. The same nesting over `Complex64` gives
//! holomorphic derivatives.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// The innermost value of a (possibly nested) scalar. Domain checks of the
/// evaluator are decided on this value alone.
pub trait Primal: Copy + std::fmt::Debug {
    /// Argument admissible for `ln` and for `pow` with a non-integer exponent.
    fn log_admissible(&self) -> bool;
    /// Argument admissible for `sqrt` (its derivative must exist).
    fn sqrt_admissible(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
}

impl Primal for f64 {
    fn log_admissible(&self) -> bool {
        *self > 0.0
    }
    fn sqrt_admissible(&self) -> bool {
        *self > 0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Primal for Complex64 {
    fn log_admissible(&self) -> bool {
        self.norm() > 0.0
    }
    fn sqrt_admissible(&self) -> bool {
        self.norm() > 0.0
    }
    fn is_zero(&self) -> bool {
        self.norm() == 0.0
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Arithmetic needed by the evaluator.
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Base: Primal;

    fn constant(c: f64) -> Self;
    fn primal(&self) -> Self::Base;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
    /// Multiply by a real constant.
    fn scale(self, c: f64) -> Self;
    /// `√−1`, if the scalar field has one.
    fn imaginary_unit() -> Option<Self>;
}

impl Scalar for f64 {
    type Base = f64;
    fn constant(c: f64) -> Self {
        c
    }
    fn primal(&self) -> f64 {
        *self
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn imaginary_unit() -> Option<Self> {
        None
    }
}

impl Scalar for Complex64 {
    type Base = Complex64;
    fn constant(c: f64) -> Self {
        Complex64::new(c, 0.0)
    }
    fn primal(&self) -> Complex64 {
        *self
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        Complex64::powi(&self, n)
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn imaginary_unit() -> Option<Self> {
        Some(Complex64::i())
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    pub fn variable(re: T) -> Self {
        Dual { re, eps: T::constant(1.0) }
    }

    fn chain(self, f: T, df: T) -> Self {
        Dual { re: f, eps: self.eps * df }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { re: self.re + o.re, eps: self.eps + o.eps }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { re: self.re - o.re, eps: self.eps - o.eps }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual { re: self.re * o.re, eps: self.re * o.eps + self.eps * o.re }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Dual { re: q, eps: (self.eps - q * o.eps) / o.re }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { re: -self.re, eps: -self.eps }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    type Base = T::Base;

    fn constant(c: f64) -> Self {
        Dual { re: T::constant(c), eps: T::constant(0.0) }
    }
    fn primal(&self) -> T::Base {
        self.re.primal()
    }
    fn ln(self) -> Self {
        let inv = T::constant(1.0) / self.re;
        self.chain(self.re.ln(), inv)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, (T::constant(1.0) / s).scale(0.5))
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            _ => self.chain(self.re.powi(n), self.re.powi(n - 1).scale(n as f64)),
        }
    }
    fn scale(self, c: f64) -> Self {
        Dual { re: self.re.scale(c), eps: self.eps.scale(c) }
    }
    fn imaginary_unit() -> Option<Self> {
        T::imaginary_unit().map(|i| Dual { re: i, eps: T::constant(0.0) })
    }
}

pub type Dual2<T> = Dual<Dual<T>>;
pub type Dual3<T> = Dual<Dual<Dual<T>>>;
