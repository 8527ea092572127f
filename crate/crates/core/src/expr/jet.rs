//! Derivatives up to third order by nested forward-mode differentiation.
//!
//! For every index triple `i <= j <= k` the expression is evaluated once over
//! `Dual<Dual<Dual<_>>>` with the three nesting levels seeded along `e_i`,
//! `e_j` and `e_k`. The eight components of the result are
//! `f, ∂_i f, ∂_j f, ∂_k f, ∂_ij f, ∂_ik f, ∂_jk f, ∂_ijk f`.

use super::dual::{Dual, Dual2, Dual3, Scalar};
use super::{ExprError, Mode, ScalarExpression};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Value and derivatives up to third order at a point.
///
/// `third[k]` is the matrix `∂_k ∂_i ∂_j f`, so the layout doubles as the
/// coordinate Jacobian of the Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet3<T: nalgebra::Scalar> {
    pub value: T,
    pub gradient: DVector<T>,
    pub hessian: DMatrix<T>,
    pub third: Vec<DMatrix<T>>,
}

impl<T: nalgebra::Scalar + Copy> Jet3<T> {
    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn third_at(&self, i: usize, j: usize, k: usize) -> T {
        self.third[k][(i, j)]
    }
}

fn seed1<B: Scalar>(p: B, dir: bool) -> Dual<B> {
    Dual::new(p, B::constant(if dir { 1.0 } else { 0.0 }))
}

fn seed2<B: Scalar>(p: B, d1: bool, d2: bool) -> Dual2<B> {
    Dual::new(seed1(p, d2), if d1 { Dual::constant(1.0) } else { Dual::constant(0.0) })
}

fn seed3<B: Scalar>(p: B, d1: bool, d2: bool, d3: bool) -> Dual3<B> {
    Dual::new(
        seed2(p, d2, d3),
        if d1 { Dual::constant(1.0) } else { Dual::constant(0.0) },
    )
}

fn finite<B: Scalar>(x: B, what: &str) -> Result<B, ExprError> {
    use super::dual::Primal;
    if x.primal().is_finite() {
        Ok(x)
    } else {
        Err(ExprError::Overflow(format!("{what} is not finite")))
    }
}

impl ScalarExpression {
    fn check_point_len(&self, n: usize) -> Result<(), ExprError> {
        if n == self.arity() {
            Ok(())
        } else {
            Err(ExprError::Dimension { expected: self.arity(), found: n })
        }
    }

    fn gradient_generic<B>(&self, p: &[B]) -> Result<(B, DVector<B>), ExprError>
    where
        B: Scalar + nalgebra::Scalar,
    {
        self.check_point_len(p.len())?;
        let n = p.len();
        if n == 0 {
            return Ok((self.eval_generic(p)?, DVector::from_vec(vec![])));
        }
        let mut value = B::constant(0.0);
        let mut grad = vec![B::constant(0.0); n];
        for (i, slot) in grad.iter_mut().enumerate() {
            let x: Vec<Dual<B>> = (0..n).map(|v| seed1(p[v], v == i)).collect();
            let r = self.eval_generic(&x)?;
            value = r.re;
            *slot = finite(r.eps, "first derivative")?;
        }
        Ok((value, DVector::from_vec(grad)))
    }

    fn jet2_generic<B>(&self, p: &[B]) -> Result<(B, DVector<B>, DMatrix<B>), ExprError>
    where
        B: Scalar + nalgebra::Scalar,
    {
        self.check_point_len(p.len())?;
        let n = p.len();
        let zero = B::constant(0.0);
        if n == 0 {
            return Ok((self.eval_generic(p)?, DVector::from_vec(vec![]), DMatrix::from_element(0, 0, zero)));
        }
        let mut value = zero;
        let mut grad = DVector::from_element(n, zero);
        let mut hess = DMatrix::from_element(n, n, zero);
        for i in 0..n {
            for j in i..n {
                let x: Vec<Dual2<B>> = (0..n).map(|v| seed2(p[v], v == i, v == j)).collect();
                let r = self.eval_generic(&x)?;
                value = r.re.re;
                grad[i] = r.eps.re;
                grad[j] = r.re.eps;
                let h = finite(r.eps.eps, "second derivative")?;
                hess[(i, j)] = h;
                hess[(j, i)] = h;
            }
        }
        Ok((value, grad, hess))
    }

    fn jet3_generic<B>(&self, p: &[B]) -> Result<Jet3<B>, ExprError>
    where
        B: Scalar + nalgebra::Scalar,
    {
        self.check_point_len(p.len())?;
        let n = p.len();
        let zero = B::constant(0.0);
        if n == 0 {
            return Ok(Jet3 {
                value: self.eval_generic(p)?,
                gradient: DVector::from_vec(vec![]),
                hessian: DMatrix::from_element(0, 0, zero),
                third: vec![],
            });
        }
        let mut value = zero;
        let mut grad = DVector::from_element(n, zero);
        let mut hess = DMatrix::from_element(n, n, zero);
        let mut third = vec![DMatrix::from_element(n, n, zero); n];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let x: Vec<Dual3<B>> = (0..n)
                        .map(|v| seed3(p[v], v == i, v == j, v == k))
                        .collect();
                    let r = self.eval_generic(&x)?;
                    value = r.re.re.re;
                    grad[i] = r.eps.re.re;
                    grad[j] = r.re.eps.re;
                    grad[k] = r.re.re.eps;
                    let (hij, hik, hjk) = (r.eps.eps.re, r.eps.re.eps, r.re.eps.eps);
                    hess[(i, j)] = hij;
                    hess[(j, i)] = hij;
                    hess[(i, k)] = hik;
                    hess[(k, i)] = hik;
                    hess[(j, k)] = hjk;
                    hess[(k, j)] = hjk;
                    let t = finite(r.eps.eps.eps, "third derivative")?;
                    for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        third[c][(a, b)] = t;
                    }
                }
            }
        }
        Ok(Jet3 { value: finite(value, "value")?, gradient: grad, hessian: hess, third })
    }

    /// Value and gradient at a real point.
    pub fn gradient(&self, p: &[f64]) -> Result<(f64, DVector<f64>), ExprError> {
        self.require_real()?;
        self.gradient_generic(p)
    }

    /// Value, gradient and Hessian at a real point.
    pub fn jet2(&self, p: &[f64]) -> Result<(f64, DVector<f64>, DMatrix<f64>), ExprError> {
        self.require_real()?;
        self.jet2_generic(p)
    }

    /// Exact derivatives up to third order at a real point.
    pub fn eval_jet3(&self, p: &[f64]) -> Result<Jet3<f64>, ExprError> {
        self.require_real()?;
        self.jet3_generic(p)
    }

    /// Holomorphic derivatives up to third order at a complex point.
    pub fn eval_complex(&self, z: &[Complex64]) -> Result<Jet3<Complex64>, ExprError> {
        if self.mode() != Mode::Complex {
            return Err(ExprError::WrongMode { parsed: self.mode(), requested: Mode::Complex });
        }
        self.jet3_generic(z)
    }

    /// Holomorphic value, gradient and second derivatives at a complex point.
    pub fn eval_complex_jet2(
        &self,
        z: &[Complex64],
    ) -> Result<(Complex64, DVector<Complex64>, DMatrix<Complex64>), ExprError> {
        if self.mode() != Mode::Complex {
            return Err(ExprError::WrongMode { parsed: self.mode(), requested: Mode::Complex });
        }
        self.jet2_generic(z)
    }

    fn require_real(&self) -> Result<(), ExprError> {
        if self.mode() == Mode::Real {
            Ok(())
        } else {
            Err(ExprError::WrongMode { parsed: self.mode(), requested: Mode::Real })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn cubic_monomial_jet() {
        // x1²·x2 at (1,2), differentiated by hand
        let e = ScalarExpression::real("x1^2*x2", 2).unwrap();
        let j = e.eval_jet3(&[1.0, 2.0]).unwrap();
        assert!(close(j.value, 2.0));
        assert!(close(j.gradient[0], 4.0) && close(j.gradient[1], 1.0));
        assert!(close(j.hessian[(0, 0)], 4.0));
        assert!(close(j.hessian[(0, 1)], 2.0) && close(j.hessian[(1, 0)], 2.0));
        assert!(close(j.hessian[(1, 1)], 0.0));
        assert!(close(j.third_at(0, 0, 1), 2.0));
        assert!(close(j.third_at(0, 1, 0), 2.0));
        assert!(close(j.third_at(1, 0, 0), 2.0));
        assert!(close(j.third_at(0, 0, 0), 0.0));
        assert!(close(j.third_at(1, 1, 1), 0.0));
        assert!(close(j.third_at(0, 1, 1), 0.0));
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let e = ScalarExpression::real("5", 3).unwrap();
        let j = e.eval_jet3(&[0.3, -2.0, 7.0]).unwrap();
        assert_eq!(j.value, 5.0);
        assert!(j.gradient.iter().all(|v| *v == 0.0));
        assert!(j.hessian.iter().all(|v| *v == 0.0));
        assert!(j.third.iter().all(|m| m.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn negative_log_jet() {
        // d³(−ln x)/dx³ = −2/x³ = −0.25 at x = 2
        let e = ScalarExpression::real("-ln(x1)", 1).unwrap();
        let j = e.eval_jet3(&[2.0]).unwrap();
        assert!(close(j.value, -(2.0f64.ln())));
        assert!(close(j.gradient[0], -0.5));
        assert!(close(j.hessian[(0, 0)], 0.25));
        assert!(close(j.third_at(0, 0, 0), -0.25));
    }

    #[test]
    fn complex_cubic_prepotential() {
        // F = z³/6 at z = i: F = −i/6, F' = z²/2 = −1/2, F'' = z = i, F''' = 1
        let f = ScalarExpression::parse("z1^3/6", 1, Mode::Complex).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let j = f.eval_complex(&[i]).unwrap();
        assert!((j.value - Complex64::new(0.0, -1.0 / 6.0)).norm() < 1e-15);
        assert!((j.gradient[0] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert!((j.hessian[(0, 0)] - i).norm() < 1e-15);
        assert!((j.third_at(0, 0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn linear_prepotential_has_zero_second_derivative() {
        let f = ScalarExpression::parse("(2.5)*z1", 1, Mode::Complex).unwrap();
        for z in [Complex64::new(0.3, -1.0), Complex64::new(-4.0, 2.0)] {
            let j = f.eval_complex(&[z]).unwrap();
            assert_eq!(j.hessian[(0, 0)], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn pole_is_domain_error() {
        let f = ScalarExpression::parse("z2^3/z1", 2, Mode::Complex).unwrap();
        let r = f.eval_complex(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0)]);
        assert!(matches!(r, Err(ExprError::Domain(_))));
    }

    #[test]
    fn jets_are_symmetric() {
        let e = ScalarExpression::real("exp(x1*x2)/(1+x3^2) + sqrt(x1+x3)", 3).unwrap();
        let j = e.eval_jet3(&[0.4, -0.7, 1.1]).unwrap();
        let h = &j.hessian;
        assert_eq!(h, &h.transpose());
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let t = j.third_at(a, b, c);
                    assert_eq!(t, j.third_at(b, a, c));
                    assert_eq!(t, j.third_at(c, b, a));
                    assert_eq!(t, j.third_at(a, c, b));
                }
            }
        }
    }

    #[test]
    fn jet2_and_gradient_agree_with_jet3() {
        let e = ScalarExpression::real("x1^3*ln(x2) - x2/x1", 2).unwrap();
        let p = [1.3, 2.2];
        let j3 = e.eval_jet3(&p).unwrap();
        let (v, g, h) = e.jet2(&p).unwrap();
        let (v1, g1) = e.gradient(&p).unwrap();
        assert!(close(v, j3.value) && close(v1, j3.value));
        assert!((g - &j3.gradient).amax() < 1e-12);
        assert!((g1 - &j3.gradient).amax() < 1e-12);
        assert!((h - &j3.hessian).amax() < 1e-12);
    }
}
