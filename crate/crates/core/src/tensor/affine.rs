//! Affine maps `x ↦ Ax + b` and affine vector fields.

use super::jets::block_diag;
use super::VectorField;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Determinant threshold below which a linear part is rejected.
pub const MIN_ABS_DET: f64 = 1e-12;

/// An invertible affine map of the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineAutomorphism {
    a: DMatrix<f64>,
    b: DVector<f64>,
    a_inv: DMatrix<f64>,
}

impl AffineAutomorphism {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if !a.is_square() || a.nrows() != b.len() {
            return Err(Error::Dimension(format!(
                "affine map needs an n×n matrix and an n-vector, got {}×{} and {}",
                a.nrows(),
                a.ncols(),
                b.len()
            )));
        }
        let det = a.determinant();
        if !det.is_finite() || det.abs() <= MIN_ABS_DET {
            return Err(Error::Singular { det: det.abs() });
        }
        let a_inv = a.clone().try_inverse().ok_or(Error::Singular { det: det.abs() })?;
        Ok(AffineAutomorphism { a, b, a_inv })
    }

    pub fn from_linear(a: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, DVector::zeros(n))
    }

    pub fn translation(b: DVector<f64>) -> Self {
        let n = b.len();
        AffineAutomorphism { a: DMatrix::identity(n, n), a_inv: DMatrix::identity(n, n), b }
    }

    pub fn identity(n: usize) -> Self {
        Self::translation(DVector::zeros(n))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::from_linear(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn linear_part(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Alias of [`linear_part`](Self::linear_part) for formula-heavy call sites.
    pub fn linear(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn linear_inverse(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    pub fn translation_part(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn det(&self) -> f64 {
        self.a.determinant()
    }

    pub fn apply(&self, p: &[f64]) -> DVector<f64> {
        &self.a * DVector::from_column_slice(p) + &self.b
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        AffineAutomorphism {
            a: &self.a * &inner.a,
            b: &self.a * &inner.b + &self.b,
            a_inv: &inner.a_inv * &self.a_inv,
        }
    }

    pub fn inverse(&self) -> Self {
        AffineAutomorphism {
            a: self.a_inv.clone(),
            b: -(&self.a_inv * &self.b),
            a_inv: self.a.clone(),
        }
    }

    /// `(x, y) ↦ (self(x), other(y))` on the product chart.
    pub fn product(&self, other: &Self) -> Self {
        let mut b = DVector::zeros(self.dim() + other.dim());
        b.rows_mut(0, self.dim()).copy_from(&self.b);
        b.rows_mut(self.dim(), other.dim()).copy_from(&other.b);
        AffineAutomorphism {
            a: block_diag(&self.a, &other.a),
            a_inv: block_diag(&self.a_inv, &other.a_inv),
            b,
        }
    }
}

/// Time-`t` flow of the affine field `x ↦ Ax + b`, from the exponential of the
/// augmented matrix `[[A, b], [0, 0]]`.
pub fn affine_flow(a: &DMatrix<f64>, b: &DVector<f64>, t: f64) -> AffineAutomorphism {
    let n = b.len();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(&(a * t));
    m.view_mut((0, n), (n, 1)).copy_from(&(b * t));
    let e = m.exp();
    let at = e.view((0, 0), (n, n)).into_owned();
    let bt = e.view((0, n), (n, 1)).column(0).into_owned();
    // exp of a finite matrix is always invertible; det = e^{t·tr A}.
    AffineAutomorphism::new(at, bt).expect("matrix exponential is invertible")
}

/// The vector field `ξ(x) = Ax + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineField {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl AffineField {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if !a.is_square() || a.nrows() != b.len() {
            return Err(Error::Dimension(format!(
                "affine field needs an n×n matrix and an n-vector, got {}×{} and {}",
                a.nrows(),
                a.ncols(),
                b.len()
            )));
        }
        Ok(AffineField { a, b })
    }

    /// `c·Σ xⁱ ∂ᵢ`; `c = 1` is the radiant (Euler) field.
    pub fn euler(n: usize, c: f64) -> Self {
        AffineField { a: DMatrix::identity(n, n) * c, b: DVector::zeros(n) }
    }

    pub fn zero(n: usize) -> Self {
        AffineField { a: DMatrix::zeros(n, n), b: DVector::zeros(n) }
    }

    pub fn linear_part(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn translation_part(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn is_linear(&self) -> bool {
        self.b.iter().all(|v| *v == 0.0)
    }

    pub fn flow(&self, t: f64) -> AffineAutomorphism {
        affine_flow(&self.a, &self.b, t)
    }

    pub fn scaled(&self, c: f64) -> Self {
        AffineField { a: &self.a * c, b: &self.b * c }
    }

    pub fn add(&self, other: &Self) -> Self {
        AffineField { a: &self.a + &other.a, b: &self.b + &other.b }
    }

    /// `(x, y) ↦ (ξ(x), η(y))` on the product chart.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut b = DVector::zeros(self.dim() + other.dim());
        b.rows_mut(0, self.dim()).copy_from(&self.b);
        b.rows_mut(self.dim(), other.dim()).copy_from(&other.b);
        AffineField { a: block_diag(&self.a, &other.a), b }
    }
}

impl VectorField for AffineField {
    fn coords(&self) -> usize {
        self.dim()
    }
    fn value(&self, p: &[f64]) -> Result<DVector<f64>> {
        if p.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, field is over {}",
                p.len(),
                self.dim()
            )));
        }
        Ok(&self.a * DVector::from_column_slice(p) + &self.b)
    }
    fn jacobian(&self, _p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.a.clone())
    }
}
