//! Pointwise tensor calculus over a single global flat chart.
//!
//! Fields expose their value and, when they can, an exact first-order jet.
//! Every operator takes a [`DerivMode`]: `Analytic` uses the field's own jet
//! (automatic differentiation for expression-backed fields), while
//! `FiniteDifference` ignores it and differentiates the value by central
//! differences. Running both pipelines on the same check is how the two are
//! cross-validated.
//!
//! Index conventions: a `Tensor3` built from a metric holds `∂_k g_ij` at
//! `(k, i, j)`; an exterior derivative holds `(dω)_{kij}`; a Nijenhuis tensor
//! holds `N^i_{jk}` at `(i, j, k)`. For a vector field ξ the Jacobian `A` has
//! `A[(i, k)] = ∂_k ξ^i`.

mod affine;
mod fields;
mod jets;

pub use affine::{affine_flow, AffineAutomorphism, AffineField};
pub use fields::{MatrixFn, MetricField, ScalarFn, VectorFieldSpec, AFFINE_HESSIAN_TOL};
pub use jets::{block_diag, block_matrix, invert, MatJet, ScalarJet, Tensor3};

use crate::error::Result;
use crate::expr::ScalarExpression;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative step for first derivatives by central differences.
pub const FD_FIRST_STEP: f64 = 1e-5;
/// Relative step for second derivatives by central differences.
pub const FD_SECOND_STEP: f64 = 1e-4;
/// Eigenvalue threshold for positive definiteness.
pub const PD_TOL: f64 = 1e-10;

/// How derivatives of fields are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivMode {
    /// The field's exact jet (forward-mode AD or closed-form derivatives).
    Analytic,
    /// Central differences of the field's value.
    FiniteDifference,
}

/// A matrix-valued field on a chart with `coords()` coordinates.
pub trait MatrixField: Send + Sync {
    fn coords(&self) -> usize;
    fn value(&self, p: &[f64]) -> Result<DMatrix<f64>>;
    /// Exact jet if available; falls back to central differences.
    fn jet(&self, p: &[f64]) -> Result<MatJet> {
        fd_matrix_jet(|q| self.value(q), p)
    }
}

pub trait VectorField: Send + Sync {
    fn coords(&self) -> usize;
    fn value(&self, p: &[f64]) -> Result<DVector<f64>>;
    /// `A[(i, k)] = ∂_k ξ^i`.
    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        fd_jacobian(|q| self.value(q), p)
    }
}

pub trait ScalarField: Send + Sync {
    fn coords(&self) -> usize;
    fn value(&self, p: &[f64]) -> Result<f64>;
    fn gradient(&self, p: &[f64]) -> Result<DVector<f64>> {
        fd_gradient(|q| self.value(q), p)
    }
}

impl ScalarField for ScalarExpression {
    fn coords(&self) -> usize {
        self.arity()
    }
    fn value(&self, p: &[f64]) -> Result<f64> {
        Ok(self.eval(p)?)
    }
    fn gradient(&self, p: &[f64]) -> Result<DVector<f64>> {
        Ok(ScalarExpression::gradient(self, p)?.1)
    }
}

pub fn matrix_jet<F: MatrixField + ?Sized>(f: &F, p: &[f64], mode: DerivMode) -> Result<MatJet> {
    match mode {
        DerivMode::Analytic => f.jet(p),
        DerivMode::FiniteDifference => fd_matrix_jet(|q| f.value(q), p),
    }
}

/// Value and Jacobian of a vector field.
pub fn vector_jet<F: VectorField + ?Sized>(
    f: &F,
    p: &[f64],
    mode: DerivMode,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let value = f.value(p)?;
    let jac = match mode {
        DerivMode::Analytic => f.jacobian(p)?,
        DerivMode::FiniteDifference => fd_jacobian(|q| f.value(q), p)?,
    };
    Ok((value, jac))
}

pub fn scalar_jet<F: ScalarField + ?Sized>(f: &F, p: &[f64], mode: DerivMode) -> Result<ScalarJet> {
    let value = f.value(p)?;
    let gradient = match mode {
        DerivMode::Analytic => f.gradient(p)?,
        DerivMode::FiniteDifference => fd_gradient(|q| f.value(q), p)?,
    };
    Ok(ScalarJet { value, gradient })
}

// ---------------------------------------------------------------------------
// Finite differences

fn euclidean_norm(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `10⁻⁵·max(1, |p|)`.
pub fn fd_step(p: &[f64]) -> f64 {
    FD_FIRST_STEP * euclidean_norm(p).max(1.0)
}

fn shifted(p: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[k] += h;
    q
}

pub fn fd_matrix_jet(
    f: impl Fn(&[f64]) -> Result<DMatrix<f64>>,
    p: &[f64],
) -> Result<MatJet> {
    let h = fd_step(p);
    let value = f(p)?;
    let partials = (0..p.len())
        .map(|k| Ok((f(&shifted(p, k, h))? - f(&shifted(p, k, -h))?) / (2.0 * h)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatJet { value, partials })
}

pub fn fd_jacobian(
    f: impl Fn(&[f64]) -> Result<DVector<f64>>,
    p: &[f64],
) -> Result<DMatrix<f64>> {
    let h = fd_step(p);
    let n = p.len();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        cols.push((f(&shifted(p, k, h))? - f(&shifted(p, k, -h))?) / (2.0 * h));
    }
    let rows = cols.first().map_or(0, |c| c.len());
    Ok(DMatrix::from_fn(rows, n, |i, k| cols[k][i]))
}

pub fn fd_gradient(f: impl Fn(&[f64]) -> Result<f64>, p: &[f64]) -> Result<DVector<f64>> {
    let h = fd_step(p);
    let mut g = DVector::zeros(p.len());
    for k in 0..p.len() {
        g[k] = (f(&shifted(p, k, h))? - f(&shifted(p, k, -h))?) / (2.0 * h);
    }
    Ok(g)
}

/// Central second differences with step `h = 10⁻⁴·max(1, |p|)`.
pub fn fd_hessian(f: impl Fn(&[f64]) -> Result<f64>, p: &[f64]) -> Result<DMatrix<f64>> {
    let h = FD_SECOND_STEP * euclidean_norm(p).max(1.0);
    let n = p.len();
    let at = |di: (usize, f64), dj: (usize, f64)| {
        let mut q = p.to_vec();
        q[di.0] += di.1;
        q[dj.0] += dj.1;
        f(&q)
    };
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = (at((i, h), (j, h))? - at((i, h), (j, -h))? - at((i, -h), (j, h))?
                + at((i, -h), (j, -h))?)
                / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Jet-level operators

/// `(L_ξ T)_ij = ξ^k ∂_k T_ij + T_kj ∂_i ξ^k + T_ik ∂_j ξ^k` for a covariant
/// 2-tensor (metric or 2-form).
pub fn lie_covariant(t: &MatJet, xi: &DVector<f64>, dxi: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = dxi.transpose() * &t.value + &t.value * dxi;
    for (k, d) in t.partials.iter().enumerate() {
        out += d * xi[k];
    }
    out
}

/// `L_ξ J = ξ^k ∂_k J − A·J + J·A` for an endomorphism field.
pub fn lie_endomorphism(j: &MatJet, xi: &DVector<f64>, dxi: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = &j.value * dxi - dxi * &j.value;
    for (k, d) in j.partials.iter().enumerate() {
        out += d * xi[k];
    }
    out
}

/// `(dω)_{kij} = ∂_k ω_ij − ∂_i ω_kj + ∂_j ω_ki`.
pub fn exterior_derivative(w: &MatJet) -> Tensor3 {
    let n = w.coords();
    let mut t = Tensor3::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                t[(k, i, j)] = w.partials[k][(i, j)] - w.partials[i][(k, j)]
                    + w.partials[j][(k, i)];
            }
        }
    }
    t
}

/// `N^i_{jk} = J^l_j ∂_l J^i_k − J^l_k ∂_l J^i_j − J^i_l (∂_j J^l_k − ∂_k J^l_j)`.
pub fn nijenhuis_tensor(j: &MatJet) -> Tensor3 {
    let n = j.coords();
    let jm = &j.value;
    let d = &j.partials;
    let mut t = Tensor3::zeros(n);
    for i in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut v = 0.0;
                for l in 0..n {
                    v += jm[(l, a)] * d[l][(i, b)] - jm[(l, b)] * d[l][(i, a)]
                        - jm[(i, l)] * (d[a][(l, b)] - d[b][(l, a)]);
                }
                t[(i, a, b)] = v;
            }
        }
    }
    t
}

// ---------------------------------------------------------------------------
// Field-level operators

/// `Hess φ` at `p`.
pub fn hessian_metric(phi: &ScalarExpression, p: &[f64]) -> Result<DMatrix<f64>> {
    Ok(phi.jet2(p)?.2)
}

/// `∂_k g_ij` at `(k, i, j)`.
pub fn metric_derivative<G: MatrixField + ?Sized>(
    g: &G,
    p: &[f64],
    mode: DerivMode,
) -> Result<Tensor3> {
    Ok(Tensor3::from_partials(&matrix_jet(g, p, mode)?.partials))
}

/// Lie derivative of a metric (or any covariant 2-tensor, e.g. a 2-form).
pub fn lie_derivative_metric<G, X>(g: &G, xi: &X, p: &[f64], mode: DerivMode) -> Result<DMatrix<f64>>
where
    G: MatrixField + ?Sized,
    X: VectorField + ?Sized,
{
    let (v, a) = vector_jet(xi, p, mode)?;
    Ok(lie_covariant(&matrix_jet(g, p, mode)?, &v, &a))
}

pub fn lie_derivative_endomorphism<J, X>(
    j: &J,
    xi: &X,
    p: &[f64],
    mode: DerivMode,
) -> Result<DMatrix<f64>>
where
    J: MatrixField + ?Sized,
    X: VectorField + ?Sized,
{
    let (v, a) = vector_jet(xi, p, mode)?;
    Ok(lie_endomorphism(&matrix_jet(j, p, mode)?, &v, &a))
}

/// `ξ(f) = ξ^k ∂_k f`.
pub fn lie_derivative_function<F, X>(f: &F, xi: &X, p: &[f64], mode: DerivMode) -> Result<f64>
where
    F: ScalarField + ?Sized,
    X: VectorField + ?Sized,
{
    let grad = scalar_jet(f, p, mode)?.gradient;
    Ok(grad.dot(&xi.value(p)?))
}

/// `[X, Y]^i = X^k ∂_k Y^i − Y^k ∂_k X^i`.
pub fn lie_bracket<X, Y>(x: &X, y: &Y, p: &[f64], mode: DerivMode) -> Result<DVector<f64>>
where
    X: VectorField + ?Sized,
    Y: VectorField + ?Sized,
{
    let (xv, dx) = vector_jet(x, p, mode)?;
    let (yv, dy) = vector_jet(y, p, mode)?;
    Ok(dy * xv - dx * yv)
}

pub fn exterior_derivative_2form<W: MatrixField + ?Sized>(
    w: &W,
    p: &[f64],
    mode: DerivMode,
) -> Result<Tensor3> {
    Ok(exterior_derivative(&matrix_jet(w, p, mode)?))
}

pub fn nijenhuis<J: MatrixField + ?Sized>(j: &J, p: &[f64], mode: DerivMode) -> Result<Tensor3> {
    Ok(nijenhuis_tensor(&matrix_jet(j, p, mode)?))
}

/// `(T*g)(p) = Aᵀ g(Ap + b) A`.
pub fn pullback_metric<G: MatrixField + ?Sized>(
    t: &AffineAutomorphism,
    g: &G,
    p: &[f64],
) -> Result<DMatrix<f64>> {
    let image = t.apply(p);
    let a = t.linear();
    Ok(a.transpose() * g.value(image.as_slice())? * a)
}

/// `(T*J)(p) = A⁻¹ J(Ap + b) A`.
pub fn pullback_endomorphism<J: MatrixField + ?Sized>(
    t: &AffineAutomorphism,
    j: &J,
    p: &[f64],
) -> Result<DMatrix<f64>> {
    let image = t.apply(p);
    Ok(t.linear_inverse() * j.value(image.as_slice())? * t.linear())
}

/// True iff every eigenvalue of the symmetric part exceeds `tol`.
pub fn is_positive_definite(m: &DMatrix<f64>, tol: f64) -> bool {
    min_eigenvalue(m).is_some_and(|e| e > tol)
}

/// Smallest eigenvalue of the symmetric part; `None` for non-finite input.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> Option<f64> {
    if m.nrows() == 0 || m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let sym = (m + m.transpose()) * 0.5;
    Some(SymmetricEigen::new(sym).eigenvalues.min())
}

/// Max-norm of a matrix (largest absolute entry).
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}

/// `max |M − Mᵀ|`.
pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// `max |M + Mᵀ|`.
pub fn antisymmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m + m.transpose()).amax()
}

#[cfg(test)]
mod tests;
