//! Concrete field types: expression-backed metrics and vector fields, and
//! closure-backed fields for composite tensors.

use super::affine::AffineField;
use super::jets::{MatJet, ScalarJet};
use super::{fd_gradient, fd_matrix_jet, MatrixField, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::expr::{ExprError, Mode, ScalarExpression};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A component Hessian below this max-norm counts as vanishing.
pub const AFFINE_HESSIAN_TOL: f64 = 1e-10;
/// Agreement required between component expressions and a declared `Ax + b`.
const AFFINE_FORM_TOL: f64 = 1e-12;
const AFFINE_FORM_POINTS: usize = 20;

type ValueFn = Arc<dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync>;
type JetFn = Arc<dyn Fn(&[f64]) -> Result<MatJet> + Send + Sync>;
type ScalarValueFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;
type ScalarJetFn = Arc<dyn Fn(&[f64]) -> Result<ScalarJet> + Send + Sync>;

/// A matrix field given by closures: a value evaluator and, optionally, an
/// exact jet evaluator.
#[derive(Clone)]
pub struct MatrixFn {
    coords: usize,
    value: ValueFn,
    jet: Option<JetFn>,
}

impl MatrixFn {
    pub fn new(
        coords: usize,
        value: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static,
        jet: impl Fn(&[f64]) -> Result<MatJet> + Send + Sync + 'static,
    ) -> Self {
        MatrixFn { coords, value: Arc::new(value), jet: Some(Arc::new(jet)) }
    }

    /// Only a value evaluator; derivatives come from central differences.
    pub fn value_only(
        coords: usize,
        value: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    ) -> Self {
        MatrixFn { coords, value: Arc::new(value), jet: None }
    }

    /// Only a jet evaluator; the value is read off the jet.
    pub fn from_jet(
        coords: usize,
        jet: impl Fn(&[f64]) -> Result<MatJet> + Send + Sync + 'static,
    ) -> Self {
        let jet: JetFn = Arc::new(jet);
        let j = jet.clone();
        MatrixFn { coords, value: Arc::new(move |p| Ok(j(p)?.value)), jet: Some(jet) }
    }

    pub fn constant(m: DMatrix<f64>, coords: usize) -> Self {
        let v = m.clone();
        MatrixFn::new(coords, move |_| Ok(v.clone()), move |_| Ok(MatJet::constant(m.clone(), coords)))
    }
}

impl std::fmt::Debug for MatrixFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixFn")
            .field("coords", &self.coords)
            .field("analytic_jet", &self.jet.is_some())
            .finish()
    }
}

impl MatrixField for MatrixFn {
    fn coords(&self) -> usize {
        self.coords
    }
    fn value(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        (self.value)(p)
    }
    fn jet(&self, p: &[f64]) -> Result<MatJet> {
        match &self.jet {
            Some(j) => j(p),
            None => fd_matrix_jet(|q| (self.value)(q), p),
        }
    }
}

/// A scalar field given by closures.
#[derive(Clone)]
pub struct ScalarFn {
    coords: usize,
    value: ScalarValueFn,
    jet: Option<ScalarJetFn>,
}

impl ScalarFn {
    pub fn new(
        coords: usize,
        value: impl Fn(&[f64]) -> Result<f64> + Send + Sync + 'static,
        jet: impl Fn(&[f64]) -> Result<ScalarJet> + Send + Sync + 'static,
    ) -> Self {
        ScalarFn { coords, value: Arc::new(value), jet: Some(Arc::new(jet)) }
    }

    pub fn value_only(
        coords: usize,
        value: impl Fn(&[f64]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        ScalarFn { coords, value: Arc::new(value), jet: None }
    }

    pub fn jet(&self, p: &[f64]) -> Result<ScalarJet> {
        match &self.jet {
            Some(j) => j(p),
            None => Ok(ScalarJet::new((self.value)(p)?, fd_gradient(|q| (self.value)(q), p)?)),
        }
    }
}

impl std::fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarFn").field("coords", &self.coords).finish()
    }
}

impl ScalarField for ScalarFn {
    fn coords(&self) -> usize {
        self.coords
    }
    fn value(&self, p: &[f64]) -> Result<f64> {
        (self.value)(p)
    }
    fn gradient(&self, p: &[f64]) -> Result<DVector<f64>> {
        Ok(self.jet(p)?.gradient)
    }
}

/// A metric given either as the Hessian of a potential or by explicit
/// component expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricField {
    Potential(ScalarExpression),
    Components(Vec<Vec<ScalarExpression>>),
}

impl MetricField {
    pub fn from_potential(phi: ScalarExpression) -> Result<Self> {
        if phi.mode() != Mode::Real {
            return Err(ExprError::WrongMode { parsed: phi.mode(), requested: Mode::Real }.into());
        }
        Ok(MetricField::Potential(phi))
    }

    /// Explicit components; the matrix must be square and symmetric as
    /// written (`g_ij` and `g_ji` parse to the same tree).
    pub fn from_components(rows: Vec<Vec<ScalarExpression>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Config(format!("metric row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, e) in row.iter().enumerate() {
                if e.arity() != n || e.mode() != Mode::Real {
                    return Err(Error::Config(format!("metric entry ({i},{j}) must be a real expression in {n} variables")));
                }
                if rows[j][i] != *e {
                    return Err(Error::Config(format!("metric entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(MetricField::Components(rows))
    }

    pub fn parse_components(rows: &[Vec<String>]) -> Result<Self> {
        let n = rows.len();
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| ScalarExpression::real(s, n)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_components(parsed)
    }

    pub fn dim(&self) -> usize {
        match self {
            MetricField::Potential(phi) => phi.arity(),
            MetricField::Components(rows) => rows.len(),
        }
    }

    pub fn potential(&self) -> Option<&ScalarExpression> {
        match self {
            MetricField::Potential(phi) => Some(phi),
            MetricField::Components(_) => None,
        }
    }
}

impl MatrixField for MetricField {
    fn coords(&self) -> usize {
        self.dim()
    }

    fn value(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        match self {
            MetricField::Potential(phi) => Ok(phi.jet2(p)?.2),
            MetricField::Components(rows) => {
                let n = rows.len();
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let v = rows[i][j].eval(p)?;
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
                Ok(m)
            }
        }
    }

    fn jet(&self, p: &[f64]) -> Result<MatJet> {
        match self {
            MetricField::Potential(phi) => {
                let j = phi.eval_jet3(p)?;
                Ok(MatJet::new(j.hessian, j.third))
            }
            MetricField::Components(rows) => {
                let n = rows.len();
                let mut value = DMatrix::zeros(n, n);
                let mut partials = vec![DMatrix::zeros(n, n); n];
                for i in 0..n {
                    for j in i..n {
                        let (v, g) = rows[i][j].gradient(p)?;
                        value[(i, j)] = v;
                        value[(j, i)] = v;
                        for k in 0..n {
                            partials[k][(i, j)] = g[k];
                            partials[k][(j, i)] = g[k];
                        }
                    }
                }
                Ok(MatJet::new(value, partials))
            }
        }
    }
}

/// A vector field given by component expressions, optionally declared
/// affine with normal form `Ax + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldSpec {
    components: Vec<ScalarExpression>,
    affine: Option<AffineField>,
}

impl VectorFieldSpec {
    /// Validates that a declared affine form agrees with the components at
    /// 20 pseudo-random points of `[-2, 2]ⁿ`.
    pub fn new(components: Vec<ScalarExpression>, affine: Option<AffineField>) -> Result<Self> {
        let n = components.len();
        if let Some((i, _)) = components.iter().enumerate().find(|(_, c)| c.arity() != n || c.mode() != Mode::Real) {
            return Err(Error::Config(format!("field component {i} must be a real expression in {n} variables")));
        }
        if let Some(form) = &affine {
            if form.dim() != n {
                return Err(Error::Dimension(format!("affine form has dimension {}, field has {n}", form.dim())));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_af1e);
            for _ in 0..AFFINE_FORM_POINTS {
                let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let want = form.value(&p)?;
                for (i, c) in components.iter().enumerate() {
                    let got = c.eval(&p)?;
                    if (got - want[i]).abs() > AFFINE_FORM_TOL * want[i].abs().max(1.0) {
                        return Err(Error::NotAffine(format!(
                            "component {i} evaluates to {got} at {p:?}, declared form gives {}",
                            want[i]
                        )));
                    }
                }
            }
        }
        Ok(VectorFieldSpec { components, affine })
    }

    pub fn parse(texts: &[&str]) -> Result<Self> {
        let n = texts.len();
        let components = texts.iter().map(|t| ScalarExpression::real(t, n)).collect::<Result<Vec<_>, _>>()?;
        Self::new(components, None)
    }

    /// Component expressions written out from an affine form.
    pub fn from_affine(form: AffineField) -> Self {
        let n = form.dim();
        let components = (0..n)
            .map(|i| {
                let mut terms: Vec<String> = (0..n)
                    .filter(|&j| form.linear_part()[(i, j)] != 0.0)
                    .map(|j| format!("{:?}*x{}", form.linear_part()[(i, j)], j + 1))
                    .collect();
                let b = form.translation_part()[i];
                if b != 0.0 {
                    terms.push(format!("{b:?}"));
                }
                let text = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                ScalarExpression::real(&text, n).expect("generated component parses")
            })
            .collect();
        VectorFieldSpec { components, affine: Some(form) }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarExpression] {
        &self.components
    }

    pub fn affine_form(&self) -> Option<&AffineField> {
        self.affine.as_ref()
    }

    /// Certify the field as affine: every component Hessian must vanish
    /// (max-norm below 10⁻¹⁰) at up to 20 of the given points. Returns the
    /// declared normal form, or one read off the Jacobian at the first point.
    pub fn certify_affine(&self, points: &[Vec<f64>]) -> Result<AffineField> {
        let points = &points[..points.len().min(AFFINE_FORM_POINTS)];
        let p0 = points.first().ok_or_else(|| Error::NotAffine("no sample points to certify against".into()))?;
        for p in points {
            for (i, c) in self.components.iter().enumerate() {
                let h = c.jet2(p)?.2;
                if h.amax() > AFFINE_HESSIAN_TOL {
                    return Err(Error::NotAffine(format!(
                        "component {i} has Hessian of max-norm {:e} at {p:?}",
                        h.amax()
                    )));
                }
            }
        }
        let a = self.jacobian(p0)?;
        let b = self.value(p0)? - &a * DVector::from_column_slice(p0);
        let form = match &self.affine {
            Some(declared) => {
                let scale = declared.linear_part().amax().max(declared.translation_part().amax()).max(1.0);
                let defect = (declared.linear_part() - &a).amax().max((declared.translation_part() - &b).amax());
                if defect > 1e-9 * scale {
                    return Err(Error::NotAffine(format!(
                        "declared affine form differs from the components by {defect:e}"
                    )));
                }
                declared.clone()
            }
            None => AffineField::new(a, b)?,
        };
        Ok(form)
    }
}

impl VectorField for VectorFieldSpec {
    fn coords(&self) -> usize {
        self.dim()
    }
    fn value(&self, p: &[f64]) -> Result<DVector<f64>> {
        let vals = self.components.iter().map(|c| c.eval(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(vals))
    }
    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, p.len());
        for (i, c) in self.components.iter().enumerate() {
            let g = ScalarExpression::gradient(c, p)?.1;
            a.row_mut(i).copy_from(&g.transpose());
        }
        Ok(a)
    }
}
