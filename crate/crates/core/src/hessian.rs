//! Hessian structures on open domains of a flat chart, and selfsimilar ones
//! carrying an affine homothetic field (`L_ξ g = 2g`).

use crate::error::{Error, Result};
use crate::expr::ScalarExpression;
use crate::report::ReportEntry;
use crate::tensor::{
    is_positive_definite, lie_derivative_metric, matrix_jet, min_eigenvalue, vector_jet, AffineField,
    DerivMode, MatrixField, MatrixFn, MetricField, ScalarJet, VectorField, VectorFieldSpec, PD_TOL,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Sampled points must satisfy every inequality with this margin.
pub const DOMAIN_MARGIN: f64 = 1e-3;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
/// Rejection-sampling budget per requested point.
const DRAWS_PER_POINT: usize = 10_000;
/// Tolerance for identities computed by automatic differentiation alone.
pub const AD_TOL: f64 = 1e-8;

/// An open set `{x : cᵢ(x) > 0 for all i}` with a bounding box for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    inequalities: Vec<ScalarExpression>,
    bounds: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(inequalities: Vec<ScalarExpression>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let n = bounds.len();
        if n == 0 {
            return Err(Error::Config("sampling box must have at least one coordinate".into()));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
            return Err(Error::Config(format!("invalid box interval [{lo}, {hi}]")));
        }
        if let Some(c) = inequalities.iter().find(|c| c.arity() != n) {
            return Err(Error::Config(format!("domain inequality `{c}` is not over {n} variables")));
        }
        Ok(Domain { inequalities, bounds })
    }

    pub fn parse(inequalities: &[String], bounds: Vec<(f64, f64)>) -> Result<Self> {
        let n = bounds.len();
        let parsed = inequalities
            .iter()
            .map(|s| ScalarExpression::real(s, n))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(parsed, bounds)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn inequalities(&self) -> &[ScalarExpression] {
        &self.inequalities
    }

    /// Every inequality holds with at least `margin` to spare.
    pub fn contains_with_margin(&self, p: &[f64], margin: f64) -> bool {
        p.len() == self.dim()
            && self.inequalities.iter().all(|c| c.eval(p).is_ok_and(|v| v > margin))
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.contains_with_margin(p, 0.0)
    }

    pub fn require(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain { point: p.to_vec(), reason: "a domain inequality fails".into() })
        }
    }

    /// `count` points drawn uniformly from the box and kept when they lie in
    /// the domain with margin. Deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let budget = DRAWS_PER_POINT * count.max(1);
        let mut draws = 0;
        while out.len() < count {
            if draws == budget {
                return Err(Error::EmptyDomainSample { attempts: draws });
            }
            draws += 1;
            let p: Vec<f64> = self.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
            if self.contains_with_margin(&p, DOMAIN_MARGIN) {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// JSON geometry config for Hessian structures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HessianConfig {
    pub name: String,
    pub dim: usize,
    /// Potential φ with `g = Hess φ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    /// Explicit metric components, for metrics that need not be Hessian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub domain: Vec<String>,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_affine: Option<AffineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineConfig {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl AffineConfig {
    pub fn to_field(&self) -> Result<AffineField> {
        let n = self.b.len();
        if self.a.len() != n || self.a.iter().any(|r| r.len() != n) {
            return Err(Error::Config(format!("field_affine.A must be {n}×{n}")));
        }
        AffineField::new(DMatrix::from_fn(n, n, |i, j| self.a[i][j]), DVector::from_vec(self.b.clone()))
    }

    pub fn from_field(f: &AffineField) -> Self {
        let a = f.linear_part();
        AffineConfig {
            a: (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect(),
            b: f.translation_part().iter().copied().collect(),
        }
    }
}

impl HessianConfig {
    pub fn metric_field(&self) -> Result<MetricField> {
        match (&self.potential, &self.metric) {
            (Some(p), None) => MetricField::from_potential(ScalarExpression::real(p, self.dim)?),
            (None, Some(rows)) => {
                if rows.len() != self.dim {
                    return Err(Error::Config(format!("metric has {} rows, dim is {}", rows.len(), self.dim)));
                }
                MetricField::parse_components(rows)
            }
            _ => Err(Error::Config("exactly one of `potential` and `metric` must be given".into())),
        }
    }

    pub fn domain(&self) -> Result<Domain> {
        if self.bounds.len() != self.dim {
            return Err(Error::Config(format!("box has {} intervals, dim is {}", self.bounds.len(), self.dim)));
        }
        Domain::parse(&self.domain, self.bounds.iter().map(|b| (b[0], b[1])).collect())
    }

    /// The homothetic field, if the config declares one.
    pub fn vector_field(&self) -> Result<Option<VectorFieldSpec>> {
        let affine = self.field_affine.as_ref().map(AffineConfig::to_field).transpose()?;
        match (&self.field, affine) {
            (Some(texts), affine) => {
                if texts.len() != self.dim {
                    return Err(Error::Config(format!("field has {} components, dim is {}", texts.len(), self.dim)));
                }
                let comps = texts
                    .iter()
                    .map(|t| ScalarExpression::real(t, self.dim))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Some(VectorFieldSpec::new(comps, affine)?))
            }
            (None, Some(affine)) => Ok(Some(VectorFieldSpec::from_affine(affine))),
            (None, None) => Ok(None),
        }
    }
}

/// A metric on a domain, validated positive definite at sampled points.
#[derive(Debug, Clone)]
pub struct HessianStructure {
    name: String,
    metric: MetricField,
    domain: Domain,
}

/// Build and validate a structure from a config, using its `samples` and
/// `seed` (default 100 and 42).
pub fn make_hessian_structure(config: &HessianConfig) -> Result<HessianStructure> {
    HessianStructure::new(
        &config.name,
        config.metric_field()?,
        config.domain()?,
        config.samples.unwrap_or(DEFAULT_SAMPLES),
        config.seed.unwrap_or(DEFAULT_SEED),
    )
}

impl HessianStructure {
    /// Validates positive definiteness at `samples` seeded domain points and,
    /// for potential-generated metrics, total symmetry of `∂_k g_ij`.
    pub fn new(name: &str, metric: MetricField, domain: Domain, samples: usize, seed: u64) -> Result<Self> {
        if metric.dim() != domain.dim() {
            return Err(Error::Config(format!(
                "metric is {}-dimensional, domain is {}-dimensional",
                metric.dim(),
                domain.dim()
            )));
        }
        let s = HessianStructure { name: name.to_string(), metric, domain };
        for p in s.domain.sample(samples, seed)? {
            let g = s.metric.value(&p)?;
            if !is_positive_definite(&g, PD_TOL) {
                return Err(Error::NotPositiveDefinite {
                    min_eigenvalue: min_eigenvalue(&g).unwrap_or(f64::NAN),
                    point: p,
                });
            }
            if s.is_potential_generated() {
                let dg = matrix_jet(&s.metric, &p, DerivMode::Analytic)?;
                let defect = crate::tensor::Tensor3::from_partials(&dg.partials).total_symmetry_defect();
                if defect > AD_TOL * g.amax().max(1.0) {
                    return Err(Error::Config(format!(
                        "metric derivative of a potential is not symmetric ({defect:e}) at {p:?}"
                    )));
                }
            }
        }
        Ok(s)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn potential(&self) -> Option<&ScalarExpression> {
        self.metric.potential()
    }

    pub fn is_potential_generated(&self) -> bool {
        self.metric.potential().is_some()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        self.domain.sample(count, seed)
    }

    /// `g(p)`, rejecting points outside the domain.
    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.domain.require(p)?;
        self.metric.value(p)
    }

    /// The metric as a field that refuses points outside the domain.
    pub fn checked_metric(&self) -> MatrixFn {
        let (m1, d1) = (self.metric.clone(), self.domain.clone());
        let (m2, d2) = (self.metric.clone(), self.domain.clone());
        MatrixFn::new(
            self.dim(),
            move |p| {
                d1.require(p)?;
                m1.value(p)
            },
            move |p| {
                d2.require(p)?;
                m2.jet(p)
            },
        )
    }
}

/// `max ‖L_ξ g − 2g‖_∞` over `points`.
pub fn check_selfsimilar<X: VectorField + ?Sized>(
    s: &HessianStructure,
    xi: &X,
    points: &[Vec<f64>],
    mode: DerivMode,
) -> Result<ReportEntry> {
    let mut worst: f64 = 0.0;
    for p in points {
        let l = lie_derivative_metric(s.metric(), xi, p, mode)?;
        worst = worst.max((l - s.metric().value(p)? * 2.0).amax());
    }
    Ok(ReportEntry::checked("selfsimilar", "L_xi g = 2g", worst, AD_TOL, points.len()))
}

/// Hessian structure with an affine field generating homotheties.
#[derive(Debug, Clone)]
pub struct SelfsimilarHessianStructure {
    base: HessianStructure,
    field: VectorFieldSpec,
    affine: AffineField,
}

impl SelfsimilarHessianStructure {
    /// Certifies ξ affine and checks `L_ξ g = 2g` (within 10⁻⁸) and
    /// `g(ξ, ξ) > 0` at `samples` seeded points.
    pub fn new(base: HessianStructure, field: VectorFieldSpec, samples: usize, seed: u64) -> Result<Self> {
        if field.dim() != base.dim() {
            return Err(Error::Dimension(format!("field has {} components, metric is {}-dimensional", field.dim(), base.dim())));
        }
        let points = base.sample(samples, seed)?;
        let affine = field.certify_affine(&points)?;
        let s = SelfsimilarHessianStructure { base, field, affine };
        for p in &points {
            let l = lie_derivative_metric(s.base.metric(), &s.affine, p, DerivMode::Analytic)?;
            let residual = (l - s.base.metric().value(p)? * 2.0).amax();
            if !(residual < AD_TOL) {
                return Err(Error::NotHomothetic { point: p.clone(), residual });
            }
            s.norm_squared(p)?;
        }
        Ok(s)
    }

    pub fn from_config(config: &HessianConfig) -> Result<Self> {
        let base = make_hessian_structure(config)?;
        let field = config
            .vector_field()?
            .ok_or_else(|| Error::Config(format!("geometry `{}` declares no vector field", config.name)))?;
        Self::new(base, field, config.samples.unwrap_or(DEFAULT_SAMPLES), config.seed.unwrap_or(DEFAULT_SEED))
    }

    pub fn base(&self) -> &HessianStructure {
        &self.base
    }

    pub fn field(&self) -> &VectorFieldSpec {
        &self.field
    }

    /// The certified normal form `Ax + b` of ξ.
    pub fn affine(&self) -> &AffineField {
        &self.affine
    }

    /// `g(ξ, ξ)` at `p`; must be strictly positive.
    pub fn norm_squared(&self, p: &[f64]) -> Result<f64> {
        self.base.domain().require(p)?;
        let xi = self.affine.value(p)?;
        let value = (xi.transpose() * self.base.metric().value(p)? * &xi)[(0, 0)];
        if !(value > 0.0) {
            return Err(Error::NonpositiveNorm { point: p.to_vec(), value });
        }
        Ok(value)
    }

    /// `g(ξ, ξ)` with its gradient `∂_k(ξᵀgξ) = ξᵀ(∂_k g)ξ + 2(A e_k)ᵀ g ξ`.
    pub fn norm_squared_jet(&self, p: &[f64], mode: DerivMode) -> Result<ScalarJet> {
        let value = self.norm_squared(p)?;
        let g = matrix_jet(self.base.metric(), p, mode)?;
        let (xi, a) = vector_jet(&self.affine, p, mode)?;
        let gxi = &g.value * &xi;
        let mut gradient = a.transpose() * &gxi * 2.0;
        for (k, d) in g.partials.iter().enumerate() {
            gradient[k] += (xi.transpose() * d * &xi)[(0, 0)];
        }
        Ok(ScalarJet::new(value, gradient))
    }

    /// `max |ξ(g(ξ,ξ)) − 2g(ξ,ξ)|` over `points`.
    pub fn check_norm_homogeneity(&self, points: &[Vec<f64>], mode: DerivMode) -> Result<ReportEntry> {
        let mut worst: f64 = 0.0;
        for p in points {
            let n = self.norm_squared_jet(p, mode)?;
            let xi = self.affine.value(p)?;
            worst = worst.max((n.gradient.dot(&xi) - 2.0 * n.value).abs());
        }
        Ok(ReportEntry::checked("norm_homogeneity", "xi(g(xi,xi)) = 2 g(xi,xi)", worst, 1e-6, points.len()))
    }
}
