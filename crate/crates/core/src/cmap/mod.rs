//! Special Kähler structures in flat Darboux coordinates, generated either by
//! a holomorphic prepotential or given directly by a potential and a
//! complex-structure matrix, together with the c-map to a hyper-Kähler
//! structure on `T*M` and its conformal rescaling.
//!
//! Conventions: the Kähler form is stored as the matrix `W = g·I`, i.e.
//! `W(X, Y) = g(X, IY)`. For a special Kähler structure `W = λΩ` with `Ω`
//! the constant Darboux form and `λ > 0`; for prepotential structures
//! `Ω = [[0, Id], [−Id, 0]]` and `λ = 1`.

pub mod hyperkahler;
pub mod prepotential;

pub use hyperkahler::{
    build_hyperkahler, check_conformal_hyperkahler, check_hyperkahler, check_invariance_psi_hat,
    check_perturbation_control, preserves_field, ConformalHyperKahler, HkTensor, HyperKahlerFrame, HyperKahlerLift,
};
pub use prepotential::{Prepotential, Signature};

use crate::error::{Error, Result};
use crate::expr::ScalarExpression;
use crate::hessian::{AffineConfig, Domain, AD_TOL, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::report::ReportEntry;
use crate::tensor::{
    block_matrix, invert, matrix_jet, min_eigenvalue, nijenhuis, AffineAutomorphism, AffineField, DerivMode, MatJet,
    MatrixField, MatrixFn, MetricField, Tensor3, PD_TOL,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const SK_PRESETS: [&str; 3] = ["sk_flat", "sk_cubic", "sk_conic"];
/// Tolerance for integrability, parallelism of ω and symmetry of `∂g`.
pub const SK_TOL: f64 = 1e-6;
/// Tolerance for the Newton round trip `z → q → z`.
pub const ROUNDTRIP_TOL: f64 = 1e-10;

/// `[[0, Id], [−Id, 0]]` on `ℝ²ᵐ`.
pub fn darboux_form(m: usize) -> DMatrix<f64> {
    let i = DMatrix::<f64>::identity(m, m);
    block_matrix(&DMatrix::zeros(m, m), &i, &-&i, &DMatrix::zeros(m, m))
}

/// A matrix of real expressions, e.g. a complex-structure field.
#[derive(Debug, Clone)]
pub struct ExprMatrix {
    rows: Vec<Vec<ScalarExpression>>,
}

impl ExprMatrix {
    pub fn parse(rows: &[Vec<String>], n: usize) -> Result<Self> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config(format!("matrix field must be {n}×{n}")));
        }
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|t| ScalarExpression::real(t, n)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExprMatrix { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(ScalarExpression::serialize).collect()).collect()
    }

    pub fn value(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = e.eval(p)?;
            }
        }
        Ok(m)
    }

    pub fn jet(&self, p: &[f64]) -> Result<MatJet> {
        let n = self.dim();
        let mut value = DMatrix::zeros(n, n);
        let mut partials = vec![DMatrix::zeros(n, n); n];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let (v, grad) = e.gradient(p)?;
                value[(i, j)] = v;
                for (k, d) in partials.iter_mut().enumerate() {
                    d[(i, j)] = grad[k];
                }
            }
        }
        Ok(MatJet::new(value, partials))
    }
}

#[derive(Debug)]
enum Source {
    Prepotential(Prepotential),
    Direct { metric: MetricField, complex: ExprMatrix, domain: Domain },
}

/// A special Kähler structure `(g, I, ∇, ω)` on a domain of `ℝ²ᵐ` with
/// flat Darboux coordinates.
#[derive(Debug, Clone)]
pub struct SpecialKahlerStructure {
    name: String,
    source: Arc<Source>,
    omega: DMatrix<f64>,
    lambda: f64,
    perturbation: f64,
    field: Option<AffineField>,
}

impl SpecialKahlerStructure {
    /// Validates, at `samples` seeded points of the box, the signature of
    /// `Im F''` and the Newton round trip, then fixes `λ` at the first point.
    pub fn from_prepotential(name: &str, f: Prepotential, samples: usize, seed: u64) -> Result<Self> {
        let m = f.m();
        let zs = f.sample_z(samples.max(1), seed);
        for z in &zs {
            let n = f.imaginary_hessian(z)?;
            let point = prepotential::realify(z);
            match f.signature() {
                Signature::Definite => {
                    let e = min_eigenvalue(&n).unwrap_or(f64::NAN);
                    if !(e > PD_TOL) {
                        return Err(Error::NotPositiveDefinite { point, min_eigenvalue: e });
                    }
                }
                Signature::Indefinite => {
                    if min_abs_eigenvalue(&n) <= PD_TOL {
                        return Err(Error::SingularMetric { point });
                    }
                }
            }
            let back = f.invert(f.darboux(z)?.as_slice())?;
            if back.iter().zip(z).any(|(a, b)| (a - b).norm() > ROUNDTRIP_TOL) {
                return Err(Error::NewtonDivergence { point });
            }
        }
        let q0 = f.darboux(&zs[0])?;
        let mut s = SpecialKahlerStructure {
            name: name.to_string(),
            source: Arc::new(Source::Prepotential(f)),
            omega: darboux_form(m),
            lambda: 1.0,
            perturbation: 0.0,
            field: None,
        };
        s.lambda = s.estimate_lambda(q0.as_slice())?;
        Ok(s)
    }

    /// A structure given by a potential `Φ` (`g = Hess Φ`), a
    /// complex-structure matrix `I(q)` and the constant form `Ω`. `g` must
    /// be positive definite at `samples` seeded domain points.
    pub fn from_direct(
        name: &str,
        potential: ScalarExpression,
        complex: ExprMatrix,
        omega: DMatrix<f64>,
        domain: Domain,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = domain.dim();
        if potential.arity() != n || complex.dim() != n || omega.shape() != (n, n) || !n.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "dimension mismatch: domain {n}, potential {}, I {}, Omega {:?} (dimension must be even)",
                potential.arity(),
                complex.dim(),
                omega.shape()
            )));
        }
        if (&omega + omega.transpose()).amax() > 0.0 {
            return Err(Error::Config("Omega must be antisymmetric".into()));
        }
        invert(&omega).map_err(|_| Error::Config("Omega must be invertible".into()))?;
        let metric = MetricField::from_potential(potential)?;
        let points = domain.sample(samples.max(1), seed)?;
        let mut s = SpecialKahlerStructure {
            name: name.to_string(),
            source: Arc::new(Source::Direct { metric, complex, domain }),
            omega,
            lambda: 1.0,
            perturbation: 0.0,
            field: None,
        };
        for p in &points {
            let (g, _) = s.values(p)?;
            let e = min_eigenvalue(&g).unwrap_or(f64::NAN);
            if !(e > PD_TOL) {
                return Err(Error::NotPositiveDefinite { point: p.clone(), min_eigenvalue: e });
            }
        }
        s.lambda = s.estimate_lambda(&points[0])?;
        Ok(s)
    }

    fn estimate_lambda(&self, q: &[f64]) -> Result<f64> {
        let (g, i) = self.values(q)?;
        let w = g * i;
        let lambda = w.dot(&self.omega) / self.omega.dot(&self.omega);
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("g·I is not a positive multiple of Omega (estimate {lambda:e})")));
        }
        Ok(lambda)
    }

    /// Attach a homothetic field (used by the conformal construction).
    pub fn with_field(mut self, xi: AffineField) -> Result<Self> {
        if xi.dim() != self.dim() {
            return Err(Error::Dimension(format!("field is {}-dimensional, structure is {}", xi.dim(), self.dim())));
        }
        self.field = Some(xi);
        Ok(self)
    }

    /// The same data with `I` replaced by `I + ε·Id` — a corrupted input for
    /// negative controls. All constructors' validation is bypassed.
    pub fn with_perturbation(&self, eps: f64) -> Self {
        SpecialKahlerStructure { perturbation: eps, name: format!("{}+perturbed", self.name), ..self.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Real dimension `2m`.
    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    /// `λ` with `g·I = λΩ`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn perturbation(&self) -> f64 {
        self.perturbation
    }

    pub fn field(&self) -> Option<&AffineField> {
        self.field.as_ref()
    }

    pub fn prepotential(&self) -> Option<&Prepotential> {
        match self.source.as_ref() {
            Source::Prepotential(f) => Some(f),
            Source::Direct { .. } => None,
        }
    }

    pub fn signature(&self) -> Signature {
        self.prepotential().map_or(Signature::Definite, Prepotential::signature)
    }

    /// `(g(q), I(q))`.
    pub fn values(&self, q: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let (g, i) = match self.source.as_ref() {
            Source::Prepotential(f) => f.special_values(&f.invert(q)?)?,
            Source::Direct { metric, complex, .. } => (metric.value(q)?, complex.value(q)?),
        };
        Ok((g, self.perturb(i)))
    }

    /// Exact jets of `g` and `I` over the `2m` Darboux coordinates.
    pub fn jets(&self, q: &[f64]) -> Result<(MatJet, MatJet)> {
        let (g, mut i) = match self.source.as_ref() {
            Source::Prepotential(f) => f.special_jets(&f.invert(q)?)?,
            Source::Direct { metric, complex, .. } => (metric.jet(q)?, complex.jet(q)?),
        };
        i.value = self.perturb(i.value);
        Ok((g, i))
    }

    fn perturb(&self, i: DMatrix<f64>) -> DMatrix<f64> {
        if self.perturbation == 0.0 {
            return i;
        }
        let n = i.nrows();
        i + DMatrix::<f64>::identity(n, n) * self.perturbation
    }

    fn field_of(&self, pick: fn((MatJet, MatJet)) -> MatJet) -> MatrixFn {
        let (a, b) = (self.clone(), self.clone());
        MatrixFn::new(
            self.dim(),
            move |q| {
                let (g, i) = a.values(q)?;
                Ok(pick((MatJet::constant(g, 0), MatJet::constant(i, 0))).value)
            },
            move |q| Ok(pick(b.jets(q)?)),
        )
    }

    pub fn metric_field(&self) -> MatrixFn {
        self.field_of(|(g, _)| g)
    }

    pub fn complex_structure_field(&self) -> MatrixFn {
        self.field_of(|(_, i)| i)
    }

    /// `W = g·I`.
    pub fn kahler_form_field(&self) -> MatrixFn {
        self.field_of(|(g, i)| g.mul(&i))
    }

    /// Seeded points in Darboux coordinates.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        match self.source.as_ref() {
            Source::Prepotential(f) => f
                .sample_z(count, seed)
                .iter()
                .map(|z| Ok(f.darboux(z)?.as_slice().to_vec()))
                .collect(),
            Source::Direct { domain, .. } => domain.sample(count, seed),
        }
    }

    /// Reject points whose preimage lies outside the box (prepotential) or
    /// outside the domain (direct).
    pub fn require(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dim() {
            return Err(Error::Dimension(format!("point has {} coordinates, expected {}", q.len(), self.dim())));
        }
        match self.source.as_ref() {
            Source::Prepotential(f) => {
                let z = f.invert(q)?;
                if f.in_box(&z) {
                    Ok(())
                } else {
                    Err(Error::Domain {
                        point: q.to_vec(),
                        reason: format!("preimage {:?} lies outside the prepotential box", prepotential::realify(&z)),
                    })
                }
            }
            Source::Direct { domain, .. } => domain.require(q),
        }
    }

    /// Config that rebuilds this structure.
    pub fn to_config(&self) -> SpecialKahlerConfig {
        let field_affine = self.field.as_ref().map(AffineConfig::from_field);
        match self.source.as_ref() {
            Source::Prepotential(f) => SpecialKahlerConfig::Prepotential(PrepotentialConfig {
                name: self.name.clone(),
                m: f.m(),
                f: f.expression().serialize(),
                bounds: f.bounds().iter().map(|&(lo, hi)| [lo, hi]).collect(),
                signature: f.signature(),
                field_affine,
                seed: Some(DEFAULT_SEED),
                samples: Some(DEFAULT_SAMPLES),
            }),
            Source::Direct { metric, complex, domain } => SpecialKahlerConfig::Direct(DirectConfig {
                name: self.name.clone(),
                dim: self.dim(),
                omega: (0..self.dim()).map(|i| self.omega.row(i).iter().copied().collect()).collect(),
                potential: metric.potential().map(ScalarExpression::serialize).unwrap_or_default(),
                complex: complex.to_strings(),
                domain: domain.inequalities().iter().map(ScalarExpression::serialize).collect(),
                bounds: domain.bounds().iter().map(|&(lo, hi)| [lo, hi]).collect(),
                field_affine,
                seed: Some(DEFAULT_SEED),
                samples: Some(DEFAULT_SAMPLES),
            }),
        }
    }
}

fn min_abs_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, e| a.min(e.abs()))
}

// ---------------------------------------------------------------------------
// Configs

/// `{name, m, F, box, signature?, field_affine?, seed?, samples?}` with the
/// box on `(Re z¹..Re zᵐ, Im z¹..Im zᵐ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepotentialConfig {
    pub name: String,
    pub m: usize,
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default)]
    pub signature: Signature,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_affine: Option<AffineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// `{name, dim, Omega, potential, I, domain, box, field_affine?, seed?,
/// samples?}`. The potential must be given explicitly; `"implicit"` is only
/// meaningful for prepotential structures, whose metric is not exhibited as
/// a Hessian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectConfig {
    pub name: String,
    pub dim: usize,
    #[serde(rename = "Omega")]
    pub omega: Vec<Vec<f64>>,
    pub potential: String,
    #[serde(rename = "I")]
    pub complex: Vec<Vec<String>>,
    #[serde(default)]
    pub domain: Vec<String>,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_affine: Option<AffineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecialKahlerConfig {
    Prepotential(PrepotentialConfig),
    Direct(DirectConfig),
}

impl SpecialKahlerConfig {
    /// True iff the JSON object looks like a special Kähler config (has `F`,
    /// `Omega` or `I`).
    pub fn matches(value: &serde_json::Value) -> bool {
        ["F", "Omega", "I"].iter().any(|k| value.get(k).is_some())
    }

    /// Parse, choosing the variant by the presence of `F`, so that error
    /// messages refer to the intended schema.
    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        Ok(if value.get("F").is_some() {
            SpecialKahlerConfig::Prepotential(serde_json::from_value(value)?)
        } else {
            SpecialKahlerConfig::Direct(serde_json::from_value(value)?)
        })
    }

    pub fn name(&self) -> &str {
        match self {
            SpecialKahlerConfig::Prepotential(c) => &c.name,
            SpecialKahlerConfig::Direct(c) => &c.name,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SpecialKahlerConfig::Prepotential(c) => c.seed,
            SpecialKahlerConfig::Direct(c) => c.seed,
        }
    }

    pub fn samples(&self) -> Option<usize> {
        match self {
            SpecialKahlerConfig::Prepotential(c) => c.samples,
            SpecialKahlerConfig::Direct(c) => c.samples,
        }
    }

    pub fn build(&self) -> Result<SpecialKahlerStructure> {
        let samples = self.samples().unwrap_or(DEFAULT_SAMPLES);
        let seed = self.seed().unwrap_or(DEFAULT_SEED);
        let (s, field) = match self {
            SpecialKahlerConfig::Prepotential(c) => {
                let f = Prepotential::parse(&c.f, c.m, c.bounds.iter().map(|b| (b[0], b[1])).collect(), c.signature)?;
                (SpecialKahlerStructure::from_prepotential(&c.name, f, samples, seed)?, &c.field_affine)
            }
            SpecialKahlerConfig::Direct(c) => {
                if c.potential.trim() == "implicit" {
                    return Err(Error::Config(
                        "`implicit` potentials are only available for prepotential configs".into(),
                    ));
                }
                if c.bounds.len() != c.dim {
                    return Err(Error::Config(format!("box has {} intervals, dim is {}", c.bounds.len(), c.dim)));
                }
                if c.omega.len() != c.dim || c.omega.iter().any(|r| r.len() != c.dim) {
                    return Err(Error::Config(format!("Omega must be {0}×{0}", c.dim)));
                }
                let omega = DMatrix::from_fn(c.dim, c.dim, |i, j| c.omega[i][j]);
                let domain = Domain::parse(&c.domain, c.bounds.iter().map(|b| (b[0], b[1])).collect())?;
                let s = SpecialKahlerStructure::from_direct(
                    &c.name,
                    ScalarExpression::real(&c.potential, c.dim)?,
                    ExprMatrix::parse(&c.complex, c.dim)?,
                    omega,
                    domain,
                    samples,
                    seed,
                )?;
                (s, &c.field_affine)
            }
        };
        match field {
            Some(f) => s.with_field(f.to_field()?),
            None => Ok(s),
        }
    }
}

// ---------------------------------------------------------------------------
// Presets

struct SkData {
    f: &'static str,
    m: usize,
    bounds: Vec<(f64, f64)>,
    signature: Signature,
    euler: bool,
}

fn sk_data(name: &str) -> Result<SkData> {
    Ok(match name {
        "sk_flat" => SkData {
            f: "i*z1^2/2",
            m: 1,
            bounds: vec![(-1.0, 1.0), (-1.0, 1.0)],
            signature: Signature::Definite,
            euler: true,
        },
        "sk_cubic" => SkData {
            f: "z1^3/6",
            m: 1,
            bounds: vec![(-1.0, 1.0), (0.5, 1.5)],
            signature: Signature::Definite,
            euler: false,
        },
        // Im F'' has determinant −12|w|⁴ sin⁴(arg w), w = z2/z1, so it is
        // indefinite everywhere; the box keeps it uniformly nondegenerate
        // and g(ξ, ξ) > 0 for the Euler field.
        "sk_conic" => SkData {
            f: "z2^3/z1",
            m: 2,
            bounds: vec![(0.9, 1.1), (-0.3, 0.3), (-0.1, 0.1), (0.6, 0.9)],
            signature: Signature::Indefinite,
            euler: true,
        },
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}

/// A preset special Kähler structure, validated at 100 seeded samples. The
/// flat and conic presets carry the Euler field `ξ = Σ qⁱ∂ᵢ`.
pub fn sk_preset(name: &str) -> Result<SpecialKahlerStructure> {
    let d = sk_data(name)?;
    let f = Prepotential::parse(d.f, d.m, d.bounds, d.signature)?;
    let s = SpecialKahlerStructure::from_prepotential(name, f, DEFAULT_SAMPLES, DEFAULT_SEED)?;
    if d.euler {
        s.with_field(AffineField::euler(2 * d.m, 1.0))
    } else {
        Ok(s)
    }
}

/// Seeded affine holomorphic isometries of a preset that also preserve `Ω`:
/// rotations with translations (flat), the lifts of `z ↦ z + a` (cubic),
/// and the lifts of `(z¹, z²) ↦ (b³z¹, bz²)`, which fix `F` (conic).
pub fn sk_automorphisms(name: &str, count: usize, seed: u64) -> Result<Vec<AffineAutomorphism>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| match name {
            "sk_flat" => {
                let t: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                let rot = nalgebra::dmatrix![t.cos(), -t.sin(); t.sin(), t.cos()];
                let c = if rng.gen_bool(0.5) {
                    DVector::from_fn(2, |_, _| rng.gen_range(-0.5..0.5))
                } else {
                    DVector::zeros(2)
                };
                AffineAutomorphism::new(rot, c)
            }
            "sk_cubic" => {
                let a: f64 = rng.gen_range(-0.2..0.2);
                AffineAutomorphism::new(nalgebra::dmatrix![1.0, 0.0; a, 1.0], nalgebra::dvector![a, a * a / 2.0])
            }
            "sk_conic" => {
                let b: f64 = rng.gen_range(0.9..1.1);
                AffineAutomorphism::diagonal(&[b.powi(3), b, b.powi(-3), 1.0 / b])
            }
            other => Err(Error::UnknownPreset(other.to_string())),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Checks

fn min_signature_margin(sk: &SpecialKahlerStructure, g: &DMatrix<f64>) -> f64 {
    match sk.signature() {
        Signature::Definite => min_eigenvalue(g).unwrap_or(f64::NAN),
        Signature::Indefinite => min_abs_eigenvalue(g),
    }
}

/// The special Kähler axioms at `points`: `I² = −Id`, Hermitian `g`,
/// vanishing Nijenhuis tensor, `g·I = λΩ` constant, totally symmetric
/// `∂_k g_ij`, nondegeneracy of the stated signature, and (prepotential
/// structures) the Newton round trip.
pub fn check_special_kahler(
    sk: &SpecialKahlerStructure,
    points: &[Vec<f64>],
    mode: DerivMode,
) -> Result<Vec<ReportEntry>> {
    let n = sk.dim();
    let id = DMatrix::<f64>::identity(n, n);
    let (gf, jf) = (sk.metric_field(), sk.complex_structure_field());
    let target = sk.omega() * sk.lambda();
    let (mut sq, mut herm, mut nij, mut par, mut sym, mut margin, mut trip) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for q in points {
        let (g, i) = sk.values(q)?;
        let scale = g.amax().max(1.0);
        sq = sq.max((&i * &i + &id).amax());
        herm = herm.max((i.transpose() * &g * &i - &g).amax() / scale);
        nij = nij.max(nijenhuis(&jf, q, mode)?.max_abs());
        par = par.max((&g * &i - &target).amax() / target.amax());
        sym = sym.max(Tensor3::from_partials(&matrix_jet(&gf, q, mode)?.partials).total_symmetry_defect() / scale);
        margin = margin.min(min_signature_margin(sk, &g));
        if let Some(f) = sk.prepotential() {
            let z = f.invert(q)?;
            let back = f.invert(f.darboux(&z)?.as_slice())?;
            trip = trip.max(back.iter().zip(&z).fold(0.0f64, |a, (x, y)| a.max((x - y).norm())));
        }
    }
    let k = points.len();
    let (sig_id, sig_anchor) = match sk.signature() {
        Signature::Definite => ("sk.positive_definite", "g positive definite"),
        Signature::Indefinite => ("sk.nondegenerate", "g nondegenerate (indefinite signature)"),
    };
    let mut out = vec![
        ReportEntry::checked("sk.complex_structure", "I^2 = -Id", sq, AD_TOL, k),
        ReportEntry::checked("sk.hermitian", "g(I., I.) = g", herm, AD_TOL, k),
        ReportEntry::checked("sk.nijenhuis", "N_I = 0", nij, SK_TOL, k),
        ReportEntry::checked("sk.omega_parallel", "g I = lambda Omega with constant components", par, SK_TOL, k),
        ReportEntry::checked("sk.hessian", "d_k g_ij totally symmetric in flat coordinates", sym, SK_TOL, k),
        ReportEntry::checked(sig_id, sig_anchor, (PD_TOL - margin).max(0.0), PD_TOL, k),
        ReportEntry::informational("sk.min_eigenvalue_margin", "min |eigenvalue of g| over samples", margin, k),
        ReportEntry::informational("sk.lambda", "lambda with g I = lambda Omega", sk.lambda(), 1),
    ];
    if sk.prepotential().is_some() {
        out.push(ReportEntry::checked(
            "sk.newton_roundtrip",
            "z -> (Re z, Re F'(z)) -> z",
            trip,
            ROUNDTRIP_TOL,
            k,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
