use crate::expr::ExprError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eigenvalue: f64 },
    #[error("no domain point found in the sampling box after {attempts} draws")]
    EmptyDomainSample { attempts: usize },
    #[error("point {point:?} is outside the domain: {reason}")]
    Domain { point: Vec<f64>, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("g(xi, xi) = {value:e} is not positive at {point:?}")]
    NonpositiveNorm { point: Vec<f64>, value: f64 },
    #[error("field is not homothetic: max |L_xi g - 2g| = {residual:e} at {point:?}")]
    NotHomothetic { point: Vec<f64>, residual: f64 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("automorphism is not an isometry (relative defect {defect:e})")]
    NotAnIsometry { defect: f64 },
    #[error("automorphism does not preserve the symplectic form (defect {defect:e})")]
    NotSymplectic { defect: f64 },
    #[error("automorphism does not preserve the complex structure (defect {defect:e})")]
    NotHolomorphic { defect: f64 },
    #[error("Newton inversion of the special coordinates diverged at {point:?}")]
    NewtonDivergence { point: Vec<f64> },
    #[error("prepotential has a pole in the domain near {point:?}")]
    PoleInDomain { point: Vec<f64> },
    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("vertical lift is only defined for linear fields (translation part {translation:?})")]
    TranslationUnsupported { translation: Vec<f64> },
    #[error("vector field is not affine: {0}")]
    NotAffine(String),
    #[error("matrix is not invertible (|det| = {det:e})")]
    Singular { det: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
