//! Homogeneous regular convex cones with closed-form characteristic
//! functions φ, their two invariant metrics `g_can = Hess ln φ` and
//! `g_con = Hess φ`, the radiant field, and sampled automorphisms.

use crate::error::{Error, Result};
use crate::expr::ScalarExpression;
use crate::hessian::{
    AffineConfig, Domain, HessianConfig, HessianStructure, SelfsimilarHessianStructure, AD_TOL, DEFAULT_SAMPLES,
    DEFAULT_SEED,
};
use crate::report::ReportEntry;
use crate::tensor::{
    lie_derivative_metric, pullback_metric, AffineAutomorphism, AffineField, DerivMode, MatrixField, MatrixFn,
    MetricField, VectorFieldSpec,
};
use nalgebra::{dmatrix, DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CONE_PRESETS: [&str; 4] = ["orthant2", "orthant3", "lorentz3", "spd2"];

/// Which of the two cone metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeMetric {
    /// `Hess ln φ`, invariant under the full automorphism group.
    Canonical,
    /// `Hess φ`, invariant under unimodular automorphisms.
    Characteristic,
}

impl ConeMetric {
    pub fn label(self) -> &'static str {
        match self {
            ConeMetric::Canonical => "gcan",
            ConeMetric::Characteristic => "gcon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomorphismKind {
    /// `|det A| = 1`.
    Unimodular,
    /// A unimodular map composed with a nontrivial dilation.
    Full,
}

#[derive(Debug, Clone)]
pub struct ConeAutomorphism {
    pub map: AffineAutomorphism,
    pub kind: AutomorphismKind,
}

#[derive(Debug, Clone)]
pub struct ConePreset {
    name: String,
    phi: ScalarExpression,
    can: HessianStructure,
    con: HessianStructure,
    radiant: VectorFieldSpec,
    selfsimilar: SelfsimilarHessianStructure,
}

struct ConeData {
    n: usize,
    phi: &'static str,
    log_phi: &'static str,
    domain: &'static [&'static str],
    bounds: Vec<(f64, f64)>,
}

fn cone_data(name: &str) -> Result<ConeData> {
    Ok(match name {
        "orthant2" => ConeData {
            n: 2,
            phi: "1/(x1*x2)",
            log_phi: "-ln(x1) - ln(x2)",
            domain: &["x1", "x2"],
            bounds: vec![(0.5, 2.0); 2],
        },
        "orthant3" => ConeData {
            n: 3,
            phi: "1/(x1*x2*x3)",
            log_phi: "-ln(x1) - ln(x2) - ln(x3)",
            domain: &["x1", "x2", "x3"],
            bounds: vec![(0.5, 2.0); 3],
        },
        "lorentz3" => ConeData {
            n: 3,
            phi: "(x1^2 - x2^2 - x3^2)^(-1.5)",
            log_phi: "-1.5*ln(x1^2 - x2^2 - x3^2)",
            domain: &["x1", "x1^2 - x2^2 - x3^2"],
            bounds: vec![(2.0, 3.0), (-1.0, 1.0), (-1.0, 1.0)],
        },
        // (x1, x2, x3) = (a, b, c) for the matrix [[a, b], [b, c]].
        "spd2" => ConeData {
            n: 3,
            phi: "(x1*x3 - x2^2)^(-1.5)",
            log_phi: "-1.5*ln(x1*x3 - x2^2)",
            domain: &["x1", "x1*x3 - x2^2"],
            bounds: vec![(1.0, 2.0), (-0.5, 0.5), (1.0, 2.0)],
        },
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}

/// Build and validate a named cone.
pub fn preset(name: &str) -> Result<ConePreset> {
    let d = cone_data(name)?;
    let domain = Domain::parse(&d.domain.iter().map(|s| s.to_string()).collect::<Vec<_>>(), d.bounds)?;
    let phi = ScalarExpression::real(d.phi, d.n)?;
    let log_phi = ScalarExpression::real(d.log_phi, d.n)?;
    let can = HessianStructure::new(
        &format!("{name}/gcan"),
        MetricField::from_potential(log_phi)?,
        domain.clone(),
        DEFAULT_SAMPLES,
        DEFAULT_SEED,
    )?;
    let con = HessianStructure::new(
        &format!("{name}/gcon"),
        MetricField::from_potential(phi.clone())?,
        domain,
        DEFAULT_SAMPLES,
        DEFAULT_SEED,
    )?;
    let radiant = VectorFieldSpec::from_affine(AffineField::euler(d.n, 1.0));
    let xi = VectorFieldSpec::from_affine(AffineField::euler(d.n, -2.0 / d.n as f64));
    let selfsimilar = SelfsimilarHessianStructure::new(con.clone(), xi, DEFAULT_SAMPLES, DEFAULT_SEED)?;
    Ok(ConePreset { name: name.to_string(), phi, can, con, radiant, selfsimilar })
}

impl ConePreset {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.phi.arity()
    }

    /// The characteristic function, normalized to constant 1.
    pub fn characteristic(&self) -> &ScalarExpression {
        &self.phi
    }

    pub fn structure(&self, which: ConeMetric) -> &HessianStructure {
        match which {
            ConeMetric::Canonical => &self.can,
            ConeMetric::Characteristic => &self.con,
        }
    }

    pub fn domain(&self) -> &Domain {
        self.con.domain()
    }

    /// ρ = Σ xⁱ ∂ᵢ.
    pub fn radiant(&self) -> &VectorFieldSpec {
        &self.radiant
    }

    /// `(V, g_con, ξ = −(2/n)ρ)`.
    pub fn selfsimilar(&self) -> &SelfsimilarHessianStructure {
        &self.selfsimilar
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        self.domain().sample(count, seed)
    }

    /// Geometry config reproducing one of the two metrics; the `g_con`
    /// export carries the selfsimilar field.
    pub fn to_config(&self, which: ConeMetric) -> HessianConfig {
        let d = cone_data(&self.name).expect("preset names are known");
        let (potential, field, field_affine) = match which {
            ConeMetric::Canonical => (d.log_phi, None, None),
            ConeMetric::Characteristic => {
                let form = self.selfsimilar.affine();
                (
                    d.phi,
                    Some(self.selfsimilar.field().components().iter().map(|c| c.serialize()).collect()),
                    Some(AffineConfig::from_field(form)),
                )
            }
        };
        HessianConfig {
            name: format!("{}_{}", self.name, which.label()),
            dim: d.n,
            potential: Some(potential.to_string()),
            metric: None,
            domain: d.domain.iter().map(|s| s.to_string()).collect(),
            bounds: d.bounds.iter().map(|&(lo, hi)| [lo, hi]).collect(),
            field,
            field_affine,
            seed: Some(DEFAULT_SEED),
            samples: Some(DEFAULT_SAMPLES),
        }
    }
}

/// `max |φ(qx) − q⁻ⁿφ(x)| / (q⁻ⁿφ(x))` over `points` and `qs`.
pub fn homogeneity_defect(c: &ConePreset, qs: &[f64], points: &[Vec<f64>]) -> Result<f64> {
    let n = c.dim() as i32;
    let mut worst: f64 = 0.0;
    for p in points {
        let base = c.phi.eval(p)?;
        for &q in qs {
            let scaled: Vec<f64> = p.iter().map(|v| v * q).collect();
            let want = q.powi(-n) * base;
            worst = worst.max((c.phi.eval(&scaled)? - want).abs() / want.abs());
        }
    }
    Ok(worst)
}

/// `max ‖λ_q*g_con − q⁻ⁿ g_con‖_∞ / ‖q⁻ⁿ g_con‖_∞` over `points`, where
/// `λ_q(x) = qx`.
pub fn dilation_law(c: &ConePreset, q: f64, points: &[Vec<f64>]) -> Result<ReportEntry> {
    if !(q > 0.0) {
        return Err(Error::Config(format!("dilation factor must be positive, got {q}")));
    }
    let g = c.con.checked_metric();
    let lambda = AffineAutomorphism::from_linear(DMatrix::identity(c.dim(), c.dim()) * q)?;
    let factor = q.powi(-(c.dim() as i32));
    let mut worst: f64 = 0.0;
    for p in points {
        let want = g.value(p)? * factor;
        let got = pullback_metric(&lambda, &g, p)?;
        worst = worst.max((got - &want).amax() / want.amax());
    }
    Ok(ReportEntry::checked(
        &format!("dilation.q{q}"),
        "lambda_q^* g_con = q^-n g_con",
        worst,
        AD_TOL,
        points.len(),
    ))
}

/// `max ‖L_ρ g + n·g‖_∞` for an arbitrary metric field; the cone law is the
/// case `g = g_con`.
pub fn radiant_defect<G: MatrixField + ?Sized>(g: &G, points: &[Vec<f64>], mode: DerivMode) -> Result<f64> {
    let n = g.coords();
    let rho = AffineField::euler(n, 1.0);
    let mut worst: f64 = 0.0;
    for p in points {
        let l = lie_derivative_metric(g, &rho, p, mode)?;
        worst = worst.max((l + g.value(p)? * n as f64).amax());
    }
    Ok(worst)
}

/// `max ‖L_ρ g_con + n·g_con‖_∞` over `points`.
pub fn radiant_law(c: &ConePreset, points: &[Vec<f64>], mode: DerivMode) -> Result<ReportEntry> {
    Ok(ReportEntry::checked(
        "radiant",
        "L_rho g_con = -n g_con",
        radiant_defect(c.con.metric(), points, mode)?,
        AD_TOL,
        points.len(),
    ))
}

/// Relative pullback defect `max ‖T*g − g‖_∞ / ‖g‖_∞` over `points`.
pub fn invariance_defect(g: &MatrixFn, t: &AffineAutomorphism, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        let base = g.value(p)?;
        worst = worst.max((pullback_metric(t, g, p)? - &base).amax() / base.amax());
    }
    Ok(worst)
}

fn rotation_2d(theta: f64) -> DMatrix<f64> {
    dmatrix![theta.cos(), -theta.sin(); theta.sin(), theta.cos()]
}

fn embed(m: DMatrix<f64>, n: usize, offset: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(n, n);
    out.view_mut((offset, offset), m.shape()).copy_from(&m);
    out
}

/// Rotation in the (x2, x3) plane.
pub fn lorentz_rotation(theta: f64) -> DMatrix<f64> {
    embed(rotation_2d(theta), 3, 1)
}

/// Hyperbolic boost in the (x1, x2) plane.
pub fn lorentz_boost(beta: f64) -> DMatrix<f64> {
    embed(dmatrix![beta.cosh(), beta.sinh(); beta.sinh(), beta.cosh()], 3, 0)
}

/// Linear map on (a, b, c) induced by `X ↦ GᵀXG` for `X = [[a, b], [b, c]]`.
pub fn congruence_matrix(g: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q, r, s) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    dmatrix![
        p * p, 2.0 * p * r, r * r;
        p * q, p * s + q * r, r * s;
        q * q, 2.0 * q * s, s * s
    ]
}

/// A dilation factor with `|s⁻ⁿ − 1| > 0.5` for every `n ≥ 2`.
fn nontrivial_dilation(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(1.5..2.0)
    } else {
        rng.gen_range(0.5..0.75)
    }
}

fn unimodular_sample(name: &str, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    match name {
        "orthant2" | "orthant3" => {
            let mut logs: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.7..0.7)).collect();
            let mean = logs.iter().sum::<f64>() / n as f64;
            logs.iter_mut().for_each(|l| *l -= mean);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            DMatrix::from_fn(n, n, |i, j| if perm[i] == j { logs[i].exp() } else { 0.0 })
        }
        "lorentz3" => lorentz_boost(rng.gen_range(-0.8..0.8)) * lorentz_rotation(rng.gen_range(0.0..std::f64::consts::TAU)),
        "spd2" => loop {
            let g = DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0));
            let det: f64 = g.determinant();
            if det.abs() > 0.3 {
                break congruence_matrix(&(g / det.abs().sqrt()));
            }
        },
        _ => unreachable!("cone names are validated at construction"),
    }
}

/// `count` unimodular automorphisms followed by `count` non-unimodular ones.
/// Orthants: permuted positive diagonal scalings; lorentz3: boosts composed
/// with rotations; spd2: congruences with `det G = ±1`. Full-group samples
/// multiply a unimodular sample by a dilation `s` with `|s⁻ⁿ − 1| > 0.5`.
pub fn automorphism_samples(c: &ConePreset, count: usize, seed: u64) -> Vec<ConeAutomorphism> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.dim();
    let mut out = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let a = unimodular_sample(&c.name, n, &mut rng);
        out.push(ConeAutomorphism {
            map: AffineAutomorphism::from_linear(a).expect("cone automorphisms are invertible"),
            kind: AutomorphismKind::Unimodular,
        });
    }
    for _ in 0..count {
        let a = unimodular_sample(&c.name, n, &mut rng) * nontrivial_dilation(&mut rng);
        out.push(ConeAutomorphism {
            map: AffineAutomorphism::from_linear(a).expect("cone automorphisms are invertible"),
            kind: AutomorphismKind::Full,
        });
    }
    out
}

/// An automorphism of the cone taking `from` to `to`.
pub fn transport(c: &ConePreset, from: &[f64], to: &[f64]) -> Result<AffineAutomorphism> {
    c.domain().require(from)?;
    c.domain().require(to)?;
    let a = match c.name.as_str() {
        "orthant2" | "orthant3" => DMatrix::from_diagonal(&DVector::from_iterator(
            from.len(),
            from.iter().zip(to).map(|(x, y)| y / x),
        )),
        "lorentz3" => {
            // Normalize each point to (|x|_L, 0, 0): rotate (x2, x3) onto the
            // x2 axis, then boost it away.
            let normalize = |x: &[f64]| {
                let r = x[1].hypot(x[2]);
                let rot = lorentz_rotation(-x[2].atan2(x[1]));
                (lorentz_boost(-(r / x[0]).atanh()) * rot, (x[0] * x[0] - r * r).sqrt())
            };
            let (nf, lf) = normalize(from);
            let (nt, lt) = normalize(to);
            nt.try_inverse().expect("boosts and rotations are invertible") * (lt / lf) * nf
        }
        "spd2" => {
            let chol = |x: &[f64]| {
                nalgebra::Cholesky::new(dmatrix![x[0], x[1]; x[1], x[2]])
                    .map(|c| c.l())
                    .ok_or_else(|| Error::Domain { point: x.to_vec(), reason: "matrix is not positive definite".into() })
            };
            let (l, lp) = (chol(from)?, chol(to)?);
            let g = l.transpose().try_inverse().expect("Cholesky factor is invertible") * lp.transpose();
            congruence_matrix(&g)
        }
        _ => unreachable!("cone names are validated at construction"),
    };
    AffineAutomorphism::from_linear(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("cube"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn orthant2_metrics_at_unit_point() {
        let c = preset("orthant2").unwrap();
        let p = [1.0, 1.0];
        assert_eq!(c.structure(ConeMetric::Canonical).metric().value(&p).unwrap(), DMatrix::identity(2, 2));
        assert_eq!(c.structure(ConeMetric::Characteristic).metric().value(&p).unwrap(), dmatrix![2.0, 1.0; 1.0, 2.0]);
    }

    #[test]
    fn characteristic_functions_are_homogeneous() {
        for name in CONE_PRESETS {
            let c = preset(name).unwrap();
            let pts = c.sample(20, 5).unwrap();
            assert!(homogeneity_defect(&c, &[0.5, 2.0, 3.0], &pts).unwrap() < 1e-10, "{name}");
        }
        let c = preset("lorentz3").unwrap();
        let p = [2.5, 0.2, -0.3];
        let ratio = c.characteristic().eval(&[5.0, 0.4, -0.6]).unwrap() / c.characteristic().eval(&p).unwrap();
        assert!((ratio - 0.125).abs() < 1e-14);
    }

    #[test]
    fn dilation_and_radiant_laws() {
        for name in CONE_PRESETS {
            let c = preset(name).unwrap();
            let pts = c.sample(30, 2).unwrap();
            for q in [0.5, 1.0, 2.0, 3.0] {
                let e = dilation_law(&c, q, &pts).unwrap();
                assert!(e.pass, "{name} q={q}: {e:?}");
            }
            assert_eq!(dilation_law(&c, 1.0, &pts).unwrap().residual, Some(0.0));
            assert!(radiant_law(&c, &pts, DerivMode::Analytic).unwrap().pass, "{name}");
        }
    }

    #[test]
    fn radiant_law_fails_for_constant_metric() {
        let g = MatrixFn::constant(dmatrix![2.0, 0.5; 0.5, 1.0], 2);
        let d = radiant_defect(&g, &[vec![1.0, 1.0]], DerivMode::Analytic).unwrap();
        // L_ρ g = 2g, so the defect is (2 + n)‖g‖ = 8.
        assert!((d - 8.0).abs() < 1e-14);
    }

    #[test]
    fn automorphisms_preserve_the_cone_and_the_metrics() {
        for name in CONE_PRESETS {
            let c = preset(name).unwrap();
            let pts = c.sample(20, 8).unwrap();
            let can = c.structure(ConeMetric::Canonical).checked_metric();
            let con = c.structure(ConeMetric::Characteristic).checked_metric();
            for t in automorphism_samples(&c, 10, 3) {
                for p in &pts {
                    assert!(c.domain().contains(t.map.apply(p).as_slice()), "{name}");
                }
                assert!(invariance_defect(&can, &t.map, &pts).unwrap() < 1e-8, "{name}");
                let det = t.map.det().abs();
                let con_defect = invariance_defect(&con, &t.map, &pts).unwrap();
                match t.kind {
                    AutomorphismKind::Unimodular => {
                        assert!((det - 1.0).abs() < 1e-12, "{name} det {det}");
                        assert!(con_defect < 1e-8, "{name}");
                        for p in &pts {
                            let phi = c.characteristic();
                            assert!((phi.eval(t.map.apply(p).as_slice()).unwrap() - phi.eval(p).unwrap()).abs() < 1e-10);
                        }
                    }
                    AutomorphismKind::Full => {
                        // T = sU with det T = sⁿ, and T*g_con = s⁻ⁿ g_con.
                        let predicted = (det.powf(-1.0) - 1.0).abs();
                        assert!(predicted > 0.5);
                        assert!((con_defect - predicted).abs() < 1e-8 * predicted.max(1.0), "{name}");
                    }
                }
            }
            let again = automorphism_samples(&c, 10, 3);
            assert_eq!(again[4].map, automorphism_samples(&c, 10, 3)[4].map);
        }
    }

    #[test]
    fn special_automorphisms() {
        let c = preset("orthant2").unwrap();
        let t = AffineAutomorphism::diagonal(&[2.0, 0.5]).unwrap();
        let p = [0.7, 1.3];
        let phi = c.characteristic();
        assert!((phi.eval(t.apply(&p).as_slice()).unwrap() - phi.eval(&p).unwrap()).abs() < 1e-15);
        let swap = AffineAutomorphism::from_linear(dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap();
        for which in [ConeMetric::Canonical, ConeMetric::Characteristic] {
            let g = c.structure(which).checked_metric();
            assert!(invariance_defect(&g, &swap, &[p.to_vec()]).unwrap() < 1e-15);
        }
        assert_eq!(lorentz_boost(0.0), DMatrix::identity(3, 3));
    }

    #[test]
    fn transport_maps_points_onto_each_other() {
        for name in CONE_PRESETS {
            let c = preset(name).unwrap();
            let pts = c.sample(10, 11).unwrap();
            for w in pts.windows(2) {
                let t = transport(&c, &w[0], &w[1]).unwrap();
                let image = t.apply(&w[0]);
                assert!((image - DVector::from_column_slice(&w[1])).amax() < 1e-12, "{name}");
                let can = c.structure(ConeMetric::Canonical).checked_metric();
                assert!(invariance_defect(&can, &t, &pts[..3]).unwrap() < 1e-8, "{name}");
            }
        }
    }

    #[test]
    fn selfsimilar_field_is_homothetic_for_gcon() {
        for name in CONE_PRESETS {
            let c = preset(name).unwrap();
            let pts = c.sample(20, 6).unwrap();
            let e = crate::hessian::check_selfsimilar(
                c.structure(ConeMetric::Characteristic),
                c.selfsimilar().affine(),
                &pts,
                DerivMode::Analytic,
            )
            .unwrap();
            assert!(e.pass, "{name}: {e:?}");
        }
    }

    #[test]
    fn exported_config_round_trips() {
        let c = preset("spd2").unwrap();
        let cfg = c.to_config(ConeMetric::Characteristic);
        let json = serde_json::to_string(&cfg).unwrap();
        let back: HessianConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        let s = SelfsimilarHessianStructure::from_config(&back).unwrap();
        let p = [1.5, 0.1, 1.2];
        assert_eq!(s.base().metric().value(&p).unwrap(), c.structure(ConeMetric::Characteristic).metric().value(&p).unwrap());
        crate::hessian::make_hessian_structure(&c.to_config(ConeMetric::Canonical)).unwrap();
    }
}
