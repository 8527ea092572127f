//! Named check suites over loadable geometries.
//!
//! A geometry is a cone preset, a Hessian config, or a special Kähler preset
//! or config. A suite gathers the report entries of every check that applies
//! to it, under a suite prefix (`cone.`, `rmap.gcan.`, …). Optionally every
//! entry is recomputed with finite differences and the two pipelines are
//! compared.

use crate::cmap::{
    check_conformal_hyperkahler, check_hyperkahler, check_invariance_psi_hat, check_perturbation_control,
    check_special_kahler, sk_automorphisms, sk_preset, ConformalHyperKahler, HkTensor, HyperKahlerLift,
    SpecialKahlerConfig, SpecialKahlerStructure, SK_PRESETS,
};
use crate::cones::{
    automorphism_samples, dilation_law, homogeneity_defect, invariance_defect, radiant_law, transport,
    AutomorphismKind, ConeMetric, ConePreset, CONE_PRESETS,
};
use crate::error::{Error, Result};
use crate::hessian::{
    check_selfsimilar, make_hessian_structure, HessianConfig, HessianStructure, SelfsimilarHessianStructure, AD_TOL,
};
use crate::report::{ReportEntry, Status, VerificationReport};
use crate::rmap::{
    build_kahler_lift, check_flow_consistency, check_invariance_psi, check_kahler, check_lemma_xi_items,
    check_lie_against_flow, check_potential_identity, check_conformal_invariance, orbit_reachability,
    ConformalKahlerLift, KahlerLift, FIBER_BOX,
};
use crate::tensor::{
    fd_hessian, matrix_jet, min_eigenvalue, symmetry_defect, AffineAutomorphism, AffineField, DerivMode,
    MatrixField, Tensor3, PD_TOL,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::Path;

pub const SUITES: [&str; 7] = ["hessian", "rmap", "selfsimilar", "cone", "cmap", "conformal", "all"];
/// Geometries that can be loaded by name but are not advertised presets.
pub const EXTRA_GEOMETRIES: [&str; 1] = ["noncone_counterexample"];
/// Tensors that `evaluate` understands.
pub const TENSORS: [&str; 12] =
    ["g", "gcan", "gcon", "gr", "omega", "omega_ck", "I", "gc", "I1", "I2", "I3", "g_chk"];
/// Allowed gap between the analytic and finite-difference residuals.
pub const FD_AGREEMENT_TOL: f64 = 1e-3;
/// Automorphisms sampled per kind for invariance checks.
pub const AUTOMORPHISM_COUNT: usize = 20;
/// Fiber shifts combined with every lifted automorphism.
pub const FIBER_SHIFT_COUNT: usize = 3;
/// Size of the `I ↦ I + εId` corruption in the c-map negative control.
pub const PERTURBATION_EPS: f64 = 0.01;

/// Every preset name, cones first.
pub fn presets() -> Vec<&'static str> {
    CONE_PRESETS.iter().chain(SK_PRESETS.iter()).copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Hessian,
    Rmap,
    Selfsimilar,
    Cone,
    Cmap,
    Conformal,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 6] =
        [Suite::Hessian, Suite::Rmap, Suite::Selfsimilar, Suite::Cone, Suite::Cmap, Suite::Conformal];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hessian => "hessian",
            Suite::Rmap => "rmap",
            Suite::Selfsimilar => "selfsimilar",
            Suite::Cone => "cone",
            Suite::Cmap => "cmap",
            Suite::Conformal => "conformal",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::CONCRETE
            .iter()
            .chain([Suite::All].iter())
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}` (expected one of {})", SUITES.join("|"))))
    }
}

/// A Hessian structure loaded from a config, with its optional homothetic
/// field and an optional point where `|dω|` has a known closed-form value.
#[derive(Debug, Clone)]
pub struct HessianGeometry {
    pub config: HessianConfig,
    pub structure: HessianStructure,
    pub selfsimilar: Option<SelfsimilarHessianStructure>,
    pub domega_anchor: Option<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct SpecialKahlerGeometry {
    pub structure: SpecialKahlerStructure,
    /// Preset name, which selects the sampled automorphisms.
    pub preset: Option<String>,
}

#[derive(Debug, Clone)]
pub enum Geometry {
    Cone(Box<ConePreset>),
    Hessian(Box<HessianGeometry>),
    SpecialKahler(Box<SpecialKahlerGeometry>),
}

/// `g = diag(1, 1 + x1²)` on `x1 ∈ [0.25, 0.5]`: positive definite but not
/// Hessian, so the lifted 2-form is not closed; `|dω| = 2x1`.
fn noncone_counterexample() -> Result<Geometry> {
    let config = HessianConfig {
        name: "noncone_counterexample".into(),
        dim: 2,
        potential: None,
        metric: Some(vec![vec!["1".into(), "0".into()], vec!["0".into(), "1 + x1^2".into()]]),
        domain: vec![],
        bounds: vec![[0.25, 0.5], [-1.0, 1.0]],
        field: None,
        field_affine: None,
        seed: None,
        samples: None,
    };
    let structure = make_hessian_structure(&config)?;
    Ok(Geometry::Hessian(Box::new(HessianGeometry {
        config,
        structure,
        selfsimilar: None,
        domega_anchor: Some((vec![0.5, 0.0, 0.0, 0.0], 1.0)),
    })))
}

/// Build a geometry from a Hessian config.
pub fn hessian_geometry(config: HessianConfig) -> Result<Geometry> {
    let structure = make_hessian_structure(&config)?;
    let selfsimilar = match config.vector_field()? {
        Some(_) => Some(SelfsimilarHessianStructure::from_config(&config)?),
        None => None,
    };
    Ok(Geometry::Hessian(Box::new(HessianGeometry { config, structure, selfsimilar, domega_anchor: None })))
}

/// Load a preset by name, or a JSON config from a path.
pub fn load_geometry(spec: &str) -> Result<Geometry> {
    if CONE_PRESETS.contains(&spec) {
        return Ok(Geometry::Cone(Box::new(crate::cones::preset(spec)?)));
    }
    if SK_PRESETS.contains(&spec) {
        return Ok(Geometry::SpecialKahler(Box::new(SpecialKahlerGeometry {
            structure: sk_preset(spec)?,
            preset: Some(spec.to_string()),
        })));
    }
    if spec == "noncone_counterexample" {
        return noncone_counterexample();
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::Config(format!(
            "`{spec}` is neither a preset ({}) nor an existing config file",
            presets().join(", ")
        )));
    }
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if SpecialKahlerConfig::matches(&value) {
        let structure = SpecialKahlerConfig::from_value(value)?.build()?;
        Ok(Geometry::SpecialKahler(Box::new(SpecialKahlerGeometry { structure, preset: None })))
    } else {
        hessian_geometry(serde_json::from_value(value)?)
    }
}

impl Geometry {
    pub fn name(&self) -> &str {
        match self {
            Geometry::Cone(c) => c.name(),
            Geometry::Hessian(h) => &h.config.name,
            Geometry::SpecialKahler(s) => s.structure.name(),
        }
    }

    /// Suites with at least one applicable check, in canonical order.
    pub fn applicable_suites(&self) -> Vec<Suite> {
        match self {
            Geometry::Cone(_) => vec![Suite::Hessian, Suite::Rmap, Suite::Selfsimilar, Suite::Cone],
            Geometry::Hessian(h) => {
                let mut out = vec![Suite::Hessian, Suite::Rmap];
                if h.selfsimilar.is_some() {
                    out.push(Suite::Selfsimilar);
                }
                out
            }
            Geometry::SpecialKahler(s) => {
                let mut out = vec![Suite::Cmap];
                if s.structure.field().is_some() {
                    out.push(Suite::Conformal);
                }
                out
            }
        }
    }

    /// A config that rebuilds this geometry; cones export the chosen metric.
    pub fn to_config_json(&self, metric: ConeMetric) -> serde_json::Value {
        match self {
            Geometry::Cone(c) => serde_json::to_value(c.to_config(metric)),
            Geometry::Hessian(h) => serde_json::to_value(&h.config),
            Geometry::SpecialKahler(s) => serde_json::to_value(s.structure.to_config()),
        }
        .expect("configs serialize")
    }
}

/// What to run and how.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    /// Replacement tolerances by full check id.
    pub tolerances: BTreeMap<String, f64>,
    /// Recompute every residual with finite differences and compare.
    pub fd_check: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            suite: Suite::All,
            samples: crate::hessian::DEFAULT_SAMPLES,
            seed: crate::hessian::DEFAULT_SEED,
            tolerances: BTreeMap::new(),
            fd_check: false,
        }
    }
}

/// Run a suite and assemble its report.
pub fn run_suite(geometry: &Geometry, options: &RunOptions) -> Result<VerificationReport> {
    if options.samples == 0 {
        return Err(Error::Config("at least one sample is required".into()));
    }
    let suites = match options.suite {
        Suite::All => geometry.applicable_suites(),
        s if geometry.applicable_suites().contains(&s) => vec![s],
        s => {
            return Err(Error::Config(format!(
                "suite `{}` does not apply to geometry `{}` (applicable: {})",
                s.name(),
                geometry.name(),
                geometry.applicable_suites().iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
            )))
        }
    };
    let collect = |mode: DerivMode| -> Result<Vec<ReportEntry>> {
        let mut out = Vec::new();
        for &s in &suites {
            out.extend(suite_entries(geometry, s, options.samples, options.seed, mode)?);
        }
        Ok(out)
    };
    let mut entries = collect(DerivMode::Analytic)?;
    if options.fd_check {
        entries = with_fd_comparison(entries, collect(DerivMode::FiniteDifference)?);
    }
    for (id, &tol) in &options.tolerances {
        let entry = entries
            .iter_mut()
            .find(|e| &e.check_id == id)
            .ok_or_else(|| Error::Config(format!("tolerance override for unknown check `{id}`")))?;
        if entry.status != Status::Checked {
            return Err(Error::Config(format!("check `{id}` is not a checked entry")));
        }
        *entry = entry.clone().with_tolerance(tol);
    }
    Ok(VerificationReport::new(geometry.name(), options.seed, entries))
}

/// For each entry with a residual, add `<id>.fd` (the finite-difference
/// value, informational) and `<id>.fd_agreement` (the gap, checked).
fn with_fd_comparison(analytic: Vec<ReportEntry>, fd: Vec<ReportEntry>) -> Vec<ReportEntry> {
    let fd: BTreeMap<String, ReportEntry> = fd.into_iter().map(|e| (e.check_id.clone(), e)).collect();
    let mut out = Vec::with_capacity(3 * analytic.len());
    for e in analytic {
        if let (Some(a), Some(other)) = (e.residual, fd.get(&e.check_id)) {
            if let Some(f) = other.residual {
                let anchor = format!("finite-difference pipeline: {}", e.paper_anchor);
                out.push(ReportEntry::informational(&format!("{}.fd", e.check_id), &anchor, f, other.samples));
                out.push(ReportEntry::checked(
                    &format!("{}.fd_agreement", e.check_id),
                    "|analytic residual - finite-difference residual|",
                    (a - f).abs(),
                    FD_AGREEMENT_TOL,
                    e.samples,
                ));
            }
        }
        out.push(e);
    }
    out
}

fn prefixed(prefix: &str, entries: Vec<ReportEntry>) -> Vec<ReportEntry> {
    entries.into_iter().map(|e| e.prefixed(prefix)).collect()
}

/// Seeded fiber shifts in the fiber sampling box.
pub fn fiber_shifts(dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| DVector::from_fn(dim, |_, _| rng.gen_range(FIBER_BOX.0..FIBER_BOX.1))).collect()
}

/// Positive definiteness, symmetry of `g`, total symmetry of `∂_k g_ij`,
/// and (potential metrics) `g = Hess φ` recomputed from `φ`.
pub fn check_hessian_structure(s: &HessianStructure, points: &[Vec<f64>], mode: DerivMode) -> Result<Vec<ReportEntry>> {
    let g = s.checked_metric();
    let (mut margin, mut sym, mut hess, mut pot) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let jet = matrix_jet(&g, p, mode)?;
        let scale = jet.value.amax().max(1.0);
        margin = margin.min(min_eigenvalue(&jet.value).unwrap_or(f64::NAN));
        sym = sym.max(symmetry_defect(&jet.value));
        hess = hess.max(Tensor3::from_partials(&jet.partials).total_symmetry_defect() / scale);
        if let Some(phi) = s.potential() {
            let h = match mode {
                DerivMode::Analytic => phi.jet2(p)?.2,
                DerivMode::FiniteDifference => fd_hessian(|q| Ok(phi.eval(q)?), p)?,
            };
            pot = pot.max((h - &jet.value).amax() / scale);
        }
    }
    let k = points.len();
    let mut out = vec![
        ReportEntry::checked("positive_definite", "g positive definite", (PD_TOL - margin).max(0.0), PD_TOL, k),
        ReportEntry::informational("min_eigenvalue", "min eigenvalue of g over samples", margin, k),
        ReportEntry::checked("metric_symmetric", "g_ij = g_ji", sym, 1e-12, k),
        ReportEntry::checked("hessian", "d_k g_ij totally symmetric in flat coordinates", hess, 1e-6, k),
    ];
    if s.is_potential_generated() {
        out.push(ReportEntry::checked("potential", "g = Hess phi", pot, 1e-6, k));
    }
    Ok(out)
}

/// `|T*g_con − g_con| / |g_con|` against the predicted `| |det A|⁻¹ − 1 |`
/// for non-unimodular automorphisms, and the smallest observed defect.
fn full_group_control(c: &ConePreset, autos: &[AffineAutomorphism], points: &[Vec<f64>]) -> Result<Vec<ReportEntry>> {
    let g = c.structure(ConeMetric::Characteristic).checked_metric();
    let (mut mismatch, mut smallest) = (0.0f64, f64::INFINITY);
    for t in autos {
        let observed = invariance_defect(&g, t, points)?;
        let predicted = (1.0 / t.det().abs() - 1.0).abs();
        mismatch = mismatch.max((observed - predicted).abs());
        smallest = smallest.min(observed);
    }
    let k = points.len() * autos.len();
    Ok(vec![
        ReportEntry::checked(
            "invariance.gcon_full_control",
            "A^* g_con = |det A|^-1 g_con for non-unimodular A",
            mismatch,
            AD_TOL,
            k,
        ),
        ReportEntry::informational(
            "invariance.gcon_full_defect",
            "min |A^* g_con - g_con| / |g_con| over non-unimodular A",
            smallest,
            k,
        ),
    ])
}

fn cone_automorphisms(c: &ConePreset, seed: u64) -> (Vec<AffineAutomorphism>, Vec<AffineAutomorphism>) {
    let (mut uni, mut full) = (Vec::new(), Vec::new());
    for a in automorphism_samples(c, AUTOMORPHISM_COUNT, seed) {
        match a.kind {
            AutomorphismKind::Unimodular => uni.push(a.map),
            AutomorphismKind::Full => full.push(a.map),
        }
    }
    (uni, full)
}

fn cone_suite(c: &ConePreset, samples: usize, seed: u64, mode: DerivMode) -> Result<Vec<ReportEntry>> {
    let points = c.sample(samples, seed)?;
    let (uni, full) = cone_automorphisms(c, seed.wrapping_add(1));
    let mut out = vec![radiant_law(c, &points, mode)?];
    for q in [0.5, 2.0, 3.0] {
        out.push(dilation_law(c, q, &points)?);
    }
    out.push(ReportEntry::checked(
        "phi_homogeneity",
        "phi(qx) = q^-n phi(x)",
        homogeneity_defect(c, &[0.5, 2.0, 3.0], &points)?,
        AD_TOL,
        points.len(),
    ));
    let can = c.structure(ConeMetric::Canonical).checked_metric();
    let con = c.structure(ConeMetric::Characteristic).checked_metric();
    let mut worst_can: f64 = 0.0;
    for t in uni.iter().chain(&full) {
        worst_can = worst_can.max(invariance_defect(&can, t, &points)?);
    }
    let mut worst_con: f64 = 0.0;
    for t in &uni {
        worst_con = worst_con.max(invariance_defect(&con, t, &points)?);
    }
    out.push(ReportEntry::checked(
        "invariance.gcan",
        "A^* g_can = g_can for all automorphisms",
        worst_can,
        AD_TOL,
        points.len() * (uni.len() + full.len()),
    ));
    out.push(ReportEntry::checked(
        "invariance.gcon_unimodular",
        "A^* g_con = g_con for unimodular automorphisms",
        worst_con,
        AD_TOL,
        points.len() * uni.len(),
    ));
    out.extend(full_group_control(c, &full, &points)?);
    Ok(prefixed("cone", out))
}

fn rmap_entries(
    lift: &KahlerLift,
    automorphisms: &[AffineAutomorphism],
    field: Option<&AffineField>,
    samples: usize,
    seed: u64,
    mode: DerivMode,
) -> Result<Vec<ReportEntry>> {
    let n = lift.dim();
    let points = lift.sample(samples, seed)?;
    let mut out = check_kahler(lift, &points, mode)?;
    if lift.base().is_potential_generated() {
        out.push(check_potential_identity(lift, &points, mode)?);
    }
    out.extend(check_invariance_psi(lift, automorphisms, &fiber_shifts(n, FIBER_SHIFT_COUNT, seed.wrapping_add(2)), &points)?);
    if let Some(xi) = field {
        out.push(check_flow_consistency(lift, xi, &points, mode)?);
        let base: Vec<Vec<f64>> = points.iter().map(|p| p[..n].to_vec()).collect();
        out.push(check_lie_against_flow(&lift.base().checked_metric(), xi, &base, mode)?);
    }
    Ok(out)
}

fn rmap_suite(geometry: &Geometry, samples: usize, seed: u64, mode: DerivMode) -> Result<Vec<ReportEntry>> {
    let mut out = Vec::new();
    match geometry {
        Geometry::Cone(c) => {
            let (uni, full) = cone_automorphisms(c, seed.wrapping_add(1));
            let all: Vec<AffineAutomorphism> = uni.iter().chain(&full).cloned().collect();
            let rho = c.radiant().affine_form().cloned();
            for (which, autos, field) in [
                (ConeMetric::Canonical, &all, rho.as_ref()),
                (ConeMetric::Characteristic, &uni, Some(c.selfsimilar().affine())),
            ] {
                let lift = build_kahler_lift(c.structure(which));
                out.extend(prefixed(which.label(), rmap_entries(&lift, autos, field, samples, seed, mode)?));
            }
            let lift = build_kahler_lift(c.structure(ConeMetric::Canonical));
            let pts = lift.sample(samples.min(20), seed.wrapping_add(3))?;
            let pairs: Vec<(Vec<f64>, Vec<f64>)> =
                pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
            if !pairs.is_empty() {
                out.push(orbit_reachability(&pairs, |a, b| transport(c, a, b))?);
            }
        }
        Geometry::Hessian(h) => {
            let lift = build_kahler_lift(&h.structure);
            let field = h.selfsimilar.as_ref().map(|s| s.affine());
            out.extend(rmap_entries(&lift, &[], field, samples, seed, mode)?);
            if let Some((point, expected)) = &h.domega_anchor {
                let d = lift.domega_at(point, mode)?;
                out.push(ReportEntry::checked(
                    "domega_anchor",
                    &format!("|d omega| at {point:?} equals its closed-form value {expected}"),
                    (d - expected).abs(),
                    1e-3,
                    1,
                ));
            }
        }
        Geometry::SpecialKahler(_) => unreachable!("rmap suite is not applicable"),
    }
    Ok(prefixed("rmap", out))
}

fn selfsimilar_entries(
    ss: &SelfsimilarHessianStructure,
    automorphisms: &[AffineAutomorphism],
    samples: usize,
    seed: u64,
    mode: DerivMode,
) -> Result<Vec<ReportEntry>> {
    let n = ss.base().dim();
    let base_points = ss.base().sample(samples, seed)?;
    let mut out = vec![
        check_selfsimilar(ss.base(), ss.affine(), &base_points, mode)?,
        ss.check_norm_homogeneity(&base_points, mode)?,
    ];
    let cl = ConformalKahlerLift::new(ss);
    let points = cl.sample(samples, seed)?;
    out.extend(check_lemma_xi_items(&cl, &points, mode)?);
    out.extend(check_conformal_invariance(
        &cl,
        automorphisms,
        &fiber_shifts(n, FIBER_SHIFT_COUNT, seed.wrapping_add(2)),
        &points,
        mode,
    )?);
    Ok(prefixed("selfsimilar", out))
}

fn cmap_suite(s: &SpecialKahlerGeometry, samples: usize, seed: u64, mode: DerivMode) -> Result<Vec<ReportEntry>> {
    let sk = &s.structure;
    let base_points = sk.sample(samples, seed)?;
    let mut out = check_special_kahler(sk, &base_points, mode)?;
    let hk = HyperKahlerLift::new(sk);
    let points = hk.sample(samples, seed)?;
    out.extend(check_hyperkahler(&hk, &points, mode)?);
    out.extend(check_perturbation_control(sk, PERTURBATION_EPS, &points)?);
    let autos = match &s.preset {
        Some(name) => sk_automorphisms(name, AUTOMORPHISM_COUNT, seed.wrapping_add(1))?,
        None => Vec::new(),
    };
    let shifts = fiber_shifts(sk.dim(), FIBER_SHIFT_COUNT, seed.wrapping_add(2));
    out.extend(check_invariance_psi_hat(&hk, &autos, &shifts, &points)?);
    Ok(prefixed("cmap", out))
}

fn conformal_suite(s: &SpecialKahlerGeometry, samples: usize, seed: u64, mode: DerivMode) -> Result<Vec<ReportEntry>> {
    let chk = ConformalHyperKahler::from_structure(&s.structure, samples, seed)?;
    let autos = match &s.preset {
        Some(name) => sk_automorphisms(name, AUTOMORPHISM_COUNT, seed.wrapping_add(1))?,
        None => Vec::new(),
    };
    let points = chk.sample(samples, seed)?;
    Ok(prefixed("conformal", check_conformal_hyperkahler(&chk, &autos, &points, mode)?))
}

/// Entries of one concrete suite, computed in `mode`.
pub fn suite_entries(geometry: &Geometry, suite: Suite, samples: usize, seed: u64, mode: DerivMode) -> Result<Vec<ReportEntry>> {
    match (suite, geometry) {
        (Suite::Hessian, Geometry::Cone(c)) => {
            let mut out = Vec::new();
            for which in [ConeMetric::Canonical, ConeMetric::Characteristic] {
                let s = c.structure(which);
                out.extend(prefixed(which.label(), check_hessian_structure(s, &s.sample(samples, seed)?, mode)?));
            }
            Ok(prefixed("hessian", out))
        }
        (Suite::Hessian, Geometry::Hessian(h)) => {
            let points = h.structure.sample(samples, seed)?;
            Ok(prefixed("hessian", check_hessian_structure(&h.structure, &points, mode)?))
        }
        (Suite::Rmap, Geometry::Cone(_) | Geometry::Hessian(_)) => rmap_suite(geometry, samples, seed, mode),
        (Suite::Selfsimilar, Geometry::Cone(c)) => {
            let (uni, _) = cone_automorphisms(c, seed.wrapping_add(1));
            selfsimilar_entries(c.selfsimilar(), &uni, samples, seed, mode)
        }
        (Suite::Selfsimilar, Geometry::Hessian(h)) => match &h.selfsimilar {
            Some(ss) => selfsimilar_entries(ss, &[], samples, seed, mode),
            None => Err(Error::Config(format!("geometry `{}` declares no vector field", h.config.name))),
        },
        (Suite::Cone, Geometry::Cone(c)) => cone_suite(c, samples, seed, mode),
        (Suite::Cmap, Geometry::SpecialKahler(s)) => cmap_suite(s, samples, seed, mode),
        (Suite::Conformal, Geometry::SpecialKahler(s)) => conformal_suite(s, samples, seed, mode),
        (Suite::All, _) => {
            let mut out = Vec::new();
            for s in geometry.applicable_suites() {
                out.extend(suite_entries(geometry, s, samples, seed, mode)?);
            }
            Ok(out)
        }
        (s, g) => Err(Error::Config(format!("suite `{}` does not apply to geometry `{}`", s.name(), g.name()))),
    }
}

// ---------------------------------------------------------------------------
// Pointwise evaluation

/// Split a point into base and fiber parts; a base-only point gets the zero
/// fiber.
fn bundle_point(point: &[f64], n: usize) -> Result<Vec<f64>> {
    match point.len() {
        l if l == n => Ok(point.iter().copied().chain(std::iter::repeat_n(0.0, n)).collect()),
        l if l == 2 * n => Ok(point.to_vec()),
        l => Err(Error::Dimension(format!("point has {l} coordinates, expected {n} or {}", 2 * n))),
    }
}

fn base_point(point: &[f64], n: usize) -> Result<&[f64]> {
    if point.len() == n {
        Ok(point)
    } else {
        Err(Error::Dimension(format!("point has {} coordinates, expected {n}", point.len())))
    }
}

fn unknown_tensor(tensor: &str, geometry: &Geometry) -> Error {
    Error::Config(format!("tensor `{tensor}` is not defined for geometry `{}`", geometry.name()))
}

fn eval_hessian(
    geometry: &Geometry,
    s: &HessianStructure,
    ss: Option<&SelfsimilarHessianStructure>,
    tensor: &str,
    point: &[f64],
) -> Result<DMatrix<f64>> {
    let n = s.dim();
    match tensor {
        "g" => s.metric_at(base_point(point, n)?),
        "gr" | "omega" | "omega_ck" => {
            let p = bundle_point(point, n)?;
            s.domain().require(&p[..n])?;
            match tensor {
                "gr" => build_kahler_lift(s).metric_field().value(&p),
                "omega" => build_kahler_lift(s).omega_field().value(&p),
                _ => {
                    let ss = ss.ok_or_else(|| unknown_tensor(tensor, geometry))?;
                    ConformalKahlerLift::new(ss).omega_ck_field().value(&p)
                }
            }
        }
        _ => Err(unknown_tensor(tensor, geometry)),
    }
}

/// Evaluate a named tensor at a point. Base tensors take a base point;
/// bundle tensors take a base point (zero fiber) or a full bundle point.
/// For cones, `g`, `gr`, `omega` use `metric`; `omega_ck` always uses
/// `g_con` with its homothetic field.
pub fn evaluate(geometry: &Geometry, tensor: &str, point: &[f64], metric: ConeMetric) -> Result<DMatrix<f64>> {
    match geometry {
        Geometry::Cone(c) => match tensor {
            "gcan" => c.structure(ConeMetric::Canonical).metric_at(base_point(point, c.dim())?),
            "gcon" => c.structure(ConeMetric::Characteristic).metric_at(base_point(point, c.dim())?),
            "omega_ck" => eval_hessian(
                geometry,
                c.structure(ConeMetric::Characteristic),
                Some(c.selfsimilar()),
                tensor,
                point,
            ),
            _ => eval_hessian(geometry, c.structure(metric), None, tensor, point),
        },
        Geometry::Hessian(h) => eval_hessian(geometry, &h.structure, h.selfsimilar.as_ref(), tensor, point),
        Geometry::SpecialKahler(s) => {
            let sk = &s.structure;
            let n = sk.dim();
            match tensor {
                "g" | "I" | "omega" => {
                    let q = base_point(point, n)?;
                    sk.require(q)?;
                    let (g, i) = sk.values(q)?;
                    Ok(match tensor {
                        "g" => g,
                        "I" => i,
                        _ => g * i,
                    })
                }
                "gc" | "I1" | "I2" | "I3" | "g_chk" => {
                    let p = bundle_point(point, n)?;
                    sk.require(&p[..n])?;
                    let hk = HyperKahlerLift::new(sk);
                    let which = match tensor {
                        "gc" => HkTensor::Metric,
                        "I1" => HkTensor::I1,
                        "I2" => HkTensor::I2,
                        "I3" => HkTensor::I3,
                        _ => {
                            let chk = ConformalHyperKahler::from_structure(sk, 10, crate::hessian::DEFAULT_SEED)?;
                            return chk.conformal_metric_field().value(&p);
                        }
                    };
                    hk.field(which).value(&p)
                }
                _ => Err(unknown_tensor(tensor, geometry)),
            }
        }
    }
}
