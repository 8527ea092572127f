//! The Kähler lift of a Hessian structure to the tangent bundle
//! `TM ≅ M × ℝⁿ` with coordinates `(x, y)`, and its conformal rescaling for
//! selfsimilar structures.
//!
//! `g^r = blockdiag(g(x), g(x))`, `J = [[0, −I], [I, 0]]` (so `J∂xᵢ = ∂yᵢ`),
//! and `ω = g^r(J·, ·)` has matrix `Jᵀg^r = [[0, g], [−g, 0]]`, i.e.
//! `ω = Σ g_ij dxⁱ∧dyʲ`. `ω` is closed exactly when `∂_k g_ij` is symmetric
//! in `k, i`.

use crate::error::{Error, Result};
use crate::expr::{parse_expression, Mode, ScalarExpression};
use crate::hessian::{HessianStructure, SelfsimilarHessianStructure, AD_TOL};
use crate::report::ReportEntry;
use crate::tensor::{
    antisymmetry_defect, block_diag, block_matrix, exterior_derivative_2form, fd_hessian,
    is_positive_definite, lie_bracket, lie_covariant, lie_derivative_endomorphism, lie_derivative_metric,
    matrix_jet, pullback_metric, scalar_jet, AffineAutomorphism, AffineField, DerivMode, MatJet, MatrixField,
    MatrixFn, ScalarField, ScalarFn, ScalarJet, VectorField, PD_TOL,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance for closedness checks.
pub const CLOSED_TOL: f64 = 1e-5;
/// Tolerance for identities involving the conformal factor.
pub const CONFORMAL_TOL: f64 = 1e-6;
/// Time step for the flow-consistency check.
pub const FLOW_STEP: f64 = 1e-3;
/// Fiber coordinates are sampled in `[-1, 1]ⁿ`.
pub const FIBER_BOX: (f64, f64) = (-1.0, 1.0);
const FIBER_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// `[[0, −I], [I, 0]]`.
pub fn standard_complex_structure(n: usize) -> DMatrix<f64> {
    let i = DMatrix::<f64>::identity(n, n);
    block_matrix(&DMatrix::zeros(n, n), &-&i, &i, &DMatrix::zeros(n, n))
}

/// Base points from `sample` paired with fiber points in `[-1, 1]ⁿ`.
pub fn sample_bundle(base: &[Vec<f64>], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ FIBER_STREAM);
    base.iter()
        .map(|x| {
            let mut p = x.clone();
            p.extend((0..x.len()).map(|_| rng.gen_range(FIBER_BOX.0..FIBER_BOX.1)));
            p
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct KahlerLift {
    base: HessianStructure,
    j: DMatrix<f64>,
    g: MatrixFn,
}

pub fn build_kahler_lift(s: &HessianStructure) -> KahlerLift {
    KahlerLift {
        j: standard_complex_structure(s.dim()),
        g: s.checked_metric(),
        base: s.clone(),
    }
}

impl KahlerLift {
    pub fn base(&self) -> &HessianStructure {
        &self.base
    }

    /// Base dimension `n`; the bundle chart has `2n` coordinates.
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn complex_structure(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn complex_structure_field(&self) -> MatrixFn {
        MatrixFn::constant(self.j.clone(), 2 * self.dim())
    }

    /// Points `(x, y)` with `x` from the base domain and `y ∈ [-1, 1]ⁿ`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        Ok(sample_bundle(&self.base.sample(count, seed)?, seed))
    }

    fn lifted(&self, build: fn(&MatJet, usize) -> MatJet) -> MatrixFn {
        let n = self.dim();
        let (g1, g2) = (self.g.clone(), self.g.clone());
        MatrixFn::new(
            2 * n,
            move |p| {
                let v = MatJet::constant(g1.value(&p[..n])?, 0);
                Ok(build(&v, n).value)
            },
            move |p| Ok(build(&g2.jet(&p[..n])?.pad_coords(2 * n), n)),
        )
    }

    /// `g^r = blockdiag(g, g)`.
    pub fn metric_field(&self) -> MatrixFn {
        self.lifted(|g, _| MatJet::block_diag(g, g))
    }

    /// `ω = [[0, g], [−g, 0]]`.
    pub fn omega_field(&self) -> MatrixFn {
        self.lifted(|g, n| {
            let z = MatJet::constant(DMatrix::zeros(n, n), g.coords());
            MatJet::from_blocks(&z, g, &g.neg(), &z)
        })
    }

    /// `π*g = blockdiag(g, 0)`.
    pub fn pullback_base_metric_field(&self) -> MatrixFn {
        self.lifted(|g, n| {
            let z = MatJet::constant(DMatrix::zeros(n, n), g.coords());
            MatJet::block_diag(g, &z)
        })
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.metric_field().value(p)
    }

    pub fn omega_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.omega_field().value(p)
    }

    /// `max ‖dω‖` at a single point.
    pub fn domega_at(&self, p: &[f64], mode: DerivMode) -> Result<f64> {
        Ok(exterior_derivative_2form(&self.omega_field(), p, mode)?.max_abs())
    }

    /// The potential lifted to the bundle, `π*φ(x, y) = φ(x)`, as an
    /// expression in `x1..xn, y1..yn`.
    pub fn lifted_potential(&self) -> Result<ScalarExpression> {
        let phi = self
            .base
            .potential()
            .ok_or_else(|| Error::Config(format!("`{}` has no potential", self.base.name())))?;
        let n = self.dim();
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("y{i}"))).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Ok(parse_expression(&phi.serialize(), &refs, Mode::Real)?)
    }
}

/// Realification `[[Re h, −Im h], [Im h, Re h]]` of the complex Hessian
/// `h_{ij̄} = ∂_{zⁱ}∂_{z̄ʲ}Φ`, computed from the real Hessian `H` of `Φ` in
/// `(x, y)`: `h = ¼(H_xx + H_yy + i(H_xy − H_yx))`.
pub fn realified_complex_hessian(h: &DMatrix<f64>) -> DMatrix<f64> {
    let n = h.nrows() / 2;
    let hxx = h.view((0, 0), (n, n));
    let hyy = h.view((n, n), (n, n));
    let hxy = h.view((0, n), (n, n));
    let hyx = h.view((n, 0), (n, n));
    let re = (hxx + hyy) * 0.25;
    let im = (hxy - hyx) * 0.25;
    block_matrix(&re, &-&im, &im, &re)
}

/// `J² = −Id`, `g^r(J·, J·) = g^r`, `dω = 0`, `ω` antisymmetric and
/// nondegenerate, `g^r` positive definite.
pub fn check_kahler(lift: &KahlerLift, points: &[Vec<f64>], mode: DerivMode) -> Result<Vec<ReportEntry>> {
    let n2 = 2 * lift.dim();
    let j = lift.complex_structure();
    let (gr, omega) = (lift.metric_field(), lift.omega_field());
    let j_squared = (j * j + DMatrix::identity(n2, n2)).amax();
    let (mut domega, mut hermitian, mut antisym, mut degeneracy, mut not_pd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0);
    for p in points {
        let g = gr.value(p)?;
        let w = omega.value(p)?;
        hermitian = hermitian.max((j.transpose() * &g * j - &g).amax());
        antisym = antisym.max(antisymmetry_defect(&w));
        let scale = w.amax().powi(n2 as i32);
        degeneracy = degeneracy.max(scale / w.determinant().abs());
        if !is_positive_definite(&g, PD_TOL) {
            not_pd += 1.0;
        }
        domega = domega.max(exterior_derivative_2form(&omega, p, mode)?.max_abs());
    }
    let k = points.len();
    Ok(vec![
        ReportEntry::checked("domega", "d omega = 0 for omega = g_ij dx^i ^ dy^j", domega, CLOSED_TOL, k),
        ReportEntry::checked("hermitian", "g^r(J.,J.) = g^r", hermitian, 1e-12, k),
        ReportEntry::checked("j_squared", "J^2 = -Id", j_squared, 1e-15, 1),
        ReportEntry::checked("omega_antisymmetric", "omega = g^r(J.,.) is a 2-form", antisym, 1e-12, k),
        ReportEntry::checked("omega_degeneracy", "|omega|^2n / |det omega| bounded", degeneracy, 1e12, k),
        ReportEntry::checked("gr_not_positive", "g^r positive definite", not_pd, 0.5, k),
    ])
}

/// `max ‖g^r − Hess_ℂ(4π*φ)‖_∞` over `points`.
pub fn check_potential_identity(lift: &KahlerLift, points: &[Vec<f64>], mode: DerivMode) -> Result<ReportEntry> {
    let big_phi = lift.lifted_potential()?;
    let gr = lift.metric_field();
    let mut worst: f64 = 0.0;
    for p in points {
        let h = match mode {
            DerivMode::Analytic => big_phi.jet2(p)?.2,
            DerivMode::FiniteDifference => fd_hessian(|q| Ok(big_phi.eval(q)?), p)?,
        } * 4.0;
        worst = worst.max((realified_complex_hessian(&h) - gr.value(p)?).amax());
    }
    Ok(ReportEntry::checked(
        "potential_identity",
        "g^r = Hess_C(4 pi^* phi)",
        worst,
        AD_TOL,
        points.len(),
    ))
}

/// `Ψ(x, y) = (Ax + b, Ay + u)`.
pub fn lift_automorphism(t: &AffineAutomorphism, u: &DVector<f64>) -> AffineAutomorphism {
    let fiber = AffineAutomorphism::new(t.linear().clone(), u.clone()).expect("linear part is invertible");
    t.product(&fiber)
}

/// Relative pullback defect of `g^r` and conjugation defect of `J` under the
/// lift of `(t, u)`, without checking that `t` is an isometry.
pub fn lifted_invariance_defect(
    lift: &KahlerLift,
    t: &AffineAutomorphism,
    u: &DVector<f64>,
    points: &[Vec<f64>],
) -> Result<(f64, f64)> {
    let psi = lift_automorphism(t, u);
    let gr = lift.metric_field();
    let j = lift.complex_structure();
    let j_defect = (psi.linear_inverse() * j * psi.linear() - j).amax();
    let mut g_defect: f64 = 0.0;
    for p in points {
        let base = gr.value(p)?;
        g_defect = g_defect.max((pullback_metric(&psi, &gr, p)? - &base).amax() / base.amax());
    }
    Ok((g_defect, j_defect))
}

/// Relative defect `max ‖T*g − g‖ / ‖g‖` of a base automorphism.
pub fn base_isometry_defect(s: &HessianStructure, t: &AffineAutomorphism, points: &[Vec<f64>]) -> Result<f64> {
    crate::cones::invariance_defect(&s.checked_metric(), t, points)
}

/// Invariance of `(g^r, J)` under every lifted automorphism, each combined
/// with every fiber shift (and with no shift). Each automorphism must first
/// be an isometry of the base metric.
pub fn check_invariance_psi(
    lift: &KahlerLift,
    automorphisms: &[AffineAutomorphism],
    fiber_shifts: &[DVector<f64>],
    points: &[Vec<f64>],
) -> Result<Vec<ReportEntry>> {
    let n = lift.dim();
    let base_points: Vec<Vec<f64>> = points.iter().map(|p| p[..n].to_vec()).collect();
    let identity = AffineAutomorphism::identity(n);
    let mut maps = vec![&identity];
    maps.extend(automorphisms);
    let mut shifts = vec![DVector::zeros(n)];
    shifts.extend(fiber_shifts.iter().cloned());
    let (mut g_worst, mut j_worst, mut shift_worst) = (0.0f64, 0.0f64, 0.0f64);
    for t in &maps {
        let defect = base_isometry_defect(&lift.base, t, &base_points)?;
        if !(defect < AD_TOL) {
            return Err(Error::NotAnIsometry { defect });
        }
        for u in &shifts {
            let (g, j) = lifted_invariance_defect(lift, t, u, points)?;
            g_worst = g_worst.max(g);
            j_worst = j_worst.max(j);
        }
    }
    for u in fiber_shifts {
        let (g, j) = lifted_invariance_defect(lift, &identity, u, points)?;
        shift_worst = shift_worst.max(g).max(j);
    }
    let count = points.len() * maps.len() * shifts.len();
    Ok(vec![
        ReportEntry::checked("psi_metric", "Psi^* g^r = g^r", g_worst, AD_TOL, count),
        ReportEntry::checked("psi_complex_structure", "Psi^* J = J", j_worst, AD_TOL, count),
        ReportEntry::checked("fiber_shift", "(x, y + u)^* (g^r, J) = (g^r, J)", shift_worst, 1e-12, points.len() * fiber_shifts.len()),
    ])
}

/// `ξ₁ = (ξ(x), 0)` and `ξ₂ = (0, Ay + b)` for the affine field `ξ = Ax + b`.
#[derive(Debug, Clone)]
pub struct LiftedField {
    pub horizontal: AffineField,
    pub vertical: AffineField,
}

impl LiftedField {
    pub fn new(xi: &AffineField) -> Self {
        let zero = AffineField::zero(xi.dim());
        LiftedField { horizontal: xi.direct_sum(&zero), vertical: zero.direct_sum(xi) }
    }

    /// `ξ₁ + ξ₂`.
    pub fn sum(&self) -> AffineField {
        self.horizontal.add(&self.vertical)
    }
}

/// A selfsimilar Hessian structure with its Kähler lift and the conformal
/// factor `f = g(ξ, ξ)⁻¹` pulled back to the bundle.
#[derive(Debug, Clone)]
pub struct ConformalKahlerLift {
    base: SelfsimilarHessianStructure,
    lift: KahlerLift,
    fields: LiftedField,
}

impl ConformalKahlerLift {
    pub fn new(base: &SelfsimilarHessianStructure) -> Self {
        ConformalKahlerLift {
            lift: build_kahler_lift(base.base()),
            fields: LiftedField::new(base.affine()),
            base: base.clone(),
        }
    }

    pub fn base(&self) -> &SelfsimilarHessianStructure {
        &self.base
    }

    pub fn lift(&self) -> &KahlerLift {
        &self.lift
    }

    pub fn fields(&self) -> &LiftedField {
        &self.fields
    }

    /// `π*g(ξ₁, ξ₁) = g(ξ, ξ)(x)` as a field on the bundle.
    pub fn norm_field(&self) -> ScalarFn {
        let n = self.lift.dim();
        let (b1, b2) = (self.base.clone(), self.base.clone());
        ScalarFn::new(
            2 * n,
            move |p| b1.norm_squared(&p[..n]),
            move |p| Ok(b2.norm_squared_jet(&p[..n], DerivMode::Analytic)?.pad_coords(2 * n)),
        )
    }

    /// `f = π*g(ξ, ξ)⁻¹`.
    pub fn conformal_factor(&self, p: &[f64]) -> Result<f64> {
        Ok(1.0 / self.base.norm_squared(&p[..self.lift.dim()])?)
    }

    /// `ω_cK = f·ω`.
    pub fn omega_ck_field(&self) -> MatrixFn {
        let (w1, w2) = (self.lift.omega_field(), self.lift.omega_field());
        let (f1, f2) = (self.norm_field(), self.norm_field());
        MatrixFn::new(
            2 * self.lift.dim(),
            move |p| Ok(w1.value(p)? / f1.value(p)?),
            move |p| Ok(w2.jet(p)?.scale_by(&f2.jet(p)?.recip())),
        )
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        self.lift.sample(count, seed)
    }
}

/// `L_{ξ₁}π*g = 2π*g`, `L_{ξ₂}π*g = 0`, `L_{ξ₁+ξ₂}J = 0`, `[ξ₁, ξ₂] = 0`,
/// and `L_{ξ₁+ξ₂}g^r = 2g^r`; `L_{ξ₂}J` alone is reported, not judged.
pub fn check_lemma_xi_items(cl: &ConformalKahlerLift, points: &[Vec<f64>], mode: DerivMode) -> Result<Vec<ReportEntry>> {
    let pig = cl.lift.pullback_base_metric_field();
    let gr = cl.lift.metric_field();
    let j = cl.lift.complex_structure_field();
    let f = &cl.fields;
    let sum = f.sum();
    let (mut xi1, mut xi2, mut hol, mut xi2_j, mut bracket, mut gr_homothety) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let g = pig.value(p)?;
        xi1 = xi1.max((lie_derivative_metric(&pig, &f.horizontal, p, mode)? - &g * 2.0).amax());
        xi2 = xi2.max(lie_derivative_metric(&pig, &f.vertical, p, mode)?.amax());
        hol = hol.max(lie_derivative_endomorphism(&j, &sum, p, mode)?.amax());
        xi2_j = xi2_j.max(lie_derivative_endomorphism(&j, &f.vertical, p, mode)?.amax());
        bracket = bracket.max(lie_bracket(&f.horizontal, &f.vertical, p, mode)?.amax());
        gr_homothety = gr_homothety.max((lie_derivative_metric(&gr, &sum, p, mode)? - gr.value(p)? * 2.0).amax());
    }
    let k = points.len();
    Ok(vec![
        ReportEntry::checked("lemma.xi1_metric", "L_xi1 pi^*g = 2 pi^*g", xi1, AD_TOL, k),
        ReportEntry::checked("lemma.xi2_metric", "L_xi2 pi^*g = 0", xi2, AD_TOL, k),
        ReportEntry::checked("lemma.sum_holomorphic", "L_(xi1+xi2) J = 0", hol, AD_TOL, k),
        ReportEntry::informational("lemma.xi2_complex_structure", "L_xi2 J = J A - A J (need not vanish)", xi2_j, k),
        ReportEntry::checked("lifted_bracket", "[xi1, xi2] = 0", bracket, 1e-10, k),
        ReportEntry::checked("selfsimilar_kahler", "L_(xi1+xi2) g^r = 2 g^r", gr_homothety, AD_TOL, k),
    ])
}

/// Norm homogeneity on the bundle, `L_{ξ₁+ξ₂}ω_cK = 0`, the uncorrected
/// control `L_{ξ₁+ξ₂}ω = 2ω`, and invariance of `ω_cK` under the given
/// lifted automorphisms and fiber shifts.
pub fn check_conformal_invariance(
    cl: &ConformalKahlerLift,
    automorphisms: &[AffineAutomorphism],
    fiber_shifts: &[DVector<f64>],
    points: &[Vec<f64>],
    mode: DerivMode,
) -> Result<Vec<ReportEntry>> {
    let sum = cl.fields.sum();
    let norm = cl.norm_field();
    let omega = cl.lift.omega_field();
    let omega_ck = cl.omega_ck_field();
    let (mut homog, mut flow_ck, mut flow_raw, mut raw_mismatch) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let nj: ScalarJet = scalar_jet(&norm, p, mode)?;
        homog = homog.max((nj.gradient.dot(&sum.value(p)?) - 2.0 * nj.value).abs());
        flow_ck = flow_ck.max(lie_derivative_metric(&omega_ck, &sum, p, mode)?.amax());
        let lw = lie_derivative_metric(&omega, &sum, p, mode)?;
        let w = omega.value(p)?;
        flow_raw = flow_raw.max(lw.amax());
        raw_mismatch = raw_mismatch.max((lw.amax() - 2.0 * w.amax()).abs());
    }
    let mut psi_worst: f64 = 0.0;
    let n = cl.lift.dim();
    let mut shifts = vec![DVector::zeros(n)];
    shifts.extend(fiber_shifts.iter().cloned());
    let identity = AffineAutomorphism::identity(n);
    let mut maps = vec![&identity];
    maps.extend(automorphisms);
    for t in &maps {
        for u in &shifts {
            let psi = lift_automorphism(t, u);
            for p in points {
                let base = omega_ck.value(p)?;
                psi_worst = psi_worst.max((pullback_metric(&psi, &omega_ck, p)? - &base).amax() / base.amax());
            }
        }
    }
    let k = points.len();
    Ok(vec![
        ReportEntry::checked(
            "conformal.norm_homogeneity",
            "L_(xi1+xi2) pi^*g(xi1,xi1) = 2 pi^*g(xi1,xi1)",
            homog,
            CONFORMAL_TOL,
            k,
        ),
        ReportEntry::checked("conformal.omega_ck_flow", "L_(xi1+xi2) omega_cK = 0", flow_ck, CONFORMAL_TOL, k),
        ReportEntry::checked(
            "conformal.uncorrected_control",
            "|L_(xi1+xi2) omega| = 2|omega| (conformal factor is necessary)",
            raw_mismatch,
            1e-4,
            k,
        ),
        ReportEntry::informational("conformal.uncorrected_flow", "max |L_(xi1+xi2) omega|", flow_raw, k),
        ReportEntry::checked("conformal.omega_ck_psi", "Psi^* omega_cK = omega_cK", psi_worst, AD_TOL, k * maps.len() * shifts.len()),
        ReportEntry::assumed("hypothesis.xi_complete", "xi is complete"),
        ReportEntry::assumed(
            "hypothesis.simply_transitive",
            "the automorphism group acts simply transitively on {g(xi,xi) = 1}",
        ),
    ])
}

/// `max ‖Φ_t*g^r − g^r − t·L_{ξ₁+ξ₂}g^r‖ / ‖g^r‖` at `t = 10⁻³`, where `Φ_t`
/// is the flow of `ξ₁ + ξ₂`; the remainder must be below `10t²`.
pub fn check_flow_consistency(
    lift: &KahlerLift,
    xi: &AffineField,
    points: &[Vec<f64>],
    mode: DerivMode,
) -> Result<ReportEntry> {
    let sum = LiftedField::new(xi).sum();
    let gr = lift.metric_field();
    let flow = sum.flow(FLOW_STEP);
    let mut worst: f64 = 0.0;
    for p in points {
        let g = gr.value(p)?;
        let l = lie_derivative_metric(&gr, &sum, p, mode)?;
        let remainder = pullback_metric(&flow, &gr, p)? - &g - l * FLOW_STEP;
        worst = worst.max(remainder.amax() / g.amax());
    }
    Ok(ReportEntry::checked(
        "flow_consistency",
        "exp(t(xi1+xi2))^* g^r = g^r + t L g^r + O(t^2)",
        worst,
        10.0 * FLOW_STEP * FLOW_STEP,
        points.len(),
    ))
}

/// Central flow difference `(Φ_t*g − Φ_{−t}*g)/2t` against `L_ξ g` at
/// `t = 10⁻⁴`, relative to `max(1, ‖L_ξ g‖)`.
pub fn check_lie_against_flow<G: MatrixField + ?Sized>(
    g: &G,
    xi: &AffineField,
    points: &[Vec<f64>],
    mode: DerivMode,
) -> Result<ReportEntry> {
    let t = 1e-4;
    let (fwd, bwd) = (xi.flow(t), xi.flow(-t));
    let mut worst: f64 = 0.0;
    for p in points {
        let flow = (pullback_metric(&fwd, g, p)? - pullback_metric(&bwd, g, p)?) / (2.0 * t);
        let jet = matrix_jet(g, p, mode)?;
        let lie = lie_covariant(&jet, &xi.value(p)?, xi.linear_part());
        worst = worst.max((flow - &lie).amax() / lie.amax().max(1.0));
    }
    Ok(ReportEntry::checked("lie_vs_flow", "L_xi g = d/dt exp(t xi)^* g", worst, 1e-4, points.len()))
}

/// Lifts a base transport `x ↦ x'` to `(x, y) ↦ (x', y')` via the fiber
/// shift `u = y' − Ay`, and reports the largest miss.
pub fn orbit_reachability(
    pairs: &[(Vec<f64>, Vec<f64>)],
    transport: impl Fn(&[f64], &[f64]) -> Result<AffineAutomorphism>,
) -> Result<ReportEntry> {
    let mut worst: f64 = 0.0;
    for (from, to) in pairs {
        let n = from.len() / 2;
        let t = transport(&from[..n], &to[..n])?;
        let u = DVector::from_column_slice(&to[n..]) - t.linear() * DVector::from_column_slice(&from[n..]);
        let image = lift_automorphism(&t, &u).apply(from);
        worst = worst.max((image - DVector::from_column_slice(to)).amax());
    }
    Ok(ReportEntry::informational(
        "orbit_reachability",
        "lifted automorphisms with fiber shifts reach every sampled pair",
        worst,
        pairs.len(),
    ))
}

/// `max |m − blockdiag(a, a)|`.
pub fn block_diag_defect(m: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
    (m - block_diag(a, a)).amax()
}
