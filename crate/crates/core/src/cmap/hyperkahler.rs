//! The c-map: the hyper-Kähler frame on `T*M ≅ M × (ℝ²ᵐ)*` with
//! coordinates `(q, p)`, split into horizontal and vertical parts by the flat
//! connection, and its conformal rescaling by `g(ξ, ξ)⁻¹`.
//!
//! With `W = g·I`:
//!
//! ```text
//! g^c = blockdiag(g, g⁻¹)      I₁ = blockdiag(I, Iᵀ)
//! I₂  = [[0, −W⁻¹], [W, 0]]    I₃ = I₁I₂ = [[0, −g⁻¹], [g, 0]]
//! ```
//!
//! `Iᵀ` is the action of `I` on covector components. The Kähler forms
//! `ω_k = I_kᵀ g^c` are `blockdiag(−λΩ, Ω/λ)`, `[[0, Iᵀ], [−I, 0]]` and
//! `[[0, Id], [−Id, 0]]`.

use super::{SpecialKahlerStructure, SK_TOL};
use crate::error::{Error, Result};
use crate::hessian::AD_TOL;
use crate::report::ReportEntry;
use crate::rmap::{sample_bundle, CLOSED_TOL};
use crate::tensor::{
    block_diag, block_matrix, exterior_derivative_2form, invert, lie_derivative_endomorphism,
    lie_derivative_metric, pullback_endomorphism, pullback_metric, scalar_jet, AffineAutomorphism, AffineField,
    DerivMode, MatJet, MatrixField, MatrixFn, ScalarField, ScalarFn, ScalarJet, VectorField,
};
use nalgebra::{DMatrix, DVector};

/// Tolerance of the conformal hyper-Kähler flow identities.
pub const CONFORMAL_HK_TOL: f64 = 1e-5;
/// Invariance under fiber shifts is exact up to rounding.
pub const FIBER_SHIFT_TOL: f64 = 1e-12;
/// Precondition tolerance for the symplectic check `BᵀΩB = Ω`.
const SYMPLECTIC_TOL: f64 = 1e-10;

/// The frame at one point of `T*M`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperKahlerFrame {
    pub gc: DMatrix<f64>,
    pub i1: DMatrix<f64>,
    pub i2: DMatrix<f64>,
    pub i3: DMatrix<f64>,
}

impl HyperKahlerFrame {
    pub fn complex_structures(&self) -> [&DMatrix<f64>; 3] {
        [&self.i1, &self.i2, &self.i3]
    }

    /// Max-norm over `I_k² + Id`, `I₁I₂ − I₃`, `I₂I₁ + I₃`.
    pub fn quaternion_defect(&self) -> f64 {
        let n = self.gc.nrows();
        let id = DMatrix::<f64>::identity(n, n);
        let [a, b, c] = self.complex_structures();
        [a * a + &id, b * b + &id, c * c + &id, a * b - c, b * a + c]
            .iter()
            .fold(0.0, |m, d| m.max(d.amax()))
    }

    /// `max_k ‖I_kᵀ g^c I_k − g^c‖ / max(1, ‖g^c‖)`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.gc.amax().max(1.0);
        self.complex_structures()
            .iter()
            .fold(0.0, |m, i| m.max((i.transpose() * &self.gc * *i - &self.gc).amax() / scale))
    }

    /// `ω_k = I_kᵀ g^c`, i.e. `ω_k(X, Y) = g^c(I_k X, Y)`.
    pub fn kahler_forms(&self) -> [DMatrix<f64>; 3] {
        self.complex_structures().map(|i| i.transpose() * &self.gc)
    }
}

/// Which tensor of the c-map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkTensor {
    Metric,
    I1,
    I2,
    I3,
    Omega1,
    Omega2,
    Omega3,
}

/// `[g^c, I₁, I₂, I₃]` from jets of `g` and `I` over the `(q, p)` chart.
fn frame_jets(g: &MatJet, i: &MatJet) -> Result<[MatJet; 4]> {
    let n = g.value.nrows();
    let zero = MatJet::constant(DMatrix::zeros(n, n), g.coords());
    let w = g.mul(i);
    let gc = MatJet::block_diag(g, &g.inverse()?);
    let i1 = MatJet::block_diag(i, &i.transpose());
    let i2 = MatJet::from_blocks(&zero, &w.inverse()?.neg(), &w, &zero);
    let i3 = i1.mul(&i2);
    Ok([gc, i1, i2, i3])
}

fn pick(frame: [MatJet; 4], which: HkTensor) -> MatJet {
    let [gc, i1, i2, i3] = frame;
    match which {
        HkTensor::Metric => gc,
        HkTensor::I1 => i1,
        HkTensor::I2 => i2,
        HkTensor::I3 => i3,
        HkTensor::Omega1 => i1.transpose().mul(&gc),
        HkTensor::Omega2 => i2.transpose().mul(&gc),
        HkTensor::Omega3 => i3.transpose().mul(&gc),
    }
}

/// The frame at `point = (q, p)`.
pub fn build_hyperkahler(sk: &SpecialKahlerStructure, point: &[f64]) -> Result<HyperKahlerFrame> {
    let n = sk.dim();
    if point.len() != 2 * n {
        return Err(Error::Dimension(format!("point has {} coordinates, expected {}", point.len(), 2 * n)));
    }
    let (g, i) = sk.values(&point[..n])?;
    let singular = |_| Error::SingularMetric { point: point[..n].to_vec() };
    let [gc, i1, i2, i3] = frame_jets(&MatJet::constant(g, 0), &MatJet::constant(i, 0)).map_err(singular)?;
    Ok(HyperKahlerFrame { gc: gc.value, i1: i1.value, i2: i2.value, i3: i3.value })
}

/// The c-map of a special Kähler structure, as fields over `(q, p)`.
#[derive(Debug, Clone)]
pub struct HyperKahlerLift {
    base: SpecialKahlerStructure,
}

impl HyperKahlerLift {
    pub fn new(base: &SpecialKahlerStructure) -> Self {
        HyperKahlerLift { base: base.clone() }
    }

    pub fn base(&self) -> &SpecialKahlerStructure {
        &self.base
    }

    /// `4m`, the dimension of the `(q, p)` chart.
    pub fn dim(&self) -> usize {
        2 * self.base.dim()
    }

    /// Base points paired with fiber points in `[-1, 1]²ᵐ`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        Ok(sample_bundle(&self.base.sample(count, seed)?, seed))
    }

    pub fn frame_at(&self, point: &[f64]) -> Result<HyperKahlerFrame> {
        build_hyperkahler(&self.base, point)
    }

    pub fn field(&self, which: HkTensor) -> MatrixFn {
        let n = self.base.dim();
        let (a, b) = (self.base.clone(), self.base.clone());
        MatrixFn::new(
            2 * n,
            move |p| {
                let (g, i) = a.values(&p[..n])?;
                Ok(pick(frame_jets(&MatJet::constant(g, 0), &MatJet::constant(i, 0))?, which).value)
            },
            move |p| {
                let (g, i) = b.jets(&p[..n])?;
                Ok(pick(frame_jets(&g.pad_coords(2 * n), &i.pad_coords(2 * n))?, which))
            },
        )
    }
}

/// Quaternion relations, Hermiticity, closedness of `ω₁, ω₂, ω₃` in the
/// `4m` coordinates, the vertical inverse, and the block form of each `ω_k`.
pub fn check_hyperkahler(hk: &HyperKahlerLift, points: &[Vec<f64>], mode: DerivMode) -> Result<Vec<ReportEntry>> {
    let n = hk.base.dim();
    let lambda = hk.base.lambda();
    let omega = hk.base.omega().clone();
    let id = DMatrix::<f64>::identity(n, n);
    let zero = DMatrix::<f64>::zeros(n, n);
    let forms = [HkTensor::Omega1, HkTensor::Omega2, HkTensor::Omega3].map(|w| hk.field(w));
    let mut closed = [0.0f64; 3];
    let mut blocks = [0.0f64; 3];
    let (mut quat, mut herm, mut vinv) = (0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let frame = hk.frame_at(p)?;
        quat = quat.max(frame.quaternion_defect());
        herm = herm.max(frame.hermitian_defect());
        let (g, i) = hk.base.values(&p[..n])?;
        vinv = vinv.max((invert(&g)? * &g - &id).amax());
        let expected = [
            block_diag(&(&omega * -lambda), &(&omega / lambda)),
            block_matrix(&zero, &i.transpose(), &-&i, &zero),
            block_matrix(&zero, &id, &-&id, &zero),
        ];
        for (k, w) in frame.kahler_forms().iter().enumerate() {
            blocks[k] = blocks[k].max((w - &expected[k]).amax() / expected[k].amax());
            closed[k] = closed[k].max(exterior_derivative_2form(&forms[k], p, mode)?.max_abs());
        }
    }
    let k = points.len();
    Ok(vec![
        ReportEntry::checked("hk.quaternion", "I_k^2 = -Id, I1 I2 = -I2 I1 = I3", quat, AD_TOL, k),
        ReportEntry::checked("hk.hermitian", "g^c(I_k., I_k.) = g^c, k = 1,2,3", herm, AD_TOL, k),
        ReportEntry::checked("hk.closed_omega1", "d omega_1 = 0", closed[0], CLOSED_TOL, k),
        ReportEntry::checked("hk.closed_omega2", "d omega_2 = 0", closed[1], CLOSED_TOL, k),
        ReportEntry::checked("hk.closed_omega3", "d omega_3 = 0", closed[2], CLOSED_TOL, k),
        ReportEntry::checked("hk.vertical_inverse", "g^-1 g = Id on the vertical block", vinv, 1e-10, k),
        ReportEntry::checked("hk.omega1_block", "omega_1 = blockdiag(-lambda Omega, Omega/lambda)", blocks[0], SK_TOL, k),
        ReportEntry::checked("hk.omega2_block", "omega_2 = [[0, I^T], [-I, 0]]", blocks[1], SK_TOL, k),
        ReportEntry::checked("hk.omega3_block", "omega_3 = [[0, Id], [-Id, 0]]", blocks[2], SK_TOL, k),
    ])
}

/// Negative control: with `I` replaced by `I + εId`, `I₁² + Id` becomes
/// `blockdiag(2εI + ε², (2εI + ε²)ᵀ)`. The checked residual is the distance
/// between the observed and predicted defects; the full six-relation defect
/// of the corrupted frame is reported alongside.
pub fn check_perturbation_control(sk: &SpecialKahlerStructure, eps: f64, points: &[Vec<f64>]) -> Result<Vec<ReportEntry>> {
    let n = sk.dim();
    let bad = sk.with_perturbation(eps);
    let id = DMatrix::<f64>::identity(n, n);
    let (mut mismatch, mut defect) = (0.0f64, f64::INFINITY);
    for p in points {
        let (_, i) = sk.values(&p[..n])?;
        let frame = build_hyperkahler(&bad, p)?;
        let observed = (&frame.i1 * &frame.i1 + DMatrix::<f64>::identity(2 * n, 2 * n)).amax();
        let predicted = (&i * (2.0 * eps) + &id * (eps * eps)).amax();
        mismatch = mismatch.max((observed - predicted).abs());
        defect = defect.min(frame.quaternion_defect());
    }
    let k = points.len();
    Ok(vec![
        ReportEntry::checked(
            "hk.perturbation_control",
            "I -> I + eps Id breaks I1^2 = -Id by exactly 2 eps I + eps^2",
            mismatch,
            AD_TOL,
            k,
        ),
        ReportEntry::informational("hk.perturbed_quaternion", "min quaternion defect of the corrupted frame", defect, k),
    ])
}

/// `Ψ(q, p) = (Bq + c, B⁻ᵀp + u)`.
pub fn lift_to_cotangent(t: &AffineAutomorphism, u: &DVector<f64>) -> Result<AffineAutomorphism> {
    let b = t.linear();
    let lin = block_diag(b, &t.linear_inverse().transpose());
    let mut shift = DVector::zeros(2 * t.dim());
    shift.rows_mut(0, t.dim()).copy_from(t.translation_part());
    shift.rows_mut(t.dim(), t.dim()).copy_from(u);
    AffineAutomorphism::new(lin, shift)
}

/// True iff the affine map `t` preserves the linear field `ξ = Aq`, i.e.
/// `BA = AB` and `Ac = 0`.
pub fn preserves_field(t: &AffineAutomorphism, xi: &AffineField) -> bool {
    let (a, b) = (xi.linear_part(), t.linear());
    let scale = a.amax().max(1.0) * b.amax().max(1.0);
    (b * a - a * b).amax() <= 1e-12 * scale && (a * t.translation_part()).amax() <= 1e-12 * scale
}

/// Pre-checks each base map (isometry, symplectic, holomorphic), then
/// reports the pullback defects of `g^c, I₁, I₂, I₃` under
/// `Ψ(q, p) = (Bq + c, B⁻ᵀp + u)` and under pure fiber shifts.
pub fn check_invariance_psi_hat(
    hk: &HyperKahlerLift,
    automorphisms: &[AffineAutomorphism],
    fiber_shifts: &[DVector<f64>],
    points: &[Vec<f64>],
) -> Result<Vec<ReportEntry>> {
    let sk = &hk.base;
    let n = sk.dim();
    let (gf, jf) = (sk.metric_field(), sk.complex_structure_field());
    for t in automorphisms {
        let b = t.linear();
        let symp = (b.transpose() * sk.omega() * b - sk.omega()).amax();
        let (mut iso, mut hol) = (0.0f64, 0.0f64);
        for p in points {
            let q = &p[..n];
            let g = gf.value(q)?;
            iso = iso.max((pullback_metric(t, &gf, q)? - &g).amax() / g.amax());
            hol = hol.max((pullback_endomorphism(t, &jf, q)? - jf.value(q)?).amax());
        }
        if iso > AD_TOL {
            return Err(Error::NotAnIsometry { defect: iso });
        }
        if symp > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { defect: symp });
        }
        if hol > AD_TOL {
            return Err(Error::NotHolomorphic { defect: hol });
        }
    }
    let tensors = [HkTensor::Metric, HkTensor::I1, HkTensor::I2, HkTensor::I3];
    let fields = tensors.map(|w| hk.field(w));
    let defect = |psi: &AffineAutomorphism, p: &[f64]| -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (k, f) in fields.iter().enumerate() {
            let base = f.value(p)?;
            let pulled = if k == 0 { pullback_metric(psi, f, p)? } else { pullback_endomorphism(psi, f, p)? };
            out[k] = (pulled - &base).amax() / base.amax();
        }
        Ok(out)
    };
    let mut shifts = vec![DVector::zeros(n)];
    shifts.extend(fiber_shifts.iter().cloned());
    let mut worst = [0.0f64; 4];
    let mut shift_worst: f64 = 0.0;
    for u in &shifts {
        let pure = lift_to_cotangent(&AffineAutomorphism::identity(n), u)?;
        for p in points {
            shift_worst = shift_worst.max(defect(&pure, p)?.iter().fold(0.0, |a, b| a.max(*b)));
        }
        for t in automorphisms {
            let psi = lift_to_cotangent(t, u)?;
            for p in points {
                for (w, d) in worst.iter_mut().zip(defect(&psi, p)?) {
                    *w = w.max(d);
                }
            }
        }
    }
    let count = points.len() * automorphisms.len() * shifts.len();
    Ok(vec![
        ReportEntry::checked("psi_hat.metric", "Psi^* g^c = g^c", worst[0], AD_TOL, count),
        ReportEntry::checked("psi_hat.I1", "Psi^* I1 = I1", worst[1], AD_TOL, count),
        ReportEntry::checked("psi_hat.I2", "Psi^* I2 = I2", worst[2], AD_TOL, count),
        ReportEntry::checked("psi_hat.I3", "Psi^* I3 = I3", worst[3], AD_TOL, count),
        ReportEntry::checked(
            "psi_hat.fiber_shift",
            "(q, p + u)^* (g^c, I_k) = (g^c, I_k)",
            shift_worst,
            FIBER_SHIFT_TOL,
            points.len() * shifts.len(),
        ),
    ])
}

/// A special Kähler structure with a linear homothetic field `ξ = Aq`, its
/// lifts `ξ₁ = (Aq, 0)` and `ξ₂ = (0, WAW⁻¹p)` (the image of `ξ` under the
/// identification `TM ≅ T*M` by `W = λΩ`; equal to `(2Id − Aᵀ)p`), and the
/// metric `g_chK = π*g(ξ, ξ)⁻¹ g^c`.
#[derive(Debug, Clone)]
pub struct ConformalHyperKahler {
    hk: HyperKahlerLift,
    xi: AffineField,
    horizontal: AffineField,
    vertical: AffineField,
}

/// Homothety and holomorphy of `ξ` are validated to this relative tolerance
/// at construction.
const HOMOTHETY_TOL: f64 = 1e-6;

impl ConformalHyperKahler {
    pub fn new(sk: &SpecialKahlerStructure, xi: &AffineField, samples: usize, seed: u64) -> Result<Self> {
        if !xi.is_linear() {
            return Err(Error::TranslationUnsupported { translation: xi.translation_part().iter().copied().collect() });
        }
        let n = sk.dim();
        if xi.dim() != n {
            return Err(Error::Dimension(format!("field is {}-dimensional, structure is {n}", xi.dim())));
        }
        let a = xi.linear_part();
        let w = sk.omega() * sk.lambda();
        let c = &w * a * invert(&w)?;
        let zero = AffineField::zero(n);
        let chk = ConformalHyperKahler {
            hk: HyperKahlerLift::new(sk),
            xi: xi.clone(),
            horizontal: xi.direct_sum(&zero),
            vertical: zero.direct_sum(&AffineField::new(c, DVector::zeros(n))?),
        };
        let (gf, jf) = (sk.metric_field(), sk.complex_structure_field());
        for q in sk.sample(samples.max(1), seed)? {
            let g = gf.value(&q)?;
            let homothety = (lie_derivative_metric(&gf, xi, &q, DerivMode::Analytic)? - &g * 2.0).amax() / g.amax();
            let holomorphy = lie_derivative_endomorphism(&jf, xi, &q, DerivMode::Analytic)?.amax();
            if homothety.max(holomorphy) > HOMOTHETY_TOL {
                return Err(Error::NotHomothetic { point: q, residual: homothety.max(holomorphy) });
            }
            let norm = chk.norm_squared(&q)?;
            if !(norm > 0.0) {
                return Err(Error::NonpositiveNorm { point: q, value: norm });
            }
        }
        Ok(chk)
    }

    /// Uses the structure's attached field.
    pub fn from_structure(sk: &SpecialKahlerStructure, samples: usize, seed: u64) -> Result<Self> {
        let xi = sk
            .field()
            .ok_or_else(|| Error::Config(format!("`{}` has no homothetic field", sk.name())))?;
        Self::new(sk, xi, samples, seed)
    }

    pub fn lift(&self) -> &HyperKahlerLift {
        &self.hk
    }

    pub fn field(&self) -> &AffineField {
        &self.xi
    }

    pub fn horizontal(&self) -> &AffineField {
        &self.horizontal
    }

    pub fn vertical(&self) -> &AffineField {
        &self.vertical
    }

    /// `ξ₁ + ξ₂`.
    pub fn lifted_sum(&self) -> AffineField {
        self.horizontal.add(&self.vertical)
    }

    /// `g(ξ, ξ)(q)`.
    pub fn norm_squared(&self, q: &[f64]) -> Result<f64> {
        let g = self.hk.base.metric_field().value(q)?;
        let v = self.xi.value(q)?;
        Ok(v.dot(&(g * &v)))
    }

    /// `π*g(ξ, ξ)` over `(q, p)`, with gradient
    /// `∂_k = ξᵀ∂_k g ξ + 2 (gξ)ᵀ A e_k` on the base coordinates.
    pub fn norm_field(&self) -> ScalarFn {
        let n = self.hk.base.dim();
        let (s1, s2) = (self.clone(), self.clone());
        ScalarFn::new(
            2 * n,
            move |p| s1.norm_squared(&p[..n]),
            move |p| {
                let q = &p[..n];
                let g = s2.hk.base.metric_field().jet(q)?;
                let v = s2.xi.value(q)?;
                let gv = &g.value * &v;
                let a = s2.xi.linear_part();
                let mut grad = DVector::zeros(2 * n);
                for k in 0..n {
                    grad[k] = v.dot(&(&g.partials[k] * &v)) + 2.0 * gv.dot(&a.column(k));
                }
                Ok(ScalarJet::new(v.dot(&gv), grad))
            },
        )
    }

    /// `g_chK = π*g(ξ, ξ)⁻¹ g^c`.
    pub fn conformal_metric_field(&self) -> MatrixFn {
        let (g1, g2) = (self.hk.field(HkTensor::Metric), self.hk.field(HkTensor::Metric));
        let (f1, f2) = (self.norm_field(), self.norm_field());
        MatrixFn::new(
            self.hk.dim(),
            move |p| Ok(g1.value(p)? / f1.value(p)?),
            move |p| Ok(g2.jet(p)?.scale_by(&f2.jet(p)?.recip())),
        )
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        self.hk.sample(count, seed)
    }
}

/// Base homothety and holomorphy of `ξ`; `L_{ξ₁+ξ₂}π*g(ξ, ξ) = 2π*g(ξ, ξ)`;
/// `L_{ξ₁+ξ₂}g_chK = 0`; `L_{ξ₁+ξ₂}I_k = 0`; the unscaled control
/// `L_{ξ₁+ξ₂}g^c = 2g^c` on the horizontal block; and invariance of `g_chK`
/// under the given base automorphisms that preserve `ξ`, lifted to `T*M`.
pub fn check_conformal_hyperkahler(
    chk: &ConformalHyperKahler,
    automorphisms: &[AffineAutomorphism],
    points: &[Vec<f64>],
    mode: DerivMode,
) -> Result<Vec<ReportEntry>> {
    let sk = &chk.hk.base;
    let n = sk.dim();
    let (gf, jf) = (sk.metric_field(), sk.complex_structure_field());
    let sum = chk.lifted_sum();
    let norm = chk.norm_field();
    let gchk = chk.conformal_metric_field();
    let gc = chk.hk.field(HkTensor::Metric);
    let structures = [HkTensor::I1, HkTensor::I2, HkTensor::I3].map(|w| chk.hk.field(w));
    let (mut homothety, mut holo, mut homog, mut flow, mut control, mut unscaled) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut flows = [0.0f64; 3];
    for p in points {
        let q = &p[..n];
        let g = gf.value(q)?;
        homothety = homothety.max((lie_derivative_metric(&gf, &chk.xi, q, mode)? - &g * 2.0).amax() / g.amax());
        holo = holo.max(lie_derivative_endomorphism(&jf, &chk.xi, q, mode)?.amax());
        let nj: ScalarJet = scalar_jet(&norm, p, mode)?;
        homog = homog.max((nj.gradient.dot(&sum.value(p)?) - 2.0 * nj.value).abs() / nj.value);
        let m = gchk.value(p)?;
        flow = flow.max(lie_derivative_metric(&gchk, &sum, p, mode)?.amax() / m.amax());
        for (f, s) in flows.iter_mut().zip(&structures) {
            *f = f.max(lie_derivative_endomorphism(s, &sum, p, mode)?.amax());
        }
        let lg = lie_derivative_metric(&gc, &sum, p, mode)?;
        let gcv = gc.value(p)?;
        let horizontal = lg.view((0, 0), (n, n)).amax();
        control = control.max((horizontal - 2.0 * g.amax()).abs() / g.amax());
        unscaled = unscaled.max(lg.amax() / gcv.amax());
    }
    let preserving: Vec<&AffineAutomorphism> = automorphisms.iter().filter(|t| preserves_field(t, &chk.xi)).collect();
    let mut psi: f64 = 0.0;
    for t in &preserving {
        let lifted = lift_to_cotangent(t, &DVector::zeros(n))?;
        for p in points {
            let base = gchk.value(p)?;
            psi = psi.max((pullback_metric(&lifted, &gchk, p)? - &base).amax() / base.amax());
        }
    }
    let k = points.len();
    Ok(vec![
        ReportEntry::checked("chk.base_homothety", "L_xi g = 2g", homothety, CONFORMAL_HK_TOL, k),
        ReportEntry::checked("chk.base_holomorphic", "L_xi I = 0", holo, CONFORMAL_HK_TOL, k),
        ReportEntry::checked(
            "chk.norm_homogeneity",
            "L_(xi1+xi2) pi^*g(xi,xi) = 2 pi^*g(xi,xi)",
            homog,
            CONFORMAL_HK_TOL,
            k,
        ),
        ReportEntry::checked("chk.metric_flow", "L_(xi1+xi2) g_chK = 0", flow, CONFORMAL_HK_TOL, k),
        ReportEntry::checked("chk.I1_flow", "L_(xi1+xi2) I1 = 0", flows[0], CONFORMAL_HK_TOL, k),
        ReportEntry::checked("chk.I2_flow", "L_(xi1+xi2) I2 = 0", flows[1], CONFORMAL_HK_TOL, k),
        ReportEntry::checked("chk.I3_flow", "L_(xi1+xi2) I3 = 0", flows[2], CONFORMAL_HK_TOL, k),
        ReportEntry::checked(
            "chk.unscaled_control",
            "|L_(xi1+xi2) g^c| = 2|g| on the horizontal block (conformal factor is necessary)",
            control,
            1e-4,
            k,
        ),
        ReportEntry::informational("chk.unscaled_flow", "max |L_(xi1+xi2) g^c| / |g^c|", unscaled, k),
        ReportEntry::checked(
            "chk.psi_hat_metric",
            "Psi^* g_chK = g_chK for automorphisms preserving xi",
            psi,
            AD_TOL,
            k * preserving.len(),
        ),
        ReportEntry::assumed("hypothesis.xi_complete", "xi is complete"),
        ReportEntry::assumed(
            "hypothesis.transitive_on_level_set",
            "the automorphism group acts transitively on {g(xi,xi) = 1}",
        ),
    ])
}
