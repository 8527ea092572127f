use super::*;
use crate::tensor::DerivMode::{Analytic, FiniteDifference};
use nalgebra::dmatrix;

fn entry<'a>(entries: &'a [ReportEntry], id: &str) -> &'a ReportEntry {
    entries.iter().find(|e| e.check_id == id).unwrap_or_else(|| panic!("missing {id}"))
}

fn residual(entries: &[ReportEntry], id: &str) -> f64 {
    entry(entries, id).residual.unwrap()
}

fn assert_all_pass(entries: &[ReportEntry]) {
    for e in entries {
        assert!(!e.failed(), "{} failed: {:?} vs {:?}", e.check_id, e.residual, e.tolerance);
    }
}

#[test]
fn flat_preset_is_the_standard_structure() {
    let sk = sk_preset("sk_flat").unwrap();
    assert_eq!(sk.dim(), 2);
    assert!((sk.lambda() - 1.0).abs() < 1e-15);
    for q in sk.sample(10, 1).unwrap() {
        let (g, i) = sk.values(&q).unwrap();
        assert!((g - DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);
        assert!((i - dmatrix![0.0, 1.0; -1.0, 0.0]).amax() < 1e-15);
    }
}

#[test]
fn all_presets_satisfy_the_special_kahler_axioms() {
    for name in SK_PRESETS {
        let sk = sk_preset(name).unwrap();
        let points = sk.sample(50, 42).unwrap();
        let entries = check_special_kahler(&sk, &points, Analytic).unwrap();
        assert_all_pass(&entries);
        assert!((sk.lambda() - 1.0).abs() < 1e-10, "{name}: λ = {}", sk.lambda());
    }
}

#[test]
fn preset_boxes_keep_im_f_nondegenerate_with_margin() {
    for name in SK_PRESETS {
        let sk = sk_preset(name).unwrap();
        let f = sk.prepotential().unwrap();
        for z in f.sample_z(200, 5) {
            let n = f.imaginary_hessian(&z).unwrap();
            let margin = match f.signature() {
                Signature::Definite => min_eigenvalue(&n).unwrap(),
                Signature::Indefinite => min_abs_eigenvalue(&n),
            };
            assert!(margin >= 0.1, "{name}: margin {margin} at {z:?}");
        }
    }
}

#[test]
fn conic_prepotential_is_indefinite_everywhere() {
    let f = Prepotential::parse("z2^3/z1", 2, vec![(-2.0, 2.0); 4], Signature::Indefinite).unwrap();
    for z in f.sample_z(100, 9) {
        let Ok(n) = f.imaginary_hessian(&z) else { continue };
        assert!(n.determinant() <= 1e-12, "det Im F'' = {}", n.determinant());
    }
    let err = SpecialKahlerStructure::from_prepotential(
        "definite_conic",
        Prepotential::parse("z2^3/z1", 2, vec![(0.9, 1.1), (-0.3, 0.3), (-0.1, 0.1), (0.6, 0.9)], Signature::Definite)
            .unwrap(),
        10,
        42,
    )
    .unwrap_err();
    assert!(matches!(err, Error::NotPositiveDefinite { .. }));
}

#[test]
fn quaternion_algebra_on_presets() {
    let flat = sk_preset("sk_flat").unwrap();
    let frame = build_hyperkahler(&flat, &[0.8, 0.2, 0.5, -0.3]).unwrap();
    assert!((&frame.gc - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
    assert_eq!(frame.quaternion_defect(), 0.0);
    let other = build_hyperkahler(&flat, &[1.3, -0.7, -0.9, 0.1]).unwrap();
    assert_eq!(frame, other);

    let cubic = sk_preset("sk_cubic").unwrap();
    for p in HyperKahlerLift::new(&cubic).sample(20, 3).unwrap() {
        let f = build_hyperkahler(&cubic, &p).unwrap();
        assert!((&f.i1 * &f.i2 - &f.i3).amax() < 1e-12);
        assert!(f.quaternion_defect() < 1e-12);
        // ω g⁻¹ ω = −g with ω = gI
        let (g, i) = cubic.values(&p[..2]).unwrap();
        let w = &g * &i;
        assert!((&w * invert(&g).unwrap() * &w + &g).amax() < 1e-12);
    }
}

#[test]
fn hyperkahler_checks() {
    let flat = HyperKahlerLift::new(&sk_preset("sk_flat").unwrap());
    let entries = check_hyperkahler(&flat, &flat.sample(20, 42).unwrap(), Analytic).unwrap();
    assert_all_pass(&entries);
    for e in &entries {
        assert!(e.residual.unwrap() < 1e-10, "{}", e.check_id);
    }
    for name in ["sk_cubic", "sk_conic"] {
        let hk = HyperKahlerLift::new(&sk_preset(name).unwrap());
        let points = hk.sample(20, 42).unwrap();
        assert_all_pass(&check_hyperkahler(&hk, &points, Analytic).unwrap());
        assert_all_pass(&check_hyperkahler(&hk, &points, FiniteDifference).unwrap());
    }
}

#[test]
fn omega2_is_not_constant_on_the_cubic_preset() {
    let hk = HyperKahlerLift::new(&sk_preset("sk_cubic").unwrap());
    let points = hk.sample(10, 42).unwrap();
    let forms: Vec<_> = points.iter().map(|p| hk.frame_at(p).unwrap().kahler_forms()).collect();
    let spread = |k: usize| forms.iter().map(|f| (&f[k] - &forms[0][k]).amax()).fold(0.0, f64::max);
    assert!(spread(1) > 0.1);
    assert!(spread(0) < 1e-12 && spread(2) < 1e-12);
}

#[test]
fn perturbation_is_detected() {
    let sk = sk_preset("sk_cubic").unwrap();
    let hk = HyperKahlerLift::new(&sk);
    let points = hk.sample(20, 42).unwrap();
    let entries = check_perturbation_control(&sk, 0.01, &points).unwrap();
    assert_all_pass(&entries);
    assert!(residual(&entries, "hk.perturbed_quaternion") >= 1e-3);
    let bad = HyperKahlerLift::new(&sk.with_perturbation(0.01));
    let e = check_hyperkahler(&bad, &points, Analytic).unwrap();
    assert!(residual(&e, "hk.quaternion") >= 1e-3);
}

#[test]
fn psi_hat_invariance() {
    for name in SK_PRESETS {
        let sk = sk_preset(name).unwrap();
        let hk = HyperKahlerLift::new(&sk);
        let points = hk.sample(10, 42).unwrap();
        let autos = sk_automorphisms(name, 5, 7).unwrap();
        let shifts = vec![nalgebra::DVector::from_element(sk.dim(), 0.3)];
        let entries = check_invariance_psi_hat(&hk, &autos, &shifts, &points).unwrap();
        assert_all_pass(&entries);
        assert!(residual(&entries, "psi_hat.fiber_shift") <= 1e-12);
    }
}

#[test]
fn pure_fiber_shift_is_exact() {
    let hk = HyperKahlerLift::new(&sk_preset("sk_conic").unwrap());
    let points = hk.sample(10, 42).unwrap();
    let shifts = vec![nalgebra::DVector::from_element(4, -0.7)];
    let entries = check_invariance_psi_hat(&hk, &[], &shifts, &points).unwrap();
    assert_eq!(residual(&entries, "psi_hat.fiber_shift"), 0.0);
}

#[test]
fn scaling_is_not_an_isometry_of_the_conic_preset() {
    let hk = HyperKahlerLift::new(&sk_preset("sk_conic").unwrap());
    let points = hk.sample(5, 42).unwrap();
    let scale = AffineAutomorphism::diagonal(&[2.0; 4]).unwrap();
    let err = check_invariance_psi_hat(&hk, &[scale], &[], &points).unwrap_err();
    assert!(matches!(err, Error::NotAnIsometry { .. }));
}

#[test]
fn anti_symplectic_isometry_is_rejected() {
    // (q1, q2) ↦ (q1, −q2) is an isometry of the flat preset but reverses Ω
    let hk = HyperKahlerLift::new(&sk_preset("sk_flat").unwrap());
    let points = hk.sample(5, 42).unwrap();
    let flip = AffineAutomorphism::diagonal(&[1.0, -1.0]).unwrap();
    assert!(matches!(
        check_invariance_psi_hat(&hk, &[flip], &[], &points),
        Err(Error::NotSymplectic { .. })
    ));
}

#[test]
fn conformal_hyperkahler_on_flat_and_conic() {
    for name in ["sk_flat", "sk_conic"] {
        let sk = sk_preset(name).unwrap();
        let chk = ConformalHyperKahler::from_structure(&sk, 20, 42).unwrap();
        let points = chk.sample(20, 42).unwrap();
        let autos = sk_automorphisms(name, 5, 3).unwrap();
        for mode in [Analytic, FiniteDifference] {
            let entries = check_conformal_hyperkahler(&chk, &autos, &points, mode).unwrap();
            assert_all_pass(&entries);
            if name == "sk_flat" && mode == Analytic {
                for id in ["chk.base_homothety", "chk.base_holomorphic", "chk.metric_flow", "chk.I1_flow", "chk.I2_flow", "chk.I3_flow"] {
                    assert!(residual(&entries, id) < 1e-8, "{id}");
                }
            }
            assert!(residual(&entries, "chk.unscaled_flow") > 1.0);
        }
    }
}

#[test]
fn vertical_lift_is_two_minus_transpose() {
    let sk = sk_preset("sk_flat").unwrap();
    let chk = ConformalHyperKahler::from_structure(&sk, 5, 42).unwrap();
    let a = chk.field().linear_part();
    let c = chk.vertical().linear_part().view((2, 2), (2, 2)).into_owned();
    assert!((c - (DMatrix::<f64>::identity(2, 2) * 2.0 - a.transpose())).amax() < 1e-14);
}

#[test]
fn translation_is_unsupported() {
    let sk = sk_preset("sk_flat").unwrap();
    let xi = AffineField::new(DMatrix::identity(2, 2), nalgebra::dvector![0.1, 0.0]).unwrap();
    assert!(matches!(ConformalHyperKahler::new(&sk, &xi, 5, 42), Err(Error::TranslationUnsupported { .. })));
}

#[test]
fn non_homothetic_field_is_rejected() {
    let sk = sk_preset("sk_cubic").unwrap();
    let xi = AffineField::euler(2, 1.0);
    assert!(matches!(ConformalHyperKahler::new(&sk, &xi, 5, 42), Err(Error::NotHomothetic { .. })));
}

#[test]
fn direct_config_builds_the_flat_structure() {
    let json = serde_json::json!({
        "name": "flat_direct",
        "dim": 2,
        "Omega": [[0.0, 1.0], [-1.0, 0.0]],
        "potential": "(x1^2 + x2^2)/2",
        "I": [["0", "1"], ["-1", "0"]],
        "box": [[0.5, 1.5], [-1.0, 1.0]],
        "field_affine": {"A": [[1.0, 0.0], [0.0, 1.0]], "b": [0.0, 0.0]}
    });
    assert!(SpecialKahlerConfig::matches(&json));
    let cfg = SpecialKahlerConfig::from_value(json).unwrap();
    let sk = cfg.build().unwrap();
    let points = sk.sample(10, 42).unwrap();
    assert_all_pass(&check_special_kahler(&sk, &points, Analytic).unwrap());
    let chk = ConformalHyperKahler::from_structure(&sk, 10, 42).unwrap();
    assert_all_pass(&check_conformal_hyperkahler(&chk, &[], &chk.sample(10, 42).unwrap(), Analytic).unwrap());
    let again = SpecialKahlerConfig::from_value(serde_json::to_value(sk.to_config()).unwrap()).unwrap();
    assert_eq!(again.build().unwrap().values(&points[0]).unwrap(), sk.values(&points[0]).unwrap());
}

#[test]
fn implicit_potential_requires_a_prepotential() {
    let json = serde_json::json!({
        "name": "bad", "dim": 2, "Omega": [[0.0, 1.0], [-1.0, 0.0]], "potential": "implicit",
        "I": [["0", "1"], ["-1", "0"]], "box": [[0.0, 1.0], [0.0, 1.0]]
    });
    let err = SpecialKahlerConfig::from_value(json).unwrap().build().unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn preset_configs_round_trip() {
    for name in SK_PRESETS {
        let sk = sk_preset(name).unwrap();
        let cfg = sk.to_config();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = SpecialKahlerConfig::from_value(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let rebuilt = back.build().unwrap();
        let q = sk.sample(1, 42).unwrap().remove(0);
        assert_eq!(rebuilt.values(&q).unwrap(), sk.values(&q).unwrap());
        assert_eq!(rebuilt.field().is_some(), sk.field().is_some());
    }
}

#[test]
fn require_rejects_points_outside_the_box() {
    let sk = sk_preset("sk_cubic").unwrap();
    let q = sk.sample(1, 42).unwrap().remove(0);
    sk.require(&q).unwrap();
    // z = 3 + i lies outside Re z ∈ [−1, 1]
    let far = sk.prepotential().unwrap().darboux(&[num_complex::Complex64::new(3.0, 1.0)]).unwrap();
    assert!(matches!(sk.require(far.as_slice()), Err(Error::Domain { .. })));
}

#[test]
fn negative_transpose_vertical_lift_does_not_preserve_the_metric() {
    // With ξ₂ = (0, −Aᵀp) and the Euler field on the flat preset, the vertical
    // block of L g^c is −2g⁻¹ instead of 2g⁻¹, so L g_chK = −4 g_chK there.
    let sk = sk_preset("sk_flat").unwrap();
    let chk = ConformalHyperKahler::from_structure(&sk, 5, 42).unwrap();
    let a = chk.field().linear_part().clone();
    let naive = chk
        .horizontal()
        .add(&AffineField::zero(2).direct_sum(&AffineField::new(-a.transpose(), nalgebra::DVector::zeros(2)).unwrap()));
    let g = chk.conformal_metric_field();
    let p = chk.sample(1, 42).unwrap().remove(0);
    let l = crate::tensor::lie_derivative_metric(&g, &naive, &p, Analytic).unwrap();
    let lv = l.view((2, 2), (2, 2)).amax();
    let gv = g.value(&p).unwrap().view((2, 2), (2, 2)).amax();
    assert!((lv - 4.0 * gv).abs() < 1e-12 * gv.max(1.0) + 1e-12);
}
