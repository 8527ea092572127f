use super::*;
use crate::expr::ScalarExpression;
use nalgebra::{dmatrix, dvector, DMatrix, DVector};

fn potential(text: &str, n: usize) -> MetricField {
    MetricField::from_potential(ScalarExpression::real(text, n).unwrap()).unwrap()
}

fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    (a - b).amax() < tol
}

/// ω = [[0, g], [−g, 0]] over (x, y), built from a metric on x.
fn block_omega(g: MetricField) -> MatrixFn {
    let n = g.dim();
    let g2 = g.clone();
    MatrixFn::new(
        2 * n,
        move |p| {
            let v = g.value(&p[..n])?;
            Ok(block_matrix(&DMatrix::zeros(n, n), &v, &-&v, &DMatrix::zeros(n, n)))
        },
        move |p| {
            let j = g2.jet(&p[..n])?.pad_coords(2 * n);
            let z = MatJet::constant(DMatrix::zeros(n, n), 2 * n);
            Ok(MatJet::from_blocks(&z, &j, &j.neg(), &z))
        },
    )
}

#[test]
fn hessian_metric_examples() {
    let phi = ScalarExpression::real("-ln(x1) - ln(x2)", 2).unwrap();
    assert!(close(&hessian_metric(&phi, &[1.0, 1.0]).unwrap(), &DMatrix::identity(2, 2), 1e-15));
    assert!(close(&hessian_metric(&phi, &[2.0, 1.0]).unwrap(), &dmatrix![0.25, 0.0; 0.0, 1.0], 1e-15));
    let quad = ScalarExpression::real("x1^2 + x2^2", 2).unwrap();
    assert!(close(&hessian_metric(&quad, &[-3.0, 0.7]).unwrap(), &dmatrix![2.0, 0.0; 0.0, 2.0], 1e-15));
}

#[test]
fn hessian_metric_matches_second_differences() {
    let phi = ScalarExpression::real("1/(x1*x2)", 2).unwrap();
    let p = [1.3, 0.8];
    let ad = hessian_metric(&phi, &p).unwrap();
    let fd = fd_hessian(|q| Ok(phi.eval(q)?), &p).unwrap();
    assert!((&ad - &fd).amax() < 1e-4 * ad.amax());
}

#[test]
fn metric_derivative_examples() {
    let g = potential("-ln(x1) - ln(x2)", 2);
    let t = metric_derivative(&g, &[1.0, 1.0], DerivMode::Analytic).unwrap();
    assert!((t[(0, 0, 0)] + 2.0).abs() < 1e-14);
    assert!((t[(1, 1, 1)] + 2.0).abs() < 1e-14);
    for (k, i, j) in [(0, 0, 1), (0, 1, 1), (1, 0, 0), (1, 0, 1), (0, 1, 0)] {
        assert_eq!(t[(k, i, j)], 0.0);
    }

    let flat = MetricField::parse_components(&[vec!["2".into(), "1".into()], vec!["1".into(), "3".into()]]).unwrap();
    assert_eq!(metric_derivative(&flat, &[0.4, 0.1], DerivMode::Analytic).unwrap().max_abs(), 0.0);

    let bent = MetricField::parse_components(&[vec!["1".into(), "0".into()], vec!["0".into(), "1 + x1^2".into()]])
        .unwrap();
    let t = metric_derivative(&bent, &[0.5, 2.0], DerivMode::Analytic).unwrap();
    assert!((t[(0, 1, 1)] - 1.0).abs() < 1e-15);
    let mut expected = Tensor3::zeros(2);
    expected[(0, 1, 1)] = 1.0;
    assert_eq!(t, expected);
    // Not a Hessian metric: ∂₁g₂₂ ≠ ∂₂g₁₂.
    assert!(t.total_symmetry_defect() >= 0.9);
}

#[test]
fn potential_metric_derivative_is_totally_symmetric() {
    let g = potential("(x1^2 - x2^2 - x3^2)^(-1.5)", 3);
    let t = metric_derivative(&g, &[2.5, 0.3, -0.4], DerivMode::Analytic).unwrap();
    assert!(t.total_symmetry_defect() < 1e-8 * t.max_abs().max(1.0));
}

#[test]
fn lie_derivative_metric_examples() {
    let flat = MatrixFn::constant(DMatrix::identity(2, 2), 2);
    let euler = AffineField::euler(2, 1.0);
    let l = lie_derivative_metric(&flat, &euler, &[0.3, -1.2], DerivMode::Analytic).unwrap();
    assert!(close(&l, &(DMatrix::identity(2, 2) * 2.0), 1e-15));

    let gcon = potential("1/(x1*x2)", 2);
    let l = lie_derivative_metric(&gcon, &euler, &[1.0, 1.0], DerivMode::Analytic).unwrap();
    let g = gcon.value(&[1.0, 1.0]).unwrap();
    assert!(close(&g, &dmatrix![2.0, 1.0; 1.0, 2.0], 1e-14));
    assert!(close(&l, &(g * -2.0), 1e-13));

    let zero = AffineField::zero(2);
    let l = lie_derivative_metric(&gcon, &zero, &[1.4, 0.6], DerivMode::Analytic).unwrap();
    assert_eq!(l.amax(), 0.0);
}

#[test]
fn lie_derivative_endomorphism_examples() {
    let j0 = dmatrix![0.0, -1.0; 1.0, 0.0];
    let j = MatrixFn::constant(j0.clone(), 2);
    let p = [0.2, 0.9];

    // A = aI + bJ commutes with J.
    let commuting = AffineField::new(dmatrix![2.0, -3.0; 3.0, 2.0], dvector![1.0, -1.0]).unwrap();
    assert!(lie_derivative_endomorphism(&j, &commuting, &p, DerivMode::Analytic).unwrap().amax() < 1e-15);

    let along_j = AffineField::new(j0.clone(), DVector::zeros(2)).unwrap();
    assert!(lie_derivative_endomorphism(&j, &along_j, &p, DerivMode::Analytic).unwrap().amax() < 1e-15);

    let a = dmatrix![1.0, 2.0; 0.0, -1.0];
    let generic = AffineField::new(a.clone(), DVector::zeros(2)).unwrap();
    let l = lie_derivative_endomorphism(&j, &generic, &p, DerivMode::Analytic).unwrap();
    assert!(close(&l, &(&j0 * &a - &a * &j0), 1e-15));
    assert!(l.amax() > 1.0);
}

#[test]
fn exterior_derivative_examples() {
    let constant = MatrixFn::constant(dmatrix![0.0, 1.0; -1.0, 0.0], 2);
    assert_eq!(exterior_derivative_2form(&constant, &[1.0, 2.0], DerivMode::Analytic).unwrap().max_abs(), 0.0);

    let bent = MetricField::parse_components(&[vec!["1".into(), "0".into()], vec!["0".into(), "1 + x1^2".into()]])
        .unwrap();
    let p = [0.5, 0.2, 0.1, -0.3];
    for mode in [DerivMode::Analytic, DerivMode::FiniteDifference] {
        let d = exterior_derivative_2form(&block_omega(bent.clone()), &p, mode).unwrap();
        // (dω)_{x1 x2 y2} = ∂_{x1} ω_{x2 y2} = ∂₁g₂₂ = 2x₁.
        assert!((d[(0, 1, 3)] - 1.0).abs() < 1e-6);
        assert!((d.max_abs() - 1.0).abs() < 1e-6);
    }

    let hess = potential("-ln(x1) - ln(x2) + 1/(x1*x2)", 2);
    for mode in [DerivMode::Analytic, DerivMode::FiniteDifference] {
        let d = exterior_derivative_2form(&block_omega(hess.clone()), &[1.2, 0.7, 0.5, -0.5], mode).unwrap();
        assert!(d.max_abs() < 1e-5);
    }
}

#[test]
fn exterior_derivative_is_antisymmetric() {
    let bent = MetricField::parse_components(&[vec!["1".into(), "x2".into()], vec!["x2".into(), "1 + x1^2".into()]])
        .unwrap();
    let d = exterior_derivative_2form(&block_omega(bent), &[0.5, 0.2, 0.1, -0.3], DerivMode::Analytic).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                assert!((d[(a, b, c)] + d[(b, a, c)]).abs() < 1e-14);
                assert!((d[(a, b, c)] + d[(a, c, b)]).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn nijenhuis_examples() {
    let j = MatrixFn::constant(dmatrix![0.0, -1.0; 1.0, 0.0], 2);
    assert_eq!(nijenhuis(&j, &[0.1, 0.2], DerivMode::Analytic).unwrap().max_abs(), 0.0);

    // Not an almost complex structure; the tensor is still computed.
    let odd = MatrixFn::value_only(2, |p| Ok(dmatrix![p[0], p[1] * p[1]; 1.0, p[0] * p[1]]));
    let n = nijenhuis(&odd, &[0.3, 0.4], DerivMode::FiniteDifference).unwrap();
    for i in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                assert!((n[(i, a, b)] + n[(i, b, a)]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn pullback_examples() {
    let gcan = potential("-ln(x1) - ln(x2)", 2);
    let gcon = potential("1/(x1*x2)", 2);
    let p = [1.0, 1.0];

    let id = AffineAutomorphism::identity(2);
    assert!(close(&pullback_metric(&id, &gcon, &p).unwrap(), &gcon.value(&p).unwrap(), 0.0 + 1e-15));

    let scale = AffineAutomorphism::diagonal(&[2.0, 3.0]).unwrap();
    assert!(close(&pullback_metric(&scale, &gcan, &p).unwrap(), &gcan.value(&p).unwrap(), 1e-14));

    let unimodular = AffineAutomorphism::diagonal(&[2.0, 0.5]).unwrap();
    assert!(close(&pullback_metric(&unimodular, &gcon, &p).unwrap(), &gcon.value(&p).unwrap(), 1e-14));

    // diag(2,3) has det 6, so g_con picks up the factor 1/6.
    let pulled = pullback_metric(&scale, &gcon, &p).unwrap();
    assert!(close(&pulled, &(gcon.value(&p).unwrap() / 6.0), 1e-14));

    let j = MatrixFn::constant(dmatrix![0.0, -1.0; 1.0, 0.0], 2);
    let rot = AffineAutomorphism::from_linear(dmatrix![0.6, -0.8; 0.8, 0.6]).unwrap();
    assert!(close(&pullback_endomorphism(&rot, &j, &p).unwrap(), &j.value(&p).unwrap(), 1e-15));
}

#[test]
fn positive_definiteness() {
    assert!(is_positive_definite(&DMatrix::identity(3, 3), PD_TOL));
    assert!(!is_positive_definite(&dmatrix![1.0, 0.0; 0.0, -1.0], PD_TOL));
    assert!(!is_positive_definite(&DMatrix::zeros(2, 2), 1e-10));
    assert!(!is_positive_definite(&dmatrix![f64::NAN, 0.0; 0.0, 1.0], PD_TOL));
}

#[test]
fn affine_flow_matches_closed_form() {
    let f = AffineField::new(dmatrix![1.0, 0.0; 0.0, -2.0], dvector![1.0, 0.0]).unwrap();
    let t = 0.3;
    let phi = f.flow(t);
    // x' = x + 1 ⇒ x(t) = (x0 + 1)eᵗ − 1; y' = −2y ⇒ y(t) = y0 e^{−2t}.
    let out = phi.apply(&[0.5, 2.0]);
    assert!((out[0] - (1.5 * t.exp() - 1.0)).abs() < 1e-14);
    assert!((out[1] - 2.0 * (-2.0 * t).exp()).abs() < 1e-14);
    assert!((phi.det() - (-t).exp()).abs() < 1e-14);
    let back = phi.compose(&f.flow(-t));
    assert!((back.linear() - DMatrix::identity(2, 2)).amax() < 1e-14);
}

#[test]
fn automorphism_algebra() {
    let t = AffineAutomorphism::new(dmatrix![2.0, 1.0; 0.0, 1.0], dvector![1.0, -1.0]).unwrap();
    let p = [0.3, 0.4];
    let round = t.inverse().apply(t.apply(&p).as_slice());
    assert!((round - DVector::from_column_slice(&p)).amax() < 1e-15);
    assert!(matches!(
        AffineAutomorphism::from_linear(dmatrix![1.0, 1.0; 1.0, 1.0]),
        Err(crate::error::Error::Singular { .. })
    ));
    let prod = t.product(&AffineAutomorphism::translation(dvector![5.0]));
    assert_eq!(prod.apply(&[0.3, 0.4, 1.0]).as_slice(), &[2.0, -0.6, 6.0]);
}

/// (1/2t)((exp tξ)*g − (exp −tξ)*g) reproduces L_ξ g.
#[test]
fn lie_derivative_matches_flow_difference() {
    let g = potential("(x1^2 - x2^2 - x3^2)^(-1.5)", 3);
    let xi = AffineField::new(
        dmatrix![0.1, 0.3, 0.0; 0.3, 0.0, -0.2; 0.0, 0.2, 0.1],
        dvector![0.05, 0.0, 0.0],
    )
    .unwrap();
    let p = [2.4, 0.3, -0.5];
    let t = 1e-4;
    let fwd = pullback_metric(&xi.flow(t), &g, &p).unwrap();
    let bwd = pullback_metric(&xi.flow(-t), &g, &p).unwrap();
    let flow = (fwd - bwd) / (2.0 * t);
    let lie = lie_derivative_metric(&g, &xi, &p, DerivMode::Analytic).unwrap();
    assert!((&flow - &lie).amax() < 1e-4 * lie.amax().max(1.0));
}

#[test]
fn bracket_of_fields_on_disjoint_blocks_vanishes() {
    let a = dmatrix![1.0, 2.0; -1.0, 0.5];
    let x = AffineField::new(a.clone(), DVector::zeros(2)).unwrap().direct_sum(&AffineField::zero(2));
    let y = AffineField::zero(2).direct_sum(&AffineField::new(a, dvector![1.0, 1.0]).unwrap());
    let p = [0.1, 0.2, 0.3, 0.4];
    assert!(lie_bracket(&x, &y, &p, DerivMode::Analytic).unwrap().amax() < 1e-15);
    // A field does not commute with itself shifted: [ξ, ∂₁] = −∂₁ξ.
    let xi = VectorFieldSpec::parse(&["x1*x2", "x1"]).unwrap();
    let shift = AffineField::new(DMatrix::zeros(2, 2), dvector![1.0, 0.0]).unwrap();
    let br = lie_bracket(&xi, &shift, &[2.0, 3.0], DerivMode::Analytic).unwrap();
    assert!((br - dvector![-3.0, -1.0]).amax() < 1e-14);
}

#[test]
fn affine_certification() {
    let pts = vec![vec![0.5, 1.0], vec![1.5, -0.2], vec![2.0, 2.0]];
    let rho = VectorFieldSpec::parse(&["x1", "x2"]).unwrap();
    let form = rho.certify_affine(&pts).unwrap();
    assert!((form.linear_part() - DMatrix::identity(2, 2)).amax() < 1e-15);
    assert_eq!(form.translation_part().amax(), 0.0);

    let shifted = VectorFieldSpec::parse(&["2*x1 - x2 + 3", "0.5*x2"]).unwrap();
    let form = shifted.certify_affine(&pts).unwrap();
    assert!((form.translation_part() - dvector![3.0, 0.0]).amax() < 1e-14);

    let curved = VectorFieldSpec::parse(&["x1*x2", "x1"]).unwrap();
    assert!(matches!(curved.certify_affine(&pts), Err(crate::error::Error::NotAffine(_))));

    let mismatched = VectorFieldSpec::new(
        VectorFieldSpec::parse(&["x1", "x2"]).unwrap().components().to_vec(),
        Some(AffineField::euler(2, 2.0)),
    );
    assert!(matches!(mismatched, Err(crate::error::Error::NotAffine(_))));
}

#[test]
fn affine_spec_round_trips_through_expressions() {
    let form = AffineField::new(dmatrix![-0.5, 0.0; 1e-3, 2.0], dvector![0.0, -1.25]).unwrap();
    let spec = VectorFieldSpec::from_affine(form.clone());
    let p = [0.7, -0.4];
    assert!((spec.value(&p).unwrap() - form.value(&p).unwrap()).amax() < 1e-15);
    assert_eq!(spec.certify_affine(&[p.to_vec()]).unwrap(), form);
}

#[test]
fn finite_difference_pipeline_agrees_with_analytic() {
    let g = potential("-ln(x1*x2 - x3^2)", 3);
    let p = [1.5, 1.2, 0.3];
    let xi = VectorFieldSpec::parse(&["x1 + x3", "x2", "0.5*x3 - x1"]).unwrap();
    let ad = lie_derivative_metric(&g, &xi, &p, DerivMode::Analytic).unwrap();
    let fd = lie_derivative_metric(&g, &xi, &p, DerivMode::FiniteDifference).unwrap();
    assert!((ad - fd).amax() < 1e-7);
    let phi = ScalarExpression::real("x1^2*x3 + exp(x2)", 3).unwrap();
    let ad = lie_derivative_function(&phi, &xi, &p, DerivMode::Analytic).unwrap();
    let fd = lie_derivative_function(&phi, &xi, &p, DerivMode::FiniteDifference).unwrap();
    assert!((ad - fd).abs() < 1e-8);
}
