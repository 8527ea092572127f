//! Randomized invariants: expression round trips, exact derivatives against
//! finite differences, cone potentials against their Hessian metrics, and
//! the quaternion algebra of the c-map frame at arbitrary points.

use hessgeom::cmap::{build_hyperkahler, sk_preset};
use hessgeom::cones::{self, ConeMetric, CONE_PRESETS};
use hessgeom::expr::ScalarExpression;
use hessgeom::tensor::{fd_gradient, fd_hessian, hessian_metric, MatrixField};
use proptest::prelude::*;

/// Random expression text over `x1..x3` built from the full grammar.
fn expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1u32..20).prop_map(|c| c.to_string()),
        (0.1f64..5.0).prop_map(|c| format!("{c:.3}")),
        (1usize..=3).prop_map(|i| format!("x{i}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"]))
                .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            (inner.clone(), 0i32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner, prop::sample::select(vec!["exp", "ln", "sqrt"])).prop_map(|(a, f)| format!("{f}({a})")),
        ]
    })
}

/// `Σ c_k x^α_k` with small integer exponents.
fn polynomial() -> impl Strategy<Value = String> {
    prop::collection::vec((-3.0f64..3.0, 0u32..4, 0u32..4, 0u32..4), 1..6).prop_map(|terms| {
        terms
            .iter()
            .map(|(c, a, b, d)| format!("({c:.4})*x1^{a}*x2^{b}*x3^{d}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn serialization_is_a_fixed_point(text in expression()) {
        let e = ScalarExpression::real(&text, 3).unwrap();
        let once = e.serialize();
        let reparsed = ScalarExpression::real(&once, 3).unwrap();
        prop_assert_eq!(reparsed.serialize(), once.clone());
        prop_assert_eq!(&reparsed, &e);
        let p = [0.7, 1.3, 2.1];
        match (e.eval(&p), reparsed.eval(&p)) {
            (Ok(a), Ok(b)) => prop_assert!(a == b || (a.is_nan() && b.is_nan())),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?} for {}", a, b, once),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn polynomial_jets_match_finite_differences(
        text in polynomial(),
        points in prop::collection::vec(prop::collection::vec(-1.5f64..1.5, 3), 10),
    ) {
        let e = ScalarExpression::real(&text, 3).unwrap();
        for p in &points {
            let jet = e.eval_jet3(p).unwrap();
            prop_assert!(close(jet.value, e.eval(p).unwrap(), 1e-14));
            let g = fd_gradient(|q| Ok(e.eval(q)?), p).unwrap();
            let h = fd_hessian(|q| Ok(e.eval(q)?), p).unwrap();
            for i in 0..3 {
                prop_assert!(close(jet.gradient[i], g[i], 1e-6), "{text} d{i} at {p:?}");
                for j in 0..3 {
                    prop_assert!(close(jet.hessian[(i, j)], h[(i, j)], 1e-5), "{text} d{i}d{j} at {p:?}");
                    // Third derivatives are first differences of the exact Hessian.
                    let dh = fd_gradient(|q| Ok(e.eval_jet3(q)?.hessian[(i, j)]), p).unwrap();
                    for k in 0..3 {
                        prop_assert!(close(jet.third_at(i, j, k), dh[k], 1e-6), "{text} d{i}d{j}d{k} at {p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn cone_metrics_are_hessians_of_their_potentials(index in 0usize..4, seed in 0u64..1000) {
        let c = cones::preset(CONE_PRESETS[index]).unwrap();
        let p = &c.sample(1, seed).unwrap()[0];
        let phi = c.characteristic();
        let exact = hessian_metric(phi, p).unwrap();
        let metric = c.structure(ConeMetric::Characteristic).metric().value(p).unwrap();
        prop_assert!((&exact - &metric).amax() <= 1e-12 * metric.amax());
        let fd = fd_hessian(|q| Ok(phi.eval(q)?), p).unwrap();
        prop_assert!((fd - &metric).amax() <= 1e-5 * metric.amax());
    }

    #[test]
    fn cmap_frame_is_quaternionic_everywhere(index in 0usize..3, seed in 0u64..1000, fiber in prop::collection::vec(-1.0f64..1.0, 4)) {
        let name = ["sk_flat", "sk_cubic", "sk_conic"][index];
        let sk = sk_preset(name).unwrap();
        let q = &sk.sample(1, seed).unwrap()[0];
        let mut point = q.clone();
        point.extend(&fiber[..q.len()]);
        let frame = build_hyperkahler(&sk, &point).unwrap();
        prop_assert!(frame.quaternion_defect() < 1e-8, "{name}");
        prop_assert!(frame.hermitian_defect() < 1e-8, "{name}");
    }
}
