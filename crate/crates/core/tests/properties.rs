use dashu_ratio::RBig;
use proptest::prelude::*;

use warpcurv::knproducts::kn;
use warpcurv::recurrence::solve_pointwise_coefficients;
use warpcurv::symexpr::{guard, is_zero_in, parse_expr, Chart, PointValues, RatFunc, Real, ZeroTest, ZeroVerdict};
use warpcurv::tensor::Tensor;

fn chart() -> Chart {
    Chart::new(&["x", "y"]).unwrap()
}

fn rf(src: &str) -> RatFunc {
    parse_expr(src).unwrap().to_ratfunc(&chart()).unwrap()
}

/// Expressions in x, y, exp(±x), exp(±y) with denominators bounded away from zero.
fn expr_src() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1i64..6).prop_map(|k| k.to_string()),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("exp(x)".to_string()),
        Just("exp(-y)".to_string()),
        Just("exp(x+y)".to_string()),
        Just("exp(2*y)".to_string()),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})+({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})-({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            inner.clone().prop_map(|a| format!("({a})/(2+exp(x))")),
            inner.prop_map(|a| format!("({a})^2")),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<RBig>> {
    prop::collection::vec(-64i64..=64, 2).prop_map(|v| v.into_iter().map(|k| RBig::from(k) / RBig::from(64)).collect())
}

fn sym(n: usize) -> impl Strategy<Value = Tensor<Real>> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| {
        Tensor::symmetric2(n, |i, j| Real::from_i64(v[i.min(j) * n + i.max(j)]))
    })
}

fn vecs(k: usize, len: usize) -> impl Strategy<Value = Vec<Tensor<Real>>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, len), k).prop_map(move |vs| {
        vs.into_iter()
            .map(|v| Tensor::from_vec(&[len], v.into_iter().map(Real::from_i64).collect()))
            .collect()
    })
}

fn small(t: &Tensor<Real>) -> bool {
    t.max_abs().to_f64() < 1e-40
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonicalize_is_idempotent(src in expr_src()) {
        let c = chart();
        let e = parse_expr(&src).unwrap();
        let once = e.canonicalize_in(&c).unwrap();
        let twice = once.canonicalize_in(&c).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.to_ratfunc(&c).unwrap(), e.to_ratfunc(&c).unwrap());
    }

    #[test]
    fn respellings_share_one_canonical_form(a in expr_src(), b in expr_src(), d in expr_src()) {
        prop_assert_eq!(rf(&format!("({a})+({b})")), rf(&format!("({b})+({a})")));
        prop_assert_eq!(rf(&format!("({a})*(({b})+({d}))")), rf(&format!("({a})*({b})+({d})*({a})")));
        prop_assert_eq!(rf(&format!("exp(x+y)*({a})")), rf(&format!("({a})*exp(y)*exp(x)")));
        prop_assert_eq!(rf(&format!("({a})^2")), rf(&format!("({a})*({a})")));
        prop_assert_eq!(rf(&format!("sinh(x)*({a})")), rf(&format!("({a})*(exp(x)-exp(-x))/2")));
    }

    #[test]
    fn zero_test_is_sound(a in expr_src(), b in expr_src()) {
        let c = chart();
        let cfg = ZeroTest::default();
        let z = parse_expr(&format!("({a})+({b})-({b})-({a})")).unwrap();
        prop_assert_eq!(is_zero_in(&z, &c, &cfg), ZeroVerdict::ProvedZero);
        let pos = parse_expr(&format!("({a})^2+1")).unwrap();
        let v = is_zero_in(&pos, &c, &cfg);
        prop_assert!(matches!(v, ZeroVerdict::NonZero { .. }), "{:?}", v);
    }

    #[test]
    fn derivative_matches_central_difference(src in expr_src(), coord in 0usize..2, p in point()) {
        let r = rf(&src);
        let g = guard();
        let h = RBig::from(1) / RBig::from(10i64.pow(12));
        let mut hi = p.clone();
        hi[coord] = &hi[coord] + &h;
        let mut lo = p.clone();
        lo[coord] = &lo[coord] - &h;
        let fd = (r.eval(&PointValues::new(&hi), &g).unwrap() - r.eval(&PointValues::new(&lo), &g).unwrap())
            / Real::from_rbig(&(h * RBig::from(2)));
        let exact = r.diff(coord).eval(&PointValues::new(&p), &g).unwrap();
        let scale = exact.abs().to_f64().max(1.0);
        prop_assert!((fd - exact).abs().to_f64() <= 1e-15 * scale);
    }

    #[test]
    fn kn_is_symmetric_and_bilinear(a in sym(4), b in sym(4), e in sym(4), c in -3i64..=3) {
        prop_assert!(small(&kn(&a, &e).sub(&kn(&e, &a))));
        let c = Real::from_i64(c);
        let lhs = kn(&a.add(&b.scale(&c)), &e);
        let rhs = kn(&a, &e).add(&kn(&b, &e).scale(&c));
        prop_assert!(small(&lhs.sub(&rhs)));
    }

    #[test]
    fn kn_has_riemann_symmetries(a in sym(3), e in sym(3)) {
        let t = kn(&a, &e);
        for i in 0..3 { for j in 0..3 { for k in 0..3 { for l in 0..3 {
            let v = t.get(&[i, j, k, l]);
            prop_assert!((v + t.get(&[j, i, k, l])).is_zero());
            prop_assert!((v - t.get(&[k, l, i, j])).is_zero());
            prop_assert!((v + t.get(&[i, k, l, j]) + t.get(&[i, l, j, k])).is_zero());
        }}}}
    }

    #[test]
    fn least_squares_ignores_basis_order(basis in vecs(3, 6), target in vecs(1, 6)) {
        let s = solve_pointwise_coefficients(&target, &basis).unwrap();
        let perm = [2usize, 0, 1];
        let permuted: Vec<_> = perm.iter().map(|&i| basis[i].clone()).collect();
        let p = solve_pointwise_coefficients(&target, &permuted).unwrap();
        prop_assert_eq!(s.rank, p.rank);
        prop_assert!((s.residuals[0].clone() - p.residuals[0].clone()).abs().to_f64() < 1e-30);
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((s.coeffs[0][i].clone() - p.coeffs[0][k].clone()).abs().to_f64() < 1e-25);
        }
    }

    #[test]
    fn least_squares_residual_shrinks_with_superset(basis in vecs(3, 6), extra in vecs(1, 6), target in vecs(1, 6)) {
        let s = solve_pointwise_coefficients(&target, &basis).unwrap();
        let mut bigger = basis.clone();
        bigger.extend(extra);
        let b = solve_pointwise_coefficients(&target, &bigger).unwrap();
        prop_assert!(b.residuals[0].to_f64() <= s.residuals[0].to_f64() + 1e-30);
    }
}
