use warpcurv::geometry::{check_invariants, MetricField};
use warpcurv::knproducts::kn;
use warpcurv::symexpr::{is_zero_ratfunc, parse_expr, Chart, Expr, RatFunc, ZeroTest, ZeroVerdict};
use warpcurv::theorems::example1::{base_metric, warped_spec};

fn diag(names: &[&str], comps: &[&str]) -> MetricField {
    let chart = Chart::new(names).unwrap();
    let d: Vec<Expr> = comps.iter().map(|s| parse_expr(s).unwrap()).collect();
    MetricField::diagonal(chart, &d).unwrap()
}

fn rf(m: &MetricField, src: &str) -> RatFunc {
    parse_expr(src).unwrap().to_ratfunc(m.chart()).unwrap()
}

fn hyperbolic3() -> MetricField {
    diag(&["x", "y", "z"], &["1", "exp(2*x)", "exp(2*x)"])
}

/// g = [[1, e^x], [e^x, 2 + e^{2x}]], det 2.
fn skew2() -> MetricField {
    let chart = Chart::new(&["x", "y"]).unwrap();
    let e = |s: &str| parse_expr(s).unwrap();
    MetricField::from_exprs(chart, &[vec![e("1"), e("exp(x)")], vec![e("exp(x)"), e("2+exp(2*x)")]]).unwrap()
}

#[test]
fn christoffel_symbols_of_the_example() {
    let m = warped_spec().metric().clone();
    let gam = m.christoffel();
    assert_eq!(*gam.get(&[3, 2, 3]), RatFunc::ratio(1, 2));
    assert_eq!(*gam.get(&[3, 3, 2]), RatFunc::ratio(1, 2));
    assert_eq!(*gam.get(&[2, 3, 3]), rf(&m, "-exp(x3)/2"));
    assert!(gam.get(&[0, 2, 2]).is_zero());
}

#[test]
fn inverse_metric_is_a_two_sided_inverse() {
    for m in [base_metric(), skew2(), hyperbolic3()] {
        let n = m.dim();
        for i in 0..n {
            for j in 0..n {
                let mut acc = RatFunc::zero();
                for k in 0..n {
                    acc = acc.add(&m.g().get(&[i, k]).mul(m.inverse().get(&[k, j])));
                }
                assert_eq!(acc, RatFunc::from_int((i == j) as i64));
            }
        }
    }
    let b = base_metric();
    assert_eq!(*b.inverse().get(&[0, 0]), rf(&b, "exp(-x2)"));
    assert_eq!(*skew2().determinant(), RatFunc::from_int(2));
}

#[test]
fn scalar_curvature_of_the_example() {
    let m = warped_spec().metric().clone();
    let k = m.scalar_curvature();
    assert_eq!(*k, rf(&m, "(exp(-x1)+exp(-x2))/2 + 1/2"));
    let other = k.sub(&rf(&m, "(exp(-x1)+exp(-x2))/2 - 1/2"));
    assert!(matches!(is_zero_ratfunc(&other, m.chart(), &ZeroTest::default()), ZeroVerdict::NonZero { .. }));
    assert_eq!(*base_metric().scalar_curvature(), rf(&base_metric(), "(exp(-x1)+exp(-x2))/2"));
}

#[test]
fn example_base_is_not_einstein() {
    let b = base_metric();
    let dev = b.curvature_residuals().einstein_dev;
    let v = is_zero_ratfunc(dev.get(&[2, 2]), b.chart(), &ZeroTest::default());
    assert!(matches!(v, ZeroVerdict::NonZero { .. }), "{v:?}");
}

#[test]
fn concircular_component_of_the_base() {
    // W_1212 = R_1212 − κ/12 (g∧g)_1212 with R_1212 = −¼(e^{x1}+e^{x2}), (g∧g)_1212 = −2e^{x1+x2}.
    let b = base_metric();
    assert_eq!(*b.riemann().get(&[0, 1, 0, 1]), rf(&b, "-(exp(x1)+exp(x2))/4"));
    assert_eq!(*b.concircular().get(&[0, 1, 0, 1]), rf(&b, "-(exp(x1)+exp(x2))/6"));
}

#[test]
fn hyperbolic_space_has_constant_curvature() {
    let h = hyperbolic3();
    let r = h.curvature_residuals();
    assert!(r.const_curv_dev.is_exact_zero());
    assert!(r.einstein_dev.is_exact_zero());
    assert!(h.concircular().is_exact_zero());
    assert!(h.nabla_riemann().is_exact_zero());
    assert_eq!(*h.scalar_curvature(), RatFunc::from_int(6));
    assert_eq!(*h.riemann().get(&[0, 1, 0, 1]), rf(&h, "-exp(2*x)"));
}

#[test]
fn hyperbolic_plane_in_polar_form() {
    let h = diag(&["t", "p"], &["1", "sinh(t)^2"]);
    assert_eq!(*h.scalar_curvature(), RatFunc::from_int(2));
}

#[test]
fn flat_metrics_are_flat() {
    assert!(diag(&["x", "y", "z"], &["1", "1", "1"]).is_flat());
    assert!(diag(&["x", "y"], &["exp(2*y)", "exp(2*y)"]).is_flat());
    assert!(!diag(&["x", "y"], &["1", "exp(2*x)"]).is_flat());
}

#[test]
fn riemann_identities_hold_on_a_non_diagonal_metric() {
    let m = skew2();
    for c in check_invariants(&m, &ZeroTest::default()) {
        assert!(c.holds, "{} {:?}", c.name, c.failure);
    }
}

#[test]
fn gaussian_form_matches_half_kn_square() {
    let b = base_metric();
    let half = kn(b.g(), b.g()).scale(&RatFunc::ratio(1, 2));
    assert!(warpcurv::knproducts::gaussian(b.g()).sub(&half).is_exact_zero());
}
