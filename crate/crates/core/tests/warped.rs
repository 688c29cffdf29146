use warpcurv::geometry::MetricField;
use warpcurv::symexpr::{parse_expr, Chart, Expr, ZeroTest};
use warpcurv::warped::{crosscheck, warped_auxiliaries, WarpedError, WarpedSpec};

fn diag(names: &[&str], comps: &[&str]) -> MetricField {
    let chart = Chart::new(names).unwrap();
    let d: Vec<Expr> = comps.iter().map(|s| parse_expr(s).unwrap()).collect();
    MetricField::diagonal(chart, &d).unwrap()
}

fn example1() -> WarpedSpec {
    WarpedSpec::new(
        diag(&["x1", "x2", "x3"], &["exp(x2)", "exp(x1)", "1"]),
        diag(&["x4"], &["1"]),
        parse_expr("exp(x3)").unwrap(),
    )
    .unwrap()
}

#[test]
fn example1_crosscheck_is_proved() {
    let spec = example1();
    let rep = crosscheck(&spec, &ZeroTest::default());
    for t in &rep.tensors {
        assert_eq!(t.verdict, "ProvedZero", "{t:?}");
    }
    for f in &rep.printed {
        println!("{f:?}");
    }
}

#[test]
fn example1_auxiliaries() {
    let spec = example1();
    let aux = warped_auxiliaries(&spec);
    let c = spec.base().chart().clone();
    let q = parse_expr("-1/4").unwrap().to_ratfunc(&c).unwrap();
    assert_eq!(aux.t.get(&[2, 2]), &q);
    assert_eq!(aux.tr_t, q);
    assert_eq!(aux.p, parse_expr("1/4").unwrap().to_ratfunc(&c).unwrap());
    assert_eq!(aux.q, parse_expr("exp(x3)/4").unwrap().to_ratfunc(&c).unwrap());
}

#[test]
fn random_two_plus_two() {
    let spec = WarpedSpec::new(
        diag(&["x1", "x2"], &["1 + exp(x2)", "2 + exp(x1)"]),
        diag(&["x3", "x4"], &["exp(x4)", "1 + exp(x3)"]),
        parse_expr("exp(x1)").unwrap(),
    )
    .unwrap();
    let t = std::time::Instant::now();
    let rep = crosscheck(&spec, &ZeroTest::default());
    println!("elapsed {:?}", t.elapsed());
    for t in &rep.tensors {
        assert_ne!(t.verdict, "NonZero", "{t:?}");
    }
    for f in &rep.printed {
        println!("{f:?}");
    }
}

#[test]
fn collision_rejected() {
    let e = WarpedSpec::new(
        diag(&["x", "y"], &["1", "1"]),
        diag(&["y"], &["1"]),
        Expr::int(1),
    )
    .unwrap_err();
    assert_eq!(e, WarpedError::CoordinateCollision("y".into()));
}
