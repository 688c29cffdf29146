use dashu_ratio::RBig;
use warpcurv::geometry::MetricField;
use warpcurv::recurrence::{
    classify, olszak_degeneracy_check, roter_check, roter_decompose, ClassifyOptions, StructureKind, Verdict, TOL_REL,
};
use warpcurv::symexpr::{parse_expr, Chart, Expr, PointValues, Real};
use warpcurv::tensor::Tensor;
use warpcurv::theorems::example1::base_metric;

fn diag(names: &[&str], comps: &[&str]) -> MetricField {
    let chart = Chart::new(names).unwrap();
    let d: Vec<Expr> = comps.iter().map(|s| parse_expr(s).unwrap()).collect();
    MetricField::diagonal(chart, &d).unwrap()
}

fn opts(samples: usize) -> ClassifyOptions {
    ClassifyOptions { samples, ..ClassifyOptions::default() }
}

#[test]
fn example_base_is_recurrent() {
    let cr = classify(&base_metric(), &[StructureKind::K], &opts(8)).unwrap();
    let k = cr.get(StructureKind::K).unwrap();
    assert!(k.verdict.holds(), "{:?}", k.verdict);
    assert!(k.max_residual < 1e-12);
}

#[test]
fn flat_metric_is_vacuously_excluded() {
    let flat = diag(&["x", "y", "z"], &["1", "1", "1"]);
    let all = [StructureKind::K, StructureKind::GK, StructureKind::HGK, StructureKind::WGK, StructureKind::SGK];
    let cr = classify(&flat, &all, &opts(4)).unwrap();
    for s in &cr.structures {
        assert_eq!(s.verdict, Verdict::VacuouslyExcluded, "{:?}", s.structure);
    }
}

#[test]
fn locally_symmetric_space_is_excluded_not_recurrent() {
    let h = diag(&["x", "y", "z"], &["1", "exp(2*x)", "exp(2*x)"]);
    let cr = classify(&h, &[StructureKind::K], &opts(4)).unwrap();
    assert_ne!(cr.verdict(StructureKind::K), Some(Verdict::Fails));
}

#[test]
fn olszak_theta_vanishes_on_the_example_base() {
    let ol = olszak_degeneracy_check(&base_metric(), &opts(8)).unwrap();
    assert!(ol.consistent, "{}", ol.note);
    assert!(ol.points.iter().any(|p| p.solved));
    for p in ol.points.iter().filter(|p| p.solved) {
        assert!(p.theta_max_abs.unwrap() < 1e-12);
    }
}

#[test]
fn constant_curvature_gives_half_the_sectional_curvature() {
    // R = c·½ g∧g with c = κ/(n(n−1)) = 1 for this patch, so N₁ = ½ once E is dropped.
    let h = diag(&["x", "y", "z"], &["1", "exp(2*x)", "exp(2*x)"]);
    let p = PointValues::new(&[RBig::from(1) / RBig::from(3), RBig::from(0), RBig::from(0)]);
    let g = warpcurv::symexpr::guard();
    let r = h.riemann().eval(&p, &g).unwrap();
    let gm = h.g().eval(&p, &g).unwrap();
    let zero = Tensor::<Real>::zeros(gm.shape());
    let fit = roter_decompose(&r, &gm, &zero, None).unwrap();
    assert!((fit.coefficients[0].to_f64() - 0.5).abs() < 1e-30);
    assert!(fit.residual.to_f64() < 1e-30);
}

#[test]
fn three_dimensional_metrics_are_roter_type() {
    let rep = roter_check(&base_metric(), 6, None, TOL_REL).unwrap();
    assert!(rep.holds, "{}", rep.max_residual);
}

#[test]
fn structure_names_parse() {
    for (s, k) in [("k", StructureKind::K), ("concircular", StructureKind::ConcircularRecurrent), ("sgk", StructureKind::SGK)] {
        assert_eq!(StructureKind::parse(s), Some(k));
    }
    assert_eq!(StructureKind::parse("nope"), None);
}
