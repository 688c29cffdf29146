use warpcurv::geometry::MetricField;
use warpcurv::recurrence::{OneFormField, Verdict, TOL_ABS, TOL_REL};
use warpcurv::symexpr::{parse_expr, Chart, Expr, ZeroTest, DEFAULT_SEED};
use warpcurv::theorems::example1::{
    base_times_plane_spec, discriminator_spec, printed_base_pi, printed_forms, unit_psi,
    warped_spec,
};
use warpcurv::theorems::{
    check_corollary_variant, check_equivalence, check_theorem41, corollary_consequence_report,
    identify_readings, perturbation_sweep, weyl, CorollaryVariant, FormSet, FormsSource,
    TheoremError, CONDITION_LABELS,
};
use warpcurv::warped::WarpedSpec;

fn diag(names: &[&str], comps: &[&str]) -> MetricField {
    let chart = Chart::new(names).unwrap();
    let d: Vec<Expr> = comps.iter().map(|s| parse_expr(s).unwrap()).collect();
    MetricField::diagonal(chart, &d).unwrap()
}

fn forms_from(chart: &Chart, pi: &[&str]) -> FormSet {
    let comps: Vec<Expr> = pi.iter().map(|s| parse_expr(s).unwrap()).collect();
    FormSet {
        pi: OneFormField::from_exprs(chart.clone(), &comps).unwrap(),
        phi: OneFormField::zero(chart.clone()),
        psi: OneFormField::zero(chart.clone()),
        theta: OneFormField::zero(chart.clone()),
    }
}

fn one() -> Expr {
    Expr::int(1)
}

/// f ≡ 1, flat base, the example's base as fiber.
fn recurrent_fiber_product() -> WarpedSpec {
    WarpedSpec::new(
        diag(&["u1", "u2"], &["1", "1"]),
        diag(&["x1", "x2", "x3"], &["exp(x2)", "exp(x1)", "1"]),
        one(),
    )
    .unwrap()
}

/// f ≡ 1, the example's base times a flat plane.
fn recurrent_base_product() -> WarpedSpec {
    WarpedSpec::new(
        diag(&["x1", "x2", "x3"], &["exp(x2)", "exp(x1)", "1"]),
        diag(&["y1", "y2"], &["1", "1"]),
        one(),
    )
    .unwrap()
}

const BASE_PI: [&str; 3] = ["-exp(x2)/(exp(x1) + exp(x2))", "-exp(x1)/(exp(x1) + exp(x2))", "0"];

#[test]
fn example1_forms_satisfy_all_eight_conditions() {
    let rep = check_theorem41(&warped_spec(), &printed_forms(&unit_psi(2)), &ZeroTest::default()).unwrap();
    assert_eq!(rep.conditions.len(), 8);
    for (c, l) in rep.conditions.iter().zip(CONDITION_LABELS) {
        assert_eq!(c.label, l);
        assert!(c.holds, "{c:?}");
    }
    assert!(rep.holds);
}

#[test]
fn example1_perturbed_phi_fails_a_mixed_or_fiber_condition() {
    let spec = warped_spec();
    let mut forms = printed_forms(&unit_psi(2));
    let chart = spec.chart().clone();
    let mut comps = forms.phi.to_exprs();
    comps[0] = comps[0].clone() + one();
    forms.phi = OneFormField::from_exprs(chart, &comps).unwrap();
    let rep = check_theorem41(&spec, &forms, &ZeroTest::default()).unwrap();
    let failing = rep.failing();
    assert!(failing.contains(&"2(i)") || failing.contains(&"3(i)"), "{failing:?}");
}

#[test]
fn flat_product_with_zero_forms_holds_trivially() {
    let spec = WarpedSpec::new(diag(&["a", "b"], &["1", "1"]), diag(&["c", "d"], &["1", "1"]), one()).unwrap();
    let forms = forms_from(spec.chart(), &["0", "0", "0", "0"]);
    let rep = check_theorem41(&spec, &forms, &ZeroTest::default()).unwrap();
    assert!(rep.holds);
    assert!(rep.conditions.iter().all(|c| c.verdict == "ProvedZero"));
}

#[test]
fn forms_on_wrong_chart_rejected() {
    let spec = warped_spec();
    let forms = forms_from(&Chart::new(&["x1", "x2", "x3"]).unwrap(), &["0", "0", "0"]);
    let err = check_theorem41(&spec, &forms, &ZeroTest::default()).unwrap_err();
    assert_eq!(err, TheoremError::FormsChart { expected: 4, got: 3 });
}

#[test]
fn readings_are_decided_on_the_discriminator() {
    let found = identify_readings(&discriminator_spec(), 6, DEFAULT_SEED).unwrap();
    for f in &found {
        println!("{} / {}: matches={} gap={:.3e}", f.quantity, f.reading, f.matches, f.max_mismatch);
        let expect = f.reading == "verified" || f.reading == "K corollary";
        assert_eq!(f.matches, expect, "{f:?}");
    }
}

#[test]
fn example1_equivalence_with_given_forms() {
    let spec = warped_spec();
    let forms = printed_forms(&unit_psi(2));
    let rep = check_equivalence(&spec, FormsSource::Given(&forms), 8, DEFAULT_SEED, TOL_REL).unwrap();
    assert!(rep.agree, "{rep:#?}");
    assert_eq!(rep.both_hold, 8);
}

#[test]
fn example1_equivalence_with_recovered_forms() {
    let rep = check_equivalence(&warped_spec(), FormsSource::Recovered, 8, DEFAULT_SEED, TOL_REL).unwrap();
    assert!(rep.agree);
    assert_eq!(rep.both_hold, 8);
}

#[test]
fn non_sgk_instance_fails_on_both_sides() {
    let rep = check_equivalence(&discriminator_spec(), FormsSource::Recovered, 6, DEFAULT_SEED, TOL_REL).unwrap();
    assert!(rep.agree, "{rep:#?}");
    assert_eq!(rep.both_fail, 6);
}

#[test]
fn recurrent_product_agrees() {
    let rep = check_equivalence(&recurrent_base_product(), FormsSource::Recovered, 6, DEFAULT_SEED, TOL_REL).unwrap();
    assert!(rep.agree);
    assert_eq!(rep.both_hold, 6);
}

#[test]
fn every_unit_perturbation_breaks_a_condition() {
    let spec = warped_spec();
    let sweep = perturbation_sweep(&spec, &printed_forms(&unit_psi(2)), 6, DEFAULT_SEED, TOL_REL).unwrap();
    assert_eq!(sweep.len(), 16);
    for p in &sweep {
        assert!(!p.failing.is_empty(), "{p:?}");
    }
}

#[test]
fn k_variant_on_promoted_base_holds_on_base_block() {
    let spec = warped_spec();
    let mut pi: Vec<&str> = BASE_PI.to_vec();
    pi.push("0");
    let forms = forms_from(spec.chart(), &pi);
    let rep = check_corollary_variant(&spec, CorollaryVariant::K, &forms, &ZeroTest::default()).unwrap();
    assert!(rep.report.get("1(i)").unwrap().holds);
    assert!(rep.report.get("1(ii)").unwrap().holds);
    assert!(rep.coherent);
    // Π̄ does not make T recurrent here, so the whole variant fails.
    assert!(!rep.report.holds);
}

#[test]
fn hgk_variant_fails_on_example1() {
    let spec = warped_spec();
    let rep = check_corollary_variant(&spec, CorollaryVariant::HGK, &printed_forms(&unit_psi(2)), &ZeroTest::default()).unwrap();
    assert!(!rep.report.holds);
    assert!(rep.coherent);
    assert!(!rep.notes.is_empty());
}

#[test]
fn product_k_variant_holds_with_recurrent_base() {
    let spec = recurrent_base_product();
    let mut pi: Vec<&str> = BASE_PI.to_vec();
    pi.extend(["0", "0"]);
    let forms = forms_from(spec.chart(), &pi);
    for v in [CorollaryVariant::ProductK, CorollaryVariant::K, CorollaryVariant::ProductSGK] {
        let rep = check_corollary_variant(&spec, v, &forms, &ZeroTest::default()).unwrap();
        assert!(rep.report.holds, "{v:?}: {:?}", rep.report.failing());
        assert!(rep.coherent);
    }
}

#[test]
fn product_variant_requires_unit_warping() {
    let spec = warped_spec();
    let err = check_corollary_variant(&spec, CorollaryVariant::ProductK, &printed_forms(&unit_psi(2)), &ZeroTest::default())
        .unwrap_err();
    assert_eq!(err, TheoremError::NotProduct("ProductK"));
}

#[test]
fn k_variant_coherent_with_theorem_across_instances() {
    let cases: Vec<(WarpedSpec, Vec<&str>)> = vec![
        (warped_spec(), vec!["0", "0", "0", "0"]),
        (discriminator_spec(), vec!["1", "0", "0", "1"]),
        (recurrent_base_product(), [BASE_PI.to_vec(), vec!["0", "0"]].concat()),
    ];
    for (spec, pi) in cases {
        let forms = forms_from(spec.chart(), &pi);
        let rep = check_corollary_variant(&spec, CorollaryVariant::K, &forms, &ZeroTest::default()).unwrap();
        assert!(rep.coherent, "{:?}", rep.notes);
    }
}

#[test]
fn example1_consequences_are_trivial_on_the_line_fiber() {
    let spec = warped_spec();
    let forms = printed_forms(&unit_psi(2));
    let rep = corollary_consequence_report(&spec, FormsSource::Given(&forms), 8, DEFAULT_SEED, TOL_REL, TOL_ABS).unwrap();
    assert_eq!(rep.structure, "SGK");
    for c in &rep.consequences {
        if c.item.starts_with("fiber") {
            assert_ne!(c.verdict, Verdict::Fails, "{c:?}");
        }
    }
}

#[test]
fn fiber_constant_curvature_where_df_nonzero() {
    let spec = base_times_plane_spec();
    let rep = corollary_consequence_report(&spec, FormsSource::Recovered, 8, DEFAULT_SEED, TOL_REL, TOL_ABS).unwrap();
    let c = rep.consequences.iter().find(|c| c.item == "fiber constant curvature").unwrap();
    assert_eq!(c.verdict, Verdict::Holds);
    assert!(c.points_in_region > 0);
}

#[test]
fn recurrent_product_with_moving_fiber_form_has_flat_base() {
    let spec = recurrent_fiber_product();
    let mut pi = vec!["0", "0"];
    pi.extend(BASE_PI);
    let forms = forms_from(spec.chart(), &pi);
    let rep = corollary_consequence_report(&spec, FormsSource::Given(&forms), 8, DEFAULT_SEED, TOL_REL, TOL_ABS).unwrap();
    assert_eq!(rep.structure, "K");
    for item in ["base flat", "T vanishes", "P vanishes", "base recurrent", "fiber recurrent"] {
        let c = rep.consequences.iter().find(|c| c.item == item).unwrap();
        assert_eq!(c.verdict, Verdict::Holds, "{c:?}");
    }
}

#[test]
fn weyl_vanishes_for_conformally_flat_metric() {
    let m = diag(&["a", "b", "c", "d"], &["exp(a)", "exp(a)", "exp(a)", "exp(a)"]);
    let w = weyl(m.g(), m.ricci(), m.riemann(), m.scalar_curvature());
    assert!(w.is_exact_zero());
    let base = printed_base_pi();
    assert_eq!(base.comps().len(), 3);
}
