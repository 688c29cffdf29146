//! The four-dimensional SGK example: base `e^{x2}dx1² + e^{x1}dx2² + dx3²`,
//! a one-dimensional fiber with coordinate x4, and `f = e^{x3}`. Its printed
//! curvature values and Ψ-parametrized 1-forms serve as golden data.

use dashu_ratio::RBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::conditions::FormSet;
use super::{
    check_equivalence, check_theorem41, identify_readings, perturbation_sweep, ConditionReport,
    EquivalenceReport, FormsSource, Perturbation, ReadingFinding, TheoremError,
};
use crate::geometry::MetricField;
use crate::knproducts::kn;
use crate::recurrence::{
    classify, recurrent_form_symbolic, solve_with_fixed, ClassificationReport, ClassifyOptions,
    CurvatureBundle, OneFormField, StructureKind, TOL_REL,
};
use crate::symexpr::{
    guard, is_zero_ratfunc, parse_expr, Chart, Expr, PointValues, RatFunc, Real, SampleBox,
    ZeroTest, ZeroVerdict,
};
use crate::tensor::{indices, Tensor};
use crate::warped::WarpedSpec;

fn diag(names: &[&str], comps: &[&str]) -> MetricField {
    let chart = Chart::new(names).expect("valid chart");
    let d: Vec<Expr> = comps.iter().map(|s| parse_expr(s).expect("valid literal")).collect();
    MetricField::diagonal(chart, &d).expect("nondegenerate literal metric")
}

pub fn base_metric() -> MetricField {
    diag(&["x1", "x2", "x3"], &["exp(x2)", "exp(x1)", "1"])
}

pub fn warped_spec() -> WarpedSpec {
    WarpedSpec::new(base_metric(), diag(&["x4"], &["1"]), parse_expr("exp(x3)").unwrap())
        .expect("valid warped product")
}

/// A 2+2 warped product with nonconstant P on which every printed reading is decided.
pub fn discriminator_spec() -> WarpedSpec {
    WarpedSpec::new(
        diag(&["x1", "x2"], &["1 + exp(x2)", "2 + exp(x1)"]),
        diag(&["x3", "x4"], &["exp(x4)", "1 + exp(x3)"]),
        parse_expr("exp(x1)").unwrap(),
    )
    .expect("valid warped product")
}

/// The example's base times a flat plane, `f = e^{x3}`: SGK with `df ≠ 0`
/// and a two-dimensional fiber.
pub fn base_times_plane_spec() -> WarpedSpec {
    WarpedSpec::new(
        base_metric(),
        diag(&["x4", "x5"], &["1", "1"]),
        parse_expr("exp(x3)").unwrap(),
    )
    .expect("valid warped product")
}

pub type Psi = [RBig; 4];

pub fn unit_psi(k: usize) -> Psi {
    std::array::from_fn(|i| if i == k { RBig::ONE } else { RBig::ZERO })
}

/// A seeded Ψ with small rational entries.
pub fn random_psi(seed: u64) -> Psi {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::array::from_fn(|_| {
        let mut num = 0;
        while num == 0 {
            num = rng.gen_range(-9i64..=9);
        }
        RBig::from(num) / RBig::from(rng.gen_range(1i64..=9))
    })
}

/// The four unit vectors followed by one seeded rational Ψ.
pub fn psi_cases(seed: u64) -> Vec<Psi> {
    let mut v: Vec<Psi> = (0..4).map(unit_psi).collect();
    v.push(random_psi(seed));
    v
}

pub fn psi_label(psi: &Psi) -> String {
    let parts: Vec<String> = psi.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

const PI_TEMPLATES: [&str; 4] = [
    "(P1*exp(x1)*(exp(x2) - 2) + 2*P1*cosh(x1 - x2) - (2*P1 + 1)*exp(x2) + 2*P1) / (2*(exp(x1) + exp(x2)))",
    "(P2*(exp(x1) - 2)*exp(x2) + 2*P2*cosh(x1 - x2) - (2*P2 + 1)*exp(x1) + 2*P2) / (2*(exp(x1) + exp(x2)))",
    "P3*exp(-x1 - x2)*(-exp(x1 + x2) + exp(x1) + exp(x2))^2 / (2*(exp(x1) + exp(x2)))",
    "P4*exp(-x1 - x2)*(-exp(x1 + x2) + exp(x1) + exp(x2))^2 / (2*(exp(x1) + exp(x2)))",
];

const PHI_TEMPLATES: [&str; 4] = [
    "(P1*(-exp(x1 + x2)) + 2*P1*cosh(x1 - x2) + 2*P1 + exp(x2)) / (-2*cosh(x1 - x2) + sinh(x1) + cosh(x1) + sinh(x2) + cosh(x2) - 2)",
    "exp(x1)*((P2*exp(x1) + 1)/(exp(x1) + exp(x2)) - P2 + 1/((exp(x1) - 1)*exp(x2) - exp(x1))) - P2",
    "-P3*(exp(x1 + x2) + exp(x1) + exp(x2))/(exp(x1) + exp(x2))",
    "-P4*(exp(x1 + x2) + exp(x1) + exp(x2))/(exp(x1) + exp(x2))",
];

const THETA_TEMPLATES: [&str; 4] = [
    "(-P1*exp(x1 - x2) + 2*P1*exp(x2)*sinh(x1) - 2*P1 + exp(x2)) / (16*(-exp(x1 + x2) + exp(x1) + exp(x2)))",
    "(1/16)*(-P2*exp(-x1) - P2*exp(-x2) - P2 + exp(x1)/(-exp(x1 + x2) + exp(x1) + exp(x2)))",
    "-(1/16)*P3*exp(-x1 - x2)*(exp(x1 + x2) + exp(x1) + exp(x2))",
    "-(1/16)*P4*exp(-x1 - x2)*(exp(x1 + x2) + exp(x1) + exp(x2))",
];

fn substitute(template: &str, psi: &Psi) -> String {
    let mut s = template.to_string();
    for (i, v) in psi.iter().enumerate() {
        s = s.replace(&format!("P{}", i + 1), &format!("({v})"));
    }
    s
}

fn form_from(templates: &[&str; 4], psi: &Psi, chart: &Chart) -> OneFormField {
    let comps: Vec<Expr> = templates
        .iter()
        .map(|t| parse_expr(&substitute(t, psi)).expect("template parses"))
        .collect();
    OneFormField::from_exprs(chart.clone(), &comps).expect("template is a rational function")
}

/// The printed Π, Φ, Θ families with Ψ substituted, on the chart x1..x4.
pub fn printed_forms(psi: &Psi) -> FormSet {
    let chart = warped_spec().chart().clone();
    let psi_comps: Vec<Expr> = psi
        .iter()
        .map(|v| parse_expr(&format!("({v})")).expect("rational literal"))
        .collect();
    FormSet {
        pi: form_from(&PI_TEMPLATES, psi, &chart),
        phi: form_from(&PHI_TEMPLATES, psi, &chart),
        psi: OneFormField::from_exprs(chart.clone(), &psi_comps).expect("constants"),
        theta: form_from(&THETA_TEMPLATES, psi, &chart),
    }
}

/// The printed recurrence form of the base.
pub fn printed_base_pi() -> OneFormField {
    let comps = [
        "-exp(x2)/(exp(x1) + exp(x2))",
        "-exp(x1)/(exp(x1) + exp(x2))",
        "0",
    ]
    .map(|s| parse_expr(s).unwrap());
    OneFormField::from_exprs(base_metric().chart().clone(), &comps).unwrap()
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenValue {
    pub quantity: &'static str,
    pub expected: &'static str,
    pub verdict: &'static str,
}

fn compare_value(quantity: &'static str, expected: &'static str, computed: &RatFunc, chart: &Chart) -> GoldenValue {
    let e = parse_expr(expected)
        .expect("golden literal parses")
        .to_ratfunc(chart)
        .expect("golden literal is rational");
    let v = is_zero_ratfunc(&computed.sub(&e), chart, &ZeroTest::default());
    GoldenValue {
        quantity,
        expected,
        verdict: v.label(),
    }
}

/// Printed curvature values against the computation, as symbolic differences.
pub fn golden_values() -> Vec<GoldenValue> {
    let base = base_metric();
    let spec = warped_spec();
    let m = spec.metric();
    let c = m.chart();
    let (g, s, r, dr) = (m.g(), m.ricci(), m.riemann(), m.nabla_riemann());
    let gg = kn(g, g);
    let gs = kn(g, s);
    let ss = kn(s, s);
    vec![
        compare_value("R̄_1212", "-(exp(x1) + exp(x2))/4", base.riemann().get(&[0, 1, 0, 1]), base.chart()),
        compare_value("R_1212", "-(exp(x1) + exp(x2))/4", r.get(&[0, 1, 0, 1]), c),
        compare_value("R_3434", "-exp(x3)/4", r.get(&[2, 3, 2, 3]), c),
        compare_value("S_11", "(exp(x2 - x1) + 1)/4", s.get(&[0, 0]), c),
        compare_value("S_22", "(exp(x1 - x2) + 1)/4", s.get(&[1, 1]), c),
        compare_value("S_33", "1/4", s.get(&[2, 2]), c),
        compare_value("S_44", "exp(x3)/4", s.get(&[3, 3]), c),
        compare_value("R_1212,1", "exp(x2)/4", dr.get(&[0, 1, 0, 1, 0]), c),
        compare_value("R_1212,2", "exp(x1)/4", dr.get(&[0, 1, 0, 1, 1]), c),
        compare_value("(g∧g)_1212", "-2*exp(x1 + x2)", gg.get(&[0, 1, 0, 1]), c),
        compare_value("(g∧g)_3434", "-2*exp(x3)", gg.get(&[2, 3, 2, 3]), c),
        compare_value("(g∧S)_1212", "(-exp(x1) - exp(x2))/2", gs.get(&[0, 1, 0, 1]), c),
        compare_value("(g∧S)_3434", "-exp(x3)/2", gs.get(&[2, 3, 2, 3]), c),
        compare_value("(S∧S)_1212", "(-cosh(x1 - x2) - 1)/4", ss.get(&[0, 1, 0, 1]), c),
        compare_value("(S∧S)_1414", "-exp(x3)*(exp(x2 - x1) + 1)/8", ss.get(&[0, 3, 0, 3]), c),
        compare_value("(S∧S)_3434", "-exp(x3)/8", ss.get(&[2, 3, 2, 3]), c),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct PrintedComponent {
    pub quantity: &'static str,
    pub printed: &'static str,
    pub computed: String,
    pub agrees: bool,
}

/// The printed base Ricci components, which disagree with the full-metric ones.
pub fn printed_base_ricci() -> Vec<PrintedComponent> {
    let base = base_metric();
    let c = base.chart();
    let s = base.ricci();
    [("S̄_11", "(1 + exp(x2 - x2))/4", [0, 0]), ("S̄_22", "exp(x1 - x2)/4", [1, 1])]
        .into_iter()
        .map(|(quantity, printed, idx)| {
            let comp = s.get(&idx);
            let v = compare_value(quantity, printed, comp, c);
            PrintedComponent {
                quantity,
                printed,
                computed: comp.to_expr(c).to_string(),
                agrees: v.verdict != "NonZero",
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseRecurrence {
    /// Per component of the closed-form Π̄ minus the printed one.
    pub closed_form: Vec<&'static str>,
    /// `∇̄R̄ − Π̄⊗R̄` with the printed Π̄, all components.
    pub printed_residual: &'static str,
    pub samples: usize,
    pub max_point_residual: f64,
    /// Largest gap between pointwise solves and the printed Π̄.
    pub max_point_gap: f64,
}

pub fn base_recurrence(samples: usize, seed: u64) -> Result<BaseRecurrence, TheoremError> {
    let base = base_metric();
    let c = base.chart();
    let printed = printed_base_pi();
    let cfg = ZeroTest::default();
    let closed_form = match recurrent_form_symbolic(&base) {
        Some((pi, _)) => pi
            .comps()
            .iter()
            .zip(printed.comps())
            .map(|(a, b)| is_zero_ratfunc(&a.sub(b), c, &cfg).label())
            .collect(),
        None => vec!["NonZero"; 3],
    };
    let resid = base.nabla_riemann().sub(&base.riemann().outer_last(printed.comps()));
    let printed_residual = worst_verdict(&resid, c, &cfg);

    let bundle = CurvatureBundle::new(&base, None);
    let pts = bundle.sample(samples, seed)?;
    let gd = guard();
    let (res, gap) = pts
        .par_iter()
        .map(|p| {
            let sol = p.solve(StructureKind::K).expect("K basis");
            let want = printed.eval(&PointValues::new(&p.point), &gd).expect("denominator positive");
            let gap = sol
                .form(0)
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).abs())
                .fold(Real::zero(), Real::max);
            (sol.max_residual(), gap)
        })
        .reduce(
            || (Real::zero(), Real::zero()),
            |a, b| (a.0.max(b.0), a.1.max(b.1)),
        );
    Ok(BaseRecurrence {
        closed_form,
        printed_residual,
        samples,
        max_point_residual: res.to_f64(),
        max_point_gap: gap.to_f64(),
    })
}

fn worst_verdict(t: &Tensor<RatFunc>, chart: &Chart, cfg: &ZeroTest) -> &'static str {
    let mut worst = "ProvedZero";
    for idx in indices(t.shape()) {
        let x = t.get(&idx);
        if x.is_zero() {
            continue;
        }
        match is_zero_ratfunc(x, chart, cfg) {
            ZeroVerdict::ProvedZero => {}
            ZeroVerdict::NumericallyZero { .. } => worst = "NumericallyZero",
            ZeroVerdict::NonZero { .. } => return "NonZero",
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiCase {
    pub psi: String,
    /// `∇R − Π⊗R − Φ⊗S∧S − Ψ⊗g∧S − Θ⊗g∧g` with the printed families.
    pub symbolic: &'static str,
    pub samples: usize,
    /// Relative residual of the solve with Ψ pinned.
    pub max_residual: f64,
    pub min_rank: usize,
    /// Largest gap between solved (Π, Φ, Θ) and the printed families.
    pub max_form_gap: f64,
}

/// Check one member of the family: symbolically, and by pointwise solves with Ψ fixed.
pub fn psi_case(psi: &Psi, samples: usize, seed: u64) -> Result<PsiCase, TheoremError> {
    let spec = warped_spec();
    let m = spec.metric();
    let forms = printed_forms(psi);
    let resid = super::sgk_residual(m.g(), m.ricci(), m.riemann(), m.nabla_riemann(), &forms.symbolic());
    let symbolic = worst_verdict(&resid, m.chart(), &ZeroTest::default());

    let bundle = CurvatureBundle::new(m, None);
    let gd = guard();
    let mut sb = SampleBox::new(seed);
    let mut pts = Vec::new();
    let mut attempts = 0;
    while pts.len() < samples {
        if attempts >= 1000 * samples.max(1) {
            return Err(TheoremError::NoSamplePoints { attempts });
        }
        attempts += 1;
        let x = sb.next_point(4);
        let pv = PointValues::new(&x);
        if let (Ok(pt), Ok(fv)) = (bundle.at(&x), forms.eval(&pv, &gd)) {
            pts.push((pt, fv));
        }
    }
    let out: Vec<(Real, usize, Real)> = pts
        .par_iter()
        .map(|(pt, fv)| {
            let basis = pt.basis(StructureKind::SGK).expect("SGK basis");
            let fixed = vec![None, None, Some(fv.psi.clone()), None];
            let sol = solve_with_fixed(&pt.dr_slices(), &basis, &fixed).expect("shapes agree");
            let mut gap = Real::zero();
            for (b, want) in [(0, &fv.pi), (1, &fv.phi), (3, &fv.theta)] {
                for (a, w) in sol.form(b).iter().zip(want) {
                    gap = gap.max((a - w).abs());
                }
            }
            (sol.max_residual(), sol.rank, gap)
        })
        .collect();
    Ok(PsiCase {
        psi: psi_label(psi),
        symbolic,
        samples,
        max_residual: out.iter().map(|o| o.0.clone()).fold(Real::zero(), Real::max).to_f64(),
        min_rank: out.iter().map(|o| o.1).min().unwrap_or(0),
        max_form_gap: out.iter().map(|o| o.2.clone()).fold(Real::zero(), Real::max).to_f64(),
    })
}

/// A printed statement that disagrees with the computation, or a resolved ambiguity.
#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub printed: String,
    pub verified: String,
    pub evidence: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Example1Report {
    pub golden: Vec<GoldenValue>,
    pub printed_base_ricci: Vec<PrintedComponent>,
    pub base_recurrence: BaseRecurrence,
    pub psi_cases: Vec<PsiCase>,
    pub classification: ClassificationReport,
    /// The eight conditions with Ψ = (0, 0, 1, 0).
    pub theorem: ConditionReport,
    pub equivalence: EquivalenceReport,
    pub perturbations: Vec<Perturbation>,
    /// Printed readings tested on the example itself.
    pub readings_example: Vec<ReadingFinding>,
    /// Printed readings tested on the 2+2 discriminator.
    pub readings_discriminator: Vec<ReadingFinding>,
    pub crosscheck: crate::warped::CrosscheckReport,
    pub discrepancies: Vec<Discrepancy>,
}

impl Example1Report {
    pub fn golden_ok(&self) -> bool {
        self.golden.iter().all(|g| g.verdict == "ProvedZero")
    }

    pub fn ok(&self) -> bool {
        let tol = 1e-12;
        self.golden_ok()
            && self.base_recurrence.closed_form.iter().all(|v| *v == "ProvedZero")
            && self.base_recurrence.max_point_residual < tol
            && self.psi_cases.iter().all(|c| c.symbolic != "NonZero" && c.max_residual < tol)
            && self.classification.verdict(StructureKind::SGK).is_some_and(|v| v.holds())
            && self.classification.verdict(StructureKind::HGK) == Some(crate::recurrence::Verdict::Fails)
            && self.classification.verdict(StructureKind::WGK) == Some(crate::recurrence::Verdict::Fails)
            && self.theorem.holds
            && self.equivalence.agree
            && self.perturbations.iter().all(|p| !p.failing.is_empty())
            && self.crosscheck.all_zero()
    }
}

fn reading_discrepancies(findings: &[ReadingFinding], instance: &str) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for q in ["2(i)", "2(ii)", "4(ii)", "fiber 1-forms"] {
        let group: Vec<&ReadingFinding> = findings.iter().filter(|f| f.quantity == q).collect();
        let verified: Vec<&&ReadingFinding> = group.iter().filter(|f| f.matches).collect();
        for f in group.iter().filter(|f| !f.matches) {
            out.push(Discrepancy {
                quantity: if q.starts_with("fiber") { q.to_string() } else { format!("condition {q}") },
                printed: format!("{}: {}", f.reading, f.statement),
                verified: verified
                    .iter()
                    .map(|v| v.statement)
                    .collect::<Vec<_>>()
                    .join(" | "),
                evidence: format!(
                    "differs from the direct residual block on {instance} by {:.3e} (relative)",
                    f.max_mismatch
                ),
            });
        }
    }
    out
}

/// Run the whole golden suite.
pub fn run(samples: usize, seed: u64) -> Result<Example1Report, TheoremError> {
    let spec = warped_spec();
    let cfg = ZeroTest { seed, ..ZeroTest::default() };
    let golden = golden_values();
    let printed_base_ricci = printed_base_ricci();
    let base_recurrence = base_recurrence(samples, seed)?;
    let psi_cases = psi_cases(seed)
        .iter()
        .map(|psi| psi_case(psi, samples, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let opts = ClassifyOptions { samples, seed, ..ClassifyOptions::default() };
    let classification = classify(
        spec.metric(),
        &[StructureKind::K, StructureKind::HGK, StructureKind::WGK, StructureKind::SGK],
        &opts,
    )?;
    let forms = printed_forms(&unit_psi(2));
    let theorem = check_theorem41(&spec, &forms, &cfg)?;
    let equivalence = check_equivalence(&spec, FormsSource::Given(&forms), samples, seed, TOL_REL)?;
    let perturbations = perturbation_sweep(&spec, &forms, samples, seed, TOL_REL)?;
    let readings_example = identify_readings(&spec, samples, seed)?;
    let readings_discriminator = identify_readings(&discriminator_spec(), samples, seed)?;
    let crosscheck = crate::warped::crosscheck(&spec, &cfg);

    let mut discrepancies: Vec<Discrepancy> = printed_base_ricci
        .iter()
        .filter(|p| !p.agrees)
        .map(|p| Discrepancy {
            quantity: p.quantity.to_string(),
            printed: p.printed.to_string(),
            verified: p.computed.clone(),
            evidence: "symbolic difference is NonZero on the base metric".into(),
        })
        .collect();
    let disc = discriminator_spec();
    for f in crate::warped::crosscheck(&disc, &cfg).printed.iter().filter(|f| !f.printed_agrees) {
        discrepancies.push(Discrepancy {
            quantity: f.quantity.to_string(),
            printed: f.printed.to_string(),
            verified: f.verified.to_string(),
            evidence: match crosscheck.printed.iter().find(|g| g.quantity == f.quantity) {
                Some(g) if !g.printed_agrees => {
                    "NonZero against the direct computation on this example and on the 2+2 discriminator".into()
                }
                _ => "NonZero against the direct computation on the 2+2 discriminator; agrees on this example".into(),
            },
        });
    }
    discrepancies.extend(reading_discrepancies(&readings_discriminator, "the 2+2 discriminator"));
    Ok(Example1Report {
        golden,
        printed_base_ricci,
        base_recurrence,
        psi_cases,
        classification,
        theorem,
        equivalence,
        perturbations,
        readings_example,
        readings_discriminator,
        crosscheck,
        discrepancies,
    })
}
