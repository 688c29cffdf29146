//! The warped-product characterization of SGK structures: eight block
//! conditions on base and fiber data, their agreement with the direct SGK
//! solve, and the specializations to K, HGK, WGK and f ≡ 1 products.

mod conditions;
mod consequences;
mod corollary;
pub mod example1;

use dashu_ratio::RBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::recurrence::{
    CurvatureBundle, PointSolve, PointTensors, RecurrenceError, StructureKind, RESIDUAL_FLOOR,
};
use crate::symexpr::{
    guard, is_zero_ratfunc, render_point, EvalError, PointValues, RatFunc, Real, SampleBox,
    ZeroTest, ZeroVerdict, DEFAULT_SEED,
};
use crate::tensor::{indices, Field, Tensor};
use crate::warped::{WarpedParts, WarpedSpec};

pub use conditions::{
    conditions, e_block_value, sgk_residual, Condition, ConditionReadings, FormName, FormSet,
    Forms, GgReading, CONDITION_LABELS,
};
pub use consequences::{
    corollary_consequence_report, weyl, Consequence, ConsequenceReport, FiberFormsReading,
};
pub use corollary::{check_corollary_variant, CorollaryVariant, VariantReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoremError {
    #[error("1-forms live on a {got}-dimensional chart, the warped product has dimension {expected}")]
    FormsChart { expected: usize, got: usize },
    #[error("variant {0} requires f ≡ 1")]
    NotProduct(&'static str),
    #[error("no sample point where metric, warping data and 1-forms all evaluate ({attempts} draws)")]
    NoSamplePoints { attempts: usize },
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult {
    pub label: &'static str,
    /// `ProvedZero`, `NumericallyZero` or `NonZero`.
    pub verdict: &'static str,
    pub holds: bool,
    pub max_abs: f64,
    /// First failing component (1-based block indices) and the witness point.
    pub offending: Option<(Vec<usize>, Vec<(String, String)>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub readings: ConditionReadings,
    pub conditions: Vec<ConditionResult>,
    pub samples: usize,
    pub seed: u64,
}

impl ConditionReport {
    pub fn get(&self, label: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.label == label)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.conditions.iter().filter(|c| !c.holds).map(|c| c.label).collect()
    }
}

/// Zero-test every component of one residual tensor.
pub(crate) fn test_tensor(
    label: &'static str,
    t: &Tensor<RatFunc>,
    spec: &WarpedSpec,
    cfg: &ZeroTest,
) -> ConditionResult {
    let mut proved = true;
    let mut max_abs: f64 = 0.0;
    for idx in indices(t.shape()) {
        let x = t.get(&idx);
        if x.is_zero() {
            continue;
        }
        proved = false;
        match is_zero_ratfunc(x, spec.chart(), cfg) {
            ZeroVerdict::ProvedZero => {}
            ZeroVerdict::NumericallyZero { max_abs: m, .. } => max_abs = max_abs.max(m),
            ZeroVerdict::NonZero { witness, value } => {
                return ConditionResult {
                    label,
                    verdict: "NonZero",
                    holds: false,
                    max_abs: value.abs(),
                    offending: Some((idx.iter().map(|i| i + 1).collect(), witness)),
                }
            }
        }
    }
    ConditionResult {
        label,
        verdict: if proved { "ProvedZero" } else { "NumericallyZero" },
        holds: true,
        max_abs,
        offending: None,
    }
}

pub(crate) fn report_from(
    conds: Vec<ConditionResult>,
    readings: ConditionReadings,
    cfg: &ZeroTest,
) -> ConditionReport {
    ConditionReport {
        holds: conds.iter().all(|c| c.holds),
        readings,
        conditions: conds,
        samples: cfg.samples,
        seed: cfg.seed,
    }
}

/// Evaluate the eight conditions symbolically with the verified readings.
pub fn check_theorem41(
    spec: &WarpedSpec,
    forms: &FormSet,
    cfg: &ZeroTest,
) -> Result<ConditionReport, TheoremError> {
    check_theorem41_with(spec, forms, ConditionReadings::default(), cfg)
}

pub fn check_theorem41_with(
    spec: &WarpedSpec,
    forms: &FormSet,
    readings: ConditionReadings,
    cfg: &ZeroTest,
) -> Result<ConditionReport, TheoremError> {
    forms.check_chart(spec.dim())?;
    let conds = conditions(spec.parts(), &forms.symbolic(), readings);
    let results = conds
        .par_iter()
        .map(|c| test_tensor(c.label, &c.residual, spec, cfg))
        .collect();
    Ok(report_from(results, readings, cfg))
}

/// One sample point with both the blockwise ingredients and the direct tensors.
#[derive(Debug, Clone)]
pub struct WarpedPoint {
    pub point: Vec<RBig>,
    pub parts: WarpedParts<Real>,
    pub direct: PointTensors,
    pub forms: Option<Forms<Real>>,
}

impl WarpedPoint {
    /// Frobenius norm of `∇R`, floored, used to make residuals relative.
    pub fn scale(&self) -> Real {
        self.direct.dr.norm().max(Real::from_f64(RESIDUAL_FLOOR))
    }
}

/// Seeded points where the metric, the warping data and the optional forms all evaluate.
pub fn sample_warped(
    spec: &WarpedSpec,
    forms: Option<&FormSet>,
    n: usize,
    seed: u64,
) -> Result<Vec<WarpedPoint>, TheoremError> {
    if let Some(fs) = forms {
        fs.check_chart(spec.dim())?;
    }
    let bundle = CurvatureBundle::new(spec.metric(), None);
    let parts = spec.parts();
    let gd = guard();
    let mut sb = SampleBox::new(seed);
    let max_attempts = 1000 * n.max(1);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    let at = |pt: &[RBig]| -> Result<WarpedPoint, EvalError> {
        let pv = PointValues::new(pt);
        Ok(WarpedPoint {
            point: pt.to_vec(),
            parts: parts.eval(&pv, &gd)?,
            direct: bundle.at(pt)?,
            forms: match forms {
                Some(fs) => Some(fs.eval(&pv, &gd)?),
                None => None,
            },
        })
    };
    while out.len() < n {
        if attempts >= max_attempts {
            return Err(TheoremError::NoSamplePoints { attempts });
        }
        attempts += 1;
        if let Ok(wp) = at(&sb.next_point(spec.dim())) {
            out.push(wp);
        }
    }
    Ok(out)
}

/// Largest entry of every condition residual at one point.
pub fn pointwise_conditions(
    wp: &WarpedPoint,
    forms: &Forms<Real>,
    rd: ConditionReadings,
) -> Vec<(&'static str, Real)> {
    conditions(&wp.parts, forms, rd)
        .into_iter()
        .map(|c| (c.label, c.residual.max_abs()))
        .collect()
}

/// Where the 1-forms compared against the direct SGK solve come from.
#[derive(Debug, Clone, Copy)]
pub enum FormsSource<'a> {
    Given(&'a FormSet),
    /// The minimum-norm SGK solve at each point.
    Recovered,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalencePoint {
    pub index: usize,
    pub point: Vec<(String, String)>,
    /// Relative residual of the SGK least-squares solve.
    pub sgk_residual: f64,
    pub sgk_holds: bool,
    /// `‖∇R − Π⊗R − Φ⊗S∧S − Ψ⊗g∧S − Θ⊗g∧g‖ / ‖∇R‖` with the compared forms.
    pub direct_residual: f64,
    pub direct_holds: bool,
    /// Largest condition entry divided by `‖∇R‖`.
    pub conditions_residual: f64,
    pub conditions_hold: bool,
    pub failing: Vec<&'static str>,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub source: &'static str,
    pub tol_rel: f64,
    pub agree: bool,
    pub both_hold: usize,
    pub both_fail: usize,
    pub points: Vec<EquivalencePoint>,
}

pub(crate) fn sgk_forms(sol: &PointSolve) -> Forms<Real> {
    Forms {
        pi: sol.form(0),
        phi: sol.form(1),
        psi: sol.form(2),
        theta: sol.form(3),
    }
}

fn direct_e(wp: &WarpedPoint, forms: &Forms<Real>) -> Tensor<Real> {
    let d = &wp.direct;
    sgk_residual(&d.g, &d.s, &d.r, &d.dr, forms)
}

/// Compare, at each sample point, the direct SGK solve on the assembled metric
/// with the eight conditions.
///
/// With given forms a point agrees when the conditions hold exactly when the
/// forms satisfy the SGK equation directly, and holding conditions imply a
/// solvable SGK system. With recovered forms the solve itself must hold exactly
/// when the conditions do.
pub fn check_equivalence(
    spec: &WarpedSpec,
    source: FormsSource<'_>,
    samples: usize,
    seed: u64,
    tol_rel: f64,
) -> Result<EquivalenceReport, TheoremError> {
    let given = match source {
        FormsSource::Given(fs) => Some(fs),
        FormsSource::Recovered => None,
    };
    let pts = sample_warped(spec, given, samples, seed)?;
    let tol = Real::from_f64(tol_rel);
    let chart = spec.chart();
    let points: Vec<EquivalencePoint> = pts
        .par_iter()
        .enumerate()
        .map(|(i, wp)| {
            let sol = wp.direct.solve(StructureKind::SGK)?;
            let sgk_res = sol.max_residual();
            let sgk_holds = sgk_res < tol;
            let forms = wp.forms.clone().unwrap_or_else(|| sgk_forms(&sol));
            let scale = wp.scale();
            let direct = &direct_e(wp, &forms).norm() / &scale;
            let conds = pointwise_conditions(wp, &forms, ConditionReadings::default());
            let worst = conds.iter().map(|c| c.1.clone()).fold(Real::zero(), Real::max);
            let cond_rel = &worst / &scale;
            let failing: Vec<&'static str> = conds
                .iter()
                .filter(|(_, v)| &(v / &scale) >= &tol)
                .map(|(l, _)| *l)
                .collect();
            let direct_holds = direct < tol;
            let conditions_hold = failing.is_empty();
            let agree = match source {
                FormsSource::Given(_) => {
                    direct_holds == conditions_hold && (!conditions_hold || sgk_holds)
                }
                FormsSource::Recovered => {
                    sgk_holds == conditions_hold && direct_holds == conditions_hold
                }
            };
            Ok(EquivalencePoint {
                index: i,
                point: render_point(chart, &wp.point),
                sgk_residual: sgk_res.to_f64(),
                sgk_holds,
                direct_residual: direct.to_f64(),
                direct_holds,
                conditions_residual: cond_rel.to_f64(),
                conditions_hold,
                failing,
                agree,
            })
        })
        .collect::<Result<_, TheoremError>>()?;
    Ok(EquivalenceReport {
        source: match source {
            FormsSource::Given(_) => "given",
            FormsSource::Recovered => "recovered",
        },
        tol_rel,
        agree: points.iter().all(|p| p.agree),
        both_hold: points.iter().filter(|p| p.conditions_hold && p.sgk_holds).count(),
        both_fail: points.iter().filter(|p| !p.conditions_hold && !p.sgk_holds).count(),
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Perturbation {
    pub form: &'static str,
    /// 1-based component on the product chart.
    pub component: usize,
    /// Conditions failing at some sample point after adding 1 to the component.
    pub failing: Vec<&'static str>,
    pub max_relative: f64,
}

/// Add 1 to each form component in turn and record which conditions fail.
pub fn perturbation_sweep(
    spec: &WarpedSpec,
    forms: &FormSet,
    samples: usize,
    seed: u64,
    tol_rel: f64,
) -> Result<Vec<Perturbation>, TheoremError> {
    let pts = sample_warped(spec, Some(forms), samples, seed)?;
    let tol = Real::from_f64(tol_rel);
    let n = spec.dim();
    let cases: Vec<(FormName, usize)> = FormName::ALL
        .iter()
        .flat_map(|&w| (0..n).map(move |m| (w, m)))
        .collect();
    Ok(cases
        .par_iter()
        .map(|&(w, m)| {
            let mut failing: Vec<&'static str> = Vec::new();
            let mut worst = Real::zero();
            for wp in &pts {
                let mut fs = wp.forms.clone().expect("sampled with forms");
                let slot = &mut fs.get_mut(w)[m];
                *slot = &*slot + &Real::one();
                let scale = wp.scale();
                for (label, v) in pointwise_conditions(wp, &fs, ConditionReadings::default()) {
                    let rel = &v / &scale;
                    if rel >= tol && !failing.contains(&label) {
                        failing.push(label);
                    }
                    worst = worst.max(rel);
                }
            }
            failing.sort_by_key(|l| CONDITION_LABELS.iter().position(|x| x == l));
            Perturbation {
                form: w.as_str(),
                component: m + 1,
                failing,
                max_relative: worst.to_f64(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReadingFinding {
    pub quantity: &'static str,
    pub reading: &'static str,
    pub statement: &'static str,
    /// Agrees with the corresponding block of the direct residual at every point.
    pub matches: bool,
    pub max_mismatch: f64,
}

fn random_forms(n: usize, rng: &mut ChaCha8Rng) -> Forms<Real> {
    let mut draw = || -> Vec<Real> {
        (0..n)
            .map(|_| Real::ratio(rng.gen_range(-16..=16), 8))
            .collect()
    };
    Forms {
        pi: draw(),
        phi: draw(),
        psi: draw(),
        theta: draw(),
    }
}

/// Largest relative gap between one condition under `rd` and its block of the
/// direct residual `E`.
fn block_gap(
    wp: &WarpedPoint,
    forms: &Forms<Real>,
    e: &Tensor<Real>,
    label: &str,
    rd: ConditionReadings,
) -> Real {
    let c = conditions(&wp.parts, forms, rd)
        .into_iter()
        .find(|c| c.label == label)
        .expect("known label");
    let scale = wp.scale();
    let mut worst = Real::zero();
    for idx in indices(c.residual.shape()) {
        let Some(ev) = e_block_value(label, wp.parts.p, e, &wp.parts.gf, &idx) else {
            continue;
        };
        let gap = &(c.residual.get(&idx) - &ev).abs() / &scale;
        worst = worst.max(gap);
    }
    worst
}

/// `∇̃R̃ − Π̃R̃ − A S̃∧S̃ − B g̃∧S̃ − C g̃∧g̃` scaled by f, for fiber forms (A, B, C)
/// built from the fiber parts of the product forms.
pub(crate) fn fiber_residual_scaled(
    w: &WarpedParts<Real>,
    forms: &Forms<Real>,
    reading: FiberFormsReading,
) -> Tensor<Real> {
    let fib = consequences::fiber_forms(w, forms, reading);
    let fr = sgk_residual(&w.gf, &w.sf, &w.rf, &w.drf, &fib);
    fr.scale(&w.f)
}

/// Decide each printed reading by comparing it with the direct residual at
/// random rational forms. Exact identities hold for any forms, so agreement at
/// random forms is the discriminating test.
pub fn identify_readings(
    spec: &WarpedSpec,
    samples: usize,
    seed: u64,
) -> Result<Vec<ReadingFinding>, TheoremError> {
    let pts = sample_warped(spec, None, samples, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf0f0);
    let with_forms: Vec<(WarpedPoint, Forms<Real>)> = pts
        .into_iter()
        .map(|wp| {
            let f = random_forms(spec.dim(), &mut rng);
            (wp, f)
        })
        .collect();
    let tol = Real::from_f64(1e-20);

    let cases: [(&str, &str, &str, ConditionReadings); 6] = [
        (
            "2(i)",
            "verified",
            "+½f²(PΠ̄ − dP) ⊗ g̃∧g̃",
            ConditionReadings::default(),
        ),
        (
            "2(i)",
            "theorem / HGK corollary",
            "−½f²(PΠ̄ + dP) ⊗ g̃∧g̃",
            ConditionReadings { gg_2i: GgReading::PlusDp, ..Default::default() },
        ),
        (
            "2(i)",
            "WGK corollary",
            "−½f²(PΠ̄ − dP) ⊗ g̃∧g̃",
            ConditionReadings { gg_2i: GgReading::MinusPiMinusDp, ..Default::default() },
        ),
        (
            "2(ii)",
            "verified",
            "(2QΦ̃ + fΨ̃) g̃∧S̃ and +½f²PΠ̃ g̃∧g̃",
            ConditionReadings::default(),
        ),
        (
            "2(ii)",
            "printed",
            "(QΦ̃ + fΨ̃) g̃∧S̃ and −½f²PΠ̃ g̃∧g̃",
            ConditionReadings { printed_2ii: true, ..Default::default() },
        ),
        (
            "4(ii)",
            "theorem",
            "df ⊗ R̃ = f² Θ P ⊗ G̃",
            ConditionReadings { theta_p_4ii: true, ..Default::default() },
        ),
    ];
    let mut out: Vec<ReadingFinding> = Vec::new();
    let mut push_case = |quantity, reading, statement, rd| {
        let gap = with_forms
            .par_iter()
            .map(|(wp, fs)| block_gap(wp, fs, &direct_e(wp, fs), quantity, rd))
            .reduce(Real::zero, Real::max);
        out.push(ReadingFinding {
            quantity,
            reading,
            statement,
            matches: gap < tol,
            max_mismatch: gap.to_f64(),
        });
    };
    for (q, r, s, rd) in cases {
        push_case(q, r, s, rd);
    }
    push_case(
        "4(ii)",
        "K corollary",
        "df ⊗ R̃ = f² dP ⊗ G̃",
        ConditionReadings::default(),
    );

    for reading in FiberFormsReading::ALL {
        let gap = with_forms
            .par_iter()
            .map(|(wp, fs)| {
                let fs = fs.zeroed(reading.zeroed());
                let e = direct_e(wp, &fs);
                let lhs = fiber_residual_scaled(&wp.parts, &fs, reading);
                let p = wp.parts.p;
                let mut worst = Real::zero();
                for idx in indices(lhs.shape()) {
                    let ix: Vec<usize> = idx.iter().map(|i| i + p).collect();
                    let gap = &(lhs.get(&idx) - e.get(&ix)).abs() / &wp.scale();
                    worst = worst.max(gap);
                }
                worst
            })
            .reduce(Real::zero, Real::max);
        out.push(ReadingFinding {
            quantity: "fiber 1-forms",
            reading: reading.source(),
            statement: reading.statement(),
            matches: gap < tol,
            max_mismatch: gap.to_f64(),
        });
    }
    Ok(out)
}

/// Default seed shared by the theorem checks.
pub const THEOREM_SEED: u64 = DEFAULT_SEED;
