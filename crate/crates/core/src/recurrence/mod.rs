//! Recovery of associated 1-forms and classification of recurrent-like structures.
//!
//! Every structure has the shape `∇R = Σ_b c_b ⊗ B_b` for a fixed basis of (0,4)
//! tensors. For each derivative index m the system is linear in `c_b(m)`, so
//! it is solved pointwise at seeded sample points.

mod roter;
mod solve;

use dashu_ratio::RBig;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::MetricField;
use crate::knproducts::{kn, outer_square};
use crate::symexpr::{
    guard, render_point, Chart, EvalError, Expr, ExprError, PointValues, RatFunc, Real, SampleBox,
    DEFAULT_SEED,
};
use crate::tensor::{Field, Tensor};

pub use roter::{roter_check, roter_decompose, RoterFit, RoterReport};
pub use solve::{
    jacobi_eigen, solve_pointwise_coefficients, solve_with_fixed, PointSolve, RANK_CUTOFF,
    RESIDUAL_FLOOR,
};

pub const TOL_REL: f64 = 1e-9;
pub const TOL_ABS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecurrenceError {
    #[error("basis is empty")]
    EmptyBasis,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("recurrence structures need dimension n >= 3 (got {0})")]
    DimensionTooSmall(usize),
    #[error("QGK needs an η 1-form (pass --eta)")]
    MissingEta,
    #[error("could not find {wanted} regular sample points after {attempts} draws")]
    NoSamplePoints { wanted: usize, attempts: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A 1-form given by symbolic components on a chart.
#[derive(Debug, Clone)]
pub struct OneFormField {
    chart: Chart,
    comps: Vec<RatFunc>,
}

impl OneFormField {
    pub fn from_exprs(chart: Chart, comps: &[Expr]) -> Result<Self, RecurrenceError> {
        if comps.len() != chart.dim() {
            return Err(RecurrenceError::DimensionMismatch(format!(
                "1-form has {} components on a {}-dimensional chart",
                comps.len(),
                chart.dim()
            )));
        }
        let comps = comps
            .iter()
            .map(|e| e.to_ratfunc(&chart))
            .collect::<Result<_, _>>()?;
        Ok(OneFormField { chart, comps })
    }

    pub fn from_ratfuncs(chart: Chart, comps: Vec<RatFunc>) -> Result<Self, RecurrenceError> {
        if comps.len() != chart.dim() {
            return Err(RecurrenceError::DimensionMismatch(format!(
                "1-form has {} components on a {}-dimensional chart",
                comps.len(),
                chart.dim()
            )));
        }
        Ok(OneFormField { chart, comps })
    }

    pub fn zero(chart: Chart) -> Self {
        let comps = vec![RatFunc::zero(); chart.dim()];
        OneFormField { chart, comps }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn comps(&self) -> &[RatFunc] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &RatFunc {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RatFunc::is_zero)
    }

    pub fn to_exprs(&self) -> Vec<Expr> {
        self.comps.iter().map(|c| c.to_expr(&self.chart)).collect()
    }

    pub fn eval(&self, at: &PointValues, g: &Real) -> Result<Vec<Real>, EvalError> {
        self.comps.iter().map(|c| c.eval(at, g)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StructureKind {
    K,
    ConcircularRecurrent,
    GK,
    QGK,
    HGK,
    WGK,
    SGK,
}

impl StructureKind {
    pub const ALL: [StructureKind; 7] = [
        StructureKind::K,
        StructureKind::ConcircularRecurrent,
        StructureKind::GK,
        StructureKind::QGK,
        StructureKind::HGK,
        StructureKind::WGK,
        StructureKind::SGK,
    ];

    pub fn parse(s: &str) -> Option<StructureKind> {
        Some(match s.to_ascii_lowercase().as_str() {
            "k" => StructureKind::K,
            "ck" | "concircular" => StructureKind::ConcircularRecurrent,
            "gk" => StructureKind::GK,
            "qgk" => StructureKind::QGK,
            "hgk" => StructureKind::HGK,
            "wgk" => StructureKind::WGK,
            "sgk" => StructureKind::SGK,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            StructureKind::K => "K",
            StructureKind::ConcircularRecurrent => "ConcircularRecurrent",
            StructureKind::GK => "GK",
            StructureKind::QGK => "QGK",
            StructureKind::HGK => "HGK",
            StructureKind::WGK => "WGK",
            StructureKind::SGK => "SGK",
        }
    }

    /// Labels of the right-hand side tensors, in solve order.
    pub fn basis_labels(self) -> &'static [&'static str] {
        match self {
            StructureKind::K => &["R"],
            StructureKind::ConcircularRecurrent => &["W"],
            StructureKind::GK => &["R", "g∧g"],
            StructureKind::QGK => &["R", "g∧(g+η⊗η)"],
            StructureKind::HGK => &["R", "g∧S"],
            StructureKind::WGK => &["R", "S∧S"],
            StructureKind::SGK => &["R", "S∧S", "g∧S", "g∧g"],
        }
    }

    /// Names of the associated 1-forms, matching `basis_labels`.
    pub fn form_names(self) -> &'static [&'static str] {
        match self {
            StructureKind::K | StructureKind::ConcircularRecurrent => &["Pi"],
            StructureKind::GK | StructureKind::QGK => &["Pi", "Theta"],
            StructureKind::HGK => &["Pi", "Psi"],
            StructureKind::WGK => &["Pi", "Phi"],
            StructureKind::SGK => &["Pi", "Phi", "Psi", "Theta"],
        }
    }

    /// Whether the defining set is `{∇R ≠ ξ⊗R}` rather than `{∇R ≠ 0}`.
    pub fn is_generalized(self) -> bool {
        !matches!(self, StructureKind::K | StructureKind::ConcircularRecurrent)
    }
}

/// Curvature data evaluated at one point.
#[derive(Debug, Clone)]
pub struct PointTensors {
    pub point: Vec<RBig>,
    pub g: Tensor<Real>,
    pub s: Tensor<Real>,
    pub r: Tensor<Real>,
    pub dr: Tensor<Real>,
    pub kappa: Real,
    pub dkappa: Vec<Real>,
    pub eta: Option<Vec<Real>>,
}

/// Symbolic inputs shared by every point evaluation.
pub struct CurvatureBundle<'a> {
    pub metric: &'a MetricField,
    dkappa: Vec<RatFunc>,
    eta: Option<&'a OneFormField>,
}

impl<'a> CurvatureBundle<'a> {
    pub fn new(metric: &'a MetricField, eta: Option<&'a OneFormField>) -> Self {
        let n = metric.dim();
        let kappa = metric.scalar_curvature();
        let dkappa = (0..n).map(|m| kappa.diff(m)).collect();
        metric.nabla_riemann();
        CurvatureBundle {
            metric,
            dkappa,
            eta,
        }
    }

    pub fn at(&self, point: &[RBig]) -> Result<PointTensors, EvalError> {
        let pv = PointValues::new(point);
        let gd = guard();
        let m = self.metric;
        Ok(PointTensors {
            point: point.to_vec(),
            g: m.g().eval(&pv, &gd)?,
            s: m.ricci().eval(&pv, &gd)?,
            r: m.riemann().eval(&pv, &gd)?,
            dr: m.nabla_riemann().eval(&pv, &gd)?,
            kappa: m.scalar_curvature().eval(&pv, &gd)?,
            dkappa: self
                .dkappa
                .iter()
                .map(|d| d.eval(&pv, &gd))
                .collect::<Result<_, _>>()?,
            eta: match self.eta {
                Some(e) => Some(e.eval(&pv, &gd)?),
                None => None,
            },
        })
    }

    /// Draw `n` seeded points at which every tensor evaluates.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<PointTensors>, RecurrenceError> {
        let dim = self.metric.dim();
        let mut sb = SampleBox::new(seed);
        let max_attempts = 1000 * n.max(1);
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n {
            if attempts >= max_attempts {
                return Err(RecurrenceError::NoSamplePoints {
                    wanted: n,
                    attempts,
                });
            }
            attempts += 1;
            if let Ok(pt) = self.at(&sb.next_point(dim)) {
                out.push(pt);
            }
        }
        Ok(out)
    }
}

impl PointTensors {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `∇R` split by derivative index.
    pub fn dr_slices(&self) -> Vec<Tensor<Real>> {
        (0..self.dim()).map(|m| self.dr.last_index_slice(m)).collect()
    }

    pub fn concircular(&self) -> Tensor<Real> {
        let n = self.dim() as i64;
        let c = &self.kappa * &Real::ratio(1, 2 * n * (n - 1));
        self.r.sub(&kn(&self.g, &self.g).scale(&c))
    }

    /// `∇W = ∇R − dκ/(2n(n−1)) ⊗ g∧g`, split by derivative index.
    pub fn dw_slices(&self) -> Vec<Tensor<Real>> {
        let n = self.dim() as i64;
        let gg = kn(&self.g, &self.g);
        let k = Real::ratio(1, 2 * n * (n - 1));
        self.dr_slices()
            .into_iter()
            .zip(&self.dkappa)
            .map(|(t, dk)| t.sub(&gg.scale(&(dk * &k))))
            .collect()
    }

    pub fn basis(&self, kind: StructureKind) -> Result<Vec<Tensor<Real>>, RecurrenceError> {
        let (g, s) = (&self.g, &self.s);
        Ok(match kind {
            StructureKind::K => vec![self.r.clone()],
            StructureKind::ConcircularRecurrent => vec![self.concircular()],
            StructureKind::GK => vec![self.r.clone(), kn(g, g)],
            StructureKind::QGK => {
                let eta = self.eta.as_ref().ok_or(RecurrenceError::MissingEta)?;
                vec![self.r.clone(), kn(g, &g.add(&outer_square(eta)))]
            }
            StructureKind::HGK => vec![self.r.clone(), kn(g, s)],
            StructureKind::WGK => vec![self.r.clone(), kn(s, s)],
            StructureKind::SGK => vec![self.r.clone(), kn(s, s), kn(g, s), kn(g, g)],
        })
    }

    pub fn targets(&self, kind: StructureKind) -> Vec<Tensor<Real>> {
        match kind {
            StructureKind::ConcircularRecurrent => self.dw_slices(),
            _ => self.dr_slices(),
        }
    }

    pub fn solve(&self, kind: StructureKind) -> Result<PointSolve, RecurrenceError> {
        solve_pointwise_coefficients(&self.targets(kind), &self.basis(kind)?)
    }
}

/// `Π_m = Σ R_ijkl R_ijkl,m / Σ R_ijkl R_ijkl` at a point; `None` when R = 0.
pub fn recurrent_form_closed(r: &Tensor<Real>, dr: &Tensor<Real>) -> Option<Vec<Real>> {
    let n = r.dim();
    let rr = r.data().iter().fold(Real::zero(), |a, x| &a + &(x * x));
    if rr.is_zero() {
        return None;
    }
    Some(
        (0..n)
            .map(|m| {
                let s = dr.last_index_slice(m);
                let num = r
                    .data()
                    .iter()
                    .zip(s.data())
                    .fold(Real::zero(), |a, (x, y)| &a + &(x * y));
                &num / &rr
            })
            .collect(),
    )
}

/// Symbolic version of [`recurrent_form_closed`] together with the exact residual
/// `∇R − Π⊗R`. `None` when R vanishes identically.
pub fn recurrent_form_symbolic(m: &MetricField) -> Option<(OneFormField, Tensor<RatFunc>)> {
    let r = m.riemann();
    let dr = m.nabla_riemann();
    let n = m.dim();
    let rr = crate::tensor::dot(r.data().iter().map(|x| (x.clone(), x.clone())));
    if rr.is_zero() {
        return None;
    }
    let inv = rr.inv().ok()?;
    let pi: Vec<RatFunc> = (0..n)
        .map(|k| {
            let s = dr.last_index_slice(k);
            crate::tensor::dot(r.data().iter().cloned().zip(s.data().iter().cloned())).mul(&inv)
        })
        .collect();
    let residual = dr.sub(&r.outer_last(&pi));
    Some((OneFormField::from_ratfuncs(m.chart().clone(), pi).ok()?, residual))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    HoldsDegenerately,
    Fails,
    VacuouslyExcluded,
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::Holds | Verdict::HoldsDegenerately)
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub eta: Option<OneFormField>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            samples: 16,
            seed: DEFAULT_SEED,
            tol_rel: TOL_REL,
            tol_abs: TOL_ABS,
            eta: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointResult {
    pub index: usize,
    /// Outside the defining set of the structure at this point.
    pub excluded: bool,
    pub residual: f64,
    pub rank: usize,
    pub forms: Vec<(String, Vec<f64>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureResult {
    pub structure: StructureKind,
    pub verdict: Verdict,
    pub max_residual: f64,
    pub basis: Vec<String>,
    pub points: Vec<PointResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub dim: usize,
    pub seed: u64,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub sample_points: Vec<Vec<(String, String)>>,
    pub structures: Vec<StructureResult>,
}

impl ClassificationReport {
    pub fn get(&self, kind: StructureKind) -> Option<&StructureResult> {
        self.structures.iter().find(|s| s.structure == kind)
    }

    pub fn verdict(&self, kind: StructureKind) -> Option<Verdict> {
        self.get(kind).map(|s| s.verdict)
    }
}

fn forms_of(kind: StructureKind, sol: &PointSolve) -> Vec<(String, Vec<f64>)> {
    kind.form_names()
        .iter()
        .enumerate()
        .map(|(b, name)| {
            (
                name.to_string(),
                sol.form(b).iter().map(Real::to_f64).collect(),
            )
        })
        .collect()
}

fn norm_of_all(ts: &[Tensor<Real>]) -> Real {
    ts.iter()
        .map(|t| t.norm())
        .fold(Real::zero(), Real::max)
}

fn vacuous(kind: StructureKind, note: &str) -> StructureResult {
    StructureResult {
        structure: kind,
        verdict: Verdict::VacuouslyExcluded,
        max_residual: 0.0,
        basis: kind.basis_labels().iter().map(|s| s.to_string()).collect(),
        points: Vec::new(),
        note: Some(note.to_string()),
    }
}

/// Classify a metric against the requested structures at seeded sample points.
pub fn classify(
    g: &MetricField,
    structures: &[StructureKind],
    opts: &ClassifyOptions,
) -> Result<ClassificationReport, RecurrenceError> {
    let n = g.dim();
    if n < 3 {
        return Err(RecurrenceError::DimensionTooSmall(n));
    }
    if structures.contains(&StructureKind::QGK) && opts.eta.is_none() {
        return Err(RecurrenceError::MissingEta);
    }
    let mut kinds: Vec<StructureKind> = structures.to_vec();
    kinds.sort();
    kinds.dedup();

    let mut report = ClassificationReport {
        dim: n,
        seed: opts.seed,
        tol_rel: opts.tol_rel,
        tol_abs: opts.tol_abs,
        sample_points: Vec::new(),
        structures: Vec::new(),
    };
    if g.is_flat() {
        report.structures = kinds
            .iter()
            .map(|&k| vacuous(k, "R = 0 identically; every structure requires a non-flat metric"))
            .collect();
        return Ok(report);
    }

    let bundle = CurvatureBundle::new(g, opts.eta.as_ref());
    let points = bundle.sample(opts.samples, opts.seed)?;
    report.sample_points = points
        .iter()
        .map(|p| render_point(g.chart(), &p.point))
        .collect();
    let tol_rel = Real::from_f64(opts.tol_rel);
    let tol_abs = Real::from_f64(opts.tol_abs);

    // The K solve at every point decides the excluded set of the generalized structures.
    let k_solves: Vec<(bool, PointSolve)> = points
        .par_iter()
        .map(|p| {
            let nonzero = norm_of_all(&p.dr_slices()) > tol_abs;
            (nonzero, p.solve(StructureKind::K).expect("K basis is well-formed"))
        })
        .collect();
    let recurrent_at: Vec<bool> = k_solves
        .iter()
        .map(|(nonzero, s)| !nonzero || s.max_residual() < tol_rel)
        .collect();

    for &kind in &kinds {
        let per_point: Vec<(bool, PointSolve)> = if kind == StructureKind::K {
            k_solves.iter().map(|(nz, s)| (!nz, s.clone())).collect()
        } else {
            points
                .par_iter()
                .enumerate()
                .map(|(i, p)| {
                    let excluded = if kind == StructureKind::ConcircularRecurrent {
                        norm_of_all(&p.dw_slices()) <= tol_abs
                    } else {
                        recurrent_at[i]
                    };
                    p.solve(kind).map(|s| (excluded, s))
                })
                .collect::<Result<_, _>>()?
        };
        report.structures.push(assemble(kind, per_point, &tol_rel));
    }
    Ok(report)
}

fn assemble(kind: StructureKind, per_point: Vec<(bool, PointSolve)>, tol_rel: &Real) -> StructureResult {
    let nb = kind.basis_labels().len();
    let points: Vec<PointResult> = per_point
        .iter()
        .enumerate()
        .map(|(i, (excluded, s))| PointResult {
            index: i,
            excluded: *excluded,
            residual: s.max_residual().to_f64(),
            rank: s.rank,
            forms: forms_of(kind, s),
        })
        .collect();
    let active: Vec<&(bool, PointSolve)> = per_point.iter().filter(|(ex, _)| !ex).collect();
    let max_residual = active
        .iter()
        .map(|(_, s)| s.max_residual())
        .fold(Real::zero(), Real::max);
    let (verdict, note) = if active.is_empty() {
        let why = if kind.is_generalized() {
            "∇R = ξ⊗R at every sample point, so the defining set is empty"
        } else if kind == StructureKind::K {
            "∇R = 0 at every sample point"
        } else {
            "∇W = 0 at every sample point"
        };
        (Verdict::VacuouslyExcluded, Some(why.to_string()))
    } else if max_residual >= *tol_rel {
        (Verdict::Fails, None)
    } else if active.iter().any(|(_, s)| s.rank < nb) {
        (
            Verdict::HoldsDegenerately,
            Some("basis is rank-deficient at some point; the 1-forms are not unique".to_string()),
        )
    } else {
        (Verdict::Holds, None)
    };
    let excluded = per_point.iter().filter(|(ex, _)| *ex).count();
    let note = match (note, excluded) {
        (note, 0) => note,
        (Some(n), _) => Some(n),
        (None, k) => Some(format!("{k} sample point(s) excluded from the defining set")),
    };
    StructureResult {
        structure: kind,
        verdict,
        max_residual: max_residual.to_f64(),
        basis: kind.basis_labels().iter().map(|s| s.to_string()).collect(),
        points,
        note,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OlszakPoint {
    pub index: usize,
    pub gk_residual: f64,
    pub solved: bool,
    pub theta: Option<Vec<f64>>,
    pub theta_max_abs: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OlszakReport {
    /// Holds unless some point solved GK with a nonzero Θ.
    pub consistent: bool,
    pub vacuous: bool,
    pub points: Vec<OlszakPoint>,
    pub note: String,
}

/// Solve GK (`∇R = Π⊗R + Θ⊗g∧g`) at sample points and check `Θ = 0` wherever it succeeds.
pub fn olszak_degeneracy_check(
    g: &MetricField,
    opts: &ClassifyOptions,
) -> Result<OlszakReport, RecurrenceError> {
    if g.is_flat() || g.nabla_riemann().is_exact_zero() {
        return Ok(OlszakReport {
            consistent: true,
            vacuous: true,
            points: Vec::new(),
            note: "∇R = 0 identically; the GK defining set is empty".to_string(),
        });
    }
    let bundle = CurvatureBundle::new(g, None);
    let pts = bundle.sample(opts.samples, opts.seed)?;
    let tol_rel = Real::from_f64(opts.tol_rel);
    let tol_abs = Real::from_f64(opts.tol_abs);
    let points: Vec<OlszakPoint> = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let s = p.solve(StructureKind::GK).expect("GK basis is well-formed");
            let res = s.max_residual();
            let solved = res < tol_rel;
            let theta = s.form(1);
            let tmax = theta.iter().map(Real::abs).fold(Real::zero(), Real::max);
            OlszakPoint {
                index: i,
                gk_residual: res.to_f64(),
                solved,
                theta: solved.then(|| theta.iter().map(Real::to_f64).collect()),
                theta_max_abs: solved.then(|| tmax.to_f64()),
            }
        })
        .collect();
    let consistent = points
        .iter()
        .all(|p| p.theta_max_abs.map_or(true, |t| Real::from_f64(t) < tol_abs));
    let solved = points.iter().filter(|p| p.solved).count();
    let note = if solved == 0 {
        "GK residual NonZero at every sample point; no Θ assertion".to_string()
    } else {
        format!("GK solved at {solved} point(s); recovered Θ checked against zero")
    };
    Ok(OlszakReport {
        consistent,
        vacuous: false,
        points,
        note,
    })
}
