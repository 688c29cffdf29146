//! Command-line front end.

pub mod report;
pub mod specfile;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::geometry::{check_invariants, MetricField};
use crate::recurrence::{
    classify, olszak_degeneracy_check, roter_check, ClassifyOptions, StructureKind, Verdict, TOL_ABS, TOL_REL,
};
use crate::symexpr::{Chart, RatFunc, ZeroTest, DEFAULT_SEED};
use crate::tensor::Tensor;
use crate::theorems::example1;
use crate::theorems::{check_corollary_variant, check_theorem41, ConditionReport, CorollaryVariant};
use crate::warped::{check_aux, crosscheck, WarpedSpec};

pub use report::{Format, Report, Tolerances};
pub use specfile::{load_forms, load_spec, Loaded, SpecError};

pub const EXAMPLE1_BASE: &str = include_str!("../../specs/example1_base.spec");
pub const EXAMPLE1_FIBER: &str = include_str!("../../specs/example1_fiber.spec");
pub const EXAMPLE1_WARPED: &str = include_str!("../../specs/example1_warped.spec");
pub const EXAMPLE1_FULL: &str = include_str!("../../specs/example1.spec");
pub const PSI3_FORMS: &str = include_str!("../../specs/psi3.forms");

/// Pointwise recurrence residuals in the example must fall below this.
const POINTWISE_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "warpcurv", version, about = "Curvature and recurrence-structure checks for warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Sample points for numeric stages.
    #[arg(long, default_value_t = 16)]
    samples: usize,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = TOL_REL)]
    tol: f64,
    /// Absolute residual floor.
    #[arg(long, default_value_t = TOL_ABS)]
    tol_abs: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Christoffel symbols, curvature tensors and identity checks.
    Curvature {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Classify against recurrence structures at seeded sample points.
    Classify {
        spec: PathBuf,
        /// Comma-separated subset of k,concircular,gk,qgk,hgk,wgk,sgk.
        #[arg(long, value_delimiter = ',')]
        structures: Vec<String>,
        /// File with an [eta] section, needed for qgk.
        #[arg(long)]
        eta: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the block formulas for a warped product with the direct computation.
    WarpedCheck {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// The eight SGK conditions on a warped product for given 1-forms.
    Theorem41 {
        spec: PathBuf,
        #[arg(long)]
        forms: PathBuf,
        /// K, HGK, WGK, ProductSGK, ProductK, ProductHGK or ProductWGK.
        #[arg(long)]
        variant: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The worked 3+1 example end to end.
    Example1 {
        #[command(flatten)]
        common: Common,
    },
    /// Test R = N₁ g∧g − N₂ g∧S − N₃ S∧S.
    Roter {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// Process output, kept separate from printing so tests can run it in-process.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

pub fn main_from_env() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (format, result) = match cli.command {
        Command::Curvature { spec, common } => (common.format, curvature(&spec, &common)),
        Command::Classify { spec, structures, eta, common } => {
            (common.format, classify_cmd(&spec, &structures, eta.as_deref(), &common))
        }
        Command::WarpedCheck { spec, common } => (common.format, warped_check(&spec, &common)),
        Command::Theorem41 { spec, forms, variant, common } => {
            (common.format, theorem41(&spec, &forms, variant.as_deref(), &common))
        }
        Command::Example1 { common } => (common.format, example1_cmd(&common)),
        Command::Roter { spec, common } => (common.format, roter(&spec, &common)),
    };
    match result {
        Ok(r) => Outcome {
            code: r.exit_code(),
            stdout: r.render(format),
            stderr: String::new(),
        },
        Err(msg) => Outcome::usage(msg),
    }
}

fn new_report(command: &str, c: &Common) -> Report {
    Report::new(
        command,
        c.seed,
        Tolerances {
            rel: c.tol,
            abs: c.tol_abs,
            samples: c.samples,
        },
    )
}

fn zero_test(c: &Common) -> ZeroTest {
    ZeroTest {
        seed: c.seed,
        ..ZeroTest::default()
    }
}

fn classify_options(c: &Common) -> ClassifyOptions {
    ClassifyOptions {
        samples: c.samples,
        seed: c.seed,
        tol_rel: c.tol,
        tol_abs: c.tol_abs,
        eta: None,
    }
}

fn load(path: &Path) -> Result<Loaded, String> {
    load_spec(path).map_err(|e| e.to_string())
}

fn load_warped(path: &Path) -> Result<WarpedSpec, String> {
    match load(path)? {
        Loaded::Warped(w) => Ok(w),
        Loaded::Metric(_) => Err(format!("{}: expected a [warped] section", path.display())),
    }
}

fn index_label(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect()
}

#[derive(Serialize)]
struct Component {
    index: String,
    value: String,
}

fn nonzero(t: &Tensor<RatFunc>, chart: &Chart, keep: impl Fn(&[usize]) -> bool) -> Vec<Component> {
    t.indexed()
        .filter(|(i, v)| !v.is_zero() && keep(i))
        .map(|(i, v)| Component {
            index: index_label(&i),
            value: v.to_expr(chart).to_string(),
        })
        .collect()
}

#[derive(Serialize)]
struct CurvatureDetails {
    chart: Vec<String>,
    metric: Vec<Component>,
    christoffel: Vec<Component>,
    riemann: Vec<Component>,
    ricci: Vec<Component>,
    scalar: String,
}

fn curvature(path: &Path, c: &Common) -> Result<Report, String> {
    let loaded = load(path)?;
    let m = loaded.metric();
    let chart = m.chart();
    let mut rep = new_report("curvature", c);
    for chk in check_invariants(m, &zero_test(c)) {
        let verdict = match (&chk.failure, chk.proved) {
            (Some((idx, v)), _) => format!("{} at {}", v.label(), index_label(idx)),
            (None, true) => "ProvedZero".to_string(),
            (None, false) => "NumericallyZero".to_string(),
        };
        rep.verdict(chk.name, verdict, chk.holds);
    }
    if m.is_flat() {
        rep.flags.push("R vanishes identically".into());
    }
    // Christoffel symbols are stored as Γ^i_jk.
    let details = CurvatureDetails {
        chart: chart.names().map(str::to_string).collect(),
        metric: nonzero(m.g(), chart, |i| i[0] <= i[1]),
        christoffel: nonzero(m.christoffel(), chart, |i| i[1] <= i[2]),
        riemann: nonzero(m.riemann(), chart, |i| i[0] < i[1] && i[2] < i[3] && (i[0], i[1]) <= (i[2], i[3])),
        ricci: nonzero(m.ricci(), chart, |i| i[0] <= i[1]),
        scalar: m.scalar_curvature().to_expr(chart).to_string(),
    };
    rep.details(&details);
    Ok(rep)
}

fn parse_structures(names: &[String], have_eta: bool, rep: &mut Report) -> Result<Vec<StructureKind>, String> {
    if names.is_empty() {
        let mut all: Vec<StructureKind> = StructureKind::ALL.to_vec();
        if !have_eta {
            all.retain(|k| *k != StructureKind::QGK);
            rep.flags.push("QGK skipped: no --eta given".into());
        }
        return Ok(all);
    }
    let mut out = Vec::new();
    for n in names {
        let k = StructureKind::parse(n.trim()).ok_or_else(|| format!("unknown structure `{n}`"))?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

fn classify_cmd(path: &Path, structures: &[String], eta: Option<&Path>, c: &Common) -> Result<Report, String> {
    let loaded = load(path)?;
    let m = loaded.metric();
    let mut rep = new_report("classify", c);
    let kinds = parse_structures(structures, eta.is_some(), &mut rep)?;
    let mut opts = classify_options(c);
    if let Some(p) = eta {
        opts.eta = Some(specfile::load_eta(p, m.chart()).map_err(|e| e.to_string())?);
    }
    let cr = classify(m, &kinds, &opts).map_err(|e| e.to_string())?;
    for s in &cr.structures {
        rep.verdict(s.structure.name(), format!("{:?}", s.verdict), s.verdict != Verdict::Fails);
        rep.residual(format!("{} max relative residual", s.structure.name()), s.max_residual);
        if let Some(n) = &s.note {
            rep.flags.push(format!("{}: {n}", s.structure.name()));
        }
        if s.verdict.holds() {
            for p in s.points.iter().filter(|p| !p.excluded) {
                for (name, comps) in &p.forms {
                    rep.recovered_forms.push(report::RecoveredForm {
                        source: s.structure.name().to_string(),
                        point: Some(p.index),
                        name: name.clone(),
                        components: comps.iter().map(|x| format!("{x:.12e}")).collect(),
                    });
                }
            }
        }
    }
    if kinds.contains(&StructureKind::GK) {
        let ol = olszak_degeneracy_check(m, &opts).map_err(|e| e.to_string())?;
        let v = if ol.vacuous {
            "VacuouslyExcluded"
        } else if ol.consistent {
            "Holds"
        } else {
            "Fails"
        };
        rep.verdict("GK has Θ = 0", v, ol.consistent);
        let worst = ol.points.iter().filter_map(|p| p.theta_max_abs).fold(0.0, f64::max);
        rep.residual("GK max |Θ|", worst);
        rep.flags.push(ol.note.clone());
    }
    rep.details(&cr);
    Ok(rep)
}

fn warped_check(path: &Path, c: &Common) -> Result<Report, String> {
    let w = load_warped(path)?;
    let mut rep = new_report("warped-check", c);
    let cc = crosscheck(&w, &zero_test(c));
    for t in &cc.tensors {
        rep.verdict(t.tensor, t.verdict.clone(), t.verdict != "NonZero");
        rep.residual(t.tensor, t.max_abs);
    }
    let aux = check_aux(&w);
    rep.verdict("T symmetric", if aux.t_symmetric { "Holds" } else { "Fails" }, aux.t_symmetric);
    rep.verdict("P from |∇f|²", aux.p_contraction.clone(), aux.p_contraction != "NonZero");
    for f in cc.printed.iter().filter(|f| !f.printed_agrees) {
        rep.paper_discrepancies.push(report::DiscrepancyLine {
            quantity: f.quantity.to_string(),
            printed: f.printed.to_string(),
            verified: f.verified.to_string(),
            evidence: "symbolic difference is NonZero on this metric".into(),
        });
    }
    rep.details(&cc);
    Ok(rep)
}

fn push_conditions(rep: &mut Report, prefix: &str, cr: &ConditionReport) {
    for c in &cr.conditions {
        let v = if c.holds { "Holds" } else { "Fails" };
        rep.verdict(format!("{prefix}{}", c.label), format!("{v} ({})", c.verdict), c.holds);
        rep.residual(format!("{prefix}{} max |residual|", c.label), c.max_abs);
    }
}

fn theorem41(path: &Path, forms: &Path, variant: Option<&str>, c: &Common) -> Result<Report, String> {
    let w = load_warped(path)?;
    let fs = load_forms(forms, w.chart()).map_err(|e| e.to_string())?;
    let cfg = zero_test(c);
    let mut rep = new_report("theorem41", c);
    match variant {
        None => {
            let cr = check_theorem41(&w, &fs, &cfg).map_err(|e| e.to_string())?;
            push_conditions(&mut rep, "", &cr);
            rep.details(&cr);
        }
        Some(name) => {
            let v = CorollaryVariant::parse(name).ok_or_else(|| format!("unknown variant `{name}`"))?;
            let vr = check_corollary_variant(&w, v, &fs, &cfg).map_err(|e| e.to_string())?;
            push_conditions(&mut rep, "", &vr.report);
            rep.verdict(
                "agrees with the eight conditions",
                if vr.coherent { "Holds" } else { "Fails" },
                vr.coherent,
            );
            rep.flags.extend(vr.notes.iter().cloned());
            rep.details(&vr);
        }
    }
    Ok(rep)
}

fn roter(path: &Path, c: &Common) -> Result<Report, String> {
    let loaded = load(path)?;
    let mut rep = new_report("roter", c);
    let rr = roter_check(loaded.metric(), c.samples, Some(c.seed), c.tol).map_err(|e| e.to_string())?;
    rep.verdict("Roter type", if rr.holds { "Holds" } else { "Fails" }, rr.holds);
    rep.residual("max relative residual", rr.max_residual);
    for p in &rr.points {
        rep.recovered_forms.push(report::RecoveredForm {
            source: "Roter".into(),
            point: Some(p.index),
            name: "N".into(),
            components: p.coefficients.iter().map(|x| format!("{x:.12e}")).collect(),
        });
    }
    rep.details(&rr);
    Ok(rep)
}

/// The shipped example files, resolved without touching the filesystem.
pub fn shipped_example1() -> Result<(WarpedSpec, MetricField), SpecError> {
    let resolve = |name: &str| -> Result<(String, String), String> {
        match name {
            "example1_base.spec" => Ok((name.to_string(), EXAMPLE1_BASE.to_string())),
            "example1_fiber.spec" => Ok((name.to_string(), EXAMPLE1_FIBER.to_string())),
            other => Err(format!("`{other}` is not a shipped spec")),
        }
    };
    let w = match specfile::load_spec_text("example1_warped.spec", EXAMPLE1_WARPED, &resolve)? {
        Loaded::Warped(w) => w,
        Loaded::Metric(_) => unreachable!("shipped warped spec has a [warped] section"),
    };
    let full = match specfile::load_spec_text("example1.spec", EXAMPLE1_FULL, &resolve)? {
        Loaded::Metric(m) => m,
        Loaded::Warped(_) => unreachable!("shipped full spec is a plain metric"),
    };
    Ok((w, full))
}

fn same_tensor(a: &Tensor<RatFunc>, b: &Tensor<RatFunc>) -> bool {
    a.shape() == b.shape() && a.sub(b).is_exact_zero()
}

fn example1_cmd(c: &Common) -> Result<Report, String> {
    let mut rep = new_report("example1", c);
    let (shipped, full) = shipped_example1().map_err(|e| e.to_string())?;
    let built = example1::warped_spec();
    let same = same_tensor(shipped.metric().g(), built.metric().g()) && same_tensor(full.g(), built.metric().g());
    rep.expect("shipped spec files", if same { "Match" } else { "Differ" }, "Match");
    let psi3 = specfile::forms_from_text("psi3.forms", PSI3_FORMS, shipped.chart()).map_err(|e| e.to_string())?;
    let printed = example1::printed_forms(&example1::unit_psi(2)).symbolic();
    let ps = psi3.symbolic();
    let forms_same = crate::theorems::FormName::ALL
        .iter()
        .all(|n| ps.get(*n).iter().zip(printed.get(*n)).all(|(a, b)| a == b));
    rep.expect("psi3.forms", if forms_same { "Match" } else { "Differ" }, "Match");

    let r = example1::run(c.samples, c.seed).map_err(|e| e.to_string())?;
    for g in &r.golden {
        rep.expect(g.quantity, g.verdict, "ProvedZero");
    }
    for (i, v) in r.base_recurrence.closed_form.iter().enumerate() {
        rep.expect(format!("base Π̄_{} closed form", i + 1), *v, "ProvedZero");
    }
    let br = &r.base_recurrence;
    rep.expect(
        "base K3 pointwise",
        if br.max_point_residual < POINTWISE_TOL { "Holds" } else { "Fails" },
        "Holds",
    );
    rep.residual("base K3 pointwise residual", br.max_point_residual);
    rep.residual("base Π̄ pointwise gap", br.max_point_gap);
    let base_k = classify(&example1::base_metric(), &[StructureKind::K], &classify_options(c)).map_err(|e| e.to_string())?;
    if let Some(v) = base_k.verdict(StructureKind::K) {
        rep.expect("base K3", format!("{v:?}"), "Holds");
    }
    for pc in &r.psi_cases {
        let ok = pc.symbolic != "NonZero" && pc.max_residual < POINTWISE_TOL;
        rep.expect(format!("SGK4 Ψ = {}", pc.psi), if ok { "Holds" } else { "Fails" }, "Holds");
        rep.residual(format!("SGK4 Ψ = {} residual", pc.psi), pc.max_residual);
        rep.residual(format!("SGK4 Ψ = {} form gap", pc.psi), pc.max_form_gap);
    }
    for s in &r.classification.structures {
        let name = format!("{}4", s.structure.name());
        let v = format!("{:?}", s.verdict);
        match s.structure {
            StructureKind::SGK => rep.expect(name, if s.verdict.holds() { "Holds".into() } else { v }, "Holds"),
            StructureKind::HGK | StructureKind::WGK => rep.expect(name, v, "Fails"),
            _ => rep.verdict(name, v, true),
        }
        rep.residual(format!("{}4 max relative residual", s.structure.name()), s.max_residual);
    }
    if let Some(sgk) = r.classification.get(StructureKind::SGK) {
        if let Some(p) = sgk.points.iter().find(|p| !p.excluded) {
            for (name, comps) in &p.forms {
                rep.recovered_forms.push(report::RecoveredForm {
                    source: "SGK4".into(),
                    point: Some(p.index),
                    name: name.clone(),
                    components: comps.iter().map(|x| format!("{x:.12e}")).collect(),
                });
            }
        }
    }
    rep.recovered_forms.push(report::RecoveredForm {
        source: "base K3".into(),
        point: None,
        name: "Π̄".into(),
        components: example1::printed_base_pi()
            .to_exprs()
            .iter()
            .map(|e| e.to_string())
            .collect(),
    });
    push_conditions(&mut rep, "condition ", &r.theorem);
    rep.expect(
        "SGK classification agrees with the conditions",
        if r.equivalence.agree { "Holds" } else { "Fails" },
        "Holds",
    );
    for p in &r.perturbations {
        let flipped = !p.failing.is_empty();
        rep.expect(
            format!("perturb {}_{}", p.form, p.component),
            if flipped { "Fails" } else { "Holds" },
            "Fails",
        );
    }
    for t in &r.crosscheck.tensors {
        let v = t.verdict.clone();
        let ok = v != "NonZero";
        rep.verdict(format!("block formula {}", t.tensor), v, ok);
    }
    for f in r.readings_discriminator.iter().filter(|f| f.matches) {
        rep.flags.push(format!("{} resolved as {}: {}", f.quantity, f.reading, f.statement));
    }
    for d in &r.discrepancies {
        rep.paper_discrepancies.push(report::DiscrepancyLine {
            quantity: d.quantity.clone(),
            printed: d.printed.clone(),
            verified: d.verified.clone(),
            evidence: d.evidence.clone(),
        });
    }
    rep.details(&r);
    Ok(rep)
}
