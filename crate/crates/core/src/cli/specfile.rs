//! Sectioned plain-text spec files.
//!
//! ```text
//! # comment
//! [chart]
//! x1 x2 x3
//! [metric]
//! g11 = exp(x2)        # also g_1_1, or g_x1_x1 with coordinate names
//! [warped]
//! base = base.spec     # paths relative to this file
//! fiber = fiber.spec
//! f = exp(x3)
//! convention = linear
//! [forms]
//! Pi_1 = ...           # Pi, Phi, Psi, Theta; unassigned components are 0
//! [eta]
//! eta_1 = ...
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::geometry::MetricField;
use crate::recurrence::OneFormField;
use crate::symexpr::{parse_expr, Chart, Expr};
use crate::theorems::FormSet;
use crate::warped::WarpedSpec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{file}:{line}:{column}: {message}")]
pub struct SpecError {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Chart,
    Metric,
    Warped,
    Forms,
    Eta,
}

/// One `lhs = rhs` line with its position.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub lhs: String,
    pub rhs: String,
    pub line: usize,
    /// 1-based column where the right-hand side starts.
    pub rhs_column: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SpecFile {
    pub path: String,
    pub chart: Option<(Vec<String>, usize)>,
    /// Line of the `[metric]` header, if present.
    pub metric_line: Option<usize>,
    pub metric: Vec<Assignment>,
    pub warped: Vec<Assignment>,
    pub forms: Vec<Assignment>,
    pub eta: Vec<Assignment>,
}

/// What a spec file describes once resolved.
#[derive(Clone)]
pub enum Loaded {
    Metric(MetricField),
    Warped(WarpedSpec),
}

impl Loaded {
    pub fn metric(&self) -> &MetricField {
        match self {
            Loaded::Metric(m) => m,
            Loaded::Warped(w) => w.metric(),
        }
    }

    pub fn chart(&self) -> &Chart {
        self.metric().chart()
    }
}

impl SpecFile {
    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> SpecError {
        SpecError {
            file: self.path.clone(),
            line,
            column,
            message: message.into(),
        }
    }
}

/// Tokenize a spec file into sections; no semantic checks.
pub fn parse_spec_text(path: &str, text: &str) -> Result<SpecFile, SpecError> {
    let mut out = SpecFile {
        path: path.to_string(),
        ..SpecFile::default()
    };
    let mut section = Section::None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len() + 1;
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                return Err(out.err(line, indent, "unterminated section header"));
            }
            section = match trimmed[1..trimmed.len() - 1].trim() {
                "chart" => Section::Chart,
                "metric" => {
                    out.metric_line = Some(line);
                    Section::Metric
                }
                "warped" => Section::Warped,
                "forms" => Section::Forms,
                "eta" => Section::Eta,
                other => return Err(out.err(line, indent + 1, format!("unknown section `{other}`"))),
            };
            continue;
        }
        match section {
            Section::None => {
                return Err(out.err(line, indent, "content before the first section header"))
            }
            Section::Chart => {
                if out.chart.is_some() {
                    return Err(out.err(line, indent, "the chart is declared twice"));
                }
                let names = trimmed
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect();
                out.chart = Some((names, line));
            }
            _ => {
                let Some(eq) = content.find('=') else {
                    return Err(out.err(line, indent, "expected `name = value`"));
                };
                let lhs = content[..eq].trim().to_string();
                let rhs_raw = &content[eq + 1..];
                let rhs = rhs_raw.trim().to_string();
                if lhs.is_empty() {
                    return Err(out.err(line, indent, "missing name before `=`"));
                }
                if rhs.is_empty() {
                    return Err(out.err(line, eq + 2, "missing value after `=`"));
                }
                let rhs_column = eq + 2 + (rhs_raw.len() - rhs_raw.trim_start().len());
                let a = Assignment {
                    lhs,
                    rhs,
                    line,
                    rhs_column,
                };
                match section {
                    Section::Metric => out.metric.push(a),
                    Section::Warped => out.warped.push(a),
                    Section::Forms => out.forms.push(a),
                    Section::Eta => out.eta.push(a),
                    Section::None | Section::Chart => unreachable!(),
                }
            }
        }
    }
    Ok(out)
}

fn parse_rhs(spec: &SpecFile, a: &Assignment, chart: &Chart) -> Result<Expr, SpecError> {
    let e = parse_expr(&a.rhs)
        .map_err(|pe| spec.err(a.line, a.rhs_column + pe.column - 1, pe.message.clone()))?;
    e.check_symbols(chart)
        .map_err(|ee| spec.err(a.line, a.rhs_column, ee.to_string()))?;
    Ok(e)
}

fn chart_of(spec: &SpecFile) -> Result<Chart, SpecError> {
    let (names, line) = spec
        .chart
        .as_ref()
        .ok_or_else(|| spec.err(1, 1, "missing [chart] section"))?;
    Chart::new(names).map_err(|e| spec.err(*line, 1, e.to_string()))
}

/// Index pair from `g11`, `g_1_2`, `g_12` or `g_x1_x2`.
fn metric_index(lhs: &str, chart: &Chart) -> Option<(usize, usize)> {
    let rest = lhs.strip_prefix('g')?;
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    let n = chart.dim();
    let as_index = |s: &str| -> Option<usize> {
        if let Ok(k) = s.parse::<usize>() {
            return (1..=n).contains(&k).then(|| k - 1);
        }
        chart.index_of(s)
    };
    if let Some((a, b)) = rest.split_once('_') {
        return Some((as_index(a)?, as_index(b)?));
    }
    let digits: Vec<char> = rest.chars().collect();
    if digits.len() == 2 && n <= 9 && digits.iter().all(|c| c.is_ascii_digit()) {
        return Some((as_index(&digits[0].to_string())?, as_index(&digits[1].to_string())?));
    }
    None
}

fn metric_of(spec: &SpecFile, chart: &Chart) -> Result<MetricField, SpecError> {
    if spec.metric.is_empty() {
        let line = spec.metric_line.unwrap_or(1);
        return Err(spec.err(line, 1, "no components in the [metric] section"));
    }
    let n = chart.dim();
    let mut comps: BTreeMap<(usize, usize), (Expr, usize)> = BTreeMap::new();
    for a in &spec.metric {
        let (i, j) = metric_index(&a.lhs, chart)
            .ok_or_else(|| spec.err(a.line, 1, format!("`{}` is not a metric component of this chart", a.lhs)))?;
        let e = parse_rhs(spec, a, chart)?;
        let key = (i.min(j), i.max(j));
        if let Some((prev, prev_line)) = comps.get(&key) {
            let c = chart.clone();
            let same = match (prev.to_ratfunc(&c), e.to_ratfunc(&c)) {
                (Ok(x), Ok(y)) => x == y,
                _ => false,
            };
            if !same {
                return Err(spec.err(
                    a.line,
                    1,
                    format!(
                        "symmetry conflict: g_{}{} here disagrees with the assignment on line {prev_line}",
                        key.0 + 1,
                        key.1 + 1
                    ),
                ));
            }
            continue;
        }
        comps.insert(key, (e, a.line));
    }
    let rows: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    comps
                        .get(&(i.min(j), i.max(j)))
                        .map(|(e, _)| e.clone())
                        .unwrap_or_else(|| Expr::int(0))
                })
                .collect()
        })
        .collect();
    MetricField::from_exprs(chart.clone(), &rows).map_err(|e| spec.err(spec.metric[0].line, 1, e.to_string()))
}

fn lookup<'a>(spec: &'a SpecFile, key: &str) -> Option<&'a Assignment> {
    spec.warped.iter().find(|a| a.lhs == key)
}

/// Read and resolve a spec file, following `[warped]` references.
pub fn load_spec(path: &Path) -> Result<Loaded, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError {
        file: path.display().to_string(),
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    load_spec_text(&path.display().to_string(), &text, &|name| {
        let p: PathBuf = dir.join(name);
        std::fs::read_to_string(&p)
            .map(|t| (p.display().to_string(), t))
            .map_err(|e| e.to_string())
    })
}

type Resolver<'a> = dyn Fn(&str) -> Result<(String, String), String> + 'a;

/// Resolve spec text; `resolve` maps a `[warped]` file reference to `(name, text)`.
pub fn load_spec_text(name: &str, text: &str, resolve: &Resolver<'_>) -> Result<Loaded, SpecError> {
    let spec = parse_spec_text(name, text)?;
    if spec.warped.is_empty() {
        let chart = chart_of(&spec)?;
        return metric_of(&spec, &chart).map(Loaded::Metric);
    }
    for a in &spec.warped {
        if !["base", "fiber", "f", "convention"].contains(&a.lhs.as_str()) {
            return Err(spec.err(a.line, 1, format!("unknown [warped] key `{}`", a.lhs)));
        }
    }
    if let Some(c) = lookup(&spec, "convention") {
        if c.rhs != "linear" {
            return Err(spec.err(
                c.line,
                c.rhs_column,
                format!("unsupported convention `{}`: only the linear form ḡ ⊕ f·g̃ is implemented", c.rhs),
            ));
        }
    }
    let factor = |key: &str| -> Result<MetricField, SpecError> {
        let a = lookup(&spec, key).ok_or_else(|| spec.err(1, 1, format!("[warped] needs `{key} = <file>`")))?;
        let (fname, ftext) = resolve(&a.rhs).map_err(|m| spec.err(a.line, a.rhs_column, m))?;
        match load_spec_text(&fname, &ftext, resolve)? {
            Loaded::Metric(m) => Ok(m),
            Loaded::Warped(_) => Err(spec.err(a.line, a.rhs_column, "a warped factor must be a plain metric")),
        }
    };
    let base = factor("base")?;
    let fiber = factor("fiber")?;
    let fa = lookup(&spec, "f").ok_or_else(|| spec.err(1, 1, "[warped] needs `f = <expr>`"))?;
    let f = parse_expr(&fa.rhs)
        .map_err(|pe| spec.err(fa.line, fa.rhs_column + pe.column - 1, pe.message.clone()))?;
    let w = WarpedSpec::new(base, fiber, f).map_err(|e| spec.err(fa.line, fa.rhs_column, e.to_string()))?;
    if let Some((names, line)) = &spec.chart {
        let declared: Vec<&str> = names.iter().map(String::as_str).collect();
        let actual: Vec<&str> = w.chart().names().collect();
        if declared != actual {
            return Err(spec.err(
                *line,
                1,
                format!("[chart] lists {declared:?} but base and fiber give {actual:?}"),
            ));
        }
    }
    Ok(Loaded::Warped(w))
}

fn component_index(suffix: &str, chart: &Chart) -> Option<usize> {
    if let Ok(k) = suffix.parse::<usize>() {
        return (1..=chart.dim()).contains(&k).then(|| k - 1);
    }
    chart.index_of(suffix)
}

fn one_forms(
    spec: &SpecFile,
    items: &[Assignment],
    names: &[&str],
    chart: &Chart,
) -> Result<BTreeMap<String, Vec<Expr>>, SpecError> {
    let mut out: BTreeMap<String, Vec<Expr>> = names
        .iter()
        .map(|n| (n.to_string(), vec![Expr::int(0); chart.dim()]))
        .collect();
    let mut seen: BTreeMap<(String, usize), usize> = BTreeMap::new();
    for a in items {
        let (name, idx) = a
            .lhs
            .rsplit_once('_')
            .ok_or_else(|| spec.err(a.line, 1, format!("expected `<form>_<index>`, got `{}`", a.lhs)))?;
        let slot = out
            .get_mut(name)
            .ok_or_else(|| spec.err(a.line, 1, format!("unknown 1-form `{name}`; expected one of {names:?}")))?;
        let k = component_index(idx, chart)
            .ok_or_else(|| spec.err(a.line, name.len() + 2, format!("component `{idx}` is not on the chart")))?;
        if let Some(prev) = seen.insert((name.to_string(), k), a.line) {
            return Err(spec.err(a.line, 1, format!("{} assigned twice (first on line {prev})", a.lhs)));
        }
        slot[k] = parse_rhs(spec, a, chart)?;
    }
    Ok(out)
}

/// The `[forms]` section of a file, on the given chart.
pub fn load_forms(path: &Path, chart: &Chart) -> Result<FormSet, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError {
        file: path.display().to_string(),
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    forms_from_text(&path.display().to_string(), &text, chart)
}

pub fn forms_from_text(name: &str, text: &str, chart: &Chart) -> Result<FormSet, SpecError> {
    let spec = parse_spec_text(name, text)?;
    if spec.forms.is_empty() {
        return Err(spec.err(1, 1, "no [forms] assignments"));
    }
    let mut f = one_forms(&spec, &spec.forms, &["Pi", "Phi", "Psi", "Theta"], chart)?;
    let mk = |v: Vec<Expr>| {
        OneFormField::from_exprs(chart.clone(), &v).map_err(|e| spec.err(1, 1, e.to_string()))
    };
    Ok(FormSet {
        pi: mk(f.remove("Pi").unwrap())?,
        phi: mk(f.remove("Phi").unwrap())?,
        psi: mk(f.remove("Psi").unwrap())?,
        theta: mk(f.remove("Theta").unwrap())?,
    })
}

/// The `[eta]` section of a file, on the given chart.
pub fn load_eta(path: &Path, chart: &Chart) -> Result<OneFormField, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError {
        file: path.display().to_string(),
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    let spec = parse_spec_text(&path.display().to_string(), &text)?;
    if spec.eta.is_empty() {
        return Err(spec.err(1, 1, "no [eta] assignments"));
    }
    let mut f = one_forms(&spec, &spec.eta, &["eta"], chart)?;
    OneFormField::from_exprs(chart.clone(), &f.remove("eta").unwrap()).map_err(|e| spec.err(1, 1, e.to_string()))
}
