//! Report assembly and rendering.

use std::fmt::Write as _;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictLine {
    pub name: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualLine {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveredForm {
    pub source: String,
    /// Sample point index, if pointwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    pub name: String,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyLine {
    pub quantity: String,
    pub printed: String,
    pub verified: String,
    pub evidence: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub verdicts: Vec<VerdictLine>,
    pub residuals: Vec<ResidualLine>,
    pub recovered_forms: Vec<RecoveredForm>,
    pub flags: Vec<String>,
    pub paper_discrepancies: Vec<DiscrepancyLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl Report {
    pub fn new(command: &str, seed: u64, tolerances: Tolerances) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            tolerances,
            verdicts: Vec::new(),
            residuals: Vec::new(),
            recovered_forms: Vec::new(),
            flags: Vec::new(),
            paper_discrepancies: Vec::new(),
            details: None,
        }
    }

    pub fn verdict(&mut self, name: impl Into<String>, verdict: impl Into<String>, ok: bool) {
        self.verdicts.push(VerdictLine {
            name: name.into(),
            verdict: verdict.into(),
            expected: None,
            ok,
        });
    }

    /// A verdict that is ok exactly when it equals `expected`.
    pub fn expect(&mut self, name: impl Into<String>, verdict: impl Into<String>, expected: &str) {
        let verdict = verdict.into();
        self.verdicts.push(VerdictLine {
            name: name.into(),
            ok: verdict == expected,
            verdict,
            expected: Some(expected.to_string()),
        });
    }

    pub fn residual(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.push(ResidualLine {
            name: name.into(),
            value,
        });
    }

    pub fn details<T: Serialize>(&mut self, v: &T) {
        self.details = Some(serde_json::to_value(v).expect("report types serialize"));
    }

    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok() {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut o = String::new();
        let t = &self.tolerances;
        let _ = writeln!(o, "{} (seed {}, samples {}, tol_rel {:e}, tol_abs {:e})", self.command, self.seed, t.samples, t.rel, t.abs);
        if !self.verdicts.is_empty() {
            let _ = writeln!(o, "\nverdicts:");
            let w = self.verdicts.iter().map(|v| v.name.chars().count()).max().unwrap_or(0);
            for v in &self.verdicts {
                let pad = w - v.name.chars().count();
                let exp = match &v.expected {
                    Some(e) if !v.ok => format!("  (expected {e})"),
                    _ => String::new(),
                };
                let mark = if v.ok { "ok  " } else { "FAIL" };
                let _ = writeln!(o, "  {mark} {}{} {}{exp}", v.name, " ".repeat(pad), v.verdict);
            }
        }
        if !self.residuals.is_empty() {
            let _ = writeln!(o, "\nresiduals:");
            let w = self.residuals.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
            for r in &self.residuals {
                let pad = w - r.name.chars().count();
                let _ = writeln!(o, "  {}{} {:.3e}", r.name, " ".repeat(pad), r.value);
            }
        }
        if !self.recovered_forms.is_empty() {
            let _ = writeln!(o, "\nrecovered forms:");
            for f in &self.recovered_forms {
                let at = f.point.map(|p| format!(" @{p}")).unwrap_or_default();
                let _ = writeln!(o, "  {}{at} {} = ({})", f.source, f.name, f.components.join(", "));
            }
        }
        if !self.flags.is_empty() {
            let _ = writeln!(o, "\nnotes:");
            for f in &self.flags {
                let _ = writeln!(o, "  {f}");
            }
        }
        if !self.paper_discrepancies.is_empty() {
            let _ = writeln!(o, "\nprinted statements that disagree with the computation:");
            for d in &self.paper_discrepancies {
                let _ = writeln!(o, "  {}\n    printed:  {}\n    verified: {}\n    evidence: {}", d.quantity, d.printed, d.verified, d.evidence);
            }
        }
        let _ = writeln!(o, "\n{}", if self.ok() { "all verdicts ok" } else { "some verdicts failed" });
        o
    }
}
