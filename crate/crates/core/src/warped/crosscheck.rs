//! Blockwise formulas against the direct pipeline on the assembled metric.

use serde::Serialize;

use super::parts::{block_label, predict_from_parts, Predicted, Readings};
use super::WarpedSpec;
use crate::knproducts::kn;
use crate::symexpr::{is_zero_ratfunc, RatFunc, ZeroTest, ZeroVerdict};
use crate::tensor::{indices, Tensor};

#[derive(Debug, Clone, Serialize)]
pub struct TensorCheck {
    pub tensor: &'static str,
    /// `ProvedZero`, `NumericallyZero` or `NonZero`.
    pub verdict: String,
    pub max_abs: f64,
    /// First offending component: block label, 1-based indices, difference.
    pub offending: Option<(String, Vec<usize>, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrintedFinding {
    pub quantity: &'static str,
    pub printed: &'static str,
    pub verified: &'static str,
    /// Whether the printed reading also agrees with the direct computation on this instance.
    pub printed_agrees: bool,
    pub offending: Option<(String, Vec<usize>, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub tensors: Vec<TensorCheck>,
    pub printed: Vec<PrintedFinding>,
}

impl CrosscheckReport {
    pub fn all_zero(&self) -> bool {
        self.tensors.iter().all(|t| t.verdict != "NonZero")
    }

    pub fn all_proved(&self) -> bool {
        self.tensors.iter().all(|t| t.verdict == "ProvedZero")
    }
}

struct Direct {
    r: Tensor<RatFunc>,
    s: Tensor<RatFunc>,
    kappa: RatFunc,
    dr: Tensor<RatFunc>,
    gg: Tensor<RatFunc>,
    gs: Tensor<RatFunc>,
    ss: Tensor<RatFunc>,
}

fn direct(spec: &WarpedSpec) -> Direct {
    let m = spec.metric();
    let g = m.g();
    let s = m.ricci();
    Direct {
        r: m.riemann().clone(),
        s: s.clone(),
        kappa: m.scalar_curvature().clone(),
        dr: m.nabla_riemann().clone(),
        gg: kn(g, g),
        gs: kn(g, s),
        ss: kn(s, s),
    }
}

fn compare(
    spec: &WarpedSpec,
    name: &'static str,
    pred: &Tensor<RatFunc>,
    dir: &Tensor<RatFunc>,
    cfg: &ZeroTest,
) -> TensorCheck {
    let p = spec.base_dim();
    let chart = spec.chart();
    let mut proved = true;
    let mut max_abs: f64 = 0.0;
    for idx in indices(dir.shape()) {
        let d = pred.get(&idx).sub(dir.get(&idx));
        if d.is_zero() {
            continue;
        }
        proved = false;
        match is_zero_ratfunc(&d, chart, cfg) {
            ZeroVerdict::NumericallyZero { max_abs: m, .. } => max_abs = max_abs.max(m),
            ZeroVerdict::NonZero { value, .. } => {
                let label = if idx.is_empty() { "scalar" } else { block_label(p, &idx) };
                return TensorCheck {
                    tensor: name,
                    verdict: "NonZero".into(),
                    max_abs: value.abs(),
                    offending: Some((
                        label.to_string(),
                        idx.iter().map(|i| i + 1).collect(),
                        d.to_expr(chart).to_string(),
                    )),
                };
            }
            ZeroVerdict::ProvedZero => {}
        }
    }
    TensorCheck {
        tensor: name,
        verdict: if proved { "ProvedZero" } else { "NumericallyZero" }.into(),
        max_abs,
        offending: None,
    }
}

fn scalar_tensor(x: &RatFunc) -> Tensor<RatFunc> {
    Tensor::from_vec(&[], vec![x.clone()])
}

fn all_checks(spec: &WarpedSpec, pr: &Predicted<RatFunc>, d: &Direct, cfg: &ZeroTest) -> Vec<TensorCheck> {
    vec![
        compare(spec, "R", &pr.r, &d.r, cfg),
        compare(spec, "S", &pr.s, &d.s, cfg),
        compare(spec, "kappa", &scalar_tensor(&pr.kappa), &scalar_tensor(&d.kappa), cfg),
        compare(spec, "nabla_R", &pr.dr, &d.dr, cfg),
        compare(spec, "g^g", &pr.gg, &d.gg, cfg),
        compare(spec, "g^S", &pr.gs, &d.gs, cfg),
        compare(spec, "S^S", &pr.ss, &d.ss, cfg),
    ]
}

/// Compare every predicted tensor with the direct computation, then test each
/// printed alternative reading on its own.
pub fn crosscheck(spec: &WarpedSpec, cfg: &ZeroTest) -> CrosscheckReport {
    let d = direct(spec);
    let parts = spec.parts();
    let pr = predict_from_parts(parts, Readings::default());
    let tensors = all_checks(spec, &pr, &d, cfg);

    let alternatives: [(Readings, &'static str, &'static str, &'static str); 4] = [
        (
            Readings { r_fiber_minus: true, ..Default::default() },
            "R_αβγδ",
            "f R̃ − f² P G̃",
            "f R̃ + f² P G̃",
        ),
        (
            Readings { kappa_minus: true, ..Default::default() },
            "κ",
            "κ̄ + κ̃/f − N[(N−1)P − 2 tr T]",
            "κ̄ + κ̃/f + N[(N−1)P − 2 tr T]",
        ),
        (
            Readings { ss_base_single: true, ..Default::default() },
            "(S∧S)_abcd",
            "S̄∧S̄ − N S̄∧T + N² T∧T",
            "S̄∧S̄ − 2N S̄∧T + N² T∧T",
        ),
        (
            Readings { ss_fiber_single: true, ..Default::default() },
            "(S∧S)_αβγδ",
            "S̃∧S̃ + Q g̃∧S̃ + Q² g̃∧g̃",
            "S̃∧S̃ + 2Q g̃∧S̃ + Q² g̃∧g̃",
        ),
    ];
    let printed = alternatives
        .iter()
        .map(|(rd, quantity, printed, verified)| {
            let alt = predict_from_parts(parts, *rd);
            let chk = if rd.r_fiber_minus {
                compare(spec, "R", &alt.r, &d.r, cfg)
            } else if rd.kappa_minus {
                compare(spec, "kappa", &scalar_tensor(&alt.kappa), &scalar_tensor(&d.kappa), cfg)
            } else {
                compare(spec, "S^S", &alt.ss, &d.ss, cfg)
            };
            PrintedFinding {
                quantity,
                printed,
                verified,
                printed_agrees: chk.verdict != "NonZero",
                offending: chk.offending,
            }
        })
        .collect();
    CrosscheckReport { tensors, printed }
}
