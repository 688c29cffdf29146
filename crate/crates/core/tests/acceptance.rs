//! Acceptance criteria 1–8, one PASS/FAIL line each. Tolerances are pinned here.

use std::time::{Duration, Instant};

use warpcurv::geometry::{check_invariants, MetricField};
use warpcurv::knproducts::kn;
use warpcurv::recurrence::{classify, olszak_degeneracy_check, ClassifyOptions, StructureKind, Verdict, TOL_REL};
use warpcurv::symexpr::{parse_expr, Chart, Expr, RatFunc, ZeroTest, DEFAULT_SEED};
use warpcurv::tensor::Tensor;
use warpcurv::theorems::example1::{
    self, base_metric, golden_values, printed_forms, psi_case, psi_cases, unit_psi, warped_spec,
};
use warpcurv::theorems::{check_equivalence, perturbation_sweep, FormsSource};
use warpcurv::warped::{crosscheck, random_two_plus_two, WarpedSpec};

const SAMPLES: usize = 16;
const POINTWISE_TOL: f64 = 1e-12;
const FAIL_MARGIN: f64 = 1e-3;
const NUMERIC_ZERO: f64 = 1e-30;
const THETA_TOL: f64 = 1e-12;
const CROSSCHECK_BUDGET: Duration = Duration::from_secs(60);
const RANDOM_SEEDS: [u64; 3] = [101, 202, 303];

type Outcome = Result<String, String>;

fn diag(names: &[&str], comps: &[&str]) -> MetricField {
    let chart = Chart::new(names).unwrap();
    let d: Vec<Expr> = comps.iter().map(|s| parse_expr(s).unwrap()).collect();
    MetricField::diagonal(chart, &d).unwrap()
}

fn random_instances() -> Vec<WarpedSpec> {
    RANDOM_SEEDS
        .iter()
        .map(|s| random_two_plus_two(*s, parse_expr("exp(x1)").unwrap()).unwrap())
        .collect()
}

fn curved_product() -> WarpedSpec {
    random_two_plus_two(DEFAULT_SEED, Expr::int(1)).unwrap()
}

fn criterion1() -> Outcome {
    let gv = golden_values();
    let bad: Vec<_> = gv.iter().filter(|g| g.verdict != "ProvedZero").map(|g| g.quantity).collect();
    if bad.is_empty() {
        Ok(format!("{} printed values are ProvedZero differences", gv.len()))
    } else {
        Err(format!("not proved: {bad:?}"))
    }
}

fn criterion2() -> Outcome {
    let br = example1::base_recurrence(SAMPLES, DEFAULT_SEED).map_err(|e| e.to_string())?;
    if br.closed_form.iter().any(|v| *v != "ProvedZero") {
        return Err(format!("closed-form Π̄ components: {:?}", br.closed_form));
    }
    if br.samples < SAMPLES || br.max_point_residual >= POINTWISE_TOL {
        return Err(format!("{} points, max residual {:.3e}", br.samples, br.max_point_residual));
    }
    Ok(format!("Π̄ ProvedZero componentwise; {} points, max residual {:.3e}", br.samples, br.max_point_residual))
}

fn criterion3() -> Outcome {
    let mut worst: f64 = 0.0;
    for psi in psi_cases(DEFAULT_SEED) {
        let c = psi_case(&psi, SAMPLES, DEFAULT_SEED).map_err(|e| e.to_string())?;
        if c.symbolic == "NonZero" || c.max_residual >= POINTWISE_TOL {
            return Err(format!("Ψ = {}: symbolic {}, residual {:.3e}", c.psi, c.symbolic, c.max_residual));
        }
        worst = worst.max(c.max_residual);
    }
    let opts = ClassifyOptions { samples: SAMPLES, ..ClassifyOptions::default() };
    let spec = warped_spec();
    let cr = classify(spec.metric(), &[StructureKind::SGK, StructureKind::HGK, StructureKind::WGK], &opts)
        .map_err(|e| e.to_string())?;
    let sgk = cr.get(StructureKind::SGK).unwrap();
    if !sgk.verdict.holds() || sgk.max_residual >= POINTWISE_TOL {
        return Err(format!("SGK4 {:?}, residual {:.3e}", sgk.verdict, sgk.max_residual));
    }
    for k in [StructureKind::HGK, StructureKind::WGK] {
        let s = cr.get(k).unwrap();
        if s.verdict != Verdict::Fails || s.max_residual <= FAIL_MARGIN {
            return Err(format!("{}4 {:?}, residual {:.3e}", k.name(), s.verdict, s.max_residual));
        }
    }
    Ok(format!(
        "5 Ψ cases residual ≤ {worst:.3e}; SGK4 Holds; HGK4 Fails ({:.3e}); WGK4 Fails ({:.3e})",
        cr.get(StructureKind::HGK).unwrap().max_residual,
        cr.get(StructureKind::WGK).unwrap().max_residual
    ))
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let cfg = ZeroTest::default();
    let product = curved_product();
    if product.base().is_flat() || product.fiber().is_flat() {
        return Err("f ≡ 1 product: a factor is flat".into());
    }
    let mut cases: Vec<(String, WarpedSpec)> = vec![("example".into(), warped_spec()), ("f ≡ 1 product".into(), product)];
    for (s, w) in RANDOM_SEEDS.iter().zip(random_instances()) {
        cases.push((format!("random 2+2 seed {s}"), w));
    }
    let mut proved = 0;
    let mut numeric = 0;
    for (name, spec) in &cases {
        let rep = crosscheck(spec, &cfg);
        for t in &rep.tensors {
            match t.verdict.as_str() {
                "ProvedZero" => proved += 1,
                "NumericallyZero" if t.max_abs < NUMERIC_ZERO => numeric += 1,
                _ => return Err(format!("{name}: {} {} (max {:.3e})", t.tensor, t.verdict, t.max_abs)),
            }
        }
    }
    let el = start.elapsed();
    if el >= CROSSCHECK_BUDGET {
        return Err(format!("took {el:?}"));
    }
    Ok(format!("{} instances, {proved} ProvedZero, {numeric} NumericallyZero, {el:.2?}", cases.len()))
}

fn riemann_type_defects(t: &Tensor<RatFunc>) -> usize {
    let n = t.shape()[0];
    let mut bad = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = t.get(&[i, j, k, l]);
                    let checks = [
                        v.add(t.get(&[j, i, k, l])),
                        v.add(t.get(&[i, j, l, k])),
                        v.sub(t.get(&[k, l, i, j])),
                        v.add(t.get(&[i, k, l, j])).add(t.get(&[i, l, j, k])),
                    ];
                    bad += checks.iter().filter(|c| !c.is_zero()).count();
                }
            }
        }
    }
    bad
}

fn criterion5() -> Outcome {
    let mut metrics: Vec<(String, MetricField)> = vec![
        ("example base".into(), base_metric()),
        ("example 4D".into(), warped_spec().metric().clone()),
        ("flat 3".into(), diag(&["x", "y", "z"], &["1", "1", "1"])),
        ("hyperbolic 3".into(), diag(&["x", "y", "z"], &["1", "exp(2*x)", "exp(2*x)"])),
        ("f ≡ 1 product".into(), curved_product().metric().clone()),
    ];
    for (s, w) in RANDOM_SEEDS.iter().zip(random_instances()) {
        metrics.push((format!("random 2+2 seed {s}"), w.metric().clone()));
    }
    let cfg = ZeroTest::default();
    let mut checks = 0;
    for (name, m) in &metrics {
        for c in check_invariants(m, &cfg) {
            if !c.holds {
                return Err(format!("{name}: {} fails at {:?}", c.name, c.failure));
            }
            checks += c.checked;
        }
        let (g, s) = (m.g(), m.ricci());
        if !kn(g, s).sub(&kn(s, g)).is_exact_zero() {
            return Err(format!("{name}: g∧S ≠ S∧g"));
        }
        for (label, t) in [("g∧g", kn(g, g)), ("g∧S", kn(g, s)), ("S∧S", kn(s, s))] {
            let d = riemann_type_defects(&t);
            if d > 0 {
                return Err(format!("{name}: {label} breaks {d} Riemann-type identities"));
            }
        }
    }
    Ok(format!("{} metrics (n ≤ 4), {checks} index tuples, KN products symmetric and Riemann-type", metrics.len()))
}

fn criterion6() -> Outcome {
    let mut instances: Vec<(String, MetricField)> = vec![
        ("example base".into(), base_metric()),
        ("example 4D".into(), warped_spec().metric().clone()),
        ("hyperbolic 3".into(), diag(&["x", "y", "z"], &["1", "exp(2*x)", "exp(2*x)"])),
    ];
    for (s, w) in RANDOM_SEEDS.iter().zip(random_instances()) {
        instances.push((format!("random 2+2 seed {s}"), w.metric().clone()));
    }
    let opts = ClassifyOptions { samples: SAMPLES, ..ClassifyOptions::default() };
    let mut solved = 0;
    let mut worst: f64 = 0.0;
    for (name, m) in &instances {
        let ol = olszak_degeneracy_check(m, &opts).map_err(|e| format!("{name}: {e}"))?;
        for p in ol.points.iter().filter(|p| p.solved) {
            let t = p.theta_max_abs.unwrap_or(f64::INFINITY);
            if t >= THETA_TOL {
                return Err(format!("{name}: point {} has |Θ| = {t:.3e}", p.index));
            }
            solved += 1;
            worst = worst.max(t);
        }
        if !ol.consistent {
            return Err(format!("{name}: {}", ol.note));
        }
    }
    if solved == 0 {
        return Err("GK solved at no point".into());
    }
    Ok(format!("{} instances, GK solved at {solved} points, max |Θ| {worst:.3e}", instances.len()))
}

fn criterion7() -> Outcome {
    let spec = warped_spec();
    let forms = printed_forms(&unit_psi(2));
    let mut runs = vec![
        ("example, given forms".to_string(), check_equivalence(&spec, FormsSource::Given(&forms), SAMPLES, DEFAULT_SEED, TOL_REL)),
        ("example, recovered forms".to_string(), check_equivalence(&spec, FormsSource::Recovered, SAMPLES, DEFAULT_SEED, TOL_REL)),
    ];
    for (s, w) in RANDOM_SEEDS.iter().zip(random_instances()) {
        runs.push((format!("random 2+2 seed {s}"), check_equivalence(&w, FormsSource::Recovered, SAMPLES, *s, TOL_REL)));
    }
    let mut hold = 0;
    let mut fail = 0;
    for (name, r) in runs {
        let r = r.map_err(|e| format!("{name}: {e}"))?;
        if !r.agree {
            return Err(format!("{name}: classification and conditions disagree"));
        }
        hold += r.both_hold;
        fail += r.both_fail;
    }
    let sweep = perturbation_sweep(&spec, &forms, SAMPLES, DEFAULT_SEED, TOL_REL).map_err(|e| e.to_string())?;
    if let Some(p) = sweep.iter().find(|p| p.failing.is_empty()) {
        return Err(format!("perturbing {}_{} breaks no condition", p.form, p.component));
    }
    Ok(format!("agree at every point ({hold} both hold, {fail} both fail); {} perturbations all flip", sweep.len()))
}

fn criterion8() -> Outcome {
    let rep = example1::run(SAMPLES, DEFAULT_SEED).map_err(|e| e.to_string())?;
    let q: Vec<&str> = rep.discrepancies.iter().map(|d| d.quantity.as_str()).collect();
    for want in ["S̄_11", "S̄_22", "condition 2(i)", "condition 4(ii)"] {
        if !q.contains(&want) {
            return Err(format!("{want} not flagged"));
        }
    }
    let mut resolved = Vec::new();
    for quantity in ["2(i)", "4(ii)"] {
        let matching: Vec<_> = rep
            .readings_discriminator
            .iter()
            .filter(|f| f.quantity == quantity && f.matches)
            .collect();
        if matching.is_empty() {
            return Err(format!("no reading of {quantity} matches the direct computation"));
        }
        resolved.push(format!("{quantity} → {}", matching.iter().map(|f| f.statement).collect::<Vec<_>>().join(" | ")));
    }
    Ok(format!("S̄_11, S̄_22 flagged; {}", resolved.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden values", criterion1),
        ("base recurrence", criterion2),
        ("SGK4 verdict", criterion3),
        ("block formula oracle", criterion4),
        ("property suite", criterion5),
        ("GK degeneracy", criterion6),
        ("condition equivalence", criterion7),
        ("printed discrepancies", criterion8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match f() {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} [{:.2?}]", i + 1, t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg} [{:.2?}]", i + 1, t.elapsed());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
