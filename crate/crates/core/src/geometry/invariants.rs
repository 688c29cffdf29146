//! Identity checks on a computed curvature pipeline.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::MetricField;
use crate::symexpr::{is_zero_ratfunc, RatFunc, ZeroTest, ZeroVerdict};
use crate::tensor::indices;

/// Index tuples are checked exhaustively up to this dimension, sampled above it.
const EXHAUSTIVE_MAX_DIM: usize = 4;
const SAMPLED_TUPLES: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub checked: usize,
    pub holds: bool,
    pub proved: bool,
    /// First failing index tuple (0-based) with its verdict.
    pub failure: Option<(Vec<usize>, ZeroVerdict)>,
}

fn run(
    name: &'static str,
    m: &MetricField,
    shape: &[usize],
    cfg: &ZeroTest,
    residual: impl Fn(&[usize]) -> RatFunc,
) -> InvariantCheck {
    let mut tuples = indices(shape);
    if m.dim() > EXHAUSTIVE_MAX_DIM && tuples.len() > SAMPLED_TUPLES {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        tuples.shuffle(&mut rng);
        tuples.truncate(SAMPLED_TUPLES);
    }
    let mut proved = true;
    for idx in &tuples {
        let r = residual(idx);
        if r.is_zero() {
            continue;
        }
        proved = false;
        let v = is_zero_ratfunc(&r, m.chart(), cfg);
        if !v.is_zero() {
            return InvariantCheck {
                name,
                checked: tuples.len(),
                holds: false,
                proved: false,
                failure: Some((idx.clone(), v)),
            };
        }
    }
    InvariantCheck {
        name,
        checked: tuples.len(),
        holds: true,
        proved,
        failure: None,
    }
}

/// Riemann symmetries, both Bianchi identities, metric compatibility and
/// symmetry of Γ and S.
pub fn check_invariants(m: &MetricField, cfg: &ZeroTest) -> Vec<InvariantCheck> {
    let n = m.dim();
    let r = m.riemann();
    let dr = m.nabla_riemann();
    let s = m.ricci();
    let gam = m.christoffel();
    let dg = m.covariant_derivative(m.g());
    vec![
        run("christoffel_symmetry", m, &[n, n, n], cfg, |x| {
            gam.get(&[x[0], x[1], x[2]]).sub(gam.get(&[x[0], x[2], x[1]]))
        }),
        run("riemann_antisym_12", m, &[n; 4], cfg, |x| {
            r.get(&[x[0], x[1], x[2], x[3]]).add(r.get(&[x[1], x[0], x[2], x[3]]))
        }),
        run("riemann_antisym_34", m, &[n; 4], cfg, |x| {
            r.get(&[x[0], x[1], x[2], x[3]]).add(r.get(&[x[0], x[1], x[3], x[2]]))
        }),
        run("riemann_pair_symmetry", m, &[n; 4], cfg, |x| {
            r.get(&[x[0], x[1], x[2], x[3]]).sub(r.get(&[x[2], x[3], x[0], x[1]]))
        }),
        run("first_bianchi", m, &[n; 4], cfg, |x| {
            let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
            r.get(&[i, j, k, l])
                .add(r.get(&[i, k, l, j]))
                .add(r.get(&[i, l, j, k]))
        }),
        run("second_bianchi", m, &[n; 5], cfg, |x| {
            let (i, j, k, l, q) = (x[0], x[1], x[2], x[3], x[4]);
            dr.get(&[i, j, k, l, q])
                .add(dr.get(&[i, j, l, q, k]))
                .add(dr.get(&[i, j, q, k, l]))
        }),
        run("metric_compatibility", m, &[n; 3], cfg, |x| dg.get(x).clone()),
        run("ricci_symmetry", m, &[n, n], cfg, |x| {
            s.get(&[x[0], x[1]]).sub(s.get(&[x[1], x[0]]))
        }),
    ]
}
