//! Two-tier zero testing: canonical form first, then seeded high-precision sampling.

use dashu_ratio::RBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ratfunc::{PointValues, RatFunc};
use super::real::Real;
use super::{Chart, EvalError, Expr};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Denominators smaller than this at a sample point cause the point to be rejected.
pub const SINGULAR_GUARD: f64 = 1e-12;

/// Largest denominator of sampled coordinates; coordinates are `k/64` in [-1, 1].
pub const SAMPLE_DENOMINATOR: i64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum ZeroVerdict {
    ProvedZero,
    NumericallyZero { max_abs: f64, samples: usize },
    NonZero { witness: Vec<(String, String)>, value: f64 },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ZeroVerdict::ProvedZero => "ProvedZero",
            ZeroVerdict::NumericallyZero { .. } => "NumericallyZero",
            ZeroVerdict::NonZero { .. } => "NonZero",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZeroTest {
    pub samples: usize,
    pub tol_abs: f64,
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            samples: 16,
            tol_abs: 1e-30,
            seed: DEFAULT_SEED,
            max_attempts: 1000,
        }
    }
}

/// Seeded source of rational sample points.
pub struct SampleBox {
    rng: ChaCha8Rng,
}

impl SampleBox {
    pub fn new(seed: u64) -> Self {
        SampleBox {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_point(&mut self, dim: usize) -> Vec<RBig> {
        (0..dim)
            .map(|_| {
                let k = self.rng.gen_range(-SAMPLE_DENOMINATOR..=SAMPLE_DENOMINATOR);
                RBig::from(k) / RBig::from(SAMPLE_DENOMINATOR)
            })
            .collect()
    }
}

/// Draw `n` points accepted by `accept`, giving up after `max_attempts` draws.
pub fn sample_points(
    dim: usize,
    n: usize,
    seed: u64,
    max_attempts: usize,
    mut accept: impl FnMut(&[RBig]) -> bool,
) -> Option<Vec<Vec<RBig>>> {
    let mut sb = SampleBox::new(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        if attempts >= max_attempts {
            return None;
        }
        attempts += 1;
        let p = sb.next_point(dim);
        if accept(&p) {
            out.push(p);
        }
    }
    Some(out)
}

pub fn guard() -> Real {
    Real::from_f64(SINGULAR_GUARD)
}

pub fn render_point(chart: &Chart, p: &[RBig]) -> Vec<(String, String)> {
    chart
        .names()
        .zip(p)
        .map(|(n, v)| (n.to_string(), v.to_string()))
        .collect()
}

/// Zero test with default settings over the expression's own symbols.
pub fn is_zero(e: &Expr) -> ZeroVerdict {
    let chart = e.implicit_chart().unwrap_or_else(|| Chart::numbered("_", 1));
    is_zero_in(e, &chart, &ZeroTest::default())
}

pub fn is_zero_in(e: &Expr, chart: &Chart, cfg: &ZeroTest) -> ZeroVerdict {
    if let Ok(r) = e.to_ratfunc(chart) {
        if r.is_zero() {
            return ZeroVerdict::ProvedZero;
        }
    }
    let g = guard();
    sample_verdict(chart, cfg, |p| {
        let vals: Vec<Real> = p.iter().map(Real::from_rbig).collect();
        e.eval_with(
            &|s| chart.index_of(s).map(|i| vals[i].clone()),
            &g,
        )
    })
}

pub fn is_zero_ratfunc(r: &RatFunc, chart: &Chart, cfg: &ZeroTest) -> ZeroVerdict {
    if r.is_zero() {
        return ZeroVerdict::ProvedZero;
    }
    let g = guard();
    sample_verdict(chart, cfg, |p| r.eval(&PointValues::new(p), &g))
}

fn sample_verdict(
    chart: &Chart,
    cfg: &ZeroTest,
    eval: impl Fn(&[RBig]) -> Result<Real, EvalError>,
) -> ZeroVerdict {
    let tol = Real::from_f64(cfg.tol_abs);
    let mut sb = SampleBox::new(cfg.seed);
    let mut max_abs = Real::zero();
    let mut taken = 0;
    let mut attempts = 0;
    while taken < cfg.samples && attempts < cfg.max_attempts {
        attempts += 1;
        let p = sb.next_point(chart.dim());
        let v = match eval(&p) {
            Ok(v) => v,
            Err(_) => continue,
        };
        taken += 1;
        let a = v.abs();
        if a >= tol {
            return ZeroVerdict::NonZero {
                witness: render_point(chart, &p),
                value: v.to_f64(),
            };
        }
        max_abs = max_abs.max(a);
    }
    ZeroVerdict::NumericallyZero {
        max_abs: max_abs.to_f64(),
        samples: taken,
    }
}
