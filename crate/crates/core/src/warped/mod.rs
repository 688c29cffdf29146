//! Warped products `M̄ ×_f M̃` with metric `ḡ ⊕ f·g̃` (f unsquared), their
//! auxiliary base quantities and the blockwise component formulas.
//!
//! Indices: base `a, b, …` are `0..p` on the product chart, fiber `α, β, …`
//! are `p..n`.

mod crosscheck;
mod parts;

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::Serialize;

use crate::geometry::{GeometryError, MetricField};
use crate::symexpr::{
    guard, is_zero_ratfunc, render_point, sample_points, Chart, EvalError, Expr, ExprError,
    PointValues, RatFunc, Real, ZeroTest, DEFAULT_SEED,
};
use crate::tensor::{dot, Tensor};

pub use crosscheck::{crosscheck, CrosscheckReport, PrintedFinding, TensorCheck};
pub use parts::{
    block_label, predict_from_parts, BlockKind, Predicted, Readings, WarpedParts,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WarpedError {
    #[error("coordinate `{0}` appears in both base and fiber")]
    CoordinateCollision(String),
    #[error("warping function must depend on base coordinates only (found `{0}`)")]
    FiberCoordinateInF(String),
    #[error("warping function is identically zero")]
    ZeroWarping,
    #[error("warping function is not positive at {0}")]
    NonPositiveWarping(String),
    #[error("warping function is singular on the whole sample box")]
    SingularWarping,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Base metric, fiber metric and warping function on the base.
#[derive(Clone)]
pub struct WarpedSpec {
    base: MetricField,
    fiber: MetricField,
    f_expr: Expr,
    f: RatFunc,
    chart: Chart,
    metric: OnceLock<MetricField>,
    aux: OnceLock<WarpedAux>,
    parts: OnceLock<WarpedParts<RatFunc>>,
}

impl std::fmt::Debug for WarpedSpec {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            fm,
            "WarpedSpec({:?} x_f {:?}, f = {})",
            self.base.chart(),
            self.fiber.chart(),
            self.f_expr
        )
    }
}

impl WarpedSpec {
    pub fn new(base: MetricField, fiber: MetricField, f: Expr) -> Result<Self, WarpedError> {
        for name in fiber.chart().names() {
            if base.chart().index_of(name).is_some() {
                return Err(WarpedError::CoordinateCollision(name.to_string()));
            }
        }
        for s in f.symbols() {
            if base.chart().index_of(&s).is_none() {
                return Err(if fiber.chart().index_of(&s).is_some() {
                    WarpedError::FiberCoordinateInF(s)
                } else {
                    WarpedError::Expr(ExprError::UnknownSymbol(s))
                });
            }
        }
        let fr = f.to_ratfunc(base.chart())?;
        if fr.is_zero() {
            return Err(WarpedError::ZeroWarping);
        }
        let g = guard();
        let pts = sample_points(base.dim(), 16, DEFAULT_SEED, 16_000, |p| {
            fr.eval(&PointValues::new(p), &g).is_ok()
        })
        .ok_or(WarpedError::SingularWarping)?;
        for p in &pts {
            let v = fr.eval(&PointValues::new(p), &g).expect("accepted point");
            if v.is_negative() || v.is_zero() {
                let shown = render_point(base.chart(), p)
                    .into_iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(WarpedError::NonPositiveWarping(shown));
            }
        }
        let chart = base.chart().product(fiber.chart())?;
        Ok(WarpedSpec {
            base,
            fiber,
            f_expr: f,
            f: fr,
            chart,
            metric: OnceLock::new(),
            aux: OnceLock::new(),
            parts: OnceLock::new(),
        })
    }

    pub fn base(&self) -> &MetricField {
        &self.base
    }

    pub fn fiber(&self) -> &MetricField {
        &self.fiber
    }

    /// Warping function over base coordinates.
    pub fn f(&self) -> &RatFunc {
        &self.f
    }

    pub fn f_expr(&self) -> &Expr {
        &self.f_expr
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.dim()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Lift a base function onto the product chart (indices unchanged).
    pub fn lift_base(&self, r: &RatFunc) -> RatFunc {
        r.clone()
    }

    /// Lift a fiber function onto the product chart.
    pub fn lift_fiber(&self, r: &RatFunc) -> RatFunc {
        let p = self.base_dim();
        r.remap_coords(&|c| c + p)
    }

    /// The assembled metric on the product chart, cached.
    pub fn metric(&self) -> &MetricField {
        self.metric.get_or_init(|| {
            let p = self.base_dim();
            let n = self.dim();
            let gb = self.base.g();
            let gf = self.fiber.g();
            let g = Tensor::from_fn(&[n, n], |idx| {
                let (i, j) = (idx[0], idx[1]);
                match (i < p, j < p) {
                    (true, true) => gb.get(&[i, j]).clone(),
                    (false, false) => self.f.mul(&self.lift_fiber(gf.get(&[i - p, j - p]))),
                    _ => RatFunc::zero(),
                }
            });
            MetricField::from_components(self.chart.clone(), g)
                .expect("a warped product of nondegenerate metrics is nondegenerate")
        })
    }

    pub fn aux(&self) -> &WarpedAux {
        self.aux.get_or_init(|| warped_auxiliaries_of(self))
    }

    /// Every base/fiber ingredient lifted to the product chart.
    pub fn parts(&self) -> &WarpedParts<RatFunc> {
        self.parts.get_or_init(|| WarpedParts::symbolic(self))
    }
}

pub fn build_warped(spec: &WarpedSpec) -> MetricField {
    spec.metric().clone()
}

/// Base quantities built from f: `T_ab = −(1/2f)(∇̄_b f_a − f_a f_b/(2f))`,
/// `P = g^ab f_a f_b/(4f²)`, `tr T = g^ab T_ab`, `Q = f((n−p−1)P − tr T)`.
#[derive(Debug, Clone)]
pub struct WarpedAux {
    pub t: Tensor<RatFunc>,
    pub p: RatFunc,
    pub q: RatFunc,
    pub tr_t: RatFunc,
    pub df: Vec<RatFunc>,
    /// `f^a = ḡ^ab f_b`.
    pub df_up: Vec<RatFunc>,
    pub dp: Vec<RatFunc>,
    /// `T_ab,e` with the base connection.
    pub dt: Tensor<RatFunc>,
}

pub fn warped_auxiliaries(spec: &WarpedSpec) -> WarpedAux {
    spec.aux().clone()
}

fn warped_auxiliaries_of(spec: &WarpedSpec) -> WarpedAux {
    let base = spec.base();
    let p = base.dim();
    let fib = spec.fiber_dim() as i64;
    let f = spec.f();
    let finv = f.inv().expect("f is nonzero");
    let df: Vec<RatFunc> = (0..p).map(|a| f.diff(a)).collect();
    let ginv = base.inverse();
    let gam = base.christoffel();
    let half_finv = finv.mul(&RatFunc::ratio(-1, 2));
    let t = Tensor::symmetric2(p, |a, b| {
        let hess = dot((0..p).map(|c| (gam.get(&[c, b, a]).clone(), df[c].clone())));
        let nab = df[a].diff(b).sub(&hess);
        let corr = df[a].mul(&df[b]).mul(&finv).mul(&RatFunc::ratio(1, 2));
        half_finv.mul(&nab.sub(&corr))
    });
    let df_up: Vec<RatFunc> = (0..p)
        .map(|a| dot((0..p).map(|b| (ginv.get(&[a, b]).clone(), df[b].clone()))))
        .collect();
    let grad2 = dot((0..p).map(|a| (df_up[a].clone(), df[a].clone())));
    let pp = grad2.mul(&finv).mul(&finv).mul(&RatFunc::ratio(1, 4));
    let tr_t = dot(
        (0..p).flat_map(|a| (0..p).map(move |b| (a, b)))
            .map(|(a, b)| (ginv.get(&[a, b]).clone(), t.get(&[a, b]).clone())),
    );
    let q = f.mul(&pp.mul(&RatFunc::from_int(fib - 1)).sub(&tr_t));
    let dp = (0..p).map(|a| pp.diff(a)).collect();
    let dt = base.covariant_derivative(&t);
    WarpedAux {
        t,
        p: pp,
        q,
        tr_t,
        df,
        df_up,
        dp,
        dt,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuxCheck {
    pub t_symmetric: bool,
    pub p_contraction: String,
}

/// Re-derive P from its defining contraction and check T symmetry.
pub fn check_aux(spec: &WarpedSpec) -> AuxCheck {
    let aux = spec.aux();
    let p = spec.base_dim();
    let t_symmetric = (0..p).all(|a| (0..p).all(|b| aux.t.get(&[a, b]) == aux.t.get(&[b, a])));
    let g = spec.base().inverse();
    let f = spec.f();
    let mut acc = RatFunc::zero();
    for a in 0..p {
        for b in 0..p {
            acc = acc.add(&g.get(&[a, b]).mul(&aux.df[a]).mul(&aux.df[b]));
        }
    }
    let four_f2 = f.mul(f).mul(&RatFunc::from_int(4));
    let residual = acc.sub(&aux.p.mul(&four_f2));
    let v = is_zero_ratfunc(&residual, spec.base().chart(), &ZeroTest::default());
    AuxCheck {
        t_symmetric,
        p_contraction: v.label().to_string(),
    }
}

/// Evaluate `f` at a base point, rejecting singular points.
pub fn eval_f(spec: &WarpedSpec, pv: &PointValues) -> Result<Real, EvalError> {
    spec.f().eval(pv, &guard())
}

/// A diagonal 2-metric on `(u, v)` with entries `a + b·exp(c·v + d·u)` and
/// `a' + b'·exp(c'·u + d'·v)`, positive for a, b ≥ 1.
fn random_surface(rng: &mut ChaCha8Rng, u: &str, v: &str) -> MetricField {
    let mut entry = |own: &str, other: &str| -> Expr {
        let a = rng.gen_range(1i64..=3);
        let b = rng.gen_range(1i64..=3);
        let c = rng.gen_range(-1i64..=1);
        let d = rng.gen_range(-1i64..=1);
        let c = if c == 0 && d == 0 { 1 } else { c };
        let arg = Expr::int(c) * Expr::sym(other) + Expr::int(d) * Expr::sym(own);
        Expr::int(a) + Expr::int(b) * Expr::exp(arg)
    };
    let d = [entry(u, v), entry(v, u)];
    MetricField::diagonal(Chart::new(&[u, v]).expect("distinct names"), &d).expect("positive diagonal")
}

/// Seeded 2+2 warped product on `(x1, x2) × (x3, x4)` with curved factors.
pub fn random_two_plus_two(seed: u64, f: Expr) -> Result<WarpedSpec, WarpedError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_surface(&mut rng, "x1", "x2");
    let fiber = random_surface(&mut rng, "x3", "x4");
    WarpedSpec::new(base, fiber, f)
}
