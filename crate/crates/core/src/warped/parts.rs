//! Base and fiber ingredients on the product chart, and the blockwise
//! component formulas assembled from them.

use serde::Serialize;

use super::WarpedSpec;
use crate::knproducts::{gaussian, kn};
use crate::symexpr::{EvalError, PointValues, RatFunc, Real};
use crate::tensor::{Field, Tensor};

/// Everything the component formulas consume, generic over exact or numeric scalars.
/// Base tensors are indexed `0..p`, fiber tensors `0..q`.
#[derive(Debug, Clone)]
pub struct WarpedParts<F> {
    pub p: usize,
    pub q: usize,
    pub f: F,
    pub f_inv: F,
    pub df: Vec<F>,
    pub df_up: Vec<F>,
    pub dp: Vec<F>,
    pub pp: F,
    pub qq: F,
    pub tr_t: F,
    pub gb: Tensor<F>,
    pub sb: Tensor<F>,
    pub rb: Tensor<F>,
    pub drb: Tensor<F>,
    pub t: Tensor<F>,
    pub dt: Tensor<F>,
    pub kappa_b: F,
    pub gf: Tensor<F>,
    pub sf: Tensor<F>,
    pub rf: Tensor<F>,
    pub drf: Tensor<F>,
    pub kappa_f: F,
}

impl WarpedParts<RatFunc> {
    pub(super) fn symbolic(spec: &WarpedSpec) -> Self {
        let aux = spec.aux();
        let base = spec.base();
        let fib = spec.fiber();
        let lf = |t: &Tensor<RatFunc>| t.map(|x| spec.lift_fiber(x));
        WarpedParts {
            p: spec.base_dim(),
            q: spec.fiber_dim(),
            f: spec.f().clone(),
            f_inv: spec.f().inv().expect("f is nonzero"),
            df: aux.df.clone(),
            df_up: aux.df_up.clone(),
            dp: aux.dp.clone(),
            pp: aux.p.clone(),
            qq: aux.q.clone(),
            tr_t: aux.tr_t.clone(),
            gb: base.g().clone(),
            sb: base.ricci().clone(),
            rb: base.riemann().clone(),
            drb: base.nabla_riemann().clone(),
            t: aux.t.clone(),
            dt: aux.dt.clone(),
            kappa_b: base.scalar_curvature().clone(),
            gf: lf(fib.g()),
            sf: lf(fib.ricci()),
            rf: lf(fib.riemann()),
            drf: lf(fib.nabla_riemann()),
            kappa_f: spec.lift_fiber(fib.scalar_curvature()),
        }
    }

    /// Values at a point of the product chart.
    pub fn eval(&self, at: &PointValues, g: &Real) -> Result<WarpedParts<Real>, EvalError> {
        let s = |x: &RatFunc| x.eval(at, g);
        let v = |xs: &[RatFunc]| xs.iter().map(|x| x.eval(at, g)).collect::<Result<Vec<_>, _>>();
        let t = |x: &Tensor<RatFunc>| x.eval(at, g);
        Ok(WarpedParts {
            p: self.p,
            q: self.q,
            f: s(&self.f)?,
            f_inv: s(&self.f_inv)?,
            df: v(&self.df)?,
            df_up: v(&self.df_up)?,
            dp: v(&self.dp)?,
            pp: s(&self.pp)?,
            qq: s(&self.qq)?,
            tr_t: s(&self.tr_t)?,
            gb: t(&self.gb)?,
            sb: t(&self.sb)?,
            rb: t(&self.rb)?,
            drb: t(&self.drb)?,
            t: t(&self.t)?,
            dt: t(&self.dt)?,
            kappa_b: s(&self.kappa_b)?,
            gf: t(&self.gf)?,
            sf: t(&self.sf)?,
            rf: t(&self.rf)?,
            drf: t(&self.drf)?,
            kappa_f: s(&self.kappa_f)?,
        })
    }
}

/// Switches selecting the printed form of the four formulas that disagree
/// with the direct computation. All `false` is the verified set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Readings {
    /// `R_αβγδ = f R̃ − f² P G̃` instead of `+ f² P G̃`.
    pub r_fiber_minus: bool,
    /// `κ = κ̄ + κ̃/f − N[(N−1)P − 2 tr T]` instead of `+ N[…]`.
    pub kappa_minus: bool,
    /// `(S∧S)_abcd` with `− N S̄∧T` instead of `− 2N S̄∧T`.
    pub ss_base_single: bool,
    /// `(S∧S)_αβγδ` with `Q g̃∧S̃` instead of `2Q g̃∧S̃`.
    pub ss_fiber_single: bool,
}

#[derive(Debug, Clone)]
pub struct Predicted<F> {
    pub r: Tensor<F>,
    pub s: Tensor<F>,
    pub kappa: F,
    pub dr: Tensor<F>,
    pub gg: Tensor<F>,
    pub gs: Tensor<F>,
    pub ss: Tensor<F>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    Base,
    Mixed,
    Fiber,
    /// Any other index pattern; predicted zero.
    Other,
}

/// Block of a 4- or 5-index tuple, named by the formula case it falls under.
pub fn block_label(p: usize, idx: &[usize]) -> &'static str {
    let fb: Vec<bool> = idx.iter().map(|&i| i >= p).collect();
    let nf = fb.iter().filter(|x| **x).count();
    if idx.len() == 4 {
        return match nf {
            0 => "base",
            4 => "fiber",
            2 => "mixed",
            _ => "other",
        };
    }
    let (head, m) = (&fb[..4], fb[4]);
    let hf = head.iter().filter(|x| **x).count();
    match (hf, m) {
        (0, false) => "(i)",
        (2, false) => "(ii)",
        (4, false) => "(iii)",
        (4, true) => "(iv)",
        (3, true) => "(v)",
        (1, true) => "(vi)",
        _ => "other",
    }
}

fn mul3<F: Field>(a: &F, b: &F, c: &F) -> F {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        F::zero()
    } else {
        a.mul(b).mul(c)
    }
}

/// Riemann-type (0,4) tensor from base, mixed `X(a,b,α,β)` and fiber blocks.
fn blocks4<F: Field>(
    p: usize,
    n: usize,
    base: impl Fn(usize, usize, usize, usize) -> F + Sync,
    mixed: impl Fn(usize, usize, usize, usize) -> F + Sync,
    fiber: impl Fn(usize, usize, usize, usize) -> F + Sync,
) -> Tensor<F> {
    Tensor::riemann_type(n, |i, j, k, l| {
        match (i >= p, j >= p, k >= p, l >= p) {
            (false, false, false, false) => base(i, j, k, l),
            (true, true, true, true) => fiber(i - p, j - p, k - p, l - p),
            (false, true, false, true) => mixed(i, k, j - p, l - p),
            _ => F::zero(),
        }
    })
}

/// Component formulas for R, S, κ, ∇R, g∧g, g∧S and S∧S of the warped product.
pub fn predict_from_parts<F: Field>(w: &WarpedParts<F>, rd: Readings) -> Predicted<F> {
    let (p, q) = (w.p, w.q);
    let n = p + q;
    let nn = F::from_int(q as i64);
    let f = &w.f;
    let f2 = f.mul(f);
    let gf_g = gaussian(&w.gf);
    let half = F::ratio(1, 2);

    // S̄ − N T and S̃ + Q g̃
    let sb_mod = w.sb.sub(&w.t.scale(&nn));
    let sf_mod = w.sf.add(&w.gf.scale(&w.qq));

    let r_fiber_coeff = if rd.r_fiber_minus { f2.mul(&w.pp).neg() } else { f2.mul(&w.pp) };
    let r = blocks4(
        p,
        n,
        |a, b, c, d| w.rb.get(&[a, b, c, d]).clone(),
        |a, b, al, be| mul3(f, w.t.get(&[a, b]), w.gf.get(&[al, be])),
        |al, be, ga, de| {
            f.mul(w.rf.get(&[al, be, ga, de]))
                .add(&r_fiber_coeff.mul(gf_g.get(&[al, be, ga, de])))
        },
    );

    let s = Tensor::symmetric2(n, |i, j| match (i >= p, j >= p) {
        (false, false) => sb_mod.get(&[i, j]).clone(),
        (true, true) => sf_mod.get(&[i - p, j - p]).clone(),
        _ => F::zero(),
    });

    let bracket = nn
        .sub(&F::one())
        .mul(&w.pp)
        .sub(&F::from_int(2).mul(&w.tr_t))
        .mul(&nn);
    let kappa_base = w.kappa_b.add(&w.kappa_f.mul(&w.f_inv));
    let kappa = if rd.kappa_minus {
        kappa_base.sub(&bracket)
    } else {
        kappa_base.add(&bracket)
    };

    let gb_gb = kn(&w.gb, &w.gb);
    let gf_gf = kn(&w.gf, &w.gf);
    let gg = blocks4(
        p,
        n,
        |a, b, c, d| gb_gb.get(&[a, b, c, d]).clone(),
        |a, b, al, be| mul3(&F::from_int(-2), f, &w.gb.get(&[a, b]).mul(w.gf.get(&[al, be]))),
        |al, be, ga, de| f2.mul(gf_gf.get(&[al, be, ga, de])),
    );

    let gb_sb = kn(&w.gb, &w.sb);
    let gb_t = kn(&w.gb, &w.t);
    let gf_sf = kn(&w.gf, &w.sf);
    let gs = blocks4(
        p,
        n,
        |a, b, c, d| {
            gb_sb.get(&[a, b, c, d]).sub(&nn.mul(gb_t.get(&[a, b, c, d])))
        },
        |a, b, al, be| {
            w.gb.get(&[a, b])
                .mul(sf_mod.get(&[al, be]))
                .add(&f.mul(w.gf.get(&[al, be])).mul(sb_mod.get(&[a, b])))
                .neg()
        },
        |al, be, ga, de| {
            f.mul(gf_sf.get(&[al, be, ga, de]))
                .add(&f.mul(&w.qq).mul(gf_gf.get(&[al, be, ga, de])))
        },
    );

    let sb_sb = kn(&w.sb, &w.sb);
    let sb_t = kn(&w.sb, &w.t);
    let t_t = kn(&w.t, &w.t);
    let sf_sf = kn(&w.sf, &w.sf);
    let base_cross = if rd.ss_base_single { nn.clone() } else { F::from_int(2).mul(&nn) };
    let fiber_cross = if rd.ss_fiber_single {
        w.qq.clone()
    } else {
        F::from_int(2).mul(&w.qq)
    };
    let ss = blocks4(
        p,
        n,
        |a, b, c, d| {
            sb_sb
                .get(&[a, b, c, d])
                .sub(&base_cross.mul(sb_t.get(&[a, b, c, d])))
                .add(&nn.mul(&nn).mul(t_t.get(&[a, b, c, d])))
        },
        |a, b, al, be| {
            F::from_int(-2)
                .mul(sf_mod.get(&[al, be]))
                .mul(sb_mod.get(&[a, b]))
        },
        |al, be, ga, de| {
            sf_sf
                .get(&[al, be, ga, de])
                .add(&fiber_cross.mul(gf_sf.get(&[al, be, ga, de])))
                .add(&w.qq.mul(&w.qq).mul(gf_gf.get(&[al, be, ga, de])))
        },
    );

    // ∇R, cases (i)–(vi); every other pattern vanishes.
    let v = |al: usize, be: usize, ga: usize, d: usize, ep: usize| -> F {
        let a = mul3(&half, &w.df[d], w.rf.get(&[al, be, ga, ep])).neg();
        let b = mul3(&half.mul(&f2), &w.dp[d], gf_g.get(&[al, be, ga, ep]));
        a.add(&b)
    };
    let vi = |a: usize, b: usize, c: usize, de: usize, ep: usize| -> F {
        let g = w.gf.get(&[ep, de]);
        if g.is_zero() {
            return F::zero();
        }
        let mut acc = w.df[a].mul(w.t.get(&[b, c])).sub(&w.df[b].mul(w.t.get(&[a, c])));
        for d in 0..p {
            let r = w.rb.get(&[a, b, c, d]);
            if !r.is_zero() && !w.df_up[d].is_zero() {
                acc = acc.add(&w.df_up[d].mul(r));
            }
        }
        acc.mul(&half).mul(g)
    };
    let dr = Tensor::riemann_type5(n, |i, j, k, l, m| {
        let b = |x: usize| x >= p;
        match (b(i), b(j), b(k), b(l), b(m)) {
            (false, false, false, false, false) => w.drb.get(&[i, j, k, l, m]).clone(),
            (false, true, false, true, false) => {
                mul3(f, w.dt.get(&[i, k, m]), w.gf.get(&[j - p, l - p]))
            }
            (true, true, true, true, false) => {
                let (al, be, ga, de) = (i - p, j - p, k - p, l - p);
                w.df[m]
                    .mul(w.rf.get(&[al, be, ga, de]))
                    .neg()
                    .add(&mul3(&f2, &w.dp[m], gf_g.get(&[al, be, ga, de])))
            }
            (true, true, true, true, true) => {
                f.mul(w.drf.get(&[i - p, j - p, k - p, l - p, m - p]))
            }
            // (d α | β γ) = −(β γ α d)
            (false, true, true, true, true) => v(k - p, l - p, j - p, i, m - p).neg(),
            // (α β | d γ) = −(α β γ d)
            (true, true, false, true, true) => v(i - p, j - p, l - p, k, m - p).neg(),
            (false, false, false, true, true) => vi(i, j, k, l - p, m - p),
            // (a δ | b c) = (b c a δ)
            (false, true, false, false, true) => vi(k, l, i, j - p, m - p),
            _ => F::zero(),
        }
    });

    Predicted {
        r,
        s,
        kappa,
        dr,
        gg,
        gs,
        ss,
    }
}
