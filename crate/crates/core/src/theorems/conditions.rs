//! The eight block conditions for `∇R = Π⊗R + Φ⊗S∧S + Ψ⊗g∧S + Θ⊗g∧g` on a
//! warped product, as residual tensors (left side minus right side).
//!
//! Index layouts: `1(i)` `[a,b,c,d,e]`, `1(ii)` `[a,b,c,d,ε]`, `2(i)` `[α,β,γ,δ,e]`,
//! `2(ii)` `[α,β,γ,δ,ε]`, `3(i)` `[a,b,α,β,e]`, `3(ii)` `[a,b,α,β,ε]`,
//! `4(i)` `[a,b,c]`, `4(ii)` `[α,β,γ,ε,d]`.

use serde::Serialize;

use crate::knproducts::{gaussian, kn};
use crate::symexpr::{PointValues, Real};
use crate::tensor::{Field, Tensor};
use crate::warped::WarpedParts;

use super::TheoremError;
use crate::recurrence::OneFormField;

pub const CONDITION_LABELS: [&str; 8] = [
    "1(i)", "1(ii)", "2(i)", "2(ii)", "3(i)", "3(ii)", "4(i)", "4(ii)",
];

/// The four associated 1-forms on the product chart.
#[derive(Debug, Clone)]
pub struct Forms<F> {
    pub pi: Vec<F>,
    pub phi: Vec<F>,
    pub psi: Vec<F>,
    pub theta: Vec<F>,
}

impl<F: Field> Forms<F> {
    pub fn zeros(n: usize) -> Self {
        Forms {
            pi: vec![F::zero(); n],
            phi: vec![F::zero(); n],
            psi: vec![F::zero(); n],
            theta: vec![F::zero(); n],
        }
    }

    pub fn get(&self, which: FormName) -> &Vec<F> {
        match which {
            FormName::Pi => &self.pi,
            FormName::Phi => &self.phi,
            FormName::Psi => &self.psi,
            FormName::Theta => &self.theta,
        }
    }

    pub fn get_mut(&mut self, which: FormName) -> &mut Vec<F> {
        match which {
            FormName::Pi => &mut self.pi,
            FormName::Phi => &mut self.phi,
            FormName::Psi => &mut self.psi,
            FormName::Theta => &mut self.theta,
        }
    }

    /// Copy with the named forms set to zero.
    pub fn zeroed(&self, names: &[FormName]) -> Self {
        let mut out = self.clone();
        for &w in names {
            for x in out.get_mut(w).iter_mut() {
                *x = F::zero();
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormName {
    Pi,
    Phi,
    Psi,
    Theta,
}

impl FormName {
    pub const ALL: [FormName; 4] = [FormName::Pi, FormName::Phi, FormName::Psi, FormName::Theta];

    pub fn as_str(self) -> &'static str {
        match self {
            FormName::Pi => "Pi",
            FormName::Phi => "Phi",
            FormName::Psi => "Psi",
            FormName::Theta => "Theta",
        }
    }
}

/// Symbolic 1-forms on the product chart.
#[derive(Debug, Clone)]
pub struct FormSet {
    pub pi: OneFormField,
    pub phi: OneFormField,
    pub psi: OneFormField,
    pub theta: OneFormField,
}

impl FormSet {
    pub fn symbolic(&self) -> Forms<crate::symexpr::RatFunc> {
        Forms {
            pi: self.pi.comps().to_vec(),
            phi: self.phi.comps().to_vec(),
            psi: self.psi.comps().to_vec(),
            theta: self.theta.comps().to_vec(),
        }
    }

    pub fn eval(&self, at: &PointValues, g: &Real) -> Result<Forms<Real>, crate::symexpr::EvalError> {
        Ok(Forms {
            pi: self.pi.eval(at, g)?,
            phi: self.phi.eval(at, g)?,
            psi: self.psi.eval(at, g)?,
            theta: self.theta.eval(at, g)?,
        })
    }

    pub fn check_chart(&self, dim: usize) -> Result<(), TheoremError> {
        for f in [&self.pi, &self.phi, &self.psi, &self.theta] {
            if f.chart().dim() != dim {
                return Err(TheoremError::FormsChart {
                    expected: dim,
                    got: f.chart().dim(),
                });
            }
        }
        Ok(())
    }
}

/// Coefficient of `g̃∧g̃` in 2(i): which printed form of the `P`, `dP` term to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum GgReading {
    /// `+½ f² (P Π̄ − dP)`, agreeing with the direct computation.
    #[default]
    Verified,
    /// `−½ f² (P Π̄ + dP)`, as stated with the theorem and the HGK corollary.
    PlusDp,
    /// `−½ f² (P Π̄ − dP)`, as stated with the WGK corollary.
    MinusPiMinusDp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConditionReadings {
    pub gg_2i: GgReading,
    /// 2(ii) with `Q Φ̃` and `−½ f² P Π̃` instead of `2Q Φ̃` and `+½ f² P Π̃`.
    pub printed_2ii: bool,
    /// 4(ii) read as `df ⊗ R̃ = f² Θ P ⊗ G̃` instead of `f² dP ⊗ G̃`.
    pub theta_p_4ii: bool,
}

#[derive(Debug, Clone)]
pub struct Condition<F> {
    pub label: &'static str,
    pub residual: Tensor<F>,
}

fn prod<F: Field>(xs: &[&F]) -> F {
    let mut acc = F::one();
    for x in xs {
        if x.is_zero() {
            return F::zero();
        }
        acc = acc.mul(x);
    }
    acc
}

fn lin<F: Field>(terms: &[(&F, &F)]) -> F {
    let mut acc = F::zero();
    for (a, b) in terms {
        if !a.is_zero() && !b.is_zero() {
            acc = acc.add(&a.mul(b));
        }
    }
    acc
}

/// `Σ t_b ⊗ w_b` with each `w_b` appended as the last index.
fn outer_sum<F: Field>(shape4: &[usize], terms: &[(&Tensor<F>, &[F])]) -> Tensor<F> {
    let mut shape = shape4.to_vec();
    shape.push(terms.first().map_or(0, |t| t.1.len()));
    let mut acc = Tensor::zeros(&shape);
    for (t, w) in terms {
        if w.iter().all(Field::is_zero) || t.is_exact_zero() {
            continue;
        }
        acc = acc.add(&t.outer_last(w));
    }
    acc
}

fn split<F: Clone>(v: &[F], p: usize) -> (Vec<F>, Vec<F>) {
    (v[..p].to_vec(), v[p..].to_vec())
}

/// All eight residuals under the given readings.
pub fn conditions<F: Field>(
    w: &WarpedParts<F>,
    forms: &Forms<F>,
    rd: ConditionReadings,
) -> Vec<Condition<F>> {
    let (p, q) = (w.p, w.q);
    let nn = F::from_int(q as i64);
    let two = F::from_int(2);
    let half = F::ratio(1, 2);
    let f = &w.f;
    let f2 = f.mul(f);
    let qq = &w.qq;

    let (pi_b, pi_f) = split(&forms.pi, p);
    let (phi_b, phi_f) = split(&forms.phi, p);
    let (psi_b, psi_f) = split(&forms.psi, p);
    let (th_b, th_f) = split(&forms.theta, p);

    let sbm = w.sb.sub(&w.t.scale(&nn));
    let ssb = kn(&w.sb, &w.sb)
        .sub(&kn(&w.sb, &w.t).scale(&two.mul(&nn)))
        .add(&kn(&w.t, &w.t).scale(&nn.mul(&nn)));
    let gsb = kn(&w.gb, &w.sb).sub(&kn(&w.gb, &w.t).scale(&nn));
    let ggb = kn(&w.gb, &w.gb);
    let ssf = kn(&w.sf, &w.sf);
    let gsf = kn(&w.gf, &w.sf);
    let ggf = kn(&w.gf, &w.gf);
    let gf_g = gaussian(&w.gf);
    let sh_b = [p; 4];
    let sh_f = [q; 4];

    // 1(i), 1(ii)
    let c1i = w.drb.sub(&outer_sum(
        &sh_b,
        &[(&w.rb, &pi_b), (&ssb, &phi_b), (&gsb, &psi_b), (&ggb, &th_b)],
    ));
    let c1ii = outer_sum(
        &sh_b,
        &[(&w.rb, &pi_f), (&ssb, &phi_f), (&gsb, &psi_f), (&ggb, &th_f)],
    )
    .neg();

    // 2(i)
    let lhs_coef: Vec<F> = (0..p)
        .map(|e| w.df[e].add(&f.mul(&pi_b[e])).neg())
        .collect();
    let gs_coef_b: Vec<F> = (0..p)
        .map(|e| lin(&[(&two.mul(qq), &phi_b[e]), (f, &psi_b[e])]))
        .collect();
    let gg_coef_b: Vec<F> = (0..p)
        .map(|e| {
            let pterm = match rd.gg_2i {
                GgReading::Verified => half.mul(&f2).mul(&w.pp.mul(&pi_b[e]).sub(&w.dp[e])),
                GgReading::PlusDp => half.mul(&f2).mul(&w.pp.mul(&pi_b[e]).add(&w.dp[e])).neg(),
                GgReading::MinusPiMinusDp => {
                    half.mul(&f2).mul(&w.pp.mul(&pi_b[e]).sub(&w.dp[e])).neg()
                }
            };
            pterm.add(&lin(&[
                (&qq.mul(qq), &phi_b[e]),
                (&f.mul(qq), &psi_b[e]),
                (&f2, &th_b[e]),
            ]))
        })
        .collect();
    let c2i = outer_sum(&sh_f, &[(&w.rf, &lhs_coef)]).sub(&outer_sum(
        &sh_f,
        &[(&ssf, &phi_b), (&gsf, &gs_coef_b), (&ggf, &gg_coef_b)],
    ));

    // 2(ii)
    let k = if rd.printed_2ii { F::one() } else { two.clone() };
    let s = if rd.printed_2ii { half.neg() } else { half.clone() };
    let fpi_f: Vec<F> = pi_f.iter().map(|x| f.mul(x)).collect();
    let gs_coef_f: Vec<F> = (0..q)
        .map(|e| lin(&[(&k.mul(qq), &phi_f[e]), (f, &psi_f[e])]))
        .collect();
    let gg_coef_f: Vec<F> = (0..q)
        .map(|e| {
            lin(&[
                (&s.mul(&f2).mul(&w.pp), &pi_f[e]),
                (&qq.mul(qq), &phi_f[e]),
                (&f.mul(qq), &psi_f[e]),
                (&f2, &th_f[e]),
            ])
        })
        .collect();
    let c2ii = w.drf.scale(f).sub(&outer_sum(
        &sh_f,
        &[(&w.rf, &fpi_f), (&ssf, &phi_f), (&gsf, &gs_coef_f), (&ggf, &gg_coef_f)],
    ));

    // 3(i), 3(ii)
    let mixed = |phi: &[F], psi: &[F], pi: &[F], th: &[F], with_dt: bool| {
        let m = phi.len();
        Tensor::par_from_fn(&[p, p, q, q, m], |ix| {
            let (a, b, al, be, e) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            let s_part = lin(&[(&two.mul(&phi[e]), sbm.get(&[a, b])), (&psi[e], w.gb.get(&[a, b]))]);
            let mut g_part = lin(&[
                (&two.mul(qq).mul(&phi[e]).add(&f.mul(&psi[e])), sbm.get(&[a, b])),
                (&qq.mul(&psi[e]).add(&two.mul(f).mul(&th[e])), w.gb.get(&[a, b])),
            ]);
            let mut nabla = pi[e].mul(w.t.get(&[a, b])).neg();
            if with_dt {
                nabla = nabla.add(w.dt.get(&[a, b, e]));
            }
            g_part = g_part.add(&f.mul(&nabla));
            lin(&[(&s_part, w.sf.get(&[al, be])), (&g_part, w.gf.get(&[al, be]))])
        })
    };
    let c3i = mixed(&phi_b, &psi_b, &pi_b, &th_b, true);
    let c3ii = mixed(&phi_f, &psi_f, &pi_f, &th_f, false);

    // 4(i)
    let c4i = Tensor::par_from_fn(&[p, p, p], |ix| {
        let (a, b, c) = (ix[0], ix[1], ix[2]);
        let mut acc = lin(&[(&w.df[a], w.t.get(&[b, c]))]).sub(&lin(&[(&w.df[b], w.t.get(&[a, c]))]));
        for d in 0..p {
            acc = acc.add(&lin(&[(&w.df_up[d], w.rb.get(&[a, b, c, d]))]));
        }
        acc
    });

    // 4(ii)
    let gcoef: Vec<F> = (0..p)
        .map(|d| {
            if rd.theta_p_4ii {
                prod(&[&f2, &th_b[d], &w.pp])
            } else {
                prod(&[&f2, &w.dp[d]])
            }
        })
        .collect();
    let c4ii = outer_sum(&sh_f, &[(&w.rf, &w.df)]).sub(&outer_sum(&sh_f, &[(&gf_g, &gcoef)]));

    vec![
        Condition { label: "1(i)", residual: c1i },
        Condition { label: "1(ii)", residual: c1ii },
        Condition { label: "2(i)", residual: c2i },
        Condition { label: "2(ii)", residual: c2ii },
        Condition { label: "3(i)", residual: c3i },
        Condition { label: "3(ii)", residual: c3ii },
        Condition { label: "4(i)", residual: c4i },
        Condition { label: "4(ii)", residual: c4ii },
    ]
}

/// `E = ∇R − Π⊗R − Φ⊗S∧S − Ψ⊗g∧S − Θ⊗g∧g` on the full chart from directly
/// computed tensors.
pub fn sgk_residual<F: Field>(
    g: &Tensor<F>,
    s: &Tensor<F>,
    r: &Tensor<F>,
    dr: &Tensor<F>,
    forms: &Forms<F>,
) -> Tensor<F> {
    let n = g.dim();
    let ss = kn(s, s);
    let gs = kn(g, s);
    let gg = kn(g, g);
    dr.sub(&outer_sum(
        &[n; 4],
        &[(r, &forms.pi), (&ss, &forms.phi), (&gs, &forms.psi), (&gg, &forms.theta)],
    ))
}

/// The block of `E` each condition is a multiple of, as `(cond index, E index, scale)`:
/// `cond = scale · E`, with 4(i) carrying the extra factor `g̃_εδ` (checked per component).
pub fn e_block_value<F: Field>(
    label: &str,
    p: usize,
    e: &Tensor<F>,
    gf: &Tensor<F>,
    idx: &[usize],
) -> Option<F> {
    let fib = |x: usize| x + p;
    Some(match label {
        "1(i)" | "1(ii)" => {
            let m = if label == "1(i)" { idx[4] } else { fib(idx[4]) };
            e.get(&[idx[0], idx[1], idx[2], idx[3], m]).clone()
        }
        "2(i)" | "2(ii)" => {
            let m = if label == "2(i)" { idx[4] } else { fib(idx[4]) };
            e.get(&[fib(idx[0]), fib(idx[1]), fib(idx[2]), fib(idx[3]), m]).clone()
        }
        "3(i)" | "3(ii)" => {
            let m = if label == "3(i)" { idx[4] } else { fib(idx[4]) };
            e.get(&[idx[0], fib(idx[2]), idx[1], fib(idx[3]), m]).clone()
        }
        "4(ii)" => {
            // E_{αβγd,ε} = −½ (f_d R̃_αβγε − …)
            let v = e.get(&[fib(idx[0]), fib(idx[1]), fib(idx[2]), idx[4], fib(idx[3])]);
            v.mul(&F::from_int(-2))
        }
        "4(i)" => {
            // 2 E_{abcδ,ε} = g̃_εδ · residual_abc; use the first δ = ε with g̃_δδ ≠ 0.
            let q = gf.dim();
            let d = (0..q).find(|&d| !gf.get(&[d, d]).is_zero())?;
            let v = e.get(&[idx[0], idx[1], idx[2], fib(d), fib(d)]);
            let ginv = gf.get(&[d, d]);
            return Some(F::from_int(2).mul(v).mul(&inverse_hint(ginv)?));
        }
        _ => return None,
    })
}

fn inverse_hint<F: Field>(x: &F) -> Option<F> {
    F::try_recip(x)
}
