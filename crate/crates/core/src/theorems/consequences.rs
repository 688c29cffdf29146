//! Pointwise checks of what an SGK (or K, HGK, WGK) warped product implies for
//! its base and fiber, each on the region where the implication is claimed.

use rayon::prelude::*;
use serde::Serialize;

use super::conditions::{sgk_residual, FormName, FormSet, Forms};
use super::{sample_warped, sgk_forms, FormsSource, TheoremError, WarpedPoint};
use crate::knproducts::{gaussian, kn};
use crate::recurrence::{
    roter_decompose, solve_pointwise_coefficients, StructureKind, Verdict, RESIDUAL_FLOOR,
};
use crate::symexpr::Real;
use crate::tensor::{Field, Tensor};
use crate::warped::{WarpedParts, WarpedSpec};

/// Printed and verified expressions for the 1-forms of the fiber SGK structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberFormsReading {
    /// `(Π̃, Φ̃/f, 2QΦ̃/f + Ψ̃, ½fPΠ̃ + Q²Φ̃/f + QΨ̃ + fΘ̃)`.
    Verified,
    /// `(Π̃, Φ̃/f, QΦ̃/f + Ψ̃, −½fPΠ̃ + Q²Φ̃/f + QΨ̃ + fΘ̃)`.
    PrintedSgk,
    /// `(Π̃, 0, Ψ̃, −½fPΠ̃ + QΨ̃)` with Φ = Θ = 0.
    PrintedHgk,
    /// `(Π̃, Φ̃, QΨ̃/f, −½fPΠ̃ + Q²Φ̃/f)` with Ψ = Θ = 0; the unmarked Φ is read as Φ̃.
    PrintedWgk,
}

impl FiberFormsReading {
    pub const ALL: [FiberFormsReading; 4] = [
        FiberFormsReading::Verified,
        FiberFormsReading::PrintedSgk,
        FiberFormsReading::PrintedHgk,
        FiberFormsReading::PrintedWgk,
    ];

    pub fn source(self) -> &'static str {
        match self {
            FiberFormsReading::Verified => "verified",
            FiberFormsReading::PrintedSgk => "SGK consequences, item (iii)",
            FiberFormsReading::PrintedHgk => "HGK consequences, item (ii)",
            FiberFormsReading::PrintedWgk => "WGK consequences, item (ii)",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            FiberFormsReading::Verified => "(Π̃, Φ̃/f, 2QΦ̃/f + Ψ̃, ½fPΠ̃ + Q²Φ̃/f + QΨ̃ + fΘ̃)",
            FiberFormsReading::PrintedSgk => "(Π̃, Φ̃/f, QΦ̃/f + Ψ̃, −½fPΠ̃ + Q²Φ̃/f + QΨ̃ + fΘ̃)",
            FiberFormsReading::PrintedHgk => "(Π̃, 0, Ψ̃, −½fPΠ̃ + QΨ̃)",
            FiberFormsReading::PrintedWgk => "(Π̃, Φ, QΨ̃/f, −½fPΠ̃ + Q²Φ̃/f)",
        }
    }

    /// Forms set to zero for the structure the reading belongs to.
    pub fn zeroed(self) -> &'static [FormName] {
        match self {
            FiberFormsReading::Verified | FiberFormsReading::PrintedSgk => &[],
            FiberFormsReading::PrintedHgk => &[FormName::Phi, FormName::Theta],
            FiberFormsReading::PrintedWgk => &[FormName::Psi, FormName::Theta],
        }
    }
}

/// Fiber 1-forms (indexed `0..q`) built from the fiber parts of the product forms.
pub fn fiber_forms<F: Field>(w: &WarpedParts<F>, forms: &Forms<F>, reading: FiberFormsReading) -> Forms<F> {
    let p = w.p;
    let half = F::ratio(1, 2);
    let fpp = w.f.mul(&w.pp);
    let q2f = w.qq.mul(&w.qq).mul(&w.f_inv);
    let qf = w.qq.mul(&w.f_inv);
    let mut out = Forms::zeros(w.q);
    for a in 0..w.q {
        let (pi, phi, psi, th) = (
            &forms.pi[p + a],
            &forms.phi[p + a],
            &forms.psi[p + a],
            &forms.theta[p + a],
        );
        out.pi[a] = pi.clone();
        let pterm = half.mul(&fpp).mul(pi);
        match reading {
            FiberFormsReading::Verified | FiberFormsReading::PrintedSgk => {
                let k = if reading == FiberFormsReading::Verified { 2 } else { 1 };
                out.phi[a] = phi.mul(&w.f_inv);
                out.psi[a] = F::from_int(k).mul(&qf).mul(phi).add(psi);
                let sign = if reading == FiberFormsReading::Verified { pterm } else { pterm.neg() };
                out.theta[a] = sign
                    .add(&q2f.mul(phi))
                    .add(&w.qq.mul(psi))
                    .add(&w.f.mul(th));
            }
            FiberFormsReading::PrintedHgk => {
                out.psi[a] = psi.clone();
                out.theta[a] = pterm.neg().add(&w.qq.mul(psi));
            }
            FiberFormsReading::PrintedWgk => {
                out.phi[a] = phi.clone();
                out.psi[a] = qf.mul(psi);
                out.theta[a] = pterm.neg().add(&q2f.mul(phi));
            }
        }
    }
    out
}

/// Weyl conformal curvature `R − g∧S/(n−2) + κ g∧g/(2(n−1)(n−2))`; zero below dimension 3.
pub fn weyl<F: Field>(g: &Tensor<F>, s: &Tensor<F>, r: &Tensor<F>, kappa: &F) -> Tensor<F> {
    let n = g.dim() as i64;
    if n < 3 {
        return Tensor::zeros(&[n as usize; 4]);
    }
    r.sub(&kn(g, s).scale(&F::ratio(1, n - 2)))
        .add(&kn(g, g).scale(&kappa.mul(&F::ratio(1, 2 * (n - 1) * (n - 2)))))
}

#[derive(Debug, Clone, Serialize)]
pub struct Consequence {
    pub item: &'static str,
    pub statement: &'static str,
    pub region: &'static str,
    pub verdict: Verdict,
    pub points_in_region: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsequenceReport {
    /// Structure whose consequences were checked: `K`, `HGK`, `WGK` or `SGK`.
    pub structure: &'static str,
    pub samples: usize,
    pub tol_rel: f64,
    pub consequences: Vec<Consequence>,
}

fn floor() -> Real {
    Real::from_f64(RESIDUAL_FLOOR)
}

fn rel(t: &Tensor<Real>, against: &Tensor<Real>) -> Real {
    &t.norm() / &against.norm().max(floor())
}

fn nonzero(v: &[Real], tol_abs: &Real) -> bool {
    v.iter().any(|x| &x.abs() > tol_abs)
}

fn fiber_einstein(w: &WarpedParts<Real>) -> Real {
    let q = w.q as i64;
    let dev = w.sf.sub(&w.gf.scale(&(&w.kappa_f * &Real::ratio(1, q))));
    rel(&dev, &w.sf)
}

fn fiber_const_curvature(w: &WarpedParts<Real>) -> Real {
    let q = w.q as i64;
    if q < 2 {
        return Real::zero();
    }
    let c = &w.kappa_f * &Real::ratio(1, q * (q - 1));
    let dev = w.rf.sub(&gaussian(&w.gf).scale(&c));
    rel(&dev, &w.rf)
}

fn fiber_roter(w: &WarpedParts<Real>) -> Real {
    roter_decompose(&w.rf, &w.gf, &w.sf, None)
        .map(|fit| fit.residual)
        .unwrap_or_else(|_| Real::one())
}

fn fiber_sgk(w: &WarpedParts<Real>, forms: &Forms<Real>) -> Real {
    let fib = fiber_forms(w, forms, FiberFormsReading::Verified);
    rel(&sgk_residual(&w.gf, &w.sf, &w.rf, &w.drf, &fib), &w.drf)
}

fn in_span(target: &Tensor<Real>, basis: &[Tensor<Real>], tol: &Real) -> bool {
    solve_pointwise_coefficients(std::slice::from_ref(target), basis)
        .map(|s| s.max_residual() < *tol)
        .unwrap_or(false)
}

/// T and S̄ linearly dependent.
fn t_s_dependent(w: &WarpedParts<Real>, tol: &Real) -> bool {
    in_span(&w.t, std::slice::from_ref(&w.sb), tol) || in_span(&w.sb, std::slice::from_ref(&w.t), tol)
}

fn base_structure(w: &WarpedParts<Real>, kind: StructureKind) -> Real {
    let (g, s, r) = (&w.gb, &w.sb, &w.rb);
    let basis = match kind {
        StructureKind::HGK => vec![r.clone(), kn(g, s)],
        StructureKind::WGK => vec![r.clone(), kn(s, s)],
        _ => vec![r.clone(), kn(s, s), kn(g, s), kn(g, g)],
    };
    let targets: Vec<Tensor<Real>> = (0..w.p).map(|m| w.drb.last_index_slice(m)).collect();
    solve_pointwise_coefficients(&targets, &basis)
        .map(|s| s.max_residual())
        .unwrap_or_else(|_| Real::one())
}

struct Item {
    item: &'static str,
    statement: &'static str,
    region: &'static str,
    /// Whether the point lies in the region, and the residual there.
    eval: Box<dyn Fn(&WarpedPoint, &Forms<Real>) -> (bool, Real) + Sync>,
}

fn item(
    item: &'static str,
    statement: &'static str,
    region: &'static str,
    eval: impl Fn(&WarpedPoint, &Forms<Real>) -> (bool, Real) + Sync + 'static,
) -> Item {
    Item {
        item,
        statement,
        region,
        eval: Box::new(eval),
    }
}

fn df_plus_f_pi(w: &WarpedParts<Real>, fs: &Forms<Real>) -> Vec<Real> {
    (0..w.p).map(|a| &w.df[a] + &(&w.f * &fs.pi[a])).collect()
}

fn items(structure: &'static str, tol: Real, tol_abs: Real) -> Vec<Item> {
    let everywhere = "every sample point";
    let (t1, ta) = (tol.clone(), tol_abs.clone());
    let pi_fiber_nonzero = move |w: &WarpedParts<Real>, fs: &Forms<Real>| nonzero(&fs.pi[w.p..], &ta);
    let ta = tol_abs.clone();
    let df_nonzero = move |w: &WarpedParts<Real>| nonzero(&w.df, &ta);
    let ta = tol_abs.clone();
    let dfpi_nonzero = move |w: &WarpedParts<Real>, fs: &Forms<Real>| nonzero(&df_plus_f_pi(w, fs), &ta);

    let const_curv = {
        let df_nonzero = df_nonzero.clone();
        item(
            "fiber constant curvature",
            "R̃ = κ̃/((n−p)(n−p−1)) G̃",
            "{df ≠ 0}",
            move |wp, _| (df_nonzero(&wp.parts), fiber_const_curvature(&wp.parts)),
        )
    };
    let fiber_sgk_item = item(
        "fiber SGK",
        "∇̃R̃ = Π̃⊗R̃ + (Φ̃/f)⊗S̃∧S̃ + (2QΦ̃/f + Ψ̃)⊗g̃∧S̃ + (½fPΠ̃ + Q²Φ̃/f + QΨ̃ + fΘ̃)⊗g̃∧g̃",
        everywhere,
        |wp, fs| (true, fiber_sgk(&wp.parts, fs)),
    );
    let fiber_rt = {
        let dfpi_nonzero = dfpi_nonzero.clone();
        item(
            "fiber Roter type",
            "R̃ = N₁ g̃∧g̃ − N₂ g̃∧S̃ − N₃ S̃∧S̃",
            "{df + fΠ̄ ≠ 0}",
            move |wp, fs| (dfpi_nonzero(&wp.parts, fs), fiber_roter(&wp.parts)),
        )
    };

    match structure {
        "K" => vec![
            item("base recurrent", "∇̄R̄ = Π̄⊗R̄", everywhere, |wp, fs| {
                let w = &wp.parts;
                (true, rel(&w.drb.sub(&w.rb.outer_last(&fs.pi[..w.p])), &w.drb))
            }),
            item("fiber recurrent", "∇̃R̃ = Π̃⊗R̃", everywhere, |wp, fs| {
                let w = &wp.parts;
                (true, rel(&w.drf.sub(&w.rf.outer_last(&fs.pi[w.p..])), &w.drf))
            }),
            item("T recurrent", "∇̄T = Π̄⊗T", everywhere, |wp, fs| {
                let w = &wp.parts;
                (true, rel(&w.dt.sub(&w.t.outer_last(&fs.pi[..w.p])), &w.dt))
            }),
            {
                let pf = pi_fiber_nonzero.clone();
                item("base flat", "R̄ = 0", "{Π̃ ≠ 0}", move |wp, fs| {
                    (pf(&wp.parts, fs), wp.parts.rb.max_abs())
                })
            },
            {
                let pf = pi_fiber_nonzero.clone();
                item("T vanishes", "T = 0", "{Π̃ ≠ 0}", move |wp, fs| {
                    (pf(&wp.parts, fs), wp.parts.t.max_abs())
                })
            },
            {
                let pf = pi_fiber_nonzero.clone();
                item("P vanishes", "P = 0", "{Π̃ ≠ 0}", move |wp, fs| {
                    (pf(&wp.parts, fs), wp.parts.pp.abs())
                })
            },
            item(
                "fiber constant curvature",
                "R̃ = κ̃/((n−p)(n−p−1)) G̃",
                "{df ≠ 0} ∪ {df + fΠ̄ ≠ 0}",
                move |wp, fs| {
                    let w = &wp.parts;
                    (df_nonzero(w) || dfpi_nonzero(w, fs), fiber_const_curvature(w))
                },
            ),
        ],
        "HGK" => vec![
            item(
                "base HGK",
                "∇̄R̄ = Π̄⊗R̄ + Ψ̄⊗ḡ∧S̄",
                "{T, S̄ linearly dependent}",
                move |wp, _| (t_s_dependent(&wp.parts, &t1), base_structure(&wp.parts, StructureKind::HGK)),
            ),
            fiber_sgk_item,
            item("fiber conformally flat", "C̃ = 0", "{df + fΠ̄ ≠ 0}", move |wp, fs| {
                let w = &wp.parts;
                let c = weyl(&w.gf, &w.sf, &w.rf, &w.kappa_f);
                (dfpi_nonzero(w, fs), rel(&c, &w.rf))
            }),
            {
                let ta = tol_abs.clone();
                item("fiber Einstein", "S̃ = κ̃/(n−p) g̃", "{Ψ ≠ 0}", move |wp, fs| {
                    (nonzero(&fs.psi, &ta), fiber_einstein(&wp.parts))
                })
            },
            const_curv,
        ],
        "WGK" => vec![
            item(
                "base WGK",
                "∇̄R̄ = Π̄⊗R̄ + Φ̄⊗S̄∧S̄",
                "{T, S̄ linearly dependent}",
                move |wp, _| (t_s_dependent(&wp.parts, &t1), base_structure(&wp.parts, StructureKind::WGK)),
            ),
            fiber_sgk_item,
            fiber_rt,
            {
                let ta = tol_abs.clone();
                item("fiber Einstein", "S̃ = κ̃/(n−p) g̃", "{(κ̄ − (n−p) tr T) Φ ≠ 0}", move |wp, fs| {
                    let w = &wp.parts;
                    let c = &w.kappa_b - &(&Real::from_i64(w.q as i64) * &w.tr_t);
                    let v: Vec<Real> = fs.phi.iter().map(|x| &c * x).collect();
                    (nonzero(&v, &ta), fiber_einstein(w))
                })
            },
            const_curv,
        ],
        _ => vec![
            item(
                "base SGK",
                "∇̄R̄ = Π̄'⊗R̄ + Φ̄'⊗S̄∧S̄ + Ψ̄'⊗ḡ∧S̄ + Θ̄'⊗ḡ∧ḡ",
                "{T ∈ span(S̄, ḡ)}",
                move |wp, _| {
                    let w = &wp.parts;
                    let inside = in_span(&w.t, &[w.sb.clone(), w.gb.clone()], &t1);
                    (inside, base_structure(w, StructureKind::SGK))
                },
            ),
            item(
                "base generalized Roter type",
                "R̄ ∈ span(ḡ∧ḡ, ḡ∧S̄, S̄∧S̄, ḡ∧T, S̄∧T, T∧T)",
                "{Π̃ ≠ 0}",
                move |wp, fs| {
                    let w = &wp.parts;
                    let res = roter_decompose(&w.rb, &w.gb, &w.sb, Some(&w.t))
                        .map(|f| f.residual)
                        .unwrap_or_else(|_| Real::one());
                    (pi_fiber_nonzero(w, fs), res)
                },
            ),
            fiber_sgk_item,
            fiber_rt,
            {
                let ta = tol_abs.clone();
                item(
                    "fiber Einstein",
                    "S̃ = κ̃/(n−p) g̃",
                    "{2(κ̄ − (n−p) tr T) Φ + pΨ ≠ 0}",
                    move |wp, fs| {
                        let w = &wp.parts;
                        let c = &w.kappa_b - &(&Real::from_i64(w.q as i64) * &w.tr_t);
                        let c2 = &c * &Real::from_i64(2);
                        let pr = Real::from_i64(w.p as i64);
                        let v: Vec<Real> = fs
                            .phi
                            .iter()
                            .zip(&fs.psi)
                            .map(|(ph, ps)| &(&c2 * ph) + &(&pr * ps))
                            .collect();
                        (nonzero(&v, &ta), fiber_einstein(w))
                    },
                )
            },
            const_curv,
        ],
    }
}

/// Structure implied by which given forms vanish.
fn structure_of(source: FormsSource<'_>) -> &'static str {
    match source {
        FormsSource::Recovered => "SGK",
        FormsSource::Given(fs) => structure_of_forms(fs),
    }
}

pub(crate) fn structure_of_forms(fs: &FormSet) -> &'static str {
    match (fs.phi.is_zero(), fs.psi.is_zero(), fs.theta.is_zero()) {
        (true, true, true) => "K",
        (true, false, true) => "HGK",
        (false, true, true) => "WGK",
        _ => "SGK",
    }
}

/// Evaluate the consequences for the structure the forms describe at seeded points.
/// Meaningful only where the structure itself holds.
pub fn corollary_consequence_report(
    spec: &WarpedSpec,
    source: FormsSource<'_>,
    samples: usize,
    seed: u64,
    tol_rel: f64,
    tol_abs: f64,
) -> Result<ConsequenceReport, TheoremError> {
    let given = match source {
        FormsSource::Given(fs) => Some(fs),
        FormsSource::Recovered => None,
    };
    let pts = sample_warped(spec, given, samples, seed)?;
    let per_point: Vec<Forms<Real>> = pts
        .par_iter()
        .map(|wp| match &wp.forms {
            Some(f) => Ok(f.clone()),
            None => Ok(sgk_forms(&wp.direct.solve(StructureKind::SGK)?)),
        })
        .collect::<Result<_, TheoremError>>()?;
    let structure = structure_of(source);
    let tol = Real::from_f64(tol_rel);
    let consequences = items(structure, tol.clone(), Real::from_f64(tol_abs))
        .into_par_iter()
        .map(|it| {
            let mut inside = 0;
            let mut worst = Real::zero();
            for (wp, fs) in pts.iter().zip(&per_point) {
                let (in_region, res) = (it.eval)(wp, fs);
                if in_region {
                    inside += 1;
                    worst = worst.max(res);
                }
            }
            let verdict = if inside == 0 {
                Verdict::VacuouslyExcluded
            } else if worst < tol {
                Verdict::Holds
            } else {
                Verdict::Fails
            };
            Consequence {
                item: it.item,
                statement: it.statement,
                region: it.region,
                verdict,
                points_in_region: inside,
                max_residual: worst.to_f64(),
            }
        })
        .collect();
    Ok(ConsequenceReport {
        structure,
        samples,
        tol_rel,
        consequences,
    })
}
