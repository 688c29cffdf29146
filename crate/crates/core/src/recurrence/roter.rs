//! Roter-type decompositions `D = N₁ A∧A − N₂ A∧E − N₃ E∧E` and the
//! generalized six-coefficient form with a third tensor F.

use rayon::prelude::*;
use serde::Serialize;

use super::{solve_pointwise_coefficients, CurvatureBundle, RecurrenceError};
use crate::geometry::MetricField;
use crate::knproducts::kn;
use crate::symexpr::{Real, DEFAULT_SEED};
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct RoterFit {
    /// `N₁..N₃`, or `L₁..L₆` when F is given.
    pub coefficients: Vec<Real>,
    pub residual: Real,
    pub rank: usize,
}

pub fn roter_decompose(
    d: &Tensor<Real>,
    a: &Tensor<Real>,
    e: &Tensor<Real>,
    f: Option<&Tensor<Real>>,
) -> Result<RoterFit, RecurrenceError> {
    let mut basis = vec![kn(a, a), kn(a, e).neg(), kn(e, e).neg()];
    if let Some(f) = f {
        if f.shape() != a.shape() {
            return Err(RecurrenceError::DimensionMismatch("F shape".into()));
        }
        basis.extend([kn(a, f).neg(), kn(e, f).neg(), kn(f, f).neg()]);
    }
    if a.shape() != e.shape() || d.shape().len() != 4 || d.dim() != a.dim() {
        return Err(RecurrenceError::DimensionMismatch(format!(
            "D {:?}, A {:?}, E {:?}",
            d.shape(),
            a.shape(),
            e.shape()
        )));
    }
    let s = solve_pointwise_coefficients(std::slice::from_ref(d), &basis)?;
    Ok(RoterFit {
        coefficients: s.coeffs[0].clone(),
        residual: s.residuals[0].clone(),
        rank: s.rank,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RoterPoint {
    pub index: usize,
    pub coefficients: Vec<f64>,
    pub residual: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoterReport {
    /// `(R; g, S)` decomposes at every sampled point.
    pub holds: bool,
    pub max_residual: f64,
    pub points: Vec<RoterPoint>,
}

/// Test `R = N₁ g∧g − N₂ g∧S − N₃ S∧S` at seeded points.
pub fn roter_check(
    m: &MetricField,
    samples: usize,
    seed: Option<u64>,
    tol_rel: f64,
) -> Result<RoterReport, RecurrenceError> {
    let bundle = CurvatureBundle::new(m, None);
    let pts = bundle.sample(samples, seed.unwrap_or(DEFAULT_SEED))?;
    let points: Vec<RoterPoint> = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let fit = roter_decompose(&p.r, &p.g, &p.s, None)?;
            Ok(RoterPoint {
                index: i,
                coefficients: fit.coefficients.iter().map(Real::to_f64).collect(),
                residual: fit.residual.to_f64(),
                rank: fit.rank,
            })
        })
        .collect::<Result<_, RecurrenceError>>()?;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(RoterReport {
        holds: max_residual < tol_rel,
        max_residual,
        points,
    })
}
