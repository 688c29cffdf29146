//! Kulkarni–Nomizu products of symmetric (0,2) tensors.
//!
//! `(A∧E)_ijkl = A_il E_jk + A_jk E_il − A_ik E_jl − A_jl E_ik`.

use crate::tensor::{Field, Symmetry, Tensor, Valence};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KnError {
    #[error("expected a square (0,2) tensor, got shape {0:?}")]
    NotSquare(Vec<usize>),
    #[error("dimension mismatch: {0} vs {1}")]
    ChartMismatch(usize, usize),
    #[error("input is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
}

fn check_symmetric<F: Field>(a: &Tensor<F>) -> Result<usize, KnError> {
    let s = a.shape();
    if s.len() != 2 || s[0] != s[1] {
        return Err(KnError::NotSquare(s.to_vec()));
    }
    let n = s[0];
    for i in 0..n {
        for j in i + 1..n {
            if !a.get(&[i, j]).sub(a.get(&[j, i])).is_zero() {
                return Err(KnError::NotSymmetric(i, j));
            }
        }
    }
    Ok(n)
}

pub fn kulkarni_nomizu<F: Field>(a: &Tensor<F>, e: &Tensor<F>) -> Result<Tensor<F>, KnError> {
    let n = check_symmetric(a)?;
    let m = check_symmetric(e)?;
    if n != m {
        return Err(KnError::ChartMismatch(n, m));
    }
    Ok(kn(a, e))
}

/// Product without input validation; both arguments must be symmetric n×n.
pub fn kn<F: Field>(a: &Tensor<F>, e: &Tensor<F>) -> Tensor<F> {
    let n = a.dim();
    let p = |x: &F, y: &F| -> Option<F> {
        if x.is_zero() || y.is_zero() {
            None
        } else {
            Some(x.mul(y))
        }
    };
    Tensor::riemann_type(n, |i, j, k, l| {
        let mut acc = F::zero();
        for t in [
            p(a.get(&[i, l]), e.get(&[j, k])),
            p(a.get(&[j, k]), e.get(&[i, l])),
        ]
        .into_iter()
        .flatten()
        {
            acc = acc.add(&t);
        }
        for t in [
            p(a.get(&[i, k]), e.get(&[j, l])),
            p(a.get(&[j, l]), e.get(&[i, k])),
        ]
        .into_iter()
        .flatten()
        {
            acc = acc.sub(&t);
        }
        acc
    })
}

/// `η⊗η` as a symmetric (0,2) tensor.
pub fn outer_square<F: Field>(eta: &[F]) -> Tensor<F> {
    Tensor::symmetric2(eta.len(), |i, j| {
        if eta[i].is_zero() || eta[j].is_zero() {
            F::zero()
        } else {
            eta[i].mul(&eta[j])
        }
    })
}

/// `G = ½ g∧g`, the curvature tensor of unit constant curvature.
pub fn gaussian<F: Field>(g: &Tensor<F>) -> Tensor<F> {
    kn(g, g)
        .scale(&F::ratio(1, 2))
        .with_meta(Valence::Covariant(4), Symmetry::RiemannType)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Real;

    fn sym(vals: [[i64; 3]; 3]) -> Tensor<Real> {
        Tensor::from_fn(&[3, 3], |i| Real::from_i64(vals[i[0]][i[1]]))
    }

    #[test]
    fn identity_metric_gives_twice_delta_form() {
        let g = sym([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let gg = kn(&g, &g);
        assert_eq!(gg.get(&[0, 1, 0, 1]).to_f64(), -2.0);
        assert_eq!(gg.get(&[0, 1, 1, 0]).to_f64(), 2.0);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = sym([[1, 2, 0], [0, 1, 0], [0, 0, 1]]);
        assert_eq!(kulkarni_nomizu(&a, &a).unwrap_err(), KnError::NotSymmetric(0, 1));
    }
}
