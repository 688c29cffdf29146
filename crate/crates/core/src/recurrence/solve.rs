//! Minimum-norm least squares for `target_m ≈ Σ_b c_mb basis_b`, one system per m.

use crate::symexpr::Real;
use crate::tensor::Tensor;

use super::RecurrenceError;

/// Eigenvalues of the Gram matrix below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-40;

/// Floor for the denominator of the relative residual.
pub const RESIDUAL_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone)]
pub struct PointSolve {
    /// `coeffs[m][b]`.
    pub coeffs: Vec<Vec<Real>>,
    /// Relative residual per m.
    pub residuals: Vec<Real>,
    pub rank: usize,
}

impl PointSolve {
    pub fn max_residual(&self) -> Real {
        self.residuals
            .iter()
            .cloned()
            .fold(Real::zero(), Real::max)
    }

    /// Coefficient `b` across all m, i.e. the recovered 1-form for that basis slot.
    pub fn form(&self, b: usize) -> Vec<Real> {
        self.coeffs.iter().map(|c| c[b].clone()).collect()
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// eigenvalues and column eigenvectors `v[row][col]`.
pub fn jacobi_eigen(a: &[Vec<Real>]) -> (Vec<Real>, Vec<Vec<Real>>) {
    let n = a.len();
    let mut a: Vec<Vec<Real>> = a.to_vec();
    let mut v: Vec<Vec<Real>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Real::one() } else { Real::zero() })
                .collect()
        })
        .collect();
    let scale = a
        .iter()
        .flatten()
        .map(Real::abs)
        .fold(Real::zero(), Real::max);
    if scale.is_zero() {
        return ((0..n).map(|_| Real::zero()).collect(), v);
    }
    let eps = &scale * &Real::from_f64(1e-55);
    for _sweep in 0..60 {
        let mut off = Real::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off <= eps {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].is_zero() {
                    continue;
                }
                let two = Real::from_i64(2);
                let theta = &(&a[q][q] - &a[p][p]) / &(&two * &a[p][q]);
                let denom = &theta.abs() + &(&(&theta * &theta) + &Real::one()).sqrt();
                let mut t = &Real::one() / &denom;
                if theta.is_negative() {
                    t = -t;
                }
                let c = &Real::one() / &(&(&t * &t) + &Real::one()).sqrt();
                let s = &t * &c;
                for k in 0..n {
                    let akp = a[k][p].clone();
                    let akq = a[k][q].clone();
                    a[k][p] = &(&c * &akp) - &(&s * &akq);
                    a[k][q] = &(&s * &akp) + &(&c * &akq);
                }
                for k in 0..n {
                    let apk = a[p][k].clone();
                    let aqk = a[q][k].clone();
                    a[p][k] = &(&c * &apk) - &(&s * &aqk);
                    a[q][k] = &(&s * &apk) + &(&c * &aqk);
                }
                for row in v.iter_mut() {
                    let vp = row[p].clone();
                    let vq = row[q].clone();
                    row[p] = &(&c * &vp) - &(&s * &vq);
                    row[q] = &(&s * &vp) + &(&c * &vq);
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i].clone()).collect(), v)
}

fn inner(a: &Tensor<Real>, b: &Tensor<Real>) -> Real {
    let mut acc = Real::zero();
    for (x, y) in a.data().iter().zip(b.data()) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}

/// Solve each `targets[m] ≈ Σ_b c_b basis[b]` in the minimum-norm least-squares sense.
pub fn solve_pointwise_coefficients(
    targets: &[Tensor<Real>],
    basis: &[Tensor<Real>],
) -> Result<PointSolve, RecurrenceError> {
    if basis.is_empty() {
        return Err(RecurrenceError::EmptyBasis);
    }
    let shape = basis[0].shape().to_vec();
    for t in basis.iter().chain(targets) {
        if t.shape() != shape.as_slice() {
            return Err(RecurrenceError::DimensionMismatch(format!(
                "{:?} vs {:?}",
                t.shape(),
                shape
            )));
        }
    }
    let nb = basis.len();
    let gram: Vec<Vec<Real>> = (0..nb)
        .map(|i| (0..nb).map(|j| inner(&basis[i], &basis[j])).collect())
        .collect();
    let (lambda, v) = jacobi_eigen(&gram);
    let lmax = lambda.iter().cloned().fold(Real::zero(), Real::max);
    let cut = &lmax * &Real::from_f64(RANK_CUTOFF);
    let keep: Vec<bool> = lambda.iter().map(|l| !lmax.is_zero() && *l > cut).collect();
    let rank = keep.iter().filter(|k| **k).count();
    let floor = Real::from_f64(RESIDUAL_FLOOR);

    let mut coeffs = Vec::with_capacity(targets.len());
    let mut residuals = Vec::with_capacity(targets.len());
    for t in targets {
        let rhs: Vec<Real> = basis.iter().map(|b| inner(b, t)).collect();
        // c = V Λ⁺ Vᵀ rhs
        let mut c = vec![Real::zero(); nb];
        for k in 0..nb {
            if !keep[k] {
                continue;
            }
            let mut proj = Real::zero();
            for i in 0..nb {
                proj = &proj + &(&v[i][k] * &rhs[i]);
            }
            let w = &proj / &lambda[k];
            for (i, ci) in c.iter_mut().enumerate() {
                *ci = &*ci + &(&v[i][k] * &w);
            }
        }
        let mut fit = Tensor::<Real>::zeros(&shape);
        for (ci, b) in c.iter().zip(basis) {
            if !ci.is_zero() {
                fit = fit.add(&b.scale(ci));
            }
        }
        let res = t.sub(&fit).norm();
        let denom = t.norm().max(floor.clone());
        residuals.push(&res / &denom);
        coeffs.push(c);
    }
    Ok(PointSolve {
        coeffs,
        residuals,
        rank,
    })
}

/// As [`solve_pointwise_coefficients`], with some basis coefficients pinned.
/// `fixed[b] = Some(values per m)` removes slot `b` from the unknowns.
pub fn solve_with_fixed(
    targets: &[Tensor<Real>],
    basis: &[Tensor<Real>],
    fixed: &[Option<Vec<Real>>],
) -> Result<PointSolve, RecurrenceError> {
    if fixed.len() != basis.len() {
        return Err(RecurrenceError::DimensionMismatch(
            "fixed coefficient list length".into(),
        ));
    }
    let free: Vec<usize> = (0..basis.len()).filter(|&b| fixed[b].is_none()).collect();
    let free_basis: Vec<Tensor<Real>> = free.iter().map(|&b| basis[b].clone()).collect();
    let reduced: Vec<Tensor<Real>> = targets
        .iter()
        .enumerate()
        .map(|(m, t)| {
            let mut r = t.clone();
            for (b, f) in fixed.iter().enumerate() {
                if let Some(vals) = f {
                    r = r.sub(&basis[b].scale(&vals[m]));
                }
            }
            r
        })
        .collect();
    let inner_solve = if free_basis.is_empty() {
        PointSolve {
            coeffs: vec![Vec::new(); targets.len()],
            residuals: Vec::new(),
            rank: 0,
        }
    } else {
        solve_pointwise_coefficients(&reduced, &free_basis)?
    };
    let floor = Real::from_f64(RESIDUAL_FLOOR);
    let mut coeffs = Vec::with_capacity(targets.len());
    let mut residuals = Vec::with_capacity(targets.len());
    for (m, t) in targets.iter().enumerate() {
        let mut c = vec![Real::zero(); basis.len()];
        for (b, f) in fixed.iter().enumerate() {
            if let Some(vals) = f {
                c[b] = vals[m].clone();
            }
        }
        for (k, &b) in free.iter().enumerate() {
            c[b] = inner_solve.coeffs[m][k].clone();
        }
        let mut fit = Tensor::<Real>::zeros(t.shape());
        for (ci, b) in c.iter().zip(basis) {
            if !ci.is_zero() {
                fit = fit.add(&b.scale(ci));
            }
        }
        residuals.push(&t.sub(&fit).norm() / &t.norm().max(floor.clone()));
        coeffs.push(c);
    }
    Ok(PointSolve {
        coeffs,
        residuals,
        rank: inner_solve.rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[i64]) -> Tensor<Real> {
        Tensor::from_vec(&[v.len()], v.iter().map(|&x| Real::from_i64(x)).collect())
    }

    #[test]
    fn exact_combination_is_recovered() {
        let b = [t(&[1, 0, 1]), t(&[0, 1, 1])];
        let target = t(&[2, -3, -1]);
        let s = solve_pointwise_coefficients(&[target], &b).unwrap();
        assert_eq!(s.rank, 2);
        assert!((s.coeffs[0][0].to_f64() - 2.0).abs() < 1e-40);
        assert!((s.coeffs[0][1].to_f64() + 3.0).abs() < 1e-40);
        assert!(s.max_residual().to_f64() < 1e-40);
    }

    #[test]
    fn dependent_basis_gives_min_norm_split() {
        let b = [t(&[1, 1]), t(&[2, 2])];
        let s = solve_pointwise_coefficients(&[t(&[5, 5])], &b).unwrap();
        assert_eq!(s.rank, 1);
        // min-norm: c ∝ (1, 2) with c1 + 2 c2 = 5
        assert!((s.coeffs[0][0].to_f64() - 1.0).abs() < 1e-30);
        assert!((s.coeffs[0][1].to_f64() - 2.0).abs() < 1e-30);
    }

    #[test]
    fn zero_target_gives_zero_coefficients() {
        let b = [t(&[1, 2]), t(&[0, 1])];
        let s = solve_pointwise_coefficients(&[t(&[0, 0])], &b).unwrap();
        assert!(s.coeffs[0].iter().all(Real::is_zero));
        assert!(s.residuals[0].is_zero());
    }

    #[test]
    fn pinned_slot_is_respected() {
        let b = [t(&[1, 0]), t(&[0, 1])];
        let s = solve_with_fixed(&[t(&[3, 4])], &b, &[None, Some(vec![Real::from_i64(1)])]).unwrap();
        assert!((s.coeffs[0][0].to_f64() - 3.0).abs() < 1e-40);
        assert!((s.residuals[0].to_f64() - 0.6).abs() < 1e-30);
    }
}
