//! Curvature pipeline for a metric on one chart.
//!
//! Conventions (fixed by calibration against known example values):
//! `Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`,
//! `R^m_jkl = ∂_k Γ^m_lj − ∂_l Γ^m_kj + Γ^m_kp Γ^p_lj − Γ^m_lp Γ^p_kj`,
//! `R_ijkl = g_im R^m_jkl`, `S_jk = g^il R_ijkl`, `κ = g^jk S_jk`.
//! With these, a surface of Gaussian curvature K has `R_1212 = K det g` and
//! `κ = −2K` (the contraction on the first and last slot flips the usual sign).

mod invariants;

use std::sync::OnceLock;

use crate::knproducts::{gaussian, kn};
use crate::symexpr::{Chart, Expr, ExprError, RatFunc};
use crate::tensor::{Symmetry, Tensor, Valence};

pub use invariants::{check_invariants, InvariantCheck};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("metric must be {dim}x{dim} for this chart")]
    Shape { dim: usize },
    #[error("metric is not symmetric: g_{i}{j} and g_{j}{i} differ", i = .0 + 1, j = .1 + 1)]
    NotSymmetric(usize, usize),
    #[error("singular metric: the leading {order}x{order} block has no nonzero pivot (vanishing minor of order {order})")]
    Singular { order: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Symmetric metric components on a chart, with derived curvature cached on first use.
#[derive(Clone)]
pub struct MetricField {
    chart: Chart,
    g: Tensor<RatFunc>,
    inv: Tensor<RatFunc>,
    det: RatFunc,
    christoffel: OnceLock<Tensor<RatFunc>>,
    riemann: OnceLock<Tensor<RatFunc>>,
    ricci: OnceLock<Tensor<RatFunc>>,
    scalar: OnceLock<RatFunc>,
    nabla_r: OnceLock<Tensor<RatFunc>>,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MetricField({:?})", self.chart)
    }
}

impl MetricField {
    pub fn from_exprs(chart: Chart, comps: &[Vec<Expr>]) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if comps.len() != n || comps.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape { dim: n });
        }
        let mut data = Vec::with_capacity(n * n);
        for row in comps {
            for e in row {
                data.push(e.to_ratfunc(&chart)?);
            }
        }
        MetricField::from_components(chart, Tensor::from_vec(&[n, n], data))
    }

    pub fn diagonal(chart: Chart, diag: &[Expr]) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if diag.len() != n {
            return Err(GeometryError::Shape { dim: n });
        }
        let comps: Vec<Vec<Expr>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { diag[i].clone() } else { Expr::int(0) })
                    .collect()
            })
            .collect();
        MetricField::from_exprs(chart, &comps)
    }

    pub fn from_components(chart: Chart, g: Tensor<RatFunc>) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if g.shape() != [n, n] {
            return Err(GeometryError::Shape { dim: n });
        }
        for i in 0..n {
            for j in i + 1..n {
                if g.get(&[i, j]) != g.get(&[j, i]) {
                    return Err(GeometryError::NotSymmetric(i, j));
                }
            }
        }
        let g = g.with_meta(Valence::Covariant(2), Symmetry::SymmetricPair);
        let (inv, det) = invert(&g)?;
        Ok(MetricField {
            chart,
            g,
            inv,
            det,
            christoffel: OnceLock::new(),
            riemann: OnceLock::new(),
            ricci: OnceLock::new(),
            scalar: OnceLock::new(),
            nabla_r: OnceLock::new(),
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn g(&self) -> &Tensor<RatFunc> {
        &self.g
    }

    pub fn inverse(&self) -> &Tensor<RatFunc> {
        &self.inv
    }

    pub fn determinant(&self) -> &RatFunc {
        &self.det
    }

    pub fn component(&self, i: usize, j: usize) -> Expr {
        self.g.get(&[i, j]).to_expr(&self.chart)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.g.get(&[i, j]).is_zero()))
    }

    /// `Γ^k_ij`, stored as `[k, i, j]`.
    pub fn christoffel(&self) -> &Tensor<RatFunc> {
        self.christoffel.get_or_init(|| christoffel_of(self))
    }

    /// `R_ijkl`.
    pub fn riemann(&self) -> &Tensor<RatFunc> {
        self.riemann.get_or_init(|| riemann_of(self))
    }

    /// `S_jk = g^il R_ijkl`.
    pub fn ricci(&self) -> &Tensor<RatFunc> {
        self.ricci.get_or_init(|| {
            let n = self.dim();
            let r = self.riemann();
            Tensor::symmetric2(n, |j, k| {
                let mut acc = RatFunc::zero();
                for i in 0..n {
                    for l in 0..n {
                        let gi = self.inv.get(&[i, l]);
                        let rv = r.get(&[i, j, k, l]);
                        if !gi.is_zero() && !rv.is_zero() {
                            acc = acc.add(&gi.mul(rv));
                        }
                    }
                }
                acc
            })
        })
    }

    /// `κ = g^jk S_jk`.
    pub fn scalar_curvature(&self) -> &RatFunc {
        self.scalar.get_or_init(|| {
            let n = self.dim();
            let s = self.ricci();
            let mut acc = RatFunc::zero();
            for j in 0..n {
                for k in 0..n {
                    let gi = self.inv.get(&[j, k]);
                    let sv = s.get(&[j, k]);
                    if !gi.is_zero() && !sv.is_zero() {
                        acc = acc.add(&gi.mul(sv));
                    }
                }
            }
            acc
        })
    }

    /// `R_ijkl,m`.
    pub fn nabla_riemann(&self) -> &Tensor<RatFunc> {
        self.nabla_r.get_or_init(|| {
            let n = self.dim();
            let r = self.riemann();
            let gam = self.christoffel();
            Tensor::riemann_type5(n, |i, j, k, l, m| {
                let mut acc = r.get(&[i, j, k, l]).diff(m);
                for p in 0..n {
                    for (slot, a) in [i, j, k, l].into_iter().enumerate() {
                        let c = gam.get(&[p, m, a]);
                        if c.is_zero() {
                            continue;
                        }
                        let mut idx = [i, j, k, l];
                        idx[slot] = p;
                        let rv = r.get(&idx);
                        if !rv.is_zero() {
                            acc = acc.sub(&c.mul(rv));
                        }
                    }
                }
                acc
            })
        })
    }

    /// Covariant derivative of a (0,k) tensor; the derivative index is appended last.
    pub fn covariant_derivative(&self, t: &Tensor<RatFunc>) -> Tensor<RatFunc> {
        let n = self.dim();
        let gam = self.christoffel();
        let mut shape = t.shape().to_vec();
        shape.push(n);
        Tensor::par_from_fn(&shape, |idx| {
            let (head, m) = idx.split_at(idx.len() - 1);
            let m = m[0];
            let mut acc = t.get(head).diff(m);
            for (slot, &a) in head.iter().enumerate() {
                for p in 0..n {
                    let c = gam.get(&[p, m, a]);
                    if c.is_zero() {
                        continue;
                    }
                    let mut h = head.to_vec();
                    h[slot] = p;
                    let tv = t.get(&h);
                    if !tv.is_zero() {
                        acc = acc.sub(&c.mul(tv));
                    }
                }
            }
            acc
        })
    }

    /// `W = R − κ/(2n(n−1)) g∧g`.
    pub fn concircular(&self) -> Tensor<RatFunc> {
        let n = self.dim() as i64;
        if n < 2 {
            return self.riemann().clone();
        }
        let c = self.scalar_curvature().mul(&RatFunc::ratio(1, 2 * n * (n - 1)));
        self.riemann()
            .sub(&kn(&self.g, &self.g).scale(&c))
            .with_meta(Valence::Covariant(4), Symmetry::RiemannType)
    }

    /// Einstein deviation `S − (κ/n) g` and constant-curvature deviation
    /// `R − κ/(n(n−1)) · ½ g∧g`.
    pub fn curvature_residuals(&self) -> CurvatureResiduals {
        let n = self.dim() as i64;
        let kappa = self.scalar_curvature();
        let einstein_dev = self
            .ricci()
            .sub(&self.g.scale(&kappa.mul(&RatFunc::ratio(1, n))));
        let const_curv_dev = if n < 2 {
            self.riemann().clone()
        } else {
            self.riemann()
                .sub(&gaussian(&self.g).scale(&kappa.mul(&RatFunc::ratio(1, n * (n - 1)))))
        };
        CurvatureResiduals {
            einstein_dev,
            const_curv_dev,
        }
    }

    pub fn is_flat(&self) -> bool {
        self.riemann().is_exact_zero()
    }
}

#[derive(Debug, Clone)]
pub struct CurvatureResiduals {
    pub einstein_dev: Tensor<RatFunc>,
    pub const_curv_dev: Tensor<RatFunc>,
}

pub fn inverse_metric(g: &MetricField) -> &Tensor<RatFunc> {
    g.inverse()
}

pub fn christoffel(g: &MetricField) -> &Tensor<RatFunc> {
    g.christoffel()
}

pub fn riemann(g: &MetricField) -> &Tensor<RatFunc> {
    g.riemann()
}

pub fn ricci(g: &MetricField) -> &Tensor<RatFunc> {
    g.ricci()
}

pub fn scalar_curvature(g: &MetricField) -> &RatFunc {
    g.scalar_curvature()
}

pub fn covariant_derivative_r(g: &MetricField) -> &Tensor<RatFunc> {
    g.nabla_riemann()
}

pub fn concircular(g: &MetricField) -> Tensor<RatFunc> {
    g.concircular()
}

pub fn curvature_residuals(g: &MetricField) -> CurvatureResiduals {
    g.curvature_residuals()
}

/// Gauss–Jordan inversion over rational functions; also returns the determinant.
fn invert(g: &Tensor<RatFunc>) -> Result<(Tensor<RatFunc>, RatFunc), GeometryError> {
    let n = g.dim();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || g.get(&[i, j]).is_zero()));
    if diagonal {
        let mut det = RatFunc::one();
        let mut inv = Tensor::zeros(&[n, n]);
        for i in 0..n {
            let d = g.get(&[i, i]);
            if d.is_zero() {
                return Err(GeometryError::Singular { order: i + 1 });
            }
            det = det.mul(d);
            inv.set(&[i, i], d.inv()?);
        }
        return Ok((
            inv.with_meta(Valence::Contravariant2, Symmetry::SymmetricPair),
            det,
        ));
    }
    let mut a: Vec<Vec<RatFunc>> = (0..n)
        .map(|i| (0..n).map(|j| g.get(&[i, j]).clone()).collect())
        .collect();
    let mut b: Vec<Vec<RatFunc>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() })
                .collect()
        })
        .collect();
    let mut det = RatFunc::one();
    for c in 0..n {
        let pivot = (c..n)
            .filter(|&r| !a[r][c].is_zero())
            .min_by_key(|&r| a[r][c].term_count())
            .ok_or(GeometryError::Singular { order: c + 1 })?;
        if pivot != c {
            a.swap(pivot, c);
            b.swap(pivot, c);
            det = det.neg();
        }
        let p = a[c][c].clone();
        det = det.mul(&p);
        let pinv = p.inv()?;
        for j in 0..n {
            a[c][j] = a[c][j].mul(&pinv);
            b[c][j] = b[c][j].mul(&pinv);
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                if !a[c][j].is_zero() {
                    a[r][j] = a[r][j].sub(&f.mul(&a[c][j]));
                }
                if !b[c][j].is_zero() {
                    b[r][j] = b[r][j].sub(&f.mul(&b[c][j]));
                }
            }
        }
    }
    let inv = Tensor::from_fn(&[n, n], |i| b[i[0]][i[1]].clone())
        .with_meta(Valence::Contravariant2, Symmetry::SymmetricPair);
    Ok((inv, det))
}

fn christoffel_of(m: &MetricField) -> Tensor<RatFunc> {
    let n = m.dim();
    let g = &m.g;
    // dg[l][i][j] = ∂_l g_ij
    let dg = Tensor::par_from_fn(&[n, n, n], |idx| g.get(&[idx[1], idx[2]]).diff(idx[0]));
    let first = |l: usize, i: usize, j: usize| -> RatFunc {
        dg.get(&[i, j, l])
            .add(dg.get(&[j, i, l]))
            .sub(dg.get(&[l, i, j]))
            .mul(&RatFunc::ratio(1, 2))
    };
    let lower: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let firsts: Vec<Vec<RatFunc>> = lower
        .iter()
        .map(|&(i, j)| (0..n).map(|l| first(l, i, j)).collect())
        .collect();
    let mut out = Tensor::zeros(&[n, n, n]);
    for (p, &(i, j)) in lower.iter().enumerate() {
        for k in 0..n {
            let v = crate::tensor::dot((0..n).map(|l| (m.inv.get(&[k, l]).clone(), firsts[p][l].clone())));
            out.set(&[k, i, j], v.clone());
            out.set(&[k, j, i], v);
        }
    }
    out.with_meta(Valence::Mixed12, Symmetry::None)
}

fn riemann_of(m: &MetricField) -> Tensor<RatFunc> {
    let n = m.dim();
    let gam = m.christoffel();
    let dgam = Tensor::par_from_fn(&[n, n, n, n], |idx| gam.get(&[idx[1], idx[2], idx[3]]).diff(idx[0]));
    // R^m_jkl for k < l
    let up = |mm: usize, j: usize, k: usize, l: usize| -> RatFunc {
        let mut acc = dgam.get(&[k, mm, l, j]).sub(dgam.get(&[l, mm, k, j]));
        for p in 0..n {
            let a = gam.get(&[mm, k, p]);
            let b = gam.get(&[p, l, j]);
            if !a.is_zero() && !b.is_zero() {
                acc = acc.add(&a.mul(b));
            }
            let c = gam.get(&[mm, l, p]);
            let d = gam.get(&[p, k, j]);
            if !c.is_zero() && !d.is_zero() {
                acc = acc.sub(&c.mul(d));
            }
        }
        acc
    };
    let mixed = Tensor::par_from_fn(&[n, n, n, n], |idx| {
        let (mm, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        if k < l {
            up(mm, j, k, l)
        } else {
            RatFunc::zero()
        }
    });
    Tensor::riemann_type(n, |i, j, k, l| {
        crate::tensor::dot((0..n).map(|mm| (m.g.get(&[i, mm]).clone(), mixed.get(&[mm, j, k, l]).clone())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn metric(names: &[&str], diag: &[&str]) -> MetricField {
        let chart = Chart::new(names).unwrap();
        let d: Vec<Expr> = diag.iter().map(|s| parse_expr(s).unwrap()).collect();
        MetricField::diagonal(chart, &d).unwrap()
    }

    #[test]
    fn euclidean_is_flat() {
        let m = metric(&["x", "y", "z"], &["1", "1", "1"]);
        assert!(m.christoffel().is_exact_zero());
        assert!(m.is_flat());
        assert!(m.scalar_curvature().is_zero());
    }

    #[test]
    fn singular_metric_is_rejected() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let one = parse_expr("exp(x)").unwrap();
        let comps = vec![vec![one.clone(), one.clone()], vec![one.clone(), one]];
        let err = MetricField::from_exprs(chart, &comps).unwrap_err();
        assert_eq!(err, GeometryError::Singular { order: 2 });
    }

    #[test]
    fn asymmetric_metric_is_rejected() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let comps = vec![
            vec![Expr::int(1), parse_expr("exp(x)").unwrap()],
            vec![parse_expr("exp(y)").unwrap(), Expr::int(1)],
        ];
        assert!(matches!(
            MetricField::from_exprs(chart, &comps),
            Err(GeometryError::NotSymmetric(0, 1))
        ));
    }

    fn same(a: &RatFunc, chart: &Chart, src: &str) {
        let want = parse_expr(src).unwrap().to_ratfunc(chart).unwrap();
        assert_eq!(a, &want, "expected {src}, got {}", a.to_expr(chart));
    }

    #[test]
    fn example_one_curvature() {
        let m = metric(&["x1", "x2", "x3", "x4"], &["exp(x2)", "exp(x1)", "1", "exp(x3)"]);
        let c = m.chart().clone();
        same(m.riemann().get(&[0, 1, 0, 1]), &c, "-(exp(x1)+exp(x2))/4");
        same(m.riemann().get(&[2, 3, 2, 3]), &c, "-exp(x3)/4");
        same(m.ricci().get(&[0, 0]), &c, "(exp(x2-x1)+1)/4");
        same(m.ricci().get(&[2, 2]), &c, "1/4");
        same(m.ricci().get(&[3, 3]), &c, "exp(x3)/4");
        same(m.scalar_curvature(), &c, "(exp(-x1)+exp(-x2))/2 + 1/2");
        same(m.nabla_riemann().get(&[0, 1, 0, 1, 0]), &c, "exp(x2)/4");
        same(m.nabla_riemann().get(&[0, 1, 0, 1, 1]), &c, "exp(x1)/4");
        for chk in check_invariants(&m, &crate::symexpr::ZeroTest::default()) {
            assert!(chk.proved, "{} not proved", chk.name);
        }
    }

    #[test]
    fn hyperbolic_patch_has_constant_curvature() {
        // Hyperbolic-type metric dx² + e^{2x} dy²: K = −1.
        let m = metric(&["x", "y"], &["1", "exp(2*x)"]);
        let c = m.chart().clone();
        same(m.riemann().get(&[0, 1, 0, 1]), &c, "-exp(2*x)");
        same(m.scalar_curvature(), &c, "2");
        assert!(m.curvature_residuals().const_curv_dev.is_exact_zero());
    }
}
