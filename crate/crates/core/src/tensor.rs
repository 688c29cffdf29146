//! Dense component arrays shared by the symbolic and numeric pipelines.

use std::fmt;

use dashu_ratio::RBig;
use rayon::prelude::*;

use crate::symexpr::{EvalError, PointValues, RatFunc, Real};

/// Scalars the tensor algebra is generic over: exact rational functions or
/// high-precision numbers at a point.
pub trait Field: Clone + Send + Sync + fmt::Debug + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(r: &RBig) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Exact zero (not a tolerance test).
    fn is_zero(&self) -> bool;

    fn from_int(k: i64) -> Self {
        Self::from_ratio(&RBig::from(k))
    }

    fn ratio(p: i64, q: i64) -> Self {
        Self::from_ratio(&(RBig::from(p) / RBig::from(q)))
    }

    /// Multiplicative inverse, `None` for zero.
    fn try_recip(x: &Self) -> Option<Self>;
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn from_ratio(r: &RBig) -> Self {
        RatFunc::constant(r.clone())
    }
    fn add(&self, o: &Self) -> Self {
        RatFunc::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFunc::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::mul(self, o)
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn try_recip(x: &Self) -> Option<Self> {
        x.inv().ok()
    }
}

impl Field for Real {
    fn zero() -> Self {
        Real::zero()
    }
    fn one() -> Self {
        Real::one()
    }
    fn from_ratio(r: &RBig) -> Self {
        Real::from_rbig(r)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Real::is_zero(self)
    }
    fn try_recip(x: &Self) -> Option<Self> {
        (!x.is_zero()).then(|| &Real::one() / x)
    }
}

/// Sum of products, skipping exact zeros.
pub fn dot<F: Field>(pairs: impl IntoIterator<Item = (F, F)>) -> F {
    let mut acc = F::zero();
    for (a, b) in pairs {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc = acc.add(&a.mul(&b));
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Valence {
    Scalar,
    /// (0,k)
    Covariant(usize),
    /// (2,0)
    Contravariant2,
    /// (1,2)
    Mixed12,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Symmetry {
    None,
    SymmetricPair,
    RiemannType,
}

#[derive(Clone, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
    pub valence: Valence,
    pub symmetry: Symmetry,
}

impl<T: fmt::Debug> fmt::Debug for Tensor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor")
            .field("shape", &self.shape)
            .field("valence", &self.valence)
            .field("symmetry", &self.symmetry)
            .finish()
    }
}

fn default_valence(rank: usize) -> Valence {
    if rank == 0 {
        Valence::Scalar
    } else {
        Valence::Covariant(rank)
    }
}

/// Visit every multi-index of `shape` in row-major order.
pub fn indices(shape: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = shape.iter().product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut idx = vec![0; shape.len()];
    for _ in 0..total {
        out.push(idx.clone());
        for a in (0..shape.len()).rev() {
            idx[a] += 1;
            if idx[a] < shape[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    out
}

impl<T: Clone + Send + Sync> Tensor<T> {
    pub fn filled(shape: &[usize], v: T) -> Self {
        let total = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![v; total],
            valence: default_valence(shape.len()),
            symmetry: Symmetry::None,
        }
    }

    pub fn from_fn(shape: &[usize], f: impl Fn(&[usize]) -> T) -> Self {
        let data = indices(shape).iter().map(|i| f(i)).collect();
        Tensor {
            shape: shape.to_vec(),
            data,
            valence: default_valence(shape.len()),
            symmetry: Symmetry::None,
        }
    }

    pub fn par_from_fn(shape: &[usize], f: impl Fn(&[usize]) -> T + Sync) -> Self {
        let data = indices(shape).par_iter().map(|i| f(i)).collect();
        Tensor {
            shape: shape.to_vec(),
            data,
            valence: default_valence(shape.len()),
            symmetry: Symmetry::None,
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<T>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), data.len());
        Tensor {
            shape: shape.to_vec(),
            data,
            valence: default_valence(shape.len()),
            symmetry: Symmetry::None,
        }
    }

    pub fn with_meta(mut self, valence: Valence, symmetry: Symmetry) -> Self {
        self.valence = valence;
        self.symmetry = symmetry;
        self
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    /// Extent of the first index (all indices share it for chart tensors).
    pub fn dim(&self) -> usize {
        self.shape.first().copied().unwrap_or(1)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut k = 0;
        for (a, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.shape[a]);
            k = k * self.shape[a] + i;
        }
        k
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let k = self.flat_index(idx);
        self.data[k] = v;
    }

    pub fn indexed(&self) -> impl Iterator<Item = (Vec<usize>, &T)> {
        indices(&self.shape).into_iter().zip(self.data.iter())
    }

    pub fn map<U: Clone + Send + Sync>(&self, f: impl Fn(&T) -> U + Sync) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.par_iter().map(&f).collect(),
            valence: self.valence,
            symmetry: self.symmetry,
        }
    }

    pub fn try_map<U: Clone + Send + Sync, E: Send>(
        &self,
        f: impl Fn(&T) -> Result<U, E> + Sync,
    ) -> Result<Tensor<U>, E> {
        let data: Result<Vec<U>, E> = self.data.par_iter().map(&f).collect();
        Ok(Tensor {
            shape: self.shape.clone(),
            data: data?,
            valence: self.valence,
            symmetry: self.symmetry,
        })
    }

    pub fn zip_map<U: Clone + Send + Sync, V: Clone + Send + Sync>(
        &self,
        other: &Tensor<U>,
        f: impl Fn(&T, &U) -> V + Sync,
    ) -> Tensor<V> {
        assert_eq!(self.shape, other.shape, "shape mismatch");
        Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .par_iter()
                .zip(other.data.par_iter())
                .map(|(a, b)| f(a, b))
                .collect(),
            valence: self.valence,
            symmetry: self.symmetry,
        }
    }
}

impl<F: Field> Tensor<F> {
    pub fn zeros(shape: &[usize]) -> Self {
        Tensor::filled(shape, F::zero())
    }

    pub fn add(&self, o: &Tensor<F>) -> Tensor<F> {
        self.zip_map(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Tensor<F>) -> Tensor<F> {
        self.zip_map(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &F) -> Tensor<F> {
        if c.is_zero() {
            return Tensor::zeros(&self.shape).with_meta(self.valence, self.symmetry);
        }
        self.map(|a| a.mul(c))
    }

    pub fn neg(&self) -> Tensor<F> {
        self.map(|a| a.neg())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// `Σ c_b t_b` for tensors of one shape.
    pub fn combination(shape: &[usize], terms: &[(F, &Tensor<F>)]) -> Tensor<F> {
        let mut acc = Tensor::zeros(shape);
        for (c, t) in terms {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&t.scale(c));
        }
        acc
    }

    /// (0,4) tensor with Riemann antisymmetries from values on `i<j, k<l`.
    pub fn riemann_type(n: usize, f: impl Fn(usize, usize, usize, usize) -> F + Sync) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let quads: Vec<(usize, usize, usize, usize)> = pairs
            .iter()
            .flat_map(|&(i, j)| pairs.iter().map(move |&(k, l)| (i, j, k, l)))
            .collect();
        let vals: Vec<F> = quads.par_iter().map(|&(i, j, k, l)| f(i, j, k, l)).collect();
        let mut t = Tensor::zeros(&[n; 4]);
        for (&(i, j, k, l), v) in quads.iter().zip(vals) {
            if v.is_zero() {
                continue;
            }
            let nv = v.neg();
            t.set(&[i, j, k, l], v.clone());
            t.set(&[j, i, l, k], v);
            t.set(&[j, i, k, l], nv.clone());
            t.set(&[i, j, l, k], nv);
        }
        t.with_meta(Valence::Covariant(4), Symmetry::RiemannType)
    }

    /// (0,5) tensor antisymmetric in the first two and in indices 3–4, from
    /// values on `i<j, k<l` and every last index.
    pub fn riemann_type5(
        n: usize,
        f: impl Fn(usize, usize, usize, usize, usize) -> F + Sync,
    ) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let tuples: Vec<[usize; 5]> = pairs
            .iter()
            .flat_map(|&(i, j)| {
                pairs
                    .iter()
                    .flat_map(move |&(k, l)| (0..n).map(move |m| [i, j, k, l, m]))
            })
            .collect();
        let vals: Vec<F> = tuples
            .par_iter()
            .map(|&[i, j, k, l, m]| f(i, j, k, l, m))
            .collect();
        let mut t = Tensor::zeros(&[n; 5]);
        for (&[i, j, k, l, m], v) in tuples.iter().zip(vals) {
            if v.is_zero() {
                continue;
            }
            let nv = v.neg();
            t.set(&[i, j, k, l, m], v.clone());
            t.set(&[j, i, l, k, m], v);
            t.set(&[j, i, k, l, m], nv.clone());
            t.set(&[i, j, l, k, m], nv);
        }
        t.with_meta(Valence::Covariant(5), Symmetry::RiemannType)
    }

    /// Symmetric (0,2) tensor from values on `i<=j`.
    pub fn symmetric2(n: usize, f: impl Fn(usize, usize) -> F + Sync) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let vals: Vec<F> = pairs.par_iter().map(|&(i, j)| f(i, j)).collect();
        let mut t = Tensor::zeros(&[n, n]);
        for (&(i, j), v) in pairs.iter().zip(vals) {
            t.set(&[i, j], v.clone());
            t.set(&[j, i], v);
        }
        t.with_meta(Valence::Covariant(2), Symmetry::SymmetricPair)
    }

    /// Slice along the last index.
    pub fn last_index_slice(&self, m: usize) -> Tensor<F> {
        let r = self.rank();
        let shape = &self.shape[..r - 1];
        Tensor::from_fn(shape, |idx| {
            let mut full = idx.to_vec();
            full.push(m);
            self.get(&full).clone()
        })
    }

    /// Exterior tensor product `t ⊗ w` with `w` appended as the last index.
    pub fn outer_last(&self, w: &[F]) -> Tensor<F> {
        let mut shape = self.shape.clone();
        shape.push(w.len());
        Tensor::par_from_fn(&shape, |idx| {
            let (head, m) = idx.split_at(idx.len() - 1);
            let a = self.get(head);
            let b = &w[m[0]];
            if a.is_zero() || b.is_zero() {
                F::zero()
            } else {
                a.mul(b)
            }
        })
    }
}

impl Tensor<RatFunc> {
    pub fn eval(&self, at: &PointValues, guard: &Real) -> Result<Tensor<Real>, EvalError> {
        self.try_map(|r| r.eval(at, guard))
    }

    pub fn remap_coords(&self, f: &(dyn Fn(usize) -> usize + Sync)) -> Tensor<RatFunc> {
        self.map(|r| r.remap_coords(f))
    }
}

impl Tensor<Real> {
    pub fn norm(&self) -> Real {
        let mut acc = Real::zero();
        for v in &self.data {
            if !v.is_zero() {
                acc = acc + v * v;
            }
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> Real {
        self.data
            .iter()
            .fold(Real::zero(), |acc, v| acc.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_indices() {
        let idx = indices(&[2, 3]);
        assert_eq!(idx.len(), 6);
        assert_eq!(idx[4], vec![1, 1]);
        let t: Tensor<Real> = Tensor::from_fn(&[2, 3], |i| Real::from_i64((10 * i[0] + i[1]) as i64));
        assert_eq!(t.get(&[1, 2]).to_f64(), 12.0);
    }

    #[test]
    fn riemann_fill_antisymmetry() {
        let t: Tensor<Real> = Tensor::riemann_type(3, |i, j, k, l| {
            Real::from_i64((1000 * i + 100 * j + 10 * k + l) as i64)
        });
        assert_eq!(t.get(&[1, 0, 0, 2]).to_f64(), -(100.0 + 2.0));
        assert_eq!(t.get(&[1, 0, 2, 0]).to_f64(), 102.0);
        assert!(t.get(&[1, 1, 0, 2]).is_zero());
    }
}
