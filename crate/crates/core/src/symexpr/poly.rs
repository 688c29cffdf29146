//! Sparse multivariate Laurent polynomials over Q.
//!
//! Variables come in pairs per chart coordinate: `x_c` (the coordinate) and
//! `y_c = exp(x_c)`. Only `y` exponents may be negative.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use dashu_ratio::RBig;
use smallvec::SmallVec;

pub type Var = u16;

pub fn xvar(coord: usize) -> Var {
    (2 * coord) as Var
}

pub fn yvar(coord: usize) -> Var {
    (2 * coord + 1) as Var
}

pub fn var_coord(v: Var) -> usize {
    (v / 2) as usize
}

pub fn is_exp_var(v: Var) -> bool {
    v % 2 == 1
}

/// Monomial as a sorted list of `(var, exponent)` with nonzero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Mono(SmallVec<[(Var, i32); 4]>);

impl Mono {
    pub fn one() -> Self {
        Mono(SmallVec::new())
    }

    pub fn var(v: Var, e: i32) -> Self {
        let mut m = Mono::one();
        if e != 0 {
            m.0.push((v, e));
        }
        m
    }

    pub fn from_pairs(mut pairs: Vec<(Var, i32)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut out: SmallVec<[(Var, i32); 4]> = SmallVec::new();
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        out.retain(|p| p.1 != 0);
        Mono(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, i32)] {
        &self.0
    }

    pub fn exp_of(&self, v: Var) -> i32 {
        self.0
            .iter()
            .find(|p| p.0 == v)
            .map(|p| p.1)
            .unwrap_or(0)
    }

    fn merge(&self, other: &Mono, sign: i32) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, sign * b[j].1));
                j += 1;
            } else {
                let e = a[i].1 + sign * b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Mono(out)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        self.merge(other, 1)
    }

    pub fn div(&self, other: &Mono) -> Mono {
        self.merge(other, -1)
    }

    pub fn pow(&self, k: i32) -> Mono {
        if k == 0 {
            return Mono::one();
        }
        Mono(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|p| p.1 >= 0)
    }

    /// Componentwise minimum of exponents (absent variables count as 0).
    pub fn meet(&self, other: &Mono) -> Mono {
        let mut vars: Vec<Var> = self.0.iter().chain(other.0.iter()).map(|p| p.0).collect();
        vars.sort_unstable();
        vars.dedup();
        Mono(
            vars.into_iter()
                .filter_map(|v| {
                    let e = self.exp_of(v).min(other.exp_of(v));
                    (e != 0).then_some((v, e))
                })
                .collect(),
        )
    }

    pub fn without(&self, v: Var) -> Mono {
        Mono(self.0.iter().copied().filter(|p| p.0 != v).collect())
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|p| p.1.unsigned_abs() as i64).sum()
    }

    pub fn remap(&self, f: &dyn Fn(Var) -> Var) -> Mono {
        Mono::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)).collect())
    }
}

/// Lexicographic order with the lowest variable id most significant.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, ea)), None) => return ea.cmp(&0),
                (None, Some(&(_, eb))) => return 0.cmp(&eb),
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va == vb {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    } else if va < vb {
                        return ea.cmp(&0);
                    } else {
                        return 0.cmp(&eb);
                    }
                }
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(v, e)| {
                let name = if is_exp_var(v) { "y" } else { "x" };
                format!("{}{}^{}", name, var_coord(v), e)
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial with terms keyed by monomial; the last entry is the leading term.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, RBig>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| format!("{}*{:?}", c, m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(RBig::ONE)
    }

    pub fn constant(c: RBig) -> Self {
        Poly::term(Mono::one(), c)
    }

    pub fn term(m: Mono, c: RBig) -> Self {
        let mut terms = BTreeMap::new();
        if c != RBig::ZERO {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Mono, RBig)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &RBig)> {
        self.terms.iter()
    }

    /// The constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<RBig> {
        match self.terms.len() {
            0 => Some(RBig::ZERO),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(RBig::ONE)
    }

    pub fn as_monomial(&self) -> Option<(&Mono, &RBig)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn lead(&self) -> Option<(&Mono, &RBig)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Mono, c: RBig) {
        if c == RBig::ZERO {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if *existing == RBig::ZERO {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &RBig) -> Poly {
        if *c == RBig::ZERO {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some((_, c)) => {
                let inv = RBig::ONE / c;
                self.scale(&inv)
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|p| p.0))
            .collect()
    }

    pub fn has_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp_of(v) != 0)
    }

    pub fn degree_in(&self, v: Var) -> i32 {
        self.terms.keys().map(|m| m.exp_of(v)).max().unwrap_or(0)
    }

    /// Coefficient of `v^d`, as a polynomial free of `v`.
    pub fn coeff_in(&self, v: Var, d: i32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp_of(v) == d)
                .map(|(m, c)| (m.without(v), c.clone()))
                .collect(),
        }
    }

    pub fn coeffs_in(&self, v: Var) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exp_of(v))
                .or_default()
                .add_term(m.without(v), c.clone());
        }
        out
    }

    /// Componentwise minimum exponent over all terms.
    pub fn mono_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Mono::one(),
        };
        it.fold(first, |acc, m| acc.meet(m))
    }

    pub fn div_mono(&self, m: &Mono) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(k, c)| (k.div(m), c.clone())).collect(),
        }
    }

    pub fn is_nonneg(&self) -> bool {
        self.terms.keys().all(|m| m.is_nonneg())
    }

    pub fn remap(&self, f: &dyn Fn(Var) -> Var) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.remap(f), c.clone())))
    }

    /// Partial derivative with respect to chart coordinate `coord`.
    pub fn diff(&self, coord: usize) -> Poly {
        let (xv, yv) = (xvar(coord), yvar(coord));
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let a = m.exp_of(xv);
            if a != 0 {
                out.add_term(m.div(&Mono::var(xv, 1)), c * RBig::from(a));
            }
            let b = m.exp_of(yv);
            if b != 0 {
                out.add_term(m.clone(), c * RBig::from(b));
            }
        }
        out
    }

    /// Exact quotient `self / d` for polynomials with nonnegative exponents.
    /// Returns `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(RBig::ONE / c)));
        }
        if let Some((m, c)) = d.as_monomial() {
            let q = self.div_mono(m).scale(&(RBig::ONE / c));
            return q.is_nonneg().then_some(q);
        }
        let (dm, dc) = d.lead().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.lead().map(|(m, c)| (m.clone(), c.clone())) {
            let t = rm.div(&dm);
            if !t.is_nonneg() {
                return None;
            }
            let tc = rc / &dc;
            for (m, c) in &d.terms {
                r.add_term(m.mul(&t), -(c * &tc));
            }
            q.add_term(t, tc);
        }
        Some(q)
    }

    /// Gcd of the coefficients with respect to `v`.
    pub fn content_in(&self, v: Var) -> Poly {
        let mut g = Poly::zero();
        for c in self.coeffs_in(v).into_values() {
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_in(&self, v: Var) -> Poly {
        let c = self.content_in(v);
        self.exact_div(&c).expect("content divides").monic()
    }
}

/// Monic gcd of two polynomials with nonnegative exponents.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    let ma = a.mono_content();
    let mb = b.mono_content();
    let m = ma.meet(&mb);
    let a1 = a.div_mono(&ma);
    let b1 = b.div_mono(&mb);
    gcd_contentless(&a1, &b1).mul_mono(&m)
}

fn gcd_contentless(a: &Poly, b: &Poly) -> Poly {
    if a.len() == 1 || b.len() == 1 {
        return Poly::one();
    }
    let (am, bm) = (a.monic(), b.monic());
    if am == bm {
        return am;
    }
    let va = a.vars();
    let vb = b.vars();
    if let Some(&v) = va.difference(&vb).next() {
        return gcd(&a.content_in(v), b);
    }
    if let Some(&v) = vb.difference(&va).next() {
        return gcd(a, &b.content_in(v));
    }
    let v = *va
        .iter()
        .min_by_key(|&&v| a.degree_in(v).max(b.degree_in(v)))
        .expect("non-constant");
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    let g = primitive_prs(pa, pb, v);
    c.mul(&g).monic()
}

fn primitive_prs(a: Poly, b: Poly, v: Var) -> Poly {
    if a.degree_in(v) == 0 || b.degree_in(v) == 0 {
        return Poly::one();
    }
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            return b.monic();
        }
        if r.degree_in(v) == 0 {
            return Poly::one();
        }
        a = b;
        b = r.primitive_in(v);
    }
}

fn pseudo_rem(a: &Poly, b: &Poly, v: Var) -> Poly {
    let db = b.degree_in(v);
    let lb = b.coeff_in(v, db);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeff_in(v, dr).mul_mono(&Mono::var(v, dr - db));
        r = lb.mul(&r).sub(&lr.mul(b));
        if let Some((_, c)) = r.lead() {
            let c = c.clone();
            r = r.scale(&(RBig::ONE / c));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(c: usize) -> Poly {
        Poly::term(Mono::var(xvar(c), 1), RBig::ONE)
    }

    fn y(c: usize) -> Poly {
        Poly::term(Mono::var(yvar(c), 1), RBig::ONE)
    }

    fn k(n: i64) -> Poly {
        Poly::constant(RBig::from(n))
    }

    #[test]
    fn lex_order_is_dense_lex() {
        let a = Mono::var(xvar(0), 1);
        let b = Mono::var(xvar(1), 5);
        assert!(a > b);
        assert!(Mono::one() < b);
        assert!(Mono::var(yvar(0), -1) < Mono::one());
    }

    #[test]
    fn gcd_of_products() {
        let f = y(0).add(&y(1));
        let g = x(0).add(&k(2));
        let h = y(0).mul(&y(1)).sub(&k(3));
        let a = f.mul(&g).mul(&g);
        let b = f.mul(&h).mul(&g);
        assert_eq!(gcd(&a, &b), f.mul(&g).monic());
        assert!(gcd(&g, &h).is_one());
    }

    #[test]
    fn gcd_with_monomial_content() {
        let a = y(0).mul(&y(0)).mul(&y(1).add(&k(1)));
        let b = y(0).mul(&x(1));
        assert_eq!(gcd(&a, &b), y(0));
    }

    #[test]
    fn exact_division() {
        let f = y(0).add(&y(1)).add(&k(1));
        let g = x(0).sub(&y(1));
        let p = f.mul(&g);
        assert_eq!(p.exact_div(&f), Some(g.clone()));
        assert_eq!(p.exact_div(&g), Some(f.clone()));
        assert_eq!(f.exact_div(&g), None);
    }

    #[test]
    fn derivative_of_exp_monomial() {
        let p = y(0).mul(&y(0)).mul(&x(0));
        let d = p.diff(0);
        let expected = y(0).mul(&y(0)).add(&y(0).mul(&y(0)).mul(&x(0)).scale(&RBig::from(2)));
        assert_eq!(d, expected);
    }
}
