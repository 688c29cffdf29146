//! Canonical rational functions over coordinates and exp-monomials.
//!
//! A value is `num / den` where `den` has nonnegative exponents, no monomial
//! factor in the `exp` variables, is coprime to `num`, and has leading
//! coefficient 1. Equal functions therefore have identical representations.

use std::fmt;
use std::sync::Arc;

use dashu_ratio::RBig;

use super::poly::{gcd, is_exp_var, var_coord, xvar, yvar, Mono, Poly, Var};
use super::real::Real;
use super::{Chart, EvalError, Expr, ExprError};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Arc<Poly>,
    den: Arc<Poly>,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?}) / ({:?})", self.num, self.den)
        }
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn constant(c: RBig) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_int(k: i64) -> Self {
        RatFunc::constant(RBig::from(k))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        RatFunc::constant(RBig::from(p) / RBig::from(q))
    }

    /// The coordinate `x_c` itself.
    pub fn coord(c: usize) -> Self {
        RatFunc::from_poly(Poly::term(Mono::var(xvar(c), 1), RBig::ONE))
    }

    /// `exp(Σ k_c x_c)`.
    pub fn exp_linear(coeffs: &[(usize, i64)]) -> Self {
        let m = Mono::from_pairs(coeffs.iter().map(|&(c, k)| (yvar(c), k as i32)).collect());
        RatFunc::from_poly(Poly::term(m, RBig::ONE))
    }

    /// Wrap a Laurent polynomial; no normalization is needed.
    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: Arc::new(p),
            den: Arc::new(Poly::one()),
        }
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(normalize(num, den))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<RBig> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn term_count(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: Arc::new(self.num.neg()),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc::from_poly(self.num.add(&other.num));
        }
        if other.den.is_one() {
            // (a + b d) / d stays reduced when a/d is.
            let num = self.num.add(&other.num.mul(&self.den));
            return RatFunc {
                num: Arc::new(num),
                den: self.den.clone(),
            };
        }
        if self.den.is_one() {
            return other.add(self);
        }
        if self.den == other.den {
            return normalize(self.num.add(&other.num), (*self.den).clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        normalize(num, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc::from_poly(self.num.mul(&other.num));
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        normalize(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &RBig) -> RatFunc {
        if *c == RBig::ZERO {
            return RatFunc::zero();
        }
        RatFunc {
            num: Arc::new(self.num.scale(c)),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(normalize((*self.den).clone(), (*self.num).clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, ExprError> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if let Some(c) = other.as_constant() {
            return Ok(self.scale(&(RBig::ONE / c)));
        }
        Ok(normalize(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn pow(&self, k: i32) -> Result<RatFunc, ExprError> {
        if k == 0 {
            return Ok(RatFunc::one());
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(RatFunc {
            num: Arc::new(base.num.pow(e)),
            den: Arc::new(base.den.pow(e)),
        })
    }

    /// Partial derivative with respect to chart coordinate `coord`.
    pub fn diff(&self, coord: usize) -> RatFunc {
        let dn = self.num.diff(coord);
        if self.den.is_one() {
            return RatFunc::from_poly(dn);
        }
        let dd = self.den.diff(coord);
        if dd.is_zero() {
            return normalize(dn, (*self.den).clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        normalize(num, self.den.mul(&self.den))
    }

    /// Relabel coordinates (e.g. embed a base or fiber chart into a product chart).
    pub fn remap_coords(&self, f: &dyn Fn(usize) -> usize) -> RatFunc {
        let g = |v: Var| -> Var {
            let c = f(var_coord(v));
            if is_exp_var(v) {
                yvar(c)
            } else {
                xvar(c)
            }
        };
        let num = self.num.remap(&g);
        let den = self.den.remap(&g);
        // Renaming can change which term leads; restore the monic denominator.
        let inv = RBig::ONE / den.lead().map(|(_, c)| c.clone()).expect("nonzero denominator");
        RatFunc {
            num: Arc::new(num.scale(&inv)),
            den: Arc::new(den.scale(&inv)),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        self.num
            .vars()
            .into_iter()
            .chain(self.den.vars())
            .map(var_coord)
            .max()
    }

    /// Evaluate at a point; errors if the denominator is below `guard` in magnitude.
    pub fn eval(&self, at: &PointValues, guard: &Real) -> Result<Real, EvalError> {
        let n = eval_poly(&self.num, at)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = eval_poly(&self.den, at)?;
        if d.abs() <= *guard {
            return Err(EvalError::Singular);
        }
        Ok(n / d)
    }

    /// Canonical expression tree for this function.
    pub fn to_expr(&self, chart: &Chart) -> Expr {
        let num = poly_to_expr(&self.num, chart);
        if self.den.is_one() {
            num
        } else {
            Expr::Div(Box::new(num), Box::new(poly_to_expr(&self.den, chart)))
        }
    }
}

/// Coordinate values, their exponentials and inverse exponentials at a point.
#[derive(Clone, Debug)]
pub struct PointValues {
    pub x: Vec<Real>,
    pub y: Vec<Real>,
    pub y_inv: Vec<Real>,
}

impl PointValues {
    pub fn new(coords: &[RBig]) -> Self {
        let x: Vec<Real> = coords.iter().map(Real::from_rbig).collect();
        let y: Vec<Real> = x.iter().map(|v| v.exp()).collect();
        let y_inv = y.iter().map(|v| Real::one() / v).collect();
        PointValues { x, y, y_inv }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

fn eval_poly(p: &Poly, at: &PointValues) -> Result<Real, EvalError> {
    let mut acc = Real::zero();
    for (m, c) in p.terms() {
        let mut t = Real::from_rbig(c);
        for &(v, e) in m.pairs() {
            let c = var_coord(v);
            if c >= at.dim() {
                return Err(EvalError::Unbound(format!("coordinate #{}", c + 1)));
            }
            let base = if !is_exp_var(v) {
                &at.x[c]
            } else if e > 0 {
                &at.y[c]
            } else {
                &at.y_inv[c]
            };
            for _ in 0..e.unsigned_abs() {
                t = &t * base;
            }
        }
        acc = acc + t;
    }
    Ok(acc)
}

fn normalize(num: Poly, den: Poly) -> RatFunc {
    if num.is_zero() {
        return RatFunc::zero();
    }
    if let Some(c) = den.as_constant() {
        return RatFunc::from_poly(num.scale(&(RBig::ONE / c)));
    }
    let mn = num.mono_content();
    let md = den.mono_content();
    let n1 = num.div_mono(&mn);
    let d1 = den.div_mono(&md);
    // Split the monomial ratio: negative x exponents must live in the denominator.
    let ratio = mn.div(&md);
    let mut up = Vec::new();
    let mut down = Vec::new();
    for &(v, e) in ratio.pairs() {
        if e < 0 && !is_exp_var(v) {
            down.push((v, -e));
        } else {
            up.push((v, e));
        }
    }
    let m_up = Mono::from_pairs(up);
    let m_down = Mono::from_pairs(down);
    let (n2, d2) = if d1.as_constant().is_some() {
        (n1, d1)
    } else {
        let g = gcd(&n1, &d1);
        if g.is_one() {
            (n1, d1)
        } else {
            (
                n1.exact_div(&g).expect("gcd divides numerator"),
                d1.exact_div(&g).expect("gcd divides denominator"),
            )
        }
    };
    let num = n2.mul_mono(&m_up);
    let den = d2.mul_mono(&m_down);
    let lc = den.lead().map(|(_, c)| c.clone()).expect("nonzero denominator");
    let inv = RBig::ONE / lc;
    RatFunc {
        num: Arc::new(num.scale(&inv)),
        den: Arc::new(den.scale(&inv)),
    }
}

fn poly_to_expr(p: &Poly, chart: &Chart) -> Expr {
    if p.is_zero() {
        return Expr::Num(RBig::ZERO);
    }
    let terms: Vec<Expr> = p.terms().rev().map(|(m, c)| mono_to_expr(m, c, chart)).collect();
    if terms.len() == 1 {
        terms.into_iter().next().unwrap()
    } else {
        Expr::Add(terms)
    }
}

fn mono_to_expr(m: &Mono, c: &RBig, chart: &Chart) -> Expr {
    let mut factors = Vec::new();
    if *c != RBig::ONE || m.is_one() {
        factors.push(Expr::Num(c.clone()));
    }
    let mut linear = Vec::new();
    for &(v, e) in m.pairs() {
        let sym = Expr::sym(chart.name(var_coord(v)));
        if is_exp_var(v) {
            linear.push(if e == 1 {
                sym
            } else {
                Expr::Mul(vec![Expr::Num(RBig::from(e)), sym])
            });
        } else if e == 1 {
            factors.push(sym);
        } else {
            factors.push(Expr::Pow(Box::new(sym), e));
        }
    }
    if !linear.is_empty() {
        let arg = if linear.len() == 1 {
            linear.pop().unwrap()
        } else {
            Expr::Add(linear)
        };
        factors.push(Expr::Exp(Box::new(arg)));
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Mul(factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(c: usize) -> RatFunc {
        RatFunc::exp_linear(&[(c, 1)])
    }

    #[test]
    fn cancellation_gives_identical_forms() {
        let a = y(0).add(&y(1));
        let b = y(0).sub(&y(1));
        let q = a.mul(&b).div(&b).unwrap();
        assert_eq!(q, a);
        assert!(q.is_polynomial());
    }

    #[test]
    fn exp_monomials_move_to_numerator() {
        let q = RatFunc::one().div(&y(0)).unwrap();
        assert!(q.is_polynomial());
        assert_eq!(q, RatFunc::exp_linear(&[(0, -1)]));
    }

    #[test]
    fn coordinate_denominators_stay() {
        let x = RatFunc::coord(0);
        let q = y(0).div(&x).unwrap();
        assert!(!q.is_polynomial());
        assert_eq!(q.mul(&x), y(0));
    }

    #[test]
    fn quotient_rule() {
        let d = y(0).add(&y(1));
        let f = RatFunc::one().div(&d).unwrap();
        let df = f.diff(0);
        let expected = y(0).neg().div(&d.mul(&d)).unwrap();
        assert_eq!(df, expected);
    }
}
