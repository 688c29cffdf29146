use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;
use std::sync::Arc;

use dashu_ratio::RBig;

use super::poly::{is_exp_var, var_coord};
use super::ratfunc::RatFunc;
use super::real::Real;
use super::{Chart, EvalError, ExprError};

/// Canonicalization gives up (and zero tests fall back to sampling) past this many terms.
pub const TERM_BUDGET: usize = 20_000;

/// Symbolic scalar over chart coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(RBig),
    Sym(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Div(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn int(k: i64) -> Expr {
        Expr::Num(RBig::from(k))
    }

    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::Num(RBig::from(p) / RBig::from(q))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Arc::from(name))
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::Exp(Box::new(arg))
    }

    pub fn sinh(arg: Expr) -> Expr {
        (Expr::exp(arg.clone()) - Expr::exp(-arg)) / Expr::int(2)
    }

    pub fn cosh(arg: Expr) -> Expr {
        (Expr::exp(arg.clone()) + Expr::exp(-arg)) / Expr::int(2)
    }

    pub fn pow(self, k: i32) -> Expr {
        Expr::Pow(Box::new(self), k)
    }

    pub fn is_literal_zero(&self) -> bool {
        matches!(self, Expr::Num(r) if *r == RBig::ZERO)
    }

    /// Names of all symbols occurring in the tree.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.to_string());
            }
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Expr::Pow(b, _) | Expr::Exp(b) => b.collect_symbols(out),
            Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    /// Chart made of this expression's symbols in sorted order.
    pub fn implicit_chart(&self) -> Option<Chart> {
        let names: Vec<String> = self.symbols().into_iter().collect();
        if names.is_empty() {
            None
        } else {
            Chart::new(&names).ok()
        }
    }

    /// Error naming the first symbol not in `chart`.
    pub fn check_symbols(&self, chart: &Chart) -> Result<(), ExprError> {
        match self.symbols().into_iter().find(|s| chart.index_of(s).is_none()) {
            Some(s) => Err(ExprError::UnknownSymbol(s)),
            None => Ok(()),
        }
    }

    pub fn to_ratfunc(&self, chart: &Chart) -> Result<RatFunc, ExprError> {
        let r = match self {
            Expr::Num(r) => RatFunc::constant(r.clone()),
            Expr::Sym(s) => {
                let c = chart
                    .index_of(s)
                    .ok_or_else(|| ExprError::UnknownSymbol(s.to_string()))?;
                RatFunc::coord(c)
            }
            Expr::Add(v) => {
                let mut acc = RatFunc::zero();
                for e in v {
                    acc = acc.add(&e.to_ratfunc(chart)?);
                    check_budget(&acc)?;
                }
                acc
            }
            Expr::Mul(v) => {
                let mut acc = RatFunc::one();
                for e in v {
                    acc = acc.mul(&e.to_ratfunc(chart)?);
                    check_budget(&acc)?;
                }
                acc
            }
            Expr::Pow(b, k) => b.to_ratfunc(chart)?.pow(*k)?,
            Expr::Div(a, b) => {
                let den = b.to_ratfunc(chart)?;
                if den.is_zero() {
                    return Err(ExprError::DivisionByZero);
                }
                a.to_ratfunc(chart)?.div(&den)?
            }
            Expr::Exp(a) => exp_of_linear(&a.to_ratfunc(chart)?)?,
        };
        check_budget(&r)?;
        Ok(r)
    }

    /// Canonical form over the implicit chart of this expression.
    pub fn canonicalize(&self) -> Result<Expr, ExprError> {
        match self.implicit_chart() {
            Some(chart) => self.canonicalize_in(&chart),
            None => self.canonicalize_in(&Chart::numbered("_", 1)),
        }
    }

    pub fn canonicalize_in(&self, chart: &Chart) -> Result<Expr, ExprError> {
        Ok(self.to_ratfunc(chart)?.to_expr(chart))
    }

    /// ∂self/∂coord, canonicalized.
    pub fn differentiate(&self, chart: &Chart, coord: &str) -> Result<Expr, ExprError> {
        let c = chart
            .index_of(coord)
            .ok_or_else(|| ExprError::UnknownSymbol(coord.to_string()))?;
        Ok(self.to_ratfunc(chart)?.diff(c).to_expr(chart))
    }

    /// Direct tree evaluation at a rational point.
    pub fn evaluate(&self, point: &BTreeMap<String, RBig>) -> Result<Real, EvalError> {
        let vals: BTreeMap<&str, Real> = point
            .iter()
            .map(|(k, v)| (k.as_str(), Real::from_rbig(v)))
            .collect();
        self.eval_with(&|s| vals.get(s).cloned(), &Real::zero())
    }

    /// Tree evaluation with a symbol lookup; quotients whose denominator has
    /// magnitude at most `guard` are reported as singular.
    pub fn eval_with(
        &self,
        lookup: &dyn Fn(&str) -> Option<Real>,
        guard: &Real,
    ) -> Result<Real, EvalError> {
        Ok(match self {
            Expr::Num(r) => Real::from_rbig(r),
            Expr::Sym(s) => lookup(s).ok_or_else(|| EvalError::Unbound(s.to_string()))?,
            Expr::Add(v) => {
                let mut acc = Real::zero();
                for e in v {
                    acc = acc + e.eval_with(lookup, guard)?;
                }
                acc
            }
            Expr::Mul(v) => {
                let mut acc = Real::one();
                for e in v {
                    acc = acc * e.eval_with(lookup, guard)?;
                }
                acc
            }
            Expr::Pow(b, k) => {
                let b = b.eval_with(lookup, guard)?;
                if *k < 0 && b.abs() <= *guard {
                    return Err(EvalError::Singular);
                }
                b.powi(*k)
            }
            Expr::Div(a, b) => {
                let d = b.eval_with(lookup, guard)?;
                if d.abs() <= *guard {
                    return Err(EvalError::Singular);
                }
                a.eval_with(lookup, guard)? / d
            }
            Expr::Exp(a) => a.eval_with(lookup, guard)?.exp(),
        })
    }

    fn is_negative_term(&self) -> bool {
        match self {
            Expr::Num(r) => *r < RBig::ZERO,
            Expr::Mul(v) => matches!(v.first(), Some(Expr::Num(r)) if *r < RBig::ZERO),
            _ => false,
        }
    }

    fn negated_term(&self) -> Expr {
        match self {
            Expr::Num(r) => Expr::Num(-r),
            Expr::Mul(v) => {
                let mut v = v.clone();
                if let Expr::Num(r) = &v[0] {
                    let r = -r;
                    if r == RBig::ONE && v.len() > 1 {
                        v.remove(0);
                    } else {
                        v[0] = Expr::Num(r);
                    }
                }
                if v.len() == 1 {
                    v.pop().unwrap()
                } else {
                    Expr::Mul(v)
                }
            }
            e => -e.clone(),
        }
    }
}

fn check_budget(r: &RatFunc) -> Result<(), ExprError> {
    if r.term_count() > TERM_BUDGET {
        Err(ExprError::TooLarge(r.term_count()))
    } else {
        Ok(())
    }
}

fn exp_of_linear(arg: &RatFunc) -> Result<RatFunc, ExprError> {
    let bad = || ExprError::OutOfLanguage("exp needs an integer linear combination of coordinates".into());
    if !arg.is_polynomial() {
        return Err(bad());
    }
    let mut coeffs = Vec::new();
    for (m, c) in arg.num().terms() {
        let pairs = m.pairs();
        if pairs.len() != 1 || pairs[0].1 != 1 || is_exp_var(pairs[0].0) || !c.is_int() {
            return Err(bad());
        }
        let k: i64 = c.numerator().try_into().map_err(|_| bad())?;
        coeffs.push((var_coord(pairs[0].0), k));
    }
    Ok(RatFunc::exp_linear(&coeffs))
}

fn flatten(kind_add: bool, a: Expr, b: Expr) -> Expr {
    let mut out = Vec::new();
    for e in [a, b] {
        match (kind_add, e) {
            (true, Expr::Add(v)) => out.extend(v),
            (false, Expr::Mul(v)) => out.extend(v),
            (_, e) => out.push(e),
        }
    }
    if kind_add {
        Expr::Add(out)
    } else {
        Expr::Mul(out)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        if self.is_literal_zero() {
            return rhs;
        }
        if rhs.is_literal_zero() {
            return self;
        }
        flatten(true, self, rhs)
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        flatten(false, self, rhs)
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Num(r) => Expr::Num(-r),
            e => Expr::Mul(vec![Expr::int(-1), e]),
        }
    }
}

fn is_atom(e: &Expr) -> bool {
    match e {
        Expr::Num(r) => r.is_int() && *r >= RBig::ZERO,
        Expr::Sym(_) | Expr::Exp(_) => true,
        _ => false,
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, r: &RBig) -> fmt::Result {
    if r.is_int() {
        write!(f, "{}", r.numerator())
    } else {
        write!(f, "{}/{}", r.numerator(), r.denominator())
    }
}

fn write_paren(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write_num(f, r),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Add(v) => {
                if v.is_empty() {
                    return write!(f, "0");
                }
                for (i, t) in v.iter().enumerate() {
                    let neg = t.is_negative_term();
                    let shown = if neg && i > 0 { t.negated_term() } else { t.clone() };
                    if i > 0 {
                        write!(f, "{}", if neg { " - " } else { " + " })?;
                    }
                    write_paren(f, &shown, matches!(shown, Expr::Add(_)))?;
                }
                Ok(())
            }
            Expr::Mul(v) => {
                if v.is_empty() {
                    return write!(f, "1");
                }
                let mut start = 0;
                if let (Some(Expr::Num(r)), true) = (v.first(), v.len() > 1) {
                    if *r == -RBig::ONE {
                        write!(f, "-")?;
                        start = 1;
                    }
                }
                for (i, t) in v.iter().enumerate().skip(start) {
                    if i > start {
                        write!(f, "*")?;
                    }
                    let paren = match t {
                        Expr::Add(_) => true,
                        Expr::Num(r) => i > 0 && *r < RBig::ZERO,
                        _ => false,
                    };
                    write_paren(f, t, paren)?;
                }
                Ok(())
            }
            Expr::Pow(b, k) => {
                write_paren(f, b, !is_atom(b))?;
                write!(f, "^{k}")
            }
            Expr::Div(a, b) => {
                write_paren(f, a, matches!(**a, Expr::Add(_)))?;
                write!(f, "/")?;
                write_paren(f, b, !is_atom(b))
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
