//! High-precision binary floating point used for evaluation and pointwise solves.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use dashu_ratio::RBig;

type Float = FBig<HalfEven, 2>;

/// Environment variable holding the default working precision in decimal digits.
pub const PRECISION_ENV: &str = "WARPCURV_DIGITS";

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: usize = 60;

/// Working precision in bits, fixed for the process on first use.
pub fn precision_bits() -> usize {
    static BITS: OnceLock<usize> = OnceLock::new();
    *BITS.get_or_init(|| {
        let digits = std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&d| d >= 20)
            .unwrap_or(DEFAULT_DIGITS);
        (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8
    })
}

pub fn precision_digits() -> usize {
    ((precision_bits() - 8) as f64 / std::f64::consts::LOG2_10).floor() as usize
}

#[derive(Clone)]
pub struct Real(Float);

impl Real {
    fn wrap(f: Float) -> Self {
        Real(f.with_precision(precision_bits()).value())
    }

    pub fn zero() -> Self {
        Real::from_i64(0)
    }

    pub fn one() -> Self {
        Real::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Real::wrap(Float::from(v))
    }

    pub fn from_rbig(r: &RBig) -> Self {
        let num = Real::wrap(Float::from(r.numerator().clone()));
        let den = Real::wrap(Float::from(IBig::from(r.denominator().clone())));
        num / den
    }

    /// Exact conversion of an f64 (every finite f64 is a dyadic rational).
    pub fn from_f64(v: f64) -> Self {
        match Float::try_from(v) {
            Ok(f) => Real::wrap(f),
            Err(_) => Real::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn abs(&self) -> Real {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Float::ZERO
    }

    pub fn is_zero(&self) -> bool {
        self.0 == Float::ZERO
    }

    pub fn sqrt(&self) -> Real {
        if self.is_zero() {
            return Real::zero();
        }
        Real(self.0.sqrt())
    }

    pub fn exp(&self) -> Real {
        Real(self.0.exp())
    }

    pub fn powi(&self, k: i32) -> Real {
        let mut out = Real::one();
        for _ in 0..k.unsigned_abs() {
            out = &out * self;
        }
        if k < 0 {
            Real::one() / out
        } else {
            out
        }
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let dec = self.0.clone().with_base_and_precision::<10>(digits).value();
        format!("{}", dec)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real($tr::$m(&self.0, &rhs.0))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real($tr::$m(self.0, rhs.0))
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real($tr::$m(&self.0, &rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_and_rationals() {
        let e = Real::one().exp();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
        let third = Real::from_rbig(&(RBig::ONE / RBig::from(3)));
        let back = &third * &Real::from_i64(3);
        assert!((back - Real::one()).abs() < Real::from_f64(1e-55));
    }

    #[test]
    fn precision_exceeds_fifty_digits() {
        assert!(precision_digits() >= 50);
        let tiny = Real::from_f64(1e-40);
        let sum = &Real::one() + &tiny;
        assert!(!(sum - Real::one()).is_zero());
    }
}
