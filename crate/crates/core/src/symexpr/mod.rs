//! Symbolic scalars: expression trees, canonical rational-exponential forms,
//! high-precision evaluation and zero testing.
//!
//! The language is closed: rationals, coordinates, field operations, integer
//! powers and `exp` of integer linear combinations of coordinates.

mod chart;
mod expr;
mod parse;
pub mod poly;
mod ratfunc;
mod real;
mod zero;

pub use chart::Chart;
pub use expr::{Expr, TERM_BUDGET};
pub use parse::{parse_expr, ParseError};
pub use ratfunc::{PointValues, RatFunc};
pub use real::{precision_bits, precision_digits, Real, DEFAULT_DIGITS, PRECISION_ENV};
pub use zero::{
    guard, is_zero, is_zero_in, is_zero_ratfunc, render_point, sample_points, SampleBox,
    ZeroTest, ZeroVerdict, DEFAULT_SEED, SAMPLE_DENOMINATOR, SINGULAR_GUARD,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("outside the expression language: {0}")]
    OutOfLanguage(String),
    #[error("expression too large to canonicalize ({0} terms)")]
    TooLarge(usize),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("division by (near) zero at the evaluation point")]
    Singular,
}

/// Parse and check that every symbol belongs to `chart`.
pub fn parse_in(src: &str, chart: &Chart) -> Result<Expr, ExprError> {
    let e = parse_expr(src)?;
    e.check_symbols(chart)?;
    Ok(e)
}
