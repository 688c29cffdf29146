//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' ['-'] integer)?
//! base   := rational | ident | '(' expr ')' | ('exp'|'sinh'|'cosh') '(' expr ')'
//! ```
//!
//! `sinh` and `cosh` are desugared to exponentials.

use dashu_int::IBig;
use dashu_ratio::RBig;

use super::Expr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at column {column}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(IBig),
    Ident(String),
    Op(char),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let v: IBig = digits.parse().map_err(|_| ParseError {
                column: start + 1,
                message: "bad integer".into(),
            })?;
            toks.push((Tok::Int(v), start + 1));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), start + 1));
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Op(c), i + 1));
            i += 1;
        } else {
            return Err(ParseError {
                column: i + 1,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(Lexer {
        toks,
        end: chars.len() + 1,
    })
}

struct Parser {
    lx: Lexer,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|t| &t.0)
    }

    fn column(&self) -> usize {
        self.lx.toks.get(self.pos).map(|t| t.1).unwrap_or(self.lx.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let negate = self.eat('-');
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc * self.factor()?;
            } else if self.eat('/') {
                let rhs = self.factor()?;
                acc = match (acc, rhs) {
                    (Expr::Num(a), Expr::Num(b)) if b != RBig::ZERO => Expr::Num(a / b),
                    (a, b) => a / b,
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                let k: i32 = match i32::try_from(&v) {
                    Ok(k) if k <= 64 => k,
                    _ => return self.err("exponent too large"),
                };
                Ok(base.pow(if neg { -k } else { k }))
            }
            _ => self.err("expected an integer exponent"),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Num(RBig::from(v)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "exp" | "sinh" | "cosh" => Some(name.clone()),
                    _ => None,
                };
                match func {
                    None => Ok(Expr::sym(&name)),
                    Some(fname) => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(match fname.as_str() {
                            "exp" => Expr::exp(arg),
                            "sinh" => Expr::sinh(arg),
                            _ => Expr::cosh(arg),
                        })
                    }
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(_) => self.err("expected a number, coordinate or `(`"),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let lx = lex(src)?;
    let mut p = Parser { lx, pos: 0 };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_sugar() {
        let e = parse_expr("1 + 2*x^2 - cosh(x - y)/4").unwrap();
        assert_eq!(e.symbols().len(), 2);
        assert!(parse_expr("exp(x1+x2)").is_ok());
        assert!(parse_expr("-x^-2").is_ok());
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_expr("x1 + * 2").unwrap_err();
        assert_eq!(err.column, 6);
        let err = parse_expr("exp x").unwrap_err();
        assert_eq!(err.column, 5);
        assert!(parse_expr("x $ y").is_err());
        assert!(parse_expr("(x").is_err());
    }
}
