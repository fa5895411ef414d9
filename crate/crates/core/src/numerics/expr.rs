use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;

use super::rational::ExactRational;
use super::real::PrecisionReal;
use crate::error::{Error, Result};

/// A real number given by a small arithmetic expression over rationals and
/// square roots, e.g. `(sqrt(15)-3)/2`.
///
/// Unlike a single [`PrecisionReal`], an expression can be re-evaluated at any
/// precision, which is what digit extraction needs when an enclosure turns out
/// to be too wide.
#[derive(Debug, Clone, PartialEq)]
pub enum RealExpr {
    Rational(ExactRational),
    Sqrt(Box<RealExpr>),
    Neg(Box<RealExpr>),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Div(Box<RealExpr>, Box<RealExpr>),
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl RealExpr {
    pub fn rational(r: ExactRational) -> Self {
        RealExpr::Rational(r)
    }

    pub fn sqrt(inner: RealExpr) -> Self {
        RealExpr::Sqrt(Box::new(inner))
    }

    /// Exact value when the expression is rational (square roots of perfect
    /// rational squares included).
    pub fn to_rational(&self) -> Option<ExactRational> {
        Some(match self {
            RealExpr::Rational(r) => r.clone(),
            RealExpr::Neg(a) => -a.to_rational()?,
            RealExpr::Add(a, b) => a.to_rational()? + b.to_rational()?,
            RealExpr::Sub(a, b) => a.to_rational()? - b.to_rational()?,
            RealExpr::Mul(a, b) => a.to_rational()? * b.to_rational()?,
            RealExpr::Div(a, b) => a.to_rational()?.checked_div(&b.to_rational()?).ok()?,
            RealExpr::Sqrt(a) => {
                let r = a.to_rational()?;
                let n = exact_sqrt(r.numer())?;
                let d = exact_sqrt(r.denom())?;
                ExactRational::new(n, d).ok()?
            }
        })
    }

    /// An enclosure of the value at `prec` bits.
    pub fn enclose(&self, prec: u32) -> Result<PrecisionReal> {
        Ok(match self {
            RealExpr::Rational(r) => PrecisionReal::from_rational(r, prec),
            RealExpr::Neg(a) => a.enclose(prec)?.neg(),
            RealExpr::Add(a, b) => a.enclose(prec)?.add(&b.enclose(prec)?),
            RealExpr::Sub(a, b) => a.enclose(prec)?.sub(&b.enclose(prec)?),
            RealExpr::Mul(a, b) => a.enclose(prec)?.mul(&b.enclose(prec)?),
            RealExpr::Div(a, b) => a.enclose(prec)?.div(&b.enclose(prec)?)?,
            RealExpr::Sqrt(a) => a.enclose(prec)?.sqrt()?,
        })
    }
}

impl From<ExactRational> for RealExpr {
    fn from(r: ExactRational) -> Self {
        RealExpr::Rational(r)
    }
}

impl fmt::Display for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealExpr::Rational(r) if r.denom() == &BigInt::from(1) => write!(f, "{}", r.numer()),
            RealExpr::Rational(r) => write!(f, "({r})"),
            RealExpr::Sqrt(a) => write!(f, "sqrt({a})"),
            RealExpr::Neg(a) => write!(f, "-({a})"),
            RealExpr::Add(a, b) => write!(f, "({a}+{b})"),
            RealExpr::Sub(a, b) => write!(f, "({a}-{b})"),
            RealExpr::Mul(a, b) => write!(f, "({a}*{b})"),
            RealExpr::Div(a, b) => write!(f, "({a}/{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<alloc::vec::Vec<Token>> {
    let mut out = alloc::vec::Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() || c == '.' {
            let mut buf = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() || d == '.' {
                    buf.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Number(buf));
        } else if c.is_ascii_alphabetic() {
            let mut buf = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() {
                    buf.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Ident(buf));
        } else if "+-*/()".contains(c) {
            out.push(Token::Op(c));
            chars.next();
        } else {
            return Err(Error::Parse(s.into()));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    source: &'a str,
}

impl Parser<'_> {
    fn err(&self) -> Error {
        Error::Parse(self.source.into())
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<RealExpr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                RealExpr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                RealExpr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<RealExpr> {
        let mut lhs = self.factor()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = if op == '*' {
                RealExpr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                RealExpr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<RealExpr> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(RealExpr::Neg(Box::new(self.factor()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.factor()
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_close()?;
                Ok(e)
            }
            Some(Token::Number(n)) => {
                self.pos += 1;
                Ok(RealExpr::Rational(n.parse().map_err(|_| self.err())?))
            }
            Some(Token::Ident(name)) if name == "sqrt" => {
                self.pos += 1;
                if self.peek_op() != Some('(') {
                    return Err(self.err());
                }
                self.pos += 1;
                let e = self.expr()?;
                self.expect_close()?;
                Ok(RealExpr::sqrt(e))
            }
            _ => Err(self.err()),
        }
    }

    fn expect_close(&mut self) -> Result<()> {
        if self.peek_op() == Some(')') {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err())
        }
    }
}

impl FromStr for RealExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens: &tokens, pos: 0, source: s };
        let e = p.expr()?;
        if p.pos != tokens.len() {
            return Err(Error::Parse(s.into()));
        }
        Ok(e)
    }
}
