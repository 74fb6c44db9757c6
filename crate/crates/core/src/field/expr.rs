//! The coefficient grammar used in documents and on the command line.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' integer)?
//! unary  := '-' unary | atom
//! atom   := integer | symbol | '(' expr ')'
//! ```
//!
//! Integers are read modulo p. The symbol `t` denotes the transcendental of
//! F_p(t); other symbols are resolved by the evaluation domain (for example
//! basis names of a commutative algebra).

use std::fmt;

use super::{BaseField, FieldKind, RatFunc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Symbol { name: String, pos: usize },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div { num: Box<Expr>, den: Box<Expr>, pos: usize },
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// A parse or evaluation error at a character offset of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.pos + 1, self.message)
    }
}

impl std::error::Error for ExprError {}

fn err(pos: usize, message: impl Into<String>) -> ExprError {
    ExprError { pos, message: message.into() }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                b'-' => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                b'/' => {
                    let pos = self.pos;
                    self.pos += 1;
                    lhs = Expr::Div { num: Box::new(lhs), den: Box::new(self.factor()?), pos };
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.unary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let n = self.integer()?;
            let e = u32::try_from(n).map_err(|_| err(start, "exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn integer(&mut self) -> Result<i64, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(start, "expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<i64>()
            .map_err(|_| err(start, "integer too large"))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(err(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                Ok(Expr::Symbol { name, pos: start })
            }
            Some(c) => Err(err(self.pos, format!("unexpected character '{}'", c as char))),
            None => Err(err(self.pos, "unexpected end of input")),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0 };
    let e = parser.expr()?;
    if parser.peek().is_some() {
        return Err(err(parser.pos, "trailing input"));
    }
    Ok(e)
}

/// Where symbols and operations of an expression are interpreted.
pub trait ExprDomain {
    type Value: Clone;
    fn scalar(&self, c: RatFunc) -> Self::Value;
    fn symbol(&self, name: &str) -> Option<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    /// Division; `None` when the divisor is not invertible.
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Option<Self::Value>;
    fn one(&self) -> Self::Value;
    fn characteristic(&self) -> u8;
}

impl Expr {
    pub fn eval<D: ExprDomain>(&self, d: &D) -> Result<D::Value, ExprError> {
        Ok(match self {
            Expr::Int(n) => d.scalar(RatFunc::constant(d.characteristic(), *n)),
            Expr::Symbol { name, pos } => {
                d.symbol(name).ok_or_else(|| err(*pos, format!("undeclared name '{name}'")))?
            }
            Expr::Add(a, b) => d.add(&a.eval(d)?, &b.eval(d)?),
            Expr::Sub(a, b) => d.sub(&a.eval(d)?, &b.eval(d)?),
            Expr::Mul(a, b) => d.mul(&a.eval(d)?, &b.eval(d)?),
            Expr::Neg(a) => d.neg(&a.eval(d)?),
            Expr::Div { num, den, pos } => {
                d.div(&num.eval(d)?, &den.eval(d)?).ok_or_else(|| err(*pos, "division by a non-invertible value"))?
            }
            Expr::Pow(a, e) => {
                let base = a.eval(d)?;
                let mut acc = d.one();
                for _ in 0..*e {
                    acc = d.mul(&acc, &base);
                }
                acc
            }
        })
    }

    pub fn eval_scalar(&self, k: &BaseField) -> Result<RatFunc, ExprError> {
        self.eval(k)
    }
}

impl ExprDomain for BaseField {
    type Value = RatFunc;

    fn scalar(&self, c: RatFunc) -> RatFunc {
        c
    }

    fn symbol(&self, name: &str) -> Option<RatFunc> {
        (name == "t" && self.kind() == FieldKind::RationalFunctions).then(|| self.t())
    }

    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a + b
    }

    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a - b
    }

    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a * b
    }

    fn neg(&self, a: &RatFunc) -> RatFunc {
        -a
    }

    fn div(&self, a: &RatFunc, b: &RatFunc) -> Option<RatFunc> {
        a.checked_div(b)
    }

    fn one(&self) -> RatFunc {
        BaseField::one(self)
    }

    fn characteristic(&self) -> u8 {
        self.p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_functions() {
        let k = BaseField::rational(2).unwrap();
        let v = k.parse("(t+1)/t").unwrap();
        assert_eq!(v.to_string(), "(t+1)/t");
        assert_eq!(k.parse("t^2 + 1").unwrap(), &k.t().pow(2) + &k.one());
        assert_eq!(k.parse("-3").unwrap(), k.one());
    }

    #[test]
    fn reports_positions() {
        let k = BaseField::rational(3).unwrap();
        let e = k.parse("t + y").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = k.parse("1/(t-t)").unwrap_err();
        assert!(e.message.contains("non-invertible"));
        let e = k.parse("2 +").unwrap_err();
        assert_eq!(e.pos, 3);
    }

    #[test]
    fn t_is_undeclared_over_the_prime_field() {
        let k = BaseField::prime(5).unwrap();
        assert!(k.parse("t").is_err());
        assert_eq!(k.parse("7").unwrap(), k.constant(2));
    }
}
