//! Recursive-descent parser for the polynomial grammar:
//!
//! ```text
//! expr     := ['-'] term { ('+'|'-') term }
//! term     := factor { '*' factor }
//! factor   := rational | var [ '^' nat ]
//! var      := ('x'|'u'|'v') nat
//! rational := int [ '/' nat ]
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Chart, Poly, Rational, Space, Var, VarKind};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: Chart,
    space: Space,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

pub(super) fn parse_poly(text: &str, chart: Chart, space: Space) -> Result<Poly> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        chart,
        space,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(syntax(
            p.pos,
            format!("unexpected `{}`", p.src[p.pos] as char),
        ));
    }
    Ok(out)
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut negate = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let numer = self.digits()?;
                let mut value = Rational::from_integer(numer);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let denom = self.digits()?;
                    if denom.is_zero() {
                        return Err(syntax(at, "denominator must be positive"));
                    }
                    value /= Rational::from_integer(denom);
                }
                Ok(Poly::constant(self.chart, self.space, value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let var_start = self.pos;
                let var = self.var()?;
                let mut exp = 1u32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let e = self.digits()?;
                    if e.is_zero() {
                        return Err(syntax(at, "exponent must be >= 1"));
                    }
                    exp = u32::try_from(e).map_err(|_| syntax(at, "exponent too large"))?;
                }
                let base = Poly::var(self.chart, self.space, var).map_err(|e| match e {
                    Error::IndexOutOfRange { name, chart, .. } => Error::IndexOutOfRange {
                        name,
                        offset: var_start,
                        chart,
                    },
                    _ => Error::UnknownVariable {
                        name: var.to_string(),
                        offset: var_start,
                    },
                })?;
                Ok(base.pow(exp))
            }
            Some(c) => Err(syntax(self.pos, format!("unexpected `{}`", c as char))),
            None => Err(syntax(start.max(self.pos), "unexpected end of input")),
        }
    }

    fn var(&mut self) -> Result<Var> {
        let start = self.pos;
        let letter = self.src[self.pos];
        self.pos += 1;
        let kind = match letter {
            b'x' => Some(VarKind::Base),
            b'u' => Some(VarKind::Fiber),
            b'v' => Some(VarKind::DualFiber),
            _ => None,
        };
        // the index is part of the same token: no whitespace allowed
        let has_index = self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit());
        let (Some(kind), true) = (kind, has_index) else {
            let mut end = self.pos;
            while end < self.src.len() && self.src[end].is_ascii_alphanumeric() {
                end += 1;
            }
            return Err(Error::UnknownVariable {
                name: String::from_utf8_lossy(&self.src[start..end]).into_owned(),
                offset: start,
            });
        };
        let index = self.digits()?;
        if index.is_zero() {
            return Err(syntax(start + 1, "variable index must be >= 1"));
        }
        let index = usize::try_from(index).unwrap_or(usize::MAX);
        Ok(Var { kind, index })
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(start, "expected a number"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse::<BigInt>().expect("digits parse"))
    }
}
