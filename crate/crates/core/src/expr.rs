//! Symbolic expressions in the Eisenstein generators.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := factor (('*' | '/') factor)*
//! factor := atom ('^' ['-'] integer)?
//! atom   := 'E2' | 'E4' | 'E6' | 'E10' | integer | '(' expr ')' | 'D' '(' expr ')'
//! ```
//!
//! `D` is `q d/dq`. Examples: `1/E10`, `E2^2 * (1/E10)`, `D(1/E6^4)`.

use std::fmt;
use std::str::FromStr;

use rug::Rational;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    E2,
    E4,
    E6,
    E10,
}

impl Generator {
    pub fn weight(self) -> u32 {
        match self {
            Generator::E2 => 2,
            Generator::E4 => 4,
            Generator::E6 => 6,
            Generator::E10 => 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormExpression {
    Gen(Generator),
    Const(Rational),
    Mul(Box<FormExpression>, Box<FormExpression>),
    Pow(Box<FormExpression>, i64),
    Recip(Box<FormExpression>),
    Dee(Box<FormExpression>),
}

impl FormExpression {
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn mul(a: FormExpression, b: FormExpression) -> Self {
        match (&a, &b) {
            (FormExpression::Const(c), _) if *c == 1 => b,
            (_, FormExpression::Const(c)) if *c == 1 => a,
            _ => FormExpression::Mul(Box::new(a), Box::new(b)),
        }
    }

    /// Weight of the (quasi)modular form, counting `D` as raising by 2.
    pub fn weight(&self) -> i64 {
        match self {
            FormExpression::Gen(g) => g.weight() as i64,
            FormExpression::Const(_) => 0,
            FormExpression::Mul(a, b) => a.weight() + b.weight(),
            FormExpression::Pow(a, e) => a.weight() * e,
            FormExpression::Recip(a) => -a.weight(),
            FormExpression::Dee(a) => a.weight() + 2,
        }
    }

    pub fn has_reciprocal(&self) -> bool {
        match self {
            FormExpression::Gen(_) | FormExpression::Const(_) => false,
            FormExpression::Mul(a, b) => a.has_reciprocal() || b.has_reciprocal(),
            FormExpression::Pow(a, e) => *e < 0 || a.has_reciprocal(),
            FormExpression::Recip(_) => true,
            FormExpression::Dee(a) => a.has_reciprocal(),
        }
    }

    pub fn contains(&self, g: Generator) -> bool {
        match self {
            FormExpression::Gen(h) => *h == g,
            FormExpression::Const(_) => false,
            FormExpression::Mul(a, b) => a.contains(g) || b.contains(g),
            FormExpression::Pow(a, _) | FormExpression::Recip(a) | FormExpression::Dee(a) => a.contains(g),
        }
    }

    pub fn contains_dee(&self) -> bool {
        match self {
            FormExpression::Gen(_) | FormExpression::Const(_) => false,
            FormExpression::Mul(a, b) => a.contains_dee() || b.contains_dee(),
            FormExpression::Pow(a, _) | FormExpression::Recip(a) => a.contains_dee(),
            FormExpression::Dee(_) => true,
        }
    }

    /// Splits `E2^n * f` into `(n, f)` with `f` free of `E2`.
    pub fn split_e2_power(&self) -> Result<(u32, FormExpression)> {
        let mut factors = Vec::new();
        flatten(self, 1, &mut factors);
        let mut n: i64 = 0;
        let mut rest: Option<FormExpression> = None;
        for (f, e) in factors {
            if f == FormExpression::Gen(Generator::E2) {
                n += e;
                continue;
            }
            if f.contains(Generator::E2) {
                return Err(Error::InvalidArgument(
                    "E2 may only appear as an outer positive power".into(),
                ));
            }
            let term = match e {
                1 => f,
                -1 => FormExpression::Recip(Box::new(f)),
                _ => FormExpression::Pow(Box::new(f), e),
            };
            rest = Some(match rest {
                None => term,
                Some(r) => FormExpression::mul(r, term),
            });
        }
        if n < 0 {
            return Err(Error::InvalidArgument("negative power of E2".into()));
        }
        Ok((n as u32, rest.unwrap_or(FormExpression::Const(Rational::from(1)))))
    }
}

fn flatten(e: &FormExpression, exp: i64, out: &mut Vec<(FormExpression, i64)>) {
    match e {
        FormExpression::Mul(a, b) => {
            flatten(a, exp, out);
            flatten(b, exp, out);
        }
        FormExpression::Pow(a, k) => flatten(a, exp * k, out),
        FormExpression::Recip(a) => flatten(a, -exp, out),
        FormExpression::Const(c) if *c == 1 => {}
        _ => out.push((e.clone(), exp)),
    }
}

impl FromStr for FormExpression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormExpression::parse(s)
    }
}

impl fmt::Display for FormExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormExpression::Gen(g) => write!(f, "E{}", g.weight()),
            FormExpression::Const(c) => write!(f, "{c}"),
            FormExpression::Mul(a, b) => write!(f, "{a} * {b}"),
            FormExpression::Pow(a, e) => match **a {
                FormExpression::Gen(_) => write!(f, "{a}^{e}"),
                _ => write!(f, "({a})^{e}"),
            },
            FormExpression::Recip(a) => match **a {
                FormExpression::Gen(_) | FormExpression::Pow(..) => write!(f, "1/{a}"),
                _ => write!(f, "1/({a})"),
            },
            FormExpression::Dee(a) => write!(f, "D({a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { offset: self.pos, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<FormExpression> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = FormExpression::mul(lhs, rhs);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = FormExpression::mul(lhs, FormExpression::Recip(Box::new(rhs)));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<FormExpression> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = self.integer()?;
        let e = i64::try_from(n).map_err(|_| self.err("exponent too large"))?;
        Ok(FormExpression::Pow(Box::new(base), if neg { -e } else { e }))
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { offset: start, message: "integer out of range".into() })
    }

    fn atom(&mut self) -> Result<FormExpression> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'E') => {
                self.pos += 1;
                let start = self.pos;
                let w = self.integer()?;
                let g = match w {
                    2 => Generator::E2,
                    4 => Generator::E4,
                    6 => Generator::E6,
                    10 => Generator::E10,
                    _ => {
                        return Err(Error::Parse {
                            offset: start,
                            message: format!("unknown generator E{w}"),
                        })
                    }
                };
                Ok(FormExpression::Gen(g))
            }
            Some(b'D') => {
                self.pos += 1;
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(FormExpression::Dee(Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() => Ok(FormExpression::Const(Rational::from(self.integer()?))),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
