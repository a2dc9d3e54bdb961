//! Exact truncated q-expansions with rational coefficients.
//!
//! A [`RationalQSeries`] holds `a_0, ..., a_T` and represents
//! `sum a_n q^n + O(q^{T+1})`. Products, reciprocals and `D = q d/dq` never
//! lose low-order information, so every stored coefficient is exact. These
//! series are the reference oracle for the numerical lattice sums.

use std::fmt;

use rug::{Integer, Rational};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{FormExpression, Generator};

pub const DEFAULT_TRUNCATION: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalQSeries {
    coeffs: Vec<Rational>,
}

impl RationalQSeries {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series needs at least the constant term");
        RationalQSeries { coeffs }
    }

    pub fn constant(c: Rational, truncation: usize) -> Self {
        let mut coeffs = vec![Rational::new(); truncation + 1];
        coeffs[0] = c;
        RationalQSeries { coeffs }
    }

    pub fn one(truncation: usize) -> Self {
        Self::constant(Rational::from(1), truncation)
    }

    /// Largest exponent whose coefficient is known.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&Rational> {
        self.coeffs.get(n)
    }

    pub fn truncate(&self, truncation: usize) -> Self {
        let t = truncation.min(self.truncation());
        RationalQSeries { coeffs: self.coeffs[..=t].to_vec() }
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let t = self.truncation().min(other.truncation());
        let mut out = vec![Rational::new(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(t + 1 - i) {
                if *b != 0 {
                    out[i + j] += Rational::from(a * b);
                }
            }
        }
        RationalQSeries { coeffs: out }
    }

    pub fn reciprocal(&self) -> Result<Self> {
        if self.coeffs[0] == 0 {
            return Err(Error::NotInvertible);
        }
        let t = self.truncation();
        let inv0 = Rational::from(self.coeffs[0].recip_ref());
        let mut out: Vec<Rational> = Vec::with_capacity(t + 1);
        out.push(inv0.clone());
        for n in 1..=t {
            let mut s = Rational::new();
            for k in 1..=n {
                if self.coeffs[k] != 0 {
                    s += Rational::from(&self.coeffs[k] * &out[n - k]);
                }
            }
            out.push(-(s * &inv0));
        }
        Ok(RationalQSeries { coeffs: out })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.reciprocal()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = RationalQSeries::one(self.truncation());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.multiply(&sq);
            }
        }
        Ok(acc)
    }

    /// `D = q d/dq`.
    pub fn dee(&self) -> Self {
        let coeffs =
            self.coeffs.iter().enumerate().map(|(n, a)| Rational::from(a * n as u64)).collect();
        RationalQSeries { coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalQSeries { coeffs: self.coeffs.iter().map(|a| Rational::from(a * c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let t = self.truncation().min(other.truncation());
        let coeffs = (0..=t).map(|n| Rational::from(&self.coeffs[n] + &other.coeffs[n])).collect();
        RationalQSeries { coeffs }
    }
}

impl fmt::Display for RationalQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{a}")?,
                1 => write!(f, "({a})*q")?,
                _ => write!(f, "({a})*q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.truncation() + 1)
    }
}

impl Serialize for RationalQSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for a in &self.coeffs {
            seq.serialize_element(&a.to_string())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RationalQSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SeriesVisitor;

        impl<'de> Visitor<'de> for SeriesVisitor {
            type Value = RationalQSeries;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-empty array of rational strings \"p/q\"")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut coeffs = Vec::new();
                while let Some(s) = seq.next_element::<String>()? {
                    let q = s.parse::<Rational>().map_err(|e| de::Error::custom(format!("{s:?}: {e}")))?;
                    coeffs.push(q);
                }
                if coeffs.is_empty() {
                    return Err(de::Error::invalid_length(0, &self));
                }
                Ok(RationalQSeries { coeffs })
            }
        }

        deserializer.deserialize_seq(SeriesVisitor)
    }
}

/// Sum of `d^s` over the divisors `d` of each `n <= t`.
pub fn divisor_sums(s: u32, t: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); t + 1];
    for d in 1..=t {
        let p = Integer::from(Integer::u_pow_u(d as u32, s));
        let mut n = d;
        while n <= t {
            out[n] += &p;
            n += d;
        }
    }
    out
}

/// Normalized Eisenstein series `E_w` for `w` in {2, 4, 6, 10}.
pub fn make_eisenstein(weight: u32, truncation: usize) -> Result<RationalQSeries> {
    let c: i32 = match weight {
        2 => -24,
        4 => 240,
        6 => -504,
        10 => -264,
        _ => return Err(Error::InvalidArgument(format!("no Eisenstein generator of weight {weight}"))),
    };
    let sig = divisor_sums(weight - 1, truncation);
    let mut coeffs: Vec<Rational> = sig.into_iter().map(|s| Rational::from(s * c)).collect();
    coeffs[0] = Rational::from(1);
    Ok(RationalQSeries { coeffs })
}

/// Exact q-expansion of `expr` through `q^truncation`.
pub fn eval_expression(expr: &FormExpression, truncation: usize) -> Result<RationalQSeries> {
    Ok(match expr {
        FormExpression::Gen(g) => make_eisenstein(g.weight(), truncation)?,
        FormExpression::Const(c) => RationalQSeries::constant(c.clone(), truncation),
        FormExpression::Mul(a, b) => eval_expression(a, truncation)?.multiply(&eval_expression(b, truncation)?),
        FormExpression::Pow(a, e) => eval_expression(a, truncation)?.pow(*e)?,
        FormExpression::Recip(a) => eval_expression(a, truncation)?.reciprocal()?,
        FormExpression::Dee(a) => eval_expression(a, truncation)?.dee(),
    })
}

/// The coefficients `a_0, ..., a_{n_max}` of `expr`.
pub fn oracle_coeffs(expr: &FormExpression, n_max: usize) -> Result<Vec<Rational>> {
    Ok(eval_expression(expr, n_max)?.coeffs)
}

impl Generator {
    pub fn series(self, truncation: usize) -> RationalQSeries {
        make_eisenstein(self.weight(), truncation).expect("generators have valid weights")
    }
}
