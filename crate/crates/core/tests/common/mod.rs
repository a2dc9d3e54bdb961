#![allow(dead_code)]

use meroform::coeff_engine::TruncatedSum;
use meroform::numeric::{self, pi};
use meroform::qseries::oracle_coeffs;
use meroform::special_values::{closed_value, PointTag};
use meroform::FormExpression;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

pub const PREC: u32 = 256;

pub fn expr(s: &str) -> FormExpression {
    FormExpression::parse(s).unwrap()
}

pub fn oracle(s: &str, m_max: usize) -> Vec<Rational> {
    oracle_coeffs(&expr(s), m_max).unwrap()
}

pub fn rel_to_rational(value: &Complex, q: &Rational) -> f64 {
    let prec = value.prec().0;
    let exact = Complex::with_val(prec, (Float::with_val(prec, q), 0));
    numeric::rel_err(value, &exact).to_f64()
}

/// Worst relative error of `sums` against exact coefficients.
pub fn worst_rel(sums: &[TruncatedSum], exact: &[Rational]) -> f64 {
    sums.iter().zip(exact).map(|(s, q)| rel_to_rational(&s.value, q)).fold(0.0, f64::max)
}

pub fn rel(a: &Complex, b: &Complex) -> f64 {
    numeric::rel_err(a, b).to_f64()
}

pub fn e4i(prec: u32) -> Float {
    closed_value(4, PointTag::I, prec).unwrap()
}

pub fn pi_pow(prec: u32, e: u32) -> Float {
    Float::with_val(prec, pi(prec).pow(e))
}

pub fn real(prec: u32, x: Float) -> Complex {
    Complex::with_val(prec, (x, 0))
}

/// `2^-e` as an `f64`-free big float.
pub fn two_pow_neg(prec: u32, e: i32) -> Float {
    Float::with_val(prec, Float::i_exp(1, -e))
}
