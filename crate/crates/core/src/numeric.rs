//! Arbitrary precision scalars.
//!
//! Values are MPFR floats and MPC complexes from `rug`. Every value carries its
//! own precision; helpers here take the precision explicitly and never infer it.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

pub type BigReal = Float;
pub type BigComplex = Complex;

pub const MIN_PRECISION: u32 = 64;
pub const DEFAULT_PRECISION: u32 = 256;
/// Extra bits carried internally so results are correctly rounded to the target.
pub const GUARD_BITS: u32 = 32;

pub fn check_precision(prec: u32) -> Result<()> {
    if prec < MIN_PRECISION {
        return Err(Error::Precision { got: prec, min: MIN_PRECISION });
    }
    Ok(())
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn sqrt3(prec: u32) -> Float {
    Float::with_val(prec, 3).sqrt()
}

pub fn real(prec: u32, x: &Float) -> Complex {
    Complex::with_val(prec, (x, 0))
}

pub fn from_rational(prec: u32, q: &Rational) -> Float {
    Float::with_val(prec, q)
}

/// `i^n` as an exact pair `(re, im)`.
pub fn i_pow(n: i64) -> (i32, i32) {
    match n.rem_euclid(4) {
        0 => (1, 0),
        1 => (0, 1),
        2 => (-1, 0),
        _ => (0, -1),
    }
}

/// `(a i)^n` for a real `a`.
pub fn imag_pow(prec: u32, a: &Float, n: u32) -> Complex {
    let m = Float::with_val(prec, a.pow(n));
    let (re, im) = i_pow(n as i64);
    Complex::with_val(prec, (Float::with_val(prec, &m * re), Float::with_val(prec, &m * im)))
}

/// `z^n` for integer `n` by repeated squaring.
pub fn cpow(z: &Complex, n: i64, prec: u32) -> Complex {
    let mut base = Complex::with_val(prec, z);
    if n < 0 {
        base.recip_mut();
    }
    let mut e = n.unsigned_abs();
    let mut acc = Complex::with_val(prec, (1, 0));
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base.square_mut();
        }
    }
    acc
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

pub fn binomial(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}

/// `n! / m!` for `m <= n`.
pub fn falling(n: u32, m: u32) -> Integer {
    let mut acc = Integer::from(1);
    for t in (m + 1)..=n {
        acc *= t;
    }
    acc
}

pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `|z|^2`.
pub fn norm_sq(z: &Complex) -> Float {
    let prec = z.prec().0;
    Float::with_val(prec, z.real().square_ref()) + Float::with_val(prec, z.imag().square_ref())
}

/// `|a - b| / |b|`, or `|a - b|` when `b` is zero.
pub fn rel_err(a: &Complex, b: &Complex) -> Float {
    let prec = a.prec().0.max(b.prec().0);
    let d = abs(&Complex::with_val(prec, a - b));
    let s = abs(b);
    if s.is_zero() {
        d
    } else {
        d / s
    }
}

/// Compensated summation for complex values.
#[derive(Debug, Clone)]
pub struct Accumulator {
    re: Neumaier,
    im: Neumaier,
}

impl Accumulator {
    pub fn new(prec: u32) -> Self {
        Accumulator { re: Neumaier::new(prec), im: Neumaier::new(prec) }
    }

    pub fn add(&mut self, z: &Complex) {
        self.re.add(z.real());
        self.im.add(z.imag());
    }

    pub fn add_real(&mut self, x: &Float) {
        self.re.add(x);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.re.add(&other.re.sum);
        self.re.add(&other.re.comp);
        self.im.add(&other.im.sum);
        self.im.add(&other.im.comp);
    }

    pub fn value(&self) -> Complex {
        Complex::with_val(self.re.sum.prec(), (self.re.value(), self.im.value()))
    }
}

#[derive(Debug, Clone)]
struct Neumaier {
    sum: Float,
    comp: Float,
}

impl Neumaier {
    fn new(prec: u32) -> Self {
        Neumaier { sum: Float::new(prec), comp: Float::new(prec) }
    }

    fn add(&mut self, x: &Float) {
        let prec = self.sum.prec();
        let t = Float::with_val(prec, &self.sum + x);
        if self.sum.cmp_abs(x) != Some(std::cmp::Ordering::Less) {
            let d = Float::with_val(prec, &self.sum - &t);
            self.comp += d + x;
        } else {
            let d = Float::with_val(prec, x - &t);
            self.comp += d + &self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> Float {
        Float::with_val(self.sum.prec(), &self.sum + &self.comp)
    }
}

/// Decimal digits that faithfully represent `prec` bits.
pub fn decimal_digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

pub fn to_decimal(x: &Float) -> String {
    x.to_string_radix(10, Some(decimal_digits(x.prec())))
}

pub fn parse_real(prec: u32, s: &str) -> Result<Float> {
    Float::parse(s)
        .map(|p| Float::with_val(prec, p))
        .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
}
