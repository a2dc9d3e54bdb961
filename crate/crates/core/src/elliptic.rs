//! Taylor and Laurent expansions in `w = z - tau0` around a point.
//!
//! Generators expand through their derivative jets; products, powers,
//! reciprocals and `D` act on truncated Laurent series. Every series tracks
//! the highest order up to which its coefficients are exact, so truncation
//! never leaks into the reported terms.

use std::collections::{BTreeMap, BTreeSet};

use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::expr::{FormExpression, Generator};
use crate::numeric::{self, check_precision, pi, GUARD_BITS};
use crate::special_values::{derivative_jet, DerivativeJet, EllipticPoint, PointTag};

/// Largest Taylor depth tried before giving up on a vanishing order.
pub const MAX_JET_DEPTH: u32 = 160;
/// Taylor terms computed beyond the requested order.
pub const EXTRA_TERMS: u32 = 6;

/// `sum_{n >= lowest} c_n w^n`, exact through order `top()`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    pub point: EllipticPoint,
    pub lowest: i64,
    pub coeffs: Vec<Complex>,
}

/// Threshold below which a coefficient counts as zero: `2^{-P/2}` times `scale`.
pub fn zero_tolerance(scale: &Float, prec: u32) -> Float {
    Float::with_val(prec, scale * Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32))))
}

impl LaurentSeries {
    fn new(point: &EllipticPoint, lowest: i64, coeffs: Vec<Complex>) -> Self {
        LaurentSeries { point: point.clone(), lowest, coeffs }
    }

    pub fn prec(&self) -> u32 {
        self.point.prec()
    }

    /// Highest exact order; below `lowest` when no coefficient is known.
    pub fn top(&self) -> i64 {
        self.lowest + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, n: i64) -> Complex {
        if n < self.lowest || n > self.top() {
            return Complex::new(self.prec());
        }
        self.coeffs[(n - self.lowest) as usize].clone()
    }

    fn constant(point: &EllipticPoint, c: Complex, top: i64) -> Self {
        let prec = point.prec();
        let mut coeffs = vec![Complex::new(prec); (top.max(0) + 1) as usize];
        coeffs[0] = c;
        LaurentSeries::new(point, 0, coeffs)
    }

    pub fn scale(&self) -> Float {
        let prec = self.prec();
        self.coeffs.iter().fold(Float::new(prec), |m, c| m.max(&numeric::abs(c)))
    }

    /// First order whose coefficient is above the zero tolerance.
    pub fn valuation(&self) -> Result<i64> {
        let prec = self.prec();
        let tol = zero_tolerance(&self.scale(), prec);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() && numeric::abs(c) > tol {
                return Ok(self.lowest + i as i64);
            }
        }
        Err(Error::VanishingOrder { depth: self.coeffs.len() as u32 })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec();
        let lowest = self.lowest + other.lowest;
        let top = (self.top() + other.lowest).min(other.top() + self.lowest);
        let len = (top - lowest + 1).max(0) as usize;
        let mut out = vec![Complex::new(prec); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += Complex::with_val(prec, a * b);
                }
            }
        }
        LaurentSeries::new(&self.point, lowest, out)
    }

    pub fn recip(&self) -> Result<Self> {
        let prec = self.prec();
        let v = self.valuation()?;
        let shift = (v - self.lowest) as usize;
        let a = &self.coeffs[shift..];
        let inv0 = Complex::with_val(prec, a[0].recip_ref());
        let mut out: Vec<Complex> = vec![inv0.clone()];
        for n in 1..a.len() {
            let mut s = Complex::new(prec);
            for k in 1..=n {
                if !a[k].is_zero() {
                    s += Complex::with_val(prec, &a[k] * &out[n - k]);
                }
            }
            out.push(-(s * &inv0));
        }
        Ok(LaurentSeries::new(&self.point, -v, out))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = LaurentSeries::constant(&self.point, Complex::with_val(self.prec(), (1, 0)), base.top().max(0) + 64);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// `d/dz`.
    pub fn derivative(&self) -> Self {
        let prec = self.prec();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| Complex::with_val(prec, c * (self.lowest + i as i64)))
            .collect();
        let mut d = LaurentSeries::new(&self.point, self.lowest - 1, coeffs);
        if self.lowest == 0 && !d.coeffs.is_empty() {
            d.coeffs.remove(0);
            d.lowest = 0;
        }
        d
    }

    /// `D = (2 pi i)^{-1} d/dz`.
    pub fn dee(&self) -> Self {
        let prec = self.prec();
        let f = Complex::with_val(prec, (0, pi(prec) * 2u32)).recip();
        self.derivative().scale_by(&f)
    }

    pub fn scale_by(&self, c: &Complex) -> Self {
        let prec = self.prec();
        let coeffs = self.coeffs.iter().map(|a| Complex::with_val(prec, a * c)).collect();
        LaurentSeries::new(&self.point, self.lowest, coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec();
        let lowest = self.lowest.min(other.lowest);
        let top = self.top().min(other.top());
        let coeffs = (lowest..=top)
            .map(|n| Complex::with_val(prec, self.coeff(n) + other.coeff(n)))
            .collect();
        LaurentSeries::new(&self.point, lowest, coeffs)
    }

    /// Drops coefficients above order `top`.
    pub fn truncate(&self, top: i64) -> Self {
        let len = ((top - self.lowest + 1).max(0) as usize).min(self.coeffs.len());
        LaurentSeries::new(&self.point, self.lowest, self.coeffs[..len].to_vec())
    }

    pub fn round(&self, prec: u32) -> Self {
        LaurentSeries {
            point: self.point.with_prec(prec),
            lowest: self.lowest,
            coeffs: self.coeffs.iter().map(|c| Complex::with_val(prec, c)).collect(),
        }
    }
}

struct Expander<'a> {
    point: &'a EllipticPoint,
    jet: DerivativeJet,
    depth: u32,
}

impl Expander<'_> {
    fn generator(&self, w: u32) -> LaurentSeries {
        let prec = self.point.prec();
        let coeffs = (0..=self.depth)
            .map(|n| Complex::with_val(prec, self.jet.get(w, n) / numeric::factorial(n)))
            .collect();
        LaurentSeries::new(self.point, 0, coeffs)
    }

    fn eval(&self, e: &FormExpression) -> Result<LaurentSeries> {
        let prec = self.point.prec();
        Ok(match e {
            FormExpression::Gen(Generator::E10) => self.generator(4).mul(&self.generator(6)),
            FormExpression::Gen(g) => self.generator(g.weight()),
            FormExpression::Const(c) => LaurentSeries::constant(
                self.point,
                Complex::with_val(prec, (Float::with_val(prec, c), 0)),
                self.depth as i64,
            ),
            FormExpression::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?),
            FormExpression::Pow(a, k) => self.eval(a)?.pow(*k)?,
            FormExpression::Recip(a) => self.eval(a)?.recip()?,
            FormExpression::Dee(a) => self.eval(a)?.dee(),
        })
    }
}

/// Laurent expansion of `expr` at `point`, exact through order `depth`.
pub fn laurent_at(expr: &FormExpression, point: &EllipticPoint, depth: i64, prec: u32) -> Result<LaurentSeries> {
    check_precision(prec)?;
    let wp = prec + GUARD_BITS + 32;
    let p = point.with_prec(wp);
    let mut jet_depth = depth.max(0) as u32 + EXTRA_TERMS;
    loop {
        let jet = derivative_jet(&p, jet_depth, wp)?;
        let ex = Expander { point: &p, jet, depth: jet_depth };
        match ex.eval(expr) {
            Ok(s) if s.top() >= depth => return Ok(s.truncate(depth).round(prec)),
            Ok(_) | Err(Error::VanishingOrder { .. }) if jet_depth < MAX_JET_DEPTH => {
                jet_depth = (jet_depth + jet_depth / 2 + 8).min(MAX_JET_DEPTH);
            }
            Ok(_) => return Err(Error::VanishingOrder { depth: jet_depth }),
            Err(e) => return Err(e),
        }
    }
}

/// Taylor coefficients `c_0, ..., c_depth` of a holomorphic expression.
pub fn taylor_at(expr: &FormExpression, point: &EllipticPoint, depth: u32, prec: u32) -> Result<Vec<Complex>> {
    if expr.has_reciprocal() {
        return Err(Error::ReciprocalInTaylor);
    }
    let s = laurent_at(expr, point, depth as i64, prec)?;
    Ok((0..=depth as i64).map(|n| s.coeff(n)).collect())
}

/// The negative-order part of a Laurent expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalPart {
    pub point: EllipticPoint,
    /// Coefficient of `(z - tau0)^{-n}` keyed by `n >= 1`.
    pub coeffs: BTreeMap<u32, Complex>,
    /// Orders whose computed coefficient fell below the zero tolerance.
    pub flagged_zero: BTreeSet<u32>,
}

impl PrincipalPart {
    pub fn empty(point: &EllipticPoint) -> Self {
        PrincipalPart { point: point.clone(), coeffs: BTreeMap::new(), flagged_zero: BTreeSet::new() }
    }

    pub fn from_series(s: &LaurentSeries) -> Self {
        let prec = s.prec();
        let mut pp = PrincipalPart::empty(&s.point);
        let scale = (s.lowest..0).fold(Float::new(prec), |m, n| m.max(&numeric::abs(&s.coeff(n))));
        let tol = zero_tolerance(&scale, prec);
        for n in s.lowest..0 {
            let c = s.coeff(n);
            let order = (-n) as u32;
            if c.is_zero() || numeric::abs(&c) <= tol {
                pp.flagged_zero.insert(order);
            } else {
                pp.coeffs.insert(order, c);
            }
        }
        pp
    }

    pub fn prec(&self) -> u32 {
        self.point.prec()
    }

    /// Highest order with a nonzero coefficient, or 0 if none.
    pub fn order(&self) -> u32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn get(&self, n: u32) -> Complex {
        self.coeffs.get(&n).cloned().unwrap_or_else(|| Complex::new(self.prec()))
    }

    pub fn scale(&self) -> Float {
        self.coeffs.values().fold(Float::new(self.prec()), |m, c| m.max(&numeric::abs(c)))
    }

    pub fn add(&self, other: &PrincipalPart) -> PrincipalPart {
        let prec = self.prec();
        let mut out = self.clone();
        for (n, c) in &other.coeffs {
            let e = out.coeffs.entry(*n).or_insert_with(|| Complex::new(prec));
            *e += c;
        }
        out.flagged_zero.retain(|n| !out.coeffs.contains_key(n));
        out
    }

    pub fn scaled(&self, c: &Complex) -> PrincipalPart {
        let prec = self.prec();
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = Complex::with_val(prec, &*v * c);
        }
        out
    }
}

pub fn principal_part(expr: &FormExpression, point: &EllipticPoint, prec: u32) -> Result<PrincipalPart> {
    let s = laurent_at(expr, point, EXTRA_TERMS as i64, prec)?;
    Ok(PrincipalPart::from_series(&s))
}

/// Generalized binomial coefficient `binom(a, j)` for an integer `a`.
fn gen_binomial(a: i64, j: u32) -> Rational {
    let mut num = Integer::from(1);
    for t in 0..j as i64 {
        num *= a - t;
    }
    Rational::from((num, numeric::factorial(j)))
}

/// Coefficients `b_m` of `f(z) = (z - conj tau0)^{-weight} sum_m b_m X^m`
/// with `X = (z - tau0)/(z - conj tau0)`, for `m` from the series' lowest
/// order through its top.
pub fn elliptic_coefficients(s: &LaurentSeries, weight: i64) -> Vec<(i64, Complex)> {
    let prec = s.prec();
    let two_iv = Complex::with_val(prec, (0, Float::with_val(prec, s.point.im() * 2u32)));
    let inv = Complex::with_val(prec, two_iv.recip_ref());
    // (w + 2iv)^weight = (2iv)^weight (1 + w/(2iv))^weight
    let span = (s.top() - s.lowest).max(0) as u32;
    let lead = numeric::cpow(&two_iv, weight, prec);
    let factor: Vec<Complex> = (0..=span)
        .map(|j| {
            let c = Float::with_val(prec, &gen_binomial(weight, j));
            Complex::with_val(prec, &lead * numeric::cpow(&inv, j as i64, prec)) * c
        })
        .collect();
    let g = s.mul(&LaurentSeries::new(&s.point, 0, factor));
    // w = 2iv X / (1 - X), so w^n = (2iv)^n X^n (1 - X)^{-n}.
    let (lo, hi) = (g.lowest, g.top());
    let mut b: Vec<Complex> = vec![Complex::new(prec); (hi - lo + 1).max(0) as usize];
    for n in lo..=hi {
        let c = g.coeff(n);
        if c.is_zero() {
            continue;
        }
        let base = Complex::with_val(prec, &c * numeric::cpow(&two_iv, n, prec));
        let mut rising = Rational::from(1);
        for j in 0..=(hi - n) {
            if j > 0 {
                rising *= Rational::from((n + j - 1, j));
            }
            if rising == 0 {
                break;
            }
            b[(n + j - lo) as usize] += Complex::with_val(prec, &base * Float::with_val(prec, &rising));
        }
    }
    b.into_iter().enumerate().map(|(i, c)| (lo + i as i64, c)).collect()
}

/// Orders `m` with a non-negligible `b_m` that violate `m = -weight/2 mod omega`.
pub fn nonconforming_orders(s: &LaurentSeries, weight: i64) -> Vec<i64> {
    let omega = s.point.omega as i64;
    let b = elliptic_coefficients(s, weight);
    let prec = s.prec();
    let scale = b.iter().fold(Float::new(prec), |m, (_, c)| m.max(&numeric::abs(c)));
    let tol = zero_tolerance(&scale, prec);
    b.into_iter()
        .filter(|(m, c)| (m + weight / 2).rem_euclid(omega) != 0 && numeric::abs(c) > tol)
        .map(|(m, _)| m)
        .collect()
}

/// Convenience: principal part at `i` or `rho` by tag.
pub fn principal_part_at(expr: &FormExpression, tag: PointTag, prec: u32) -> Result<PrincipalPart> {
    principal_part(expr, &EllipticPoint::from_tag(tag, prec)?, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e10_has_a_simple_zero_at_i() {
        let e = FormExpression::parse("E10").unwrap();
        let s = laurent_at(&e, &EllipticPoint::i(128), 4, 128).unwrap();
        assert_eq!(s.valuation().unwrap(), 1);
    }

    #[test]
    fn reciprocal_pole_order() {
        let e = FormExpression::parse("1/E6^4").unwrap();
        let pp = principal_part(&e, &EllipticPoint::i(128), 128).unwrap();
        assert_eq!(pp.order(), 4);
    }

    #[test]
    fn taylor_rejects_reciprocals() {
        let e = FormExpression::parse("1/E4").unwrap();
        assert_eq!(taylor_at(&e, &EllipticPoint::i(128), 3, 128), Err(Error::ReciprocalInTaylor));
    }

    #[test]
    fn derivative_of_constant_vanishes_everywhere() {
        let e = FormExpression::parse("1/D(1)").unwrap();
        assert!(matches!(laurent_at(&e, &EllipticPoint::i(64), 0, 64), Err(Error::VanishingOrder { .. })));
    }
}
