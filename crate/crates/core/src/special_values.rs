//! Values and derivatives of `E2`, `E4`, `E6`, `E10` at elliptic points.
//!
//! At `i` and `rho = e^{pi i/3}` the generators have closed forms in
//! `pi`, `sqrt 3` and Gamma values. Derivatives come from the Ramanujan
//! system, kept as exact polynomials in `Q[E2, E4, E6]`:
//!
//! ```text
//! D E2 = (E2^2 - E4)/12,   D E4 = (E2 E4 - E6)/3,   D E6 = (E2 E6 - E4^2)/2
//! ```
//!
//! with `D = (2 pi i)^{-1} d/dz`.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, check_precision, pi, sqrt3, GUARD_BITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointTag {
    I,
    Rho,
    Generic,
}

impl PointTag {
    pub fn omega(self) -> u32 {
        match self {
            PointTag::I => 2,
            PointTag::Rho => 3,
            PointTag::Generic => 1,
        }
    }
}

impl fmt::Display for PointTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointTag::I => "i",
            PointTag::Rho => "rho",
            PointTag::Generic => "tau",
        })
    }
}

/// A point of the upper half-plane with the order of its stabilizer.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticPoint {
    pub tag: PointTag,
    pub tau: Complex,
    pub omega: u32,
}

impl EllipticPoint {
    pub fn i(prec: u32) -> Self {
        EllipticPoint { tag: PointTag::I, tau: Complex::with_val(prec, (0, 1)), omega: 2 }
    }

    pub fn rho(prec: u32) -> Self {
        let im = sqrt3(prec) / 2u32;
        EllipticPoint {
            tag: PointTag::Rho,
            tau: Complex::with_val(prec, (Float::with_val(prec, 0.5), im)),
            omega: 3,
        }
    }

    pub fn generic(tau: Complex) -> Result<Self> {
        if *tau.imag() <= 0 {
            return Err(Error::OutsideRegion("Im tau must be positive".into()));
        }
        Ok(EllipticPoint { tag: PointTag::Generic, tau, omega: 1 })
    }

    pub fn from_tag(tag: PointTag, prec: u32) -> Result<Self> {
        match tag {
            PointTag::I => Ok(Self::i(prec)),
            PointTag::Rho => Ok(Self::rho(prec)),
            PointTag::Generic => Err(Error::InvalidArgument("a generic point needs coordinates".into())),
        }
    }

    pub fn prec(&self) -> u32 {
        self.tau.prec().0
    }

    pub fn im(&self) -> Float {
        self.tau.imag().clone()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        match self.tag {
            PointTag::I => Self::i(prec),
            PointTag::Rho => Self::rho(prec),
            PointTag::Generic => EllipticPoint { tag: self.tag, tau: Complex::with_val(prec, &self.tau), omega: 1 },
        }
    }
}

/// `E_w` at `i` or `rho` in closed form.
pub fn closed_value(weight: u32, tag: PointTag, prec: u32) -> Result<Float> {
    check_precision(prec)?;
    let wp = prec + GUARD_BITS;
    let p = pi(wp);
    let v = match (weight, tag) {
        (2, PointTag::I) => Float::with_val(wp, 3) / &p,
        (4, PointTag::I) => {
            let g = Float::with_val(wp, 0.25).gamma() / Float::with_val(wp, 0.75).gamma();
            let d = Float::with_val(wp, &p * 8u32).square();
            g.pow(4u32) * 12u32 / d
        }
        (6, PointTag::I) | (4, PointTag::Rho) => Float::new(wp),
        (2, PointTag::Rho) => sqrt3(wp) * 2u32 / &p,
        (6, PointTag::Rho) => {
            let third = Float::with_val(wp, 1) / 3u32;
            let two_thirds = Float::with_val(wp, 2) / 3u32;
            let g = third.gamma() / two_thirds.gamma();
            let d = Float::with_val(wp, &p * 6u32).pow(3u32);
            g.pow(9u32) * sqrt3(wp) * 24u32 / d
        }
        (10, PointTag::I) | (10, PointTag::Rho) => {
            Float::with_val(wp, closed_value(4, tag, wp)? * closed_value(6, tag, wp)?)
        }
        (_, PointTag::Generic) => {
            return Err(Error::InvalidArgument("closed values exist only at i and rho".into()))
        }
        _ => return Err(Error::InvalidArgument(format!("no generator of weight {weight}"))),
    };
    Ok(Float::with_val(prec, v))
}

fn eisenstein_constant(weight: u32) -> Result<i32> {
    match weight {
        2 => Ok(-24),
        4 => Ok(240),
        6 => Ok(-504),
        10 => Ok(-264),
        _ => Err(Error::InvalidArgument(format!("no generator of weight {weight}"))),
    }
}

fn sigma(s: u32, n: u64) -> Integer {
    let mut acc = Integer::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += Integer::from(d).pow(s);
            let e = n / d;
            if e != d {
                acc += Integer::from(e).pow(s);
            }
        }
        d += 1;
    }
    acc
}

/// Direct q-series summation of `E_w(tau)` for `Im tau >= 1/2`.
pub fn qseries_eval(weight: u32, tau: &Complex, prec: u32) -> Result<Complex> {
    check_precision(prec)?;
    if *tau.imag() < 0.5 {
        return Err(Error::OutsideRegion("q-series evaluation needs Im tau >= 1/2".into()));
    }
    let c = eisenstein_constant(weight)?;
    let wp = prec + GUARD_BITS + 32;
    let two_pi_i = Complex::with_val(wp, (0, pi(wp) * 2u32));
    let q = Complex::with_val(wp, &two_pi_i * tau).exp();
    let qabs = numeric::abs(&q);
    let eps = Float::with_val(wp, Float::i_exp(1, -(prec as i32) - 8));
    let mut sum = Complex::with_val(wp, (1, 0));
    let mut qn = Complex::with_val(wp, (1, 0));
    let mut n: u64 = 0;
    loop {
        n += 1;
        qn *= &q;
        let term = Complex::with_val(wp, &qn * sigma(weight - 1, n)) * c;
        sum += &term;
        // Bound the remaining tail by a geometric series on |c| k^w |q|^k.
        let next = n + 1;
        let bound = Float::with_val(wp, Float::with_val(wp, next).pow(weight))
            * Float::with_val(wp, (&qabs).pow(next as u32))
            * c.unsigned_abs();
        let ratio = Float::with_val(wp, Float::with_val(wp, next + 1) / next).pow(weight) * &qabs;
        let scale = numeric::abs(&sum).max(&Float::with_val(wp, 1));
        if ratio < 0.5 && Float::with_val(wp, &bound * 2u32) < Float::with_val(wp, &eps * &scale) {
            break;
        }
    }
    Ok(Complex::with_val(prec, sum))
}

/// Monomial `E2^a E4^b E6^c` keyed by exponents.
pub type Monomial = [u32; 3];

/// An exact polynomial in `Q[E2, E4, E6]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly(pub BTreeMap<Monomial, Rational>);

impl Poly {
    pub fn generator(index: usize) -> Self {
        let mut m = [0u32; 3];
        m[index] = 1;
        Poly(BTreeMap::from([(m, Rational::from(1))]))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        let e = self.0.entry(m).or_default();
        *e += c;
        if *e == 0 {
            self.0.remove(&m);
        }
    }

    /// Applies `D` term by term.
    pub fn dee(&self) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.0 {
            let [a, b, d] = *m;
            if a > 0 {
                let k = Rational::from(c * a) / 12u32;
                out.add_term([a + 1, b, d], k.clone());
                out.add_term([a - 1, b + 1, d], -k);
            }
            if b > 0 {
                let k = Rational::from(c * b) / 3u32;
                out.add_term([a + 1, b, d], k.clone());
                out.add_term([a, b - 1, d + 1], -k);
            }
            if d > 0 {
                let k = Rational::from(c * d) / 2u32;
                out.add_term([a + 1, b, d], k.clone());
                out.add_term([a, b + 2, d - 1], -k);
            }
        }
        out
    }

    pub fn eval(&self, vals: &[Complex; 3], prec: u32) -> Complex {
        let mut acc = Complex::new(prec);
        for (m, c) in &self.0 {
            let mut t = Complex::with_val(prec, (Float::with_val(prec, c), 0));
            for (k, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= numeric::cpow(&vals[k], e as i64, prec);
                }
            }
            acc += t;
        }
        acc
    }
}

/// `D^r E_w` for `w = 2, 4, 6` and `0 <= r <= depth`.
pub fn ramanujan_polys(depth: u32) -> Vec<[Poly; 3]> {
    let mut out = vec![[Poly::generator(0), Poly::generator(1), Poly::generator(2)]];
    for r in 1..=depth as usize {
        let prev = &out[r - 1];
        let next = [prev[0].dee(), prev[1].dee(), prev[2].dee()];
        out.push(next);
    }
    out
}

/// Derivatives `d^r/dz^r E_w` at a point for `w = 2, 4, 6`.
#[derive(Debug, Clone)]
pub struct DerivativeJet {
    pub point: EllipticPoint,
    pub depth: u32,
    /// `table[r] = [E2^{(r)}, E4^{(r)}, E6^{(r)}]`.
    pub table: Vec<[Complex; 3]>,
}

impl DerivativeJet {
    pub fn get(&self, weight: u32, r: u32) -> &Complex {
        let k = match weight {
            2 => 0,
            4 => 1,
            6 => 2,
            _ => panic!("jets are stored for weights 2, 4, 6"),
        };
        &self.table[r as usize][k]
    }
}

fn base_values(point: &EllipticPoint, wp: u32) -> Result<[Complex; 3]> {
    Ok(match point.tag {
        PointTag::I | PointTag::Rho => [2u32, 4, 6]
            .map(|w| closed_value(w, point.tag, wp).map(|v| Complex::with_val(wp, (v, 0))))
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .try_into()
            .unwrap(),
        PointTag::Generic => [2u32, 4, 6]
            .map(|w| qseries_eval(w, &point.tau, wp))
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .try_into()
            .unwrap(),
    })
}

pub fn derivative_jet(point: &EllipticPoint, depth: u32, prec: u32) -> Result<DerivativeJet> {
    check_precision(prec)?;
    let wp = prec + GUARD_BITS + 32 + 2 * depth;
    let base = base_values(point, wp)?;
    let polys = ramanujan_polys(depth);
    let two_pi_i = Complex::with_val(wp, (0, pi(wp) * 2u32));
    let mut scale = Complex::with_val(wp, (1, 0));
    let mut table = Vec::with_capacity(depth as usize + 1);
    for row in &polys {
        let vals = [0, 1, 2].map(|k| {
            let v = Complex::with_val(wp, row[k].eval(&base, wp) * &scale);
            Complex::with_val(prec, v)
        });
        table.push(vals);
        scale *= &two_pi_i;
    }
    Ok(DerivativeJet { point: point.with_prec(prec), depth, table })
}

/// Derivatives of `E10 = E4 E6` by the Leibniz rule.
pub fn e10_jet(point: &EllipticPoint, depth: u32, prec: u32) -> Result<Vec<Complex>> {
    let wp = prec + GUARD_BITS;
    let jet = derivative_jet(point, depth, wp)?;
    Ok((0..=depth)
        .map(|r| {
            let mut acc = Complex::new(wp);
            for s in 0..=r {
                let t = Complex::with_val(wp, jet.get(4, s) * jet.get(6, r - s));
                acc += t * numeric::binomial(r, s);
            }
            Complex::with_val(prec, acc)
        })
        .collect())
}
