//! Primitive ideals of `Z[i]` and `Z[rho]` and the kernels summed over them.
//!
//! A primitive ideal is generated by `c tau0 + d` with `gcd(c, d) = 1`. Each
//! unit orbit has exactly one generator with `c >= 0, d > 0`: the argument
//! of `c tau0 + d` then lies in `[0, pi/2)` for Gaussian integers and in
//! `[0, pi/3)` for Eisenstein integers. That generator is the canonical one.

use std::fmt;

use rug::{Complex, Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, pi, sqrt3, GUARD_BITS};
use crate::special_values::PointTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Gaussian,
    Eisenstein,
}

impl Field {
    pub fn norm(self, c: i64, d: i64) -> i64 {
        match self {
            Field::Gaussian => c * c + d * d,
            Field::Eisenstein => c * c + c * d + d * d,
        }
    }

    pub fn omega(self) -> u32 {
        match self {
            Field::Gaussian => 2,
            Field::Eisenstein => 3,
        }
    }

    pub fn tag(self) -> PointTag {
        match self {
            Field::Gaussian => PointTag::I,
            Field::Eisenstein => PointTag::Rho,
        }
    }

    pub fn from_tag(tag: PointTag) -> Option<Field> {
        match tag {
            PointTag::I => Some(Field::Gaussian),
            PointTag::Rho => Some(Field::Eisenstein),
            PointTag::Generic => None,
        }
    }

    /// Multiplication of `c tau0 + d` by the generating unit (`i` or `rho`).
    pub fn unit_step(self, c: i64, d: i64) -> (i64, i64) {
        match self {
            Field::Gaussian => (d, -c),
            Field::Eisenstein => (c + d, -c),
        }
    }

    pub fn unit_count(self) -> u32 {
        2 * self.omega()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Gaussian => "gaussian",
            Field::Eisenstein => "eisenstein",
        })
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "i" => Ok(Field::Gaussian),
            "eisenstein" | "rho" => Ok(Field::Eisenstein),
            _ => Err(Error::InvalidArgument(format!("unknown field {s:?}"))),
        }
    }
}

/// A primitive ideal `(c tau0 + d)` with a completion `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimitiveIdeal {
    pub field: Field,
    pub c: i64,
    pub d: i64,
    pub norm: i64,
    pub a: i64,
    pub b: i64,
}

impl PrimitiveIdeal {
    pub fn new(field: Field, c: i64, d: i64) -> Result<Self> {
        let (a, b) = complete_unimodular(c, d)?;
        Ok(PrimitiveIdeal { field, c, d, norm: field.norm(c, d), a, b })
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// `(a, b)` with `ad - bc = 1`; `0 <= b < |d|` when `d != 0`.
pub fn complete_unimodular(c: i64, d: i64) -> Result<(i64, i64)> {
    if gcd(c, d) != 1 {
        return Err(Error::InvalidArgument(format!("({c}, {d}) is not a primitive pair")));
    }
    if d == 0 {
        // c = +-1 and -bc = 1.
        return Ok((0, -c));
    }
    let m = d.abs();
    if m == 1 {
        return Ok((d, 0));
    }
    // b = -c^{-1} mod |d|
    let (_, x, _) = ext_gcd(c.rem_euclid(m), m);
    let b = (-x).rem_euclid(m);
    let a = (1 + b * c) / d;
    debug_assert_eq!(a * d - b * c, 1);
    Ok((a, b))
}

/// Canonical generator of the unit orbit of `(c, d)`.
pub fn canonical(field: Field, c: i64, d: i64) -> (i64, i64) {
    let mut p = (c, d);
    for _ in 0..field.unit_count() {
        if p.0 >= 0 && p.1 > 0 {
            return p;
        }
        p = field.unit_step(p.0, p.1);
    }
    unreachable!("every nonzero orbit meets the fundamental sector")
}

/// Integer square root, rounded down.
fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    Integer::from(n).sqrt().to_i64().unwrap()
}

/// All primitive ideals of norm at most `bound`, ordered by `(norm, c, d)`.
pub fn enumerate_primitive(field: Field, bound: u64) -> Vec<PrimitiveIdeal> {
    let b = bound as i64;
    let mut out = Vec::new();
    let mut c = 0i64;
    while field.norm(c, 1) <= b {
        let dmax = match field {
            Field::Gaussian => isqrt(b - c * c),
            // c^2 + cd + d^2 <= B  <=>  (2d + c)^2 <= 4B - 3c^2
            Field::Eisenstein => (isqrt(4 * b - 3 * c * c) - c).div_euclid(2),
        };
        for d in 1..=dmax {
            if gcd(c, d) == 1 {
                let norm = field.norm(c, d);
                if norm <= b {
                    out.push(PrimitiveIdeal::new(field, c, d).expect("coprime"));
                }
            }
        }
        c += 1;
    }
    out.sort_by_key(|p| (p.norm, p.c, p.d));
    out
}

/// The kernel `C_{W}(b, m)` of the lattice sums at `i` or `rho`.
pub fn c_kernel(ideal: &PrimitiveIdeal, weight: u32, m: u64, prec: u32) -> Float {
    let wp = prec + GUARD_BITS;
    let (a, b, c, d) = (ideal.a as i128, ideal.b as i128, ideal.c as i128, ideal.d as i128);
    let n = ideal.norm as i128;
    let m = m as i128;
    let p = pi(wp);
    let (phase, angle) = match ideal.field {
        Field::Gaussian => {
            if weight % 4 != 0 {
                return Float::new(prec);
            }
            let r = (m * (a * c + b * d)).rem_euclid(n);
            let phase = Float::with_val(wp, &p * 2u32) * r as i64 / n as i64;
            let angle = Float::with_val(wp, c as i64).atan2(&Float::with_val(wp, d as i64));
            (phase, angle)
        }
        Field::Eisenstein => {
            if weight % 6 != 0 {
                return Float::new(prec);
            }
            let r = (m * (a * d + b * c + 2 * a * c + 2 * b * d)).rem_euclid(2 * n);
            let phase = Float::with_val(wp, &p * r as i64) / n as i64;
            let y = sqrt3(wp) * c as i64;
            let angle = y.atan2(&Float::with_val(wp, 2 * d + c));
            (phase, angle)
        }
    };
    Float::with_val(prec, (phase + angle * weight).cos())
}

/// `(c z + d)^{-k} exp(-2 pi i n M z)` for `M = (a b; c d)`.
pub fn b_kernel_with(
    k: u32,
    (a, b, c, d): (i64, i64, i64, i64),
    z: &Complex,
    n: i64,
    prec: u32,
) -> Complex {
    let wp = prec + GUARD_BITS;
    let z = Complex::with_val(wp, z);
    let den = Complex::with_val(wp, &z * c) + d;
    let num = Complex::with_val(wp, &z * a) + b;
    let mz = num / &den;
    let two_pi_i = Complex::with_val(wp, (0, pi(wp) * 2u32));
    let e = Complex::with_val(wp, -(two_pi_i * n) * mz).exp();
    let p = numeric::cpow(&den, k as i64, wp);
    Complex::with_val(prec, e / p)
}

/// `b_kernel_with` using the completion from [`complete_unimodular`].
pub fn b_kernel(k: u32, c: i64, d: i64, z: &Complex, n: i64, prec: u32) -> Result<Complex> {
    let (a, b) = complete_unimodular(c, d)?;
    Ok(b_kernel_with(k, (a, b, c, d), z, n, prec))
}
