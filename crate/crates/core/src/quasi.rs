//! Fourier coefficients of `E2^n f` for meromorphic `f` of weight `2 - 2k`.
//!
//! For each `1 <= s <= n` the combination
//!
//! ```text
//! F_s = sum_{l=0}^{s} (-1)^l C(s,l) (2k-2s-1)!/(2k-2s-1+l)! (pi/3)^{s-l} (2i)^l d^l/dz^l (E2^{s-l} f)
//! ```
//!
//! is meromorphic modular of weight `2 - 2(k - s)`. Its principal parts are
//! read off Laurent expansions and decomposed in the basis, and the
//! coefficients of `E2^s f` follow by recursion in `s`.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::basis::{k_from_weight, solve_basis, BasisRepresentation};
use crate::coeff_engine::{assemble_coefficients, f_series_batch, Channel, TruncatedSum};
use crate::elliptic::{laurent_at, LaurentSeries, PrincipalPart};
use crate::error::{Error, Result};
use crate::expr::{FormExpression, Generator};
use crate::numeric::{self, check_precision, pi, GUARD_BITS};
use crate::special_values::{EllipticPoint, PointTag};

/// `c_{k,l,j} = (2k-l-j-2)! (2k-2l-1) / (2k-l-1)!`.
pub fn c_klj(k: u32, l: u32, j: u32) -> Rational {
    let top = 2 * k - l - j - 2;
    Rational::from((numeric::factorial(top) * (2 * k - 2 * l - 1), numeric::factorial(2 * k - l - 1)))
}

/// `(-1)^l C(n,l) (2k-2n-1)! / (2k-2n-1+l)!`.
pub fn fn_coeff(k: u32, n: u32, l: u32) -> Rational {
    let base = 2 * k - 2 * n - 1;
    let q = Rational::from((numeric::binomial(n, l), numeric::falling(base + l, base)));
    if l % 2 == 1 {
        -q
    } else {
        q
    }
}

#[derive(Debug, Clone)]
pub struct QuasiExpansion {
    pub k: u32,
    pub n: u32,
    /// Representation of `f` itself.
    pub f_spec: BasisRepresentation,
    /// `c_{k,l,j}` for `0 <= l <= j <= n`.
    pub ckl_table: BTreeMap<(u32, u32), Rational>,
    /// `F_n` combination coefficients indexed by `l`.
    pub fn_coeffs: Vec<Rational>,
    /// Representations of `F_s` for `s = 0..=n` (`F_0 = f`).
    pub levels: Vec<BasisRepresentation>,
    pub prec: u32,
}

fn e2_times(s: u32, f: &FormExpression) -> FormExpression {
    match s {
        0 => f.clone(),
        1 => FormExpression::mul(FormExpression::Gen(Generator::E2), f.clone()),
        _ => FormExpression::mul(
            FormExpression::Pow(Box::new(FormExpression::Gen(Generator::E2)), s as i64),
            f.clone(),
        ),
    }
}

/// Principal part of `F_s` at `point`.
fn fs_principal_part(f: &FormExpression, k: u32, s: u32, point: &EllipticPoint, wp: u32) -> Result<PrincipalPart> {
    let pi3 = Float::with_val(wp, pi(wp) / 3u32);
    let two = Float::with_val(wp, 2);
    let mut total: Option<LaurentSeries> = None;
    for l in 0..=s {
        let g = laurent_at(&e2_times(s - l, f), point, l as i64, wp)?;
        let mut d = g;
        for _ in 0..l {
            d = d.derivative();
        }
        let c = Float::with_val(wp, &fn_coeff(k, s, l)) * Float::with_val(wp, (&pi3).pow(s - l));
        let term = d.scale_by(&(numeric::imag_pow(wp, &two, l) * c));
        total = Some(match total {
            None => term,
            Some(t) => t.add(&term),
        });
    }
    Ok(PrincipalPart::from_series(&total.expect("at least one term").truncate(-1)))
}

impl QuasiExpansion {
    /// Builds the level representations for `E2^n f`.
    pub fn build(f: &FormExpression, n: u32, prec: u32) -> Result<QuasiExpansion> {
        check_precision(prec)?;
        if f.contains(Generator::E2) {
            return Err(Error::InvalidArgument("the meromorphic factor must not contain E2".into()));
        }
        let k = k_from_weight(f.weight())?;
        if k < n + 2 {
            return Err(Error::InvalidArgument(format!(
                "E2^{n} times weight {} has nonnegative weight or leaves k - n < 2",
                f.weight()
            )));
        }
        let wp = prec + GUARD_BITS;
        let points = [EllipticPoint::i(wp), EllipticPoint::rho(wp)];
        let mut levels = Vec::with_capacity(n as usize + 1);
        for s in 0..=n {
            let parts = points
                .iter()
                .map(|p| fs_principal_part(f, k, s, p, wp))
                .collect::<Result<Vec<_>>>()?;
            levels.push(solve_basis(&parts, k - s, wp)?);
        }
        let mut ckl_table = BTreeMap::new();
        for j in 0..=n {
            for l in 0..=j {
                if 2 * k >= l + j + 2 {
                    ckl_table.insert((l, j), c_klj(k, l, j));
                }
            }
        }
        Ok(QuasiExpansion {
            k,
            n,
            f_spec: levels[0].clone(),
            ckl_table,
            fn_coeffs: (0..=n).map(|l| fn_coeff(k, n, l)).collect(),
            levels,
            prec: wp,
        })
    }

    /// Coefficients `0..=m_max` of `E2^n f`.
    pub fn coefficients(&self, m_max: u64, norm_bound: u64, prec: u32) -> Result<Vec<TruncatedSum>> {
        let wp = self.prec;
        let three_pi = Float::with_val(wp, 3u32) / pi(wp);
        let four_pi = Float::with_val(wp, pi(wp) * 4u32);
        // by_level[s][m]: coefficients of E2^s f.
        let mut by_level: Vec<Vec<TruncatedSum>> = Vec::with_capacity(self.n as usize + 1);
        for s in 0..=self.n {
            let fs = assemble_coefficients(&self.levels[s as usize], m_max, norm_bound, wp)?;
            let lead = Complex::with_val(wp, (Float::with_val(wp, (&three_pi).pow(s)), 0));
            let mut row = Vec::with_capacity(m_max as usize + 1);
            for m in 0..=m_max {
                let mut acc = TruncatedSum::zero(wp, norm_bound);
                acc.add_scaled(&lead, &fs[m as usize]);
                for l in 1..=s {
                    // (2i)^l (2 pi i m)^l = (-4 pi m)^l
                    let x = Float::with_val(wp, Float::with_val(wp, -(&four_pi * Float::with_val(wp, m))).pow(l));
                    let c = Float::with_val(wp, &fn_coeff(self.k, s, l)) * Float::with_val(wp, (&three_pi).pow(l)) * x;
                    let c = Complex::with_val(wp, (-c, 0));
                    acc.add_scaled(&c, &by_level[(s - l) as usize][m as usize]);
                }
                row.push(acc);
            }
            by_level.push(row);
        }
        Ok(by_level
            .pop()
            .unwrap()
            .into_iter()
            .map(|s| TruncatedSum {
                value: Complex::with_val(prec, s.value),
                tail_bound: Float::with_val(prec, s.tail_bound),
                norm_bound,
            })
            .collect())
    }
}

/// Coefficients `0..=m_max` of `E2^n f` through the level recursion.
pub fn quasi_coeffs_general(
    f: &FormExpression,
    n: u32,
    m_max: u64,
    norm_bound: u64,
    prec: u32,
) -> Result<Vec<TruncatedSum>> {
    QuasiExpansion::build(f, n, prec)?.coefficients(m_max, norm_bound, prec)
}

pub fn quasi_coeff_general(f: &FormExpression, n: u32, m: u64, norm_bound: u64, prec: u32) -> Result<TruncatedSum> {
    Ok(quasi_coeffs_general(f, n, m, norm_bound, prec)?.remove(m as usize))
}

/// Coefficients `0..=m_max` of `E2^j f` when `f` has only simple poles:
/// `(3/pi)^j sum_tau0 a omega F_{2k,j,0}(tau0, m)`.
pub fn simple_pole_quasi_coeffs(
    rep: &BasisRepresentation,
    j: u32,
    m_max: u64,
    norm_bound: u64,
    prec: u32,
) -> Result<Vec<TruncatedSum>> {
    check_precision(prec)?;
    let k = rep.k;
    if j + 1 >= k {
        return Err(Error::Nonconvergent { weight: 2 * k, j });
    }
    let wp = prec + GUARD_BITS;
    let mut out: Vec<TruncatedSum> = (0..=m_max).map(|_| TruncatedSum::zero(wp, norm_bound)).collect();
    let scale = Float::with_val(wp, Float::with_val(wp, 3u32) / pi(wp)).pow(j);
    for t in &rep.terms {
        if t.n != 0 {
            return Err(Error::NotSimplePole { point: t.point.tag.to_string(), order: t.n + 1 });
        }
        if t.point.tag == PointTag::Generic {
            return Err(Error::InvalidArgument("simple-pole path supports poles at i and rho only".into()));
        }
        let sums = f_series_batch(t.point.tag, &[Channel::new(2 * k, j, 0)], m_max, norm_bound, wp)?;
        let w = Complex::with_val(wp, &t.coeff * &scale) * t.point.omega;
        for (m, s) in sums[0].iter().enumerate() {
            out[m].add_scaled(&w, s);
        }
    }
    Ok(out
        .into_iter()
        .map(|s| TruncatedSum {
            value: Complex::with_val(prec, s.value),
            tail_bound: Float::with_val(prec, s.tail_bound),
            norm_bound,
        })
        .collect())
}

pub fn simple_pole_quasi_coeff(
    rep: &BasisRepresentation,
    j: u32,
    m: u64,
    norm_bound: u64,
    prec: u32,
) -> Result<TruncatedSum> {
    Ok(simple_pole_quasi_coeffs(rep, j, m, norm_bound, prec)?.remove(m as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_level_combination() {
        // F_1 = (pi/3) E2 f - 1/(2k-2) (2i) f'
        assert_eq!(fn_coeff(13, 1, 0), 1);
        assert_eq!(fn_coeff(13, 1, 1), Rational::from((-1, 24)));
    }

    #[test]
    fn c_klj_recurrences() {
        for k in 4..12u32 {
            for l in 1..4u32 {
                for j in l..(2 * k - l - 3) {
                    assert_eq!(c_klj(k, l, j + 1), c_klj(k, l, j) / (2 * k - l - j - 2));
                    assert_eq!(c_klj(k, l, j + 1), c_klj(k - 1, l - 1, j) / (2 * k - l - 1));
                }
            }
        }
    }

    #[test]
    fn rejects_nonnegative_weight() {
        let f = FormExpression::parse("1/E4").unwrap();
        assert!(QuasiExpansion::build(&f, 2, 64).is_err());
    }
}
