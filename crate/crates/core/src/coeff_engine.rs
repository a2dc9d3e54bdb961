//! Lattice sums for Fourier coefficients.
//!
//! At `tau0 = i` or `rho` the building block is
//!
//! ```text
//! F_{W,j,r}(tau0, m) = v^{-j} (4 pi m)^r sum_b C_W(b, m) N(b)^{j - W/2} e^{2 pi m v / N(b)}
//! ```
//!
//! summed over primitive ideals `b` of `Z[i]` or `Z[rho]`, with `v = Im tau0`.
//! Sums are truncated at a norm bound and returned with a rigorous bound on
//! the discarded tail.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Integer};
use serde::{Deserialize, Serialize};

use crate::basis::BasisRepresentation;
use crate::error::{Error, Result};
use crate::lattice::{complete_unimodular, enumerate_primitive, gcd, Field, PrimitiveIdeal};
use crate::lattice::b_kernel_with;
use crate::numeric::{self, check_precision, pi, sqrt3, Accumulator, GUARD_BITS};
use crate::special_values::{closed_value, EllipticPoint, PointTag};

pub const DEFAULT_NORM_BOUND: u64 = 5000;
/// Ideals per parallel work unit. Fixed so results do not depend on thread count.
const CHUNK: usize = 512;

/// One term `A_j (-2i)^{n-j} d^{n-j}/dz^{n-j}` of an iterated raising operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaisingTerm {
    pub j: u32,
    pub coeff: Integer,
    pub minus_two_i_power: u32,
    pub derivative_order: u32,
}

/// `R^n` applied to a weight `2 - 2k` basis element, as a combination of
/// derivatives of the weight `2k + 2n` building blocks with index `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaisingExpansion {
    pub k: u32,
    pub n: u32,
    pub terms: Vec<RaisingTerm>,
}

pub fn raising_expansion(k: u32, n: u32) -> RaisingExpansion {
    let top = 2 * k + n - 1;
    let terms = (0..=n)
        .map(|j| RaisingTerm {
            j,
            coeff: numeric::falling(top, top - j) * numeric::binomial(n, j),
            minus_two_i_power: n - j,
            derivative_order: n - j,
        })
        .collect();
    RaisingExpansion { k, n, terms }
}

/// A truncated lattice sum with a bound on the omitted tail.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSum {
    pub value: Complex,
    pub tail_bound: Float,
    pub norm_bound: u64,
}

impl TruncatedSum {
    pub fn zero(prec: u32, norm_bound: u64) -> Self {
        TruncatedSum { value: Complex::new(prec), tail_bound: Float::new(prec), norm_bound }
    }

    /// `self + c * other`, with the tail scaled by `|c|`.
    pub fn add_scaled(&mut self, c: &Complex, other: &TruncatedSum) {
        let prec = self.value.prec().0;
        self.value += Complex::with_val(prec, c * &other.value);
        self.tail_bound += Float::with_val(prec, numeric::abs(c) * &other.tail_bound);
    }
}

/// Parameters of one lattice sum: weight `W`, index `j`, derivative order `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel {
    pub weight: u32,
    pub j: u32,
    pub r: u32,
}

impl Channel {
    pub fn new(weight: u32, j: u32, r: u32) -> Self {
        Channel { weight, j, r }
    }

    /// Sums converge absolutely for `W/2 - j > 1`.
    pub fn check(&self) -> Result<()> {
        if self.weight % 2 != 0 || self.weight / 2 <= self.j + 1 {
            return Err(Error::Nonconvergent { weight: self.weight, j: self.j });
        }
        Ok(())
    }

    fn sigma(&self) -> u32 {
        self.weight / 2 - self.j
    }
}

fn point_height(tag: PointTag, prec: u32) -> Result<Float> {
    match tag {
        PointTag::I => Ok(Float::with_val(prec, 1)),
        PointTag::Rho => Ok(sqrt3(prec) / 2u32),
        PointTag::Generic => Err(Error::InvalidArgument("lattice sums over ideals need tau0 = i or rho".into())),
    }
}

fn check_norm_bound(norm_bound: u64, m_max: u64, v: &Float) -> Result<()> {
    let need = (4.0 * std::f64::consts::PI * m_max as f64 * v.to_f64()).ceil() as u64;
    if norm_bound < need.max(16) {
        return Err(Error::InvalidArgument(format!(
            "norm bound {norm_bound} below the minimum {} for m = {m_max}",
            need.max(16)
        )));
    }
    Ok(())
}

/// `sigma c1 [B^{1-sigma}/(sigma-1) + 2 delta B^{1/2-sigma}/(sigma-1/2) + delta^2 B^{-sigma}/sigma]`,
/// the partial-summation bound for `sum_{N > B} N^{-sigma}` when the count of
/// terms with `N <= x` is at most `c1 (sqrt x + delta)^2`.
fn power_tail(sigma: u32, c1: &Float, delta: &Float, bound: u64, prec: u32) -> Float {
    let s = sigma as i32;
    let b = Float::with_val(prec, bound);
    let sb = Float::with_val(prec, b.sqrt_ref());
    let p = Float::with_val(prec, (&b).pow(-s));
    let t1 = Float::with_val(prec, &p * &b) / (s - 1);
    let t2 = Float::with_val(prec, &p * &sb) * Float::with_val(prec, delta * 2u32) / (Float::with_val(prec, s) - 0.5f64);
    let t3 = Float::with_val(prec, &p * Float::with_val(prec, delta.square_ref())) / s;
    Float::with_val(prec, t1 + t2 + t3) * c1 * s
}

/// Tail bound for `F_{W,j,r}(tau0, m)` beyond `norm_bound`.
pub fn tail_bound(tag: PointTag, ch: Channel, m: u64, norm_bound: u64, prec: u32) -> Result<Float> {
    ch.check()?;
    let v = point_height(tag, prec)?;
    let p = pi(prec);
    let (c1, delta) = match tag {
        // Lattice points of c^2 + d^2 <= x, four per ideal.
        PointTag::I => (Float::with_val(prec, &p / 4u32), Float::with_val(prec, 0.5f64).sqrt()),
        // c^2 + cd + d^2 has determinant 3/4 and top eigenvalue 3/2; six per ideal.
        _ => (Float::with_val(prec, &p / (sqrt3(prec) * 3u32)), sqrt3(prec) / 2u32),
    };
    let mut t = power_tail(ch.sigma(), &c1, &delta, norm_bound, prec);
    t *= Float::with_val(prec, (&v).pow(-(ch.j as i32)));
    if ch.r > 0 {
        t *= Float::with_val(prec, (Float::with_val(prec, &p * 4u32) * m).pow(ch.r));
    }
    let e = (Float::with_val(prec, &p * 2u32) * m) * &v / norm_bound;
    Ok(t * e.exp())
}

/// Per-ideal data shared across channels and Fourier indices.
struct IdealTerms {
    /// `Re(w^W u^m) e^m` indexed by `[weight slot][m]`.
    rows: Vec<Vec<Float>>,
    norm: Float,
}

fn ideal_terms(ideal: &PrimitiveIdeal, v: &Float, weights: &[u32], m_max: u64, wp: u32) -> IdealTerms {
    let (a, b, c, d) = (ideal.a as i128, ideal.b as i128, ideal.c as i128, ideal.d as i128);
    let n = ideal.norm as i128;
    let norm = Float::with_val(wp, ideal.norm);
    let p = pi(wp);
    let (alpha, unit) = match ideal.field {
        Field::Gaussian => {
            let r = (a * c + b * d).rem_euclid(n) as i64;
            let alpha = Float::with_val(wp, &p * 2u32) * r / ideal.norm;
            (alpha, Complex::with_val(wp, (ideal.d, ideal.c)))
        }
        Field::Eisenstein => {
            let r = (a * d + b * c + 2 * a * c + 2 * b * d).rem_euclid(2 * n) as i64;
            let alpha = Float::with_val(wp, &p * r) / ideal.norm;
            let re = Float::with_val(wp, ideal.d) + Float::with_val(wp, ideal.c) / 2u32;
            let im = sqrt3(wp) * ideal.c / 2u32;
            (alpha, Complex::with_val(wp, (re, im)))
        }
    };
    let unit = unit / Float::with_val(wp, norm.sqrt_ref());
    let (s, c) = alpha.sin_cos(Float::new(wp));
    let u = Complex::with_val(wp, (c, s));
    let e = (Float::with_val(wp, &p * 2u32) * v / &norm).exp();
    let rows = weights
        .iter()
        .map(|&w| {
            let mut z = numeric::cpow(&unit, w as i64, wp);
            let mut scale = Float::with_val(wp, 1);
            let mut row = Vec::with_capacity(m_max as usize + 1);
            for m in 0..=m_max {
                if m > 0 {
                    z *= &u;
                    scale *= &e;
                }
                row.push(Float::with_val(wp, z.real() * &scale));
            }
            row
        })
        .collect();
    IdealTerms { rows, norm }
}

/// `F_{W,j,r}(tau0, m)` for every channel and `0 <= m <= m_max`, indexed `[channel][m]`.
pub fn f_series_batch(
    tag: PointTag,
    channels: &[Channel],
    m_max: u64,
    norm_bound: u64,
    prec: u32,
) -> Result<Vec<Vec<TruncatedSum>>> {
    check_precision(prec)?;
    for ch in channels {
        ch.check()?;
    }
    let field = Field::from_tag(tag)
        .ok_or_else(|| Error::InvalidArgument("lattice sums over ideals need tau0 = i or rho".into()))?;
    let v = point_height(tag, prec + GUARD_BITS)?;
    check_norm_bound(norm_bound, m_max, &v)?;
    let wp = prec + GUARD_BITS + 16;
    let v = point_height(tag, wp)?;
    let modulus = 2 * field.omega();
    let live: Vec<usize> = (0..channels.len()).filter(|&i| channels[i].weight % modulus == 0).collect();
    let mut weights: Vec<u32> = live.iter().map(|&i| channels[i].weight).collect();
    weights.sort_unstable();
    weights.dedup();
    let slot = |w: u32| weights.binary_search(&w).unwrap();
    let rows = m_max as usize + 1;

    let ideals = if live.is_empty() { Vec::new() } else { enumerate_primitive(field, norm_bound) };
    let partials: Vec<Vec<Vec<Accumulator>>> = ideals
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![vec![Accumulator::new(wp); rows]; live.len()];
            for ideal in chunk {
                let t = ideal_terms(ideal, &v, &weights, m_max, wp);
                for (li, &ci) in live.iter().enumerate() {
                    let ch = channels[ci];
                    let amp = Float::with_val(wp, (&t.norm).pow(ch.j as i32 - (ch.weight / 2) as i32));
                    let row = &t.rows[slot(ch.weight)];
                    for (m, x) in row.iter().enumerate() {
                        acc[li][m].add_real(&Float::with_val(wp, x * &amp));
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![vec![Accumulator::new(wp); rows]; live.len()];
    for part in &partials {
        for (li, r) in part.iter().enumerate() {
            for (m, a) in r.iter().enumerate() {
                total[li][m].merge(a);
            }
        }
    }

    let p = pi(wp);
    let mut out = Vec::with_capacity(channels.len());
    for (ci, ch) in channels.iter().enumerate() {
        let mut per_m = Vec::with_capacity(rows);
        let li = live.iter().position(|&x| x == ci);
        for m in 0..=m_max {
            let Some(li) = li else {
                per_m.push(TruncatedSum::zero(prec, norm_bound));
                continue;
            };
            let mut factor = Float::with_val(wp, (&v).pow(-(ch.j as i32)));
            if ch.r > 0 {
                factor *= Float::with_val(wp, (Float::with_val(wp, &p * 4u32) * m).pow(ch.r));
            }
            let value = Float::with_val(prec, total[li][m as usize].value().real() * &factor);
            per_m.push(TruncatedSum {
                value: Complex::with_val(prec, (value, 0)),
                tail_bound: tail_bound(tag, *ch, m, norm_bound, prec)?,
                norm_bound,
            });
        }
        out.push(per_m);
    }
    Ok(out)
}

/// A single `F_{W,j,r}(tau0, m)`.
pub fn f_series_coeff(
    weight: u32,
    j: u32,
    r: u32,
    tag: PointTag,
    m: u64,
    norm_bound: u64,
    prec: u32,
) -> Result<TruncatedSum> {
    let mut all = f_series_batch(tag, &[Channel::new(weight, j, r)], m, norm_bound, prec)?;
    Ok(all.remove(0).remove(m as usize))
}

/// Sum over all coprime `(c, d)` with `|c tau + d|^2 <= height_bound` of
/// `(|c tau + d|^2 / v)^j (2 pi i m)^r (c tau + d)^{-W} e^{-2 pi i m M tau}`.
pub fn general_coeff_sum(
    weight: u32,
    point: &EllipticPoint,
    j: u32,
    r: u32,
    m: u64,
    height_bound: u64,
    prec: u32,
) -> Result<TruncatedSum> {
    check_precision(prec)?;
    Channel::new(weight, j, r).check()?;
    let wp = prec + GUARD_BITS + 16;
    let tau = Complex::with_val(wp, &point.tau);
    let u = tau.real().clone();
    let v = tau.imag().clone();
    check_norm_bound(height_bound, m, &v)?;
    let h = Float::with_val(wp, height_bound);
    let (uf, vf) = (u.to_f64(), v.to_f64());
    let hf = height_bound as f64;
    let cmax = (hf.sqrt() / vf).floor() as i64 + 1;
    let two_pi_i_m = Complex::with_val(wp, (0, pi(wp) * 2u32 * m));
    let factor_r = numeric::cpow(&two_pi_i_m, r as i64, wp);
    let mut acc = Accumulator::new(wp);
    for c in -cmax..=cmax {
        let disc = hf - vf * vf * (c * c) as f64;
        if disc < -1.0 {
            continue;
        }
        let half = disc.max(0.0).sqrt();
        let lo = (-uf * c as f64 - half).floor() as i64 - 1;
        let hi = (-uf * c as f64 + half).ceil() as i64 + 1;
        for d in lo..=hi {
            if gcd(c, d) != 1 {
                continue;
            }
            let den = Complex::with_val(wp, &tau * c) + d;
            let q = numeric::norm_sq(&den);
            if q > h {
                continue;
            }
            let (a, b) = complete_unimodular(c, d)?;
            let bk = b_kernel_with(weight, (a, b, c, d), &tau, m as i64, wp);
            let scale = Float::with_val(wp, Float::with_val(wp, &q / &v).pow(j));
            acc.add(&Complex::with_val(wp, bk * scale));
        }
    }
    let value = Complex::with_val(prec, acc.value() * &factor_r);

    // Pairs with |c tau + d|^2 <= x number at most (pi/v)(sqrt x + delta)^2.
    let tr = numeric::norm_sq(&tau) + 1u32;
    let disc = Float::with_val(wp, tr.square_ref()) - Float::with_val(wp, v.square_ref()) * 4u32;
    let lmax = (Float::with_val(wp, &tr + disc.sqrt()) / 2u32).sqrt();
    let delta = lmax * Float::with_val(wp, 0.5f64).sqrt();
    let p = pi(wp);
    let c1 = Float::with_val(wp, &p / &v);
    let sigma = weight / 2 - j;
    let mut t = power_tail(sigma, &c1, &delta, height_bound, wp);
    t *= Float::with_val(wp, (&v).pow(-(j as i32)));
    t *= Float::with_val(wp, (Float::with_val(wp, &p * 2u32) * m).pow(r));
    t *= ((Float::with_val(wp, &p * 2u32) * m) * &v / height_bound).exp();
    Ok(TruncatedSum { value, tail_bound: Float::with_val(prec, t), norm_bound: height_bound })
}

/// Fourier coefficients `0..=m_max` of the form with basis representation `rep`.
pub fn assemble_coefficients(
    rep: &BasisRepresentation,
    m_max: u64,
    norm_bound: u64,
    prec: u32,
) -> Result<Vec<TruncatedSum>> {
    check_precision(prec)?;
    rep.check_admissible()?;
    let wp = prec + GUARD_BITS;
    let k = rep.k;
    let mut out: Vec<TruncatedSum> = (0..=m_max).map(|_| TruncatedSum::zero(wp, norm_bound)).collect();
    for tag in [PointTag::I, PointTag::Rho] {
        let terms: Vec<_> = rep.terms.iter().filter(|t| t.point.tag == tag).collect();
        if terms.is_empty() {
            continue;
        }
        let mut channels = Vec::new();
        let mut weights = Vec::new();
        let omega = tag.omega();
        for t in &terms {
            let exp = raising_expansion(k, t.n);
            for rt in &exp.terms {
                channels.push(Channel::new(2 * k + 2 * t.n, rt.j, rt.derivative_order));
                let w = Complex::with_val(wp, &t.coeff * Float::with_val(wp, &rt.coeff)) * omega;
                weights.push(w);
            }
        }
        let sums = f_series_batch(tag, &channels, m_max, norm_bound, wp)?;
        for (ci, w) in weights.iter().enumerate() {
            for m in 0..=m_max as usize {
                out[m].add_scaled(w, &sums[ci][m]);
            }
        }
    }
    for t in rep.terms.iter().filter(|t| t.point.tag == PointTag::Generic) {
        let exp = raising_expansion(k, t.n);
        for rt in &exp.terms {
            let two = Float::with_val(wp, 2);
            let mi = numeric::imag_pow(wp, &Float::with_val(wp, -two), rt.minus_two_i_power);
            let w = Complex::with_val(wp, &t.coeff * Float::with_val(wp, &rt.coeff)) * mi / 2u32;
            for m in 0..=m_max {
                let s = general_coeff_sum(2 * k + 2 * t.n, &t.point, rt.j, rt.derivative_order, m, norm_bound, wp)?;
                out[m as usize].add_scaled(&w, &s);
            }
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

pub fn assemble_coefficient(rep: &BasisRepresentation, m: u64, norm_bound: u64, prec: u32) -> Result<TruncatedSum> {
    Ok(assemble_coefficients(rep, m, norm_bound, prec)?.remove(m as usize))
}

/// Both sides of a truncated lattice-sum identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: String,
    pub rhs: String,
    pub abs_err: String,
    pub tail_bound: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityValues {
    pub lhs: Float,
    pub rhs: Float,
    pub abs_err: Float,
    pub tail_bound: Float,
}

impl IdentityValues {
    pub fn to_strings(&self) -> IdentityCheck {
        IdentityCheck {
            lhs: numeric::to_decimal(&self.lhs),
            rhs: numeric::to_decimal(&self.rhs),
            abs_err: numeric::to_decimal(&self.abs_err),
            tail_bound: numeric::to_decimal(&self.tail_bound),
        }
    }
}

/// `sum_b (c32 C_32(b) - 4 pi^2 E4(i) C_28(b)) / N(b)^13` over Gaussian ideals
/// against `rhs`.
fn m0_identity(c32: u32, rhs: Float, norm_bound: u64, prec: u32) -> Result<IdentityValues> {
    let wp = prec + GUARD_BITS;
    let sums = f_series_batch(PointTag::I, &[Channel::new(32, 3, 0), Channel::new(28, 1, 0)], 0, norm_bound, wp)?;
    let p = pi(wp);
    let e4 = closed_value(4, PointTag::I, wp)?;
    let w28 = Float::with_val(wp, p.square_ref()) * 4u32 * &e4;
    let s32 = sums[0][0].value.real().clone();
    let s28 = sums[1][0].value.real().clone();
    let lhs = Float::with_val(wp, &s32 * c32) - Float::with_val(wp, &s28 * &w28);
    let tail = Float::with_val(wp, &sums[0][0].tail_bound * c32) + Float::with_val(wp, &sums[1][0].tail_bound * &w28);
    let abs_err = Float::with_val(wp, &lhs - &rhs).abs();
    Ok(IdentityValues {
        lhs: Float::with_val(prec, lhs),
        rhs: Float::with_val(prec, rhs),
        abs_err: Float::with_val(prec, abs_err),
        tail_bound: Float::with_val(prec, tail),
    })
}

/// `sum (9 C_32 - 4 pi^2 E4(i) C_28)/N^13` against `27 pi^3 E4(i)^8 / 182`.
pub fn identity_check_m0(norm_bound: u64, prec: u32) -> Result<IdentityValues> {
    check_precision(prec)?;
    let wp = prec + GUARD_BITS;
    let e4 = closed_value(4, PointTag::I, wp)?;
    let rhs = Float::with_val(wp, pi(wp).pow(3u32)) * e4.pow(8u32) * 27u32 / 182u32;
    m0_identity(9, rhs, norm_bound, prec)
}

/// The identity forced by the constant term of `1/E6^4` being 1:
/// `sum (243 C_32 - 4 pi^2 E4(i) C_28)/N^13 = 27 pi^3 E4(i)^8 / 91`.
pub fn constant_term_identity(norm_bound: u64, prec: u32) -> Result<IdentityValues> {
    check_precision(prec)?;
    let wp = prec + GUARD_BITS;
    let e4 = closed_value(4, PointTag::I, wp)?;
    let rhs = Float::with_val(wp, pi(wp).pow(3u32)) * e4.pow(8u32) * 27u32 / 91u32;
    m0_identity(243, rhs, norm_bound, prec)
}
