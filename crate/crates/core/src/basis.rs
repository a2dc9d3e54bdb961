//! Decomposition of principal parts into raised Poincaré-type basis elements.
//!
//! The basis element `R^n[H_{2k}](tau0, .)` of weight `2 - 2k + 2n` has a pole
//! of order `n + 1` at `tau0` and is nonzero only when `k + n = 0 mod omega`.
//! Its principal part is
//!
//! ```text
//! eps n! sum_{j=0}^{n} (2k+n-1)! / ((2k-1+j)! (n-j)!) (2i)^j / v0^{n-j} (z - tau0)^{-(j+1)}
//! ```
//!
//! with `eps = i omega / (2 pi)`. Solving for a form's representation peels
//! off the highest pole order first.

use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::elliptic::{principal_part, zero_tolerance, PrincipalPart};
use crate::error::{Error, Result};
use crate::expr::FormExpression;
use crate::numeric::{self, check_precision, pi, GUARD_BITS};
use crate::special_values::{EllipticPoint, PointTag};

#[derive(Debug, Clone, PartialEq)]
pub struct BasisTerm {
    pub point: EllipticPoint,
    pub n: u32,
    pub coeff: Complex,
}

/// `sum a (R^n H_{2k})(tau0, .)` over the listed terms.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisRepresentation {
    pub k: u32,
    pub terms: Vec<BasisTerm>,
}

impl BasisRepresentation {
    pub fn new(k: u32) -> Self {
        BasisRepresentation { k, terms: Vec::new() }
    }

    /// Every term must satisfy `k + n = 0 mod omega` at its point.
    pub fn check_admissible(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("basis weight parameter k = {} must be at least 2", self.k)));
        }
        for t in &self.terms {
            let omega = t.point.omega;
            if (self.k + t.n) % omega != 0 {
                return Err(Error::Congruence {
                    point: t.point.tag.to_string(),
                    order: t.n + 1,
                    k: self.k as i64,
                    omega,
                });
            }
        }
        Ok(())
    }

    pub fn merge(&self, other: &BasisRepresentation) -> Result<BasisRepresentation> {
        if self.k != other.k {
            return Err(Error::MixedWeights(2 - 2 * self.k as i64, 2 - 2 * other.k as i64));
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn coeff(&self, tag: PointTag, n: u32) -> Option<&Complex> {
        self.terms.iter().find(|t| t.point.tag == tag && t.n == n).map(|t| &t.coeff)
    }

    pub fn scaled(&self, c: &Complex) -> BasisRepresentation {
        let mut out = self.clone();
        for t in &mut out.terms {
            let prec = t.coeff.prec().0;
            t.coeff = Complex::with_val(prec, &t.coeff * c);
        }
        out
    }
}

/// `eps_{2k}(tau0)`: `i omega / (2 pi)` when `k = 0 mod omega`, else zero.
pub fn epsilon_tilde(k: u32, point: &EllipticPoint, prec: u32) -> Complex {
    let omega = point.omega;
    if k % omega != 0 {
        return Complex::new(prec);
    }
    let im = Float::with_val(prec, omega) / (pi(prec) * 2u32);
    Complex::with_val(prec, (0, im))
}

/// Principal part of `R^n[H_{2k}](tau0, .)`.
pub fn basis_principal_part(k: u32, n: u32, point: &EllipticPoint, prec: u32) -> PrincipalPart {
    let wp = prec + GUARD_BITS;
    let p = point.with_prec(wp);
    let eps = epsilon_tilde(k + n, &p, wp);
    let mut pp = PrincipalPart::empty(&point.with_prec(prec));
    if eps.is_zero() {
        return pp;
    }
    let v = p.im();
    let two = Float::with_val(wp, 2);
    for j in 0..=n {
        let num = numeric::factorial(n) * numeric::factorial(2 * k + n - 1);
        let den = numeric::factorial(2 * k - 1 + j) * numeric::factorial(n - j);
        let q = Float::with_val(wp, &Rational::from((num, den)));
        let vpow = Float::with_val(wp, (&v).pow(n - j));
        let c = numeric::imag_pow(wp, &two, j) * q / vpow * &eps;
        pp.coeffs.insert(j + 1, Complex::with_val(prec, c));
    }
    pp
}

/// Greedy decomposition of principal parts at distinct points.
pub fn solve_basis(parts: &[PrincipalPart], k: u32, prec: u32) -> Result<BasisRepresentation> {
    check_precision(prec)?;
    let mut rep = BasisRepresentation::new(k);
    for part in parts {
        let wp = prec + GUARD_BITS;
        let point = part.point.with_prec(wp);
        let omega = point.omega;
        let tol = zero_tolerance(&part.scale(), prec);
        let mut residual = part.clone();
        let lead = part.order();
        for order in (1..=lead).rev() {
            let c = residual.get(order);
            if c.is_zero() || numeric::abs(&c) <= tol {
                continue;
            }
            let n = order - 1;
            if (k + n) % omega != 0 {
                let tag = point.tag.to_string();
                return Err(if order == lead {
                    Error::Congruence { point: tag, order, k: k as i64, omega }
                } else {
                    Error::InconsistentTails { point: tag, order }
                });
            }
            let basis = basis_principal_part(k, n, &point, wp);
            let a = Complex::with_val(wp, &c / &basis.get(order));
            let neg = Complex::with_val(wp, -&a);
            residual = residual.add(&basis.scaled(&neg));
            residual.coeffs.remove(&order);
            rep.terms.push(BasisTerm { point: part.point.with_prec(prec), n, coeff: Complex::with_val(prec, a) });
        }
    }
    Ok(rep)
}

/// `k` with `weight = 2 - 2k`.
pub fn k_from_weight(weight: i64) -> Result<u32> {
    if weight > -2 || weight % 2 != 0 {
        return Err(Error::InvalidArgument(format!("weight {weight} is not of the form 2 - 2k with k >= 2")));
    }
    Ok(((2 - weight) / 2) as u32)
}

/// Principal parts of `expr` at `i` and `rho`.
pub fn elliptic_principal_parts(expr: &FormExpression, prec: u32) -> Result<Vec<PrincipalPart>> {
    [EllipticPoint::i(prec), EllipticPoint::rho(prec)]
        .iter()
        .map(|p| principal_part(expr, p, prec))
        .collect()
}

/// Representation of a form whose poles lie on the orbits of `i` and `rho`.
pub fn representation_of(expr: &FormExpression, prec: u32) -> Result<BasisRepresentation> {
    let k = k_from_weight(expr.weight())?;
    solve_basis(&elliptic_principal_parts(expr, prec)?, k, prec)
}

/// `a = residue / eps` at each elliptic point, for forms with at most simple poles.
pub fn simple_pole_rep(expr: &FormExpression, prec: u32) -> Result<BasisRepresentation> {
    let k = k_from_weight(expr.weight())?;
    let mut rep = BasisRepresentation::new(k);
    for pp in elliptic_principal_parts(expr, prec)? {
        let order = pp.order();
        if order > 1 {
            return Err(Error::NotSimplePole { point: pp.point.tag.to_string(), order });
        }
        if order == 0 {
            continue;
        }
        let eps = epsilon_tilde(k, &pp.point, prec);
        if eps.is_zero() {
            return Err(Error::VanishingNormalizer { point: pp.point.tag.to_string(), weight: 2 * k as i64 });
        }
        let a = Complex::with_val(prec, &pp.get(1) / &eps);
        rep.terms.push(BasisTerm { point: pp.point.clone(), n: 0, coeff: a });
    }
    Ok(rep)
}
