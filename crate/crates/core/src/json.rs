//! JSON views of the numerical types. Numbers are decimal strings.

use std::collections::BTreeMap;

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::basis::{BasisRepresentation, BasisTerm};
use crate::coeff_engine::TruncatedSum;
use crate::elliptic::{LaurentSeries, PrincipalPart};
use crate::error::{Error, Result};
use crate::numeric::{parse_real, to_decimal};
use crate::special_values::{EllipticPoint, PointTag};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: String,
    pub im: String,
}

impl ComplexJson {
    pub fn from_complex(z: &Complex) -> Self {
        ComplexJson { re: to_decimal(z.real()), im: to_decimal(z.imag()) }
    }

    pub fn to_complex(&self, prec: u32) -> Result<Complex> {
        Ok(Complex::with_val(prec, (parse_real(prec, &self.re)?, parse_real(prec, &self.im)?)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub tag: PointTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<ComplexJson>,
}

impl PointJson {
    pub fn from_point(p: &EllipticPoint) -> Self {
        let tau = (p.tag == PointTag::Generic).then(|| ComplexJson::from_complex(&p.tau));
        PointJson { tag: p.tag, tau }
    }

    pub fn to_point(&self, prec: u32) -> Result<EllipticPoint> {
        match (self.tag, &self.tau) {
            (PointTag::Generic, Some(t)) => EllipticPoint::generic(t.to_complex(prec)?),
            (PointTag::Generic, None) => Err(Error::InvalidArgument("generic point without tau".into())),
            (tag, _) => EllipticPoint::from_tag(tag, prec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalPartJson {
    pub point: PointJson,
    /// Coefficient of `(z - tau0)^{-n}` keyed by `n`.
    pub orders: BTreeMap<u32, ComplexJson>,
}

impl PrincipalPartJson {
    pub fn from_part(pp: &PrincipalPart) -> Self {
        PrincipalPartJson {
            point: PointJson::from_point(&pp.point),
            orders: pp.coeffs.iter().map(|(n, c)| (*n, ComplexJson::from_complex(c))).collect(),
        }
    }

    pub fn to_part(&self, prec: u32) -> Result<PrincipalPart> {
        let mut pp = PrincipalPart::empty(&self.point.to_point(prec)?);
        for (n, c) in &self.orders {
            if *n == 0 {
                return Err(Error::InvalidArgument("principal part orders start at 1".into()));
            }
            pp.coeffs.insert(*n, c.to_complex(prec)?);
        }
        Ok(pp)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisInputJson {
    pub k: u32,
    pub principal_parts: Vec<PrincipalPartJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisTermJson {
    pub point: PointJson,
    pub n: u32,
    pub coeff: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisRepresentationJson {
    pub k: u32,
    pub terms: Vec<BasisTermJson>,
}

impl BasisRepresentationJson {
    pub fn from_rep(rep: &BasisRepresentation) -> Self {
        BasisRepresentationJson {
            k: rep.k,
            terms: rep
                .terms
                .iter()
                .map(|t| BasisTermJson {
                    point: PointJson::from_point(&t.point),
                    n: t.n,
                    coeff: ComplexJson::from_complex(&t.coeff),
                })
                .collect(),
        }
    }

    pub fn to_rep(&self, prec: u32) -> Result<BasisRepresentation> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(BasisTerm { point: t.point.to_point(prec)?, n: t.n, coeff: t.coeff.to_complex(prec)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(BasisRepresentation { k: self.k, terms })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentTermJson {
    pub order: i64,
    pub re: String,
    pub im: String,
}

pub fn laurent_json(s: &LaurentSeries) -> Vec<LaurentTermJson> {
    (s.lowest..=s.top())
        .map(|n| {
            let c = s.coeff(n);
            LaurentTermJson { order: n, re: to_decimal(c.real()), im: to_decimal(c.imag()) }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSumJson {
    pub value: ComplexJson,
    pub tail_bound: String,
    pub norm_bound: u64,
}

impl TruncatedSumJson {
    pub fn from_sum(s: &TruncatedSum) -> Self {
        TruncatedSumJson {
            value: ComplexJson::from_complex(&s.value),
            tail_bound: to_decimal(&s.tail_bound),
            norm_bound: s.norm_bound,
        }
    }
}

pub fn float_json(x: &Float) -> String {
    to_decimal(x)
}
