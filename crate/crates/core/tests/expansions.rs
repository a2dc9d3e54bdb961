mod common;

use common::*;
use meroform::basis::{
    basis_principal_part, epsilon_tilde, representation_of, simple_pole_rep, solve_basis,
};
use meroform::elliptic::{elliptic_coefficients, laurent_at, nonconforming_orders, principal_part};
use meroform::json::BasisRepresentationJson;
use meroform::numeric::{self, pi};
use meroform::special_values::{closed_value, EllipticPoint, PointTag};
use meroform::{Error, PrincipalPart};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};

fn c(re: f64, im: f64) -> Complex {
    Complex::with_val(PREC, (re, im))
}

fn i_times(z: &Complex, x: i64) -> Complex {
    Complex::with_val(PREC, z * Complex::with_val(PREC, (0, x)))
}

#[test]
fn quadruple_pole_of_inverse_e6_fourth() {
    let s = laurent_at(&expr("1/E6^4"), &EllipticPoint::i(PREC), 0, PREC).unwrap();
    assert_eq!(s.lowest, -4);
    let alpha = s.coeff(-4);
    // alpha = 1/E6'(i)^4 with E6'(i) = -pi i E4(i)^2
    let e4 = e4i(PREC);
    let want = Float::with_val(PREC, 1) / (pi_pow(PREC, 4) * Float::with_val(PREC, (&e4).pow(8u32)));
    assert!(rel(&alpha, &real(PREC, want)) < 1e-70);
    assert!(rel(&s.coeff(-3), &i_times(&alpha, -14)) < 1e-70);
    let gamma = s.coeff(-2);
    let delta = s.coeff(-1);
    let want_delta = Complex::with_val(PREC, i_times(&gamma, -13) + i_times(&alpha, -819));
    assert!(rel(&delta, &want_delta) < 1e-60);
}

#[test]
fn leading_elliptic_coefficient() {
    let s = laurent_at(&expr("1/E6^4"), &EllipticPoint::i(PREC), 0, PREC).unwrap();
    let b = elliptic_coefficients(&s, -24);
    let (m, lead) = &b[0];
    assert_eq!(*m, -4);
    let scaled = Complex::with_val(PREC, lead * Float::with_val(PREC, Float::i_exp(1, 28)));
    assert!(rel(&scaled, &s.coeff(-4)) < 1e-70);
}

#[test]
fn elliptic_expansions_obey_the_congruence() {
    for (form, weight) in [("1/E6^4", -24i64), ("1/E10", -10), ("1/E4", -4), ("E4", 4), ("E6^2/E4^3", 0)] {
        for p in [EllipticPoint::i(PREC), EllipticPoint::rho(PREC)] {
            let s = laurent_at(&expr(form), &p, 10, PREC).unwrap();
            assert!(nonconforming_orders(&s, weight).is_empty(), "{form} at {}", p.tag);
        }
    }
}

#[test]
fn quasimodular_products_break_the_congruence() {
    let s = laurent_at(&expr("E2/E6^4"), &EllipticPoint::i(PREC), 6, PREC).unwrap();
    assert!(!nonconforming_orders(&s, -22).is_empty());
}

#[test]
fn raw_laurent_orders_need_not_satisfy_the_congruence() {
    // In z - i the third-order coefficient is nonzero although 13 + 2 is odd;
    // only the leading order and the elliptic expansion are constrained.
    let pp = principal_part(&expr("1/E6^4"), &EllipticPoint::i(PREC), PREC).unwrap();
    assert_eq!(pp.order(), 4);
    assert!(numeric::abs(&pp.get(3)) > 1e-10);
}

#[test]
fn inverse_e10_representation() {
    let rep = representation_of(&expr("1/E10"), PREC).unwrap();
    assert_eq!(rep.k, 6);
    assert_eq!(rep.terms.len(), 2);
    let e4 = e4i(PREC);
    let a1 = Float::with_val(PREC, (&e4).pow(3u32)).recip();
    let e6 = closed_value(6, PointTag::Rho, PREC).unwrap();
    let a2 = Float::with_val(PREC, e6.square_ref()).recip();
    assert!(rel(rep.coeff(PointTag::I, 0).unwrap(), &real(PREC, a1)) < 1e-70);
    assert!(rel(rep.coeff(PointTag::Rho, 0).unwrap(), &real(PREC, a2)) < 1e-70);
    assert_eq!(simple_pole_rep(&expr("1/E10"), PREC).unwrap().terms.len(), 2);
}

#[test]
fn inverse_e4_representation() {
    let rep = representation_of(&expr("1/E4"), PREC).unwrap();
    assert_eq!(rep.k, 3);
    assert_eq!(rep.terms.len(), 1);
    let e6 = closed_value(6, PointTag::Rho, PREC).unwrap();
    assert!(rel(rep.coeff(PointTag::Rho, 0).unwrap(), &real(PREC, e6.recip())) < 1e-70);
}

#[test]
fn simple_pole_path_rejects_higher_poles() {
    assert!(matches!(simple_pole_rep(&expr("1/E6^4"), PREC), Err(Error::NotSimplePole { order: 4, .. })));
}

#[test]
fn epsilon_values() {
    let i = EllipticPoint::i(PREC);
    let rho = EllipticPoint::rho(PREC);
    let want = Complex::with_val(PREC, (0, Float::with_val(PREC, pi(PREC).recip_ref())));
    assert!(rel(&epsilon_tilde(6, &i, PREC), &want) < 1e-70);
    assert!(epsilon_tilde(7, &i, PREC).is_zero());
    let want = Complex::with_val(PREC, (0, Float::with_val(PREC, 3) / (pi(PREC) * 2u32)));
    assert!(rel(&epsilon_tilde(3, &rho, PREC), &want) < 1e-70);
    assert!(epsilon_tilde(4, &rho, PREC).is_zero());
}

#[test]
fn basis_principal_part_examples() {
    let i = EllipticPoint::i(PREC);
    assert!(basis_principal_part(13, 2, &i, PREC).coeffs.is_empty());
    let simple = basis_principal_part(6, 0, &i, PREC);
    assert_eq!(simple.order(), 1);
    assert!(rel(&simple.get(1), &epsilon_tilde(6, &i, PREC)) < 1e-70);
    let top = basis_principal_part(13, 3, &i, PREC).get(4);
    let want = Float::with_val(PREC, 48) / pi(PREC);
    assert!(rel(&top, &real(PREC, want)) < 1e-70);
}

#[test]
fn fourth_order_pole_closed_form() {
    // For k = 13 at i, a quadruple pole with coefficients alpha, gamma forces
    // beta = -14 i alpha, delta = -13 i gamma - 819 i alpha, and the basis
    // coefficients alpha pi / 48 and -(pi/2)(gamma + 27*14 alpha / 4).
    let i = EllipticPoint::i(PREC);
    let p = pi(PREC);
    for (alpha, gamma) in [(c(1.0, 0.0), c(0.0, 0.0)), (c(0.3, -1.2), c(2.5, 0.7)), (c(-4.0, 0.5), c(0.0, -3.0))] {
        let a3 = Complex::with_val(PREC, &alpha * &p) / 48u32;
        let inner = Complex::with_val(PREC, &alpha * 378u32) / 4u32 + &gamma;
        let a1 = Complex::with_val(PREC, -(inner * &p)) / 2u32;
        let pp = basis_principal_part(13, 3, &i, PREC)
            .scaled(&a3)
            .add(&basis_principal_part(13, 1, &i, PREC).scaled(&a1));
        assert!(rel(&pp.get(4), &alpha) < 1e-70);
        assert!(rel(&pp.get(3), &i_times(&alpha, -14)) < 1e-70);
        let g = pp.get(2);
        assert!(numeric::abs(&Complex::with_val(PREC, &g - &gamma)) < 1e-60);
        let want_delta = Complex::with_val(PREC, i_times(&gamma, -13) + i_times(&alpha, -819));
        assert!(numeric::abs(&Complex::with_val(PREC, pp.get(1) - want_delta)) < 1e-60);

        let rep = solve_basis(&[pp], 13, PREC).unwrap();
        assert!(rel(rep.coeff(PointTag::I, 3).unwrap(), &a3) < 1e-60);
        assert!(rel(rep.coeff(PointTag::I, 1).unwrap(), &a1) < 1e-60);
    }
}

#[test]
fn inconsistent_tails_are_rejected() {
    let mut pp = principal_part(&expr("1/E6^4"), &EllipticPoint::i(PREC), PREC).unwrap();
    let beta = pp.get(3);
    pp.coeffs.insert(3, Complex::with_val(PREC, &beta * 1.001));
    assert!(matches!(solve_basis(&[pp], 13, PREC), Err(Error::InconsistentTails { order: 3, .. })));
}

#[test]
fn congruence_gate() {
    // A simple pole at i in weight 2 - 2*7 has no basis element.
    let mut pp = PrincipalPart::empty(&EllipticPoint::i(PREC));
    pp.coeffs.insert(1, c(1.0, 0.0));
    assert!(matches!(solve_basis(&[pp], 7, PREC), Err(Error::Congruence { order: 1, .. })));
    let mut pp = PrincipalPart::empty(&EllipticPoint::rho(PREC));
    pp.coeffs.insert(2, c(0.0, 1.0));
    pp.coeffs.insert(1, c(3.0, 1.0));
    assert!(matches!(solve_basis(&[pp], 6, PREC), Err(Error::Congruence { order: 2, .. })));
}

#[test]
fn laurent_dee_matches_derivative() {
    let p = EllipticPoint::rho(PREC);
    let a = laurent_at(&expr("D(1/E4)"), &p, 4, PREC).unwrap();
    let b = laurent_at(&expr("1/E4"), &p, 5, PREC).unwrap().derivative();
    let two_pi_i = Complex::with_val(PREC, (0, pi(PREC) * 2u32));
    for n in a.lowest..=4 {
        let want = Complex::with_val(PREC, b.coeff(n) / &two_pi_i);
        let d = numeric::abs(&Complex::with_val(PREC, a.coeff(n) - &want));
        assert!(d <= Float::with_val(PREC, numeric::abs(&want) * 1e-60) + 1e-60, "order {n}");
    }
}

#[test]
fn product_with_inverse_is_one() {
    let p = EllipticPoint::i(PREC);
    let s = laurent_at(&expr("E10 * (1/E10)"), &p, 6, PREC).unwrap();
    for n in s.lowest..=6 {
        let want = if n == 0 { 1.0 } else { 0.0 };
        let d = numeric::abs(&Complex::with_val(PREC, s.coeff(n) - want));
        assert!(d < 1e-60, "order {n}");
    }
}

fn admissible(k: u32, omega: u32) -> Vec<u32> {
    (0..=4).filter(|n| (k + n) % omega == 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn solve_round_trip(k in 2u32..=15, seeds in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, any::<bool>()), 10)) {
        let mut parts = Vec::new();
        let mut want = Vec::new();
        let mut it = seeds.into_iter();
        for p in [EllipticPoint::i(PREC), EllipticPoint::rho(PREC)] {
            let mut pp = PrincipalPart::empty(&p);
            for n in admissible(k, p.omega) {
                let (re, im, keep) = it.next().unwrap();
                if !keep {
                    continue;
                }
                let a = c(re + 1.5, im);
                pp = pp.add(&basis_principal_part(k, n, &p, PREC).scaled(&a));
                want.push((p.tag, n, a));
            }
            parts.push(pp);
        }
        let rep = solve_basis(&parts, k, PREC).unwrap();
        prop_assert_eq!(rep.terms.len(), want.len());
        let tol = two_pow_neg(64, PREC as i32 - 32).to_f64();
        for (tag, n, a) in &want {
            prop_assert!(rel(rep.coeff(*tag, *n).unwrap(), a) <= tol);
        }
        let json = serde_json::to_string(&BasisRepresentationJson::from_rep(&rep)).unwrap();
        let back: BasisRepresentationJson = serde_json::from_str(&json).unwrap();
        let back = back.to_rep(PREC).unwrap();
        for (t, u) in rep.terms.iter().zip(&back.terms) {
            prop_assert!(rel(&u.coeff, &t.coeff) < 1e-70);
        }
    }
}
