mod common;

use common::*;
use meroform::basis::{representation_of, simple_pole_rep};
use meroform::coeff_engine::{
    assemble_coefficient, assemble_coefficients, constant_term_identity, f_series_batch, f_series_coeff,
    general_coeff_sum, identity_check_m0, Channel,
};
use meroform::numeric::{self, pi};
use meroform::quasi::{quasi_coeff_general, quasi_coeffs_general, simple_pole_quasi_coeffs, QuasiExpansion};
use meroform::special_values::{EllipticPoint, PointTag};
use meroform::{BasisRepresentation, BasisTerm, Error};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

const B: u64 = 3000;

/// `|value - q| <= tail + 2^{-P/2} |q|`.
fn within_tail(s: &meroform::TruncatedSum, q: &Rational) -> bool {
    let exact = Complex::with_val(PREC, (Float::with_val(PREC, q), 0));
    let d = numeric::abs(&Complex::with_val(PREC, &s.value - &exact));
    let slack = Float::with_val(PREC, &s.tail_bound) + numeric::abs(&exact) * two_pow_neg(PREC, PREC as i32 / 2);
    d <= slack
}

#[test]
fn inverse_e10_within_tail_bounds() {
    let rep = representation_of(&expr("1/E10"), PREC).unwrap();
    let sums = assemble_coefficients(&rep, 6, B, PREC).unwrap();
    for (m, (s, q)) in sums.iter().zip(oracle("1/E10", 6)).enumerate() {
        assert!(within_tail(s, &q), "m = {m}");
        // real combinations at i and rho give real coefficients
        assert!(s.value.imag().clone().abs() <= Float::with_val(PREC, &s.tail_bound) + 1e-60);
    }
}

#[test]
fn inverse_e6_fourth_within_tail_bounds() {
    let rep = representation_of(&expr("1/E6^4"), PREC).unwrap();
    let sums = assemble_coefficients(&rep, 5, B, PREC).unwrap();
    for (m, (s, q)) in sums.iter().zip(oracle("1/E6^4", 5)).enumerate() {
        assert!(within_tail(s, &q), "m = {m}");
    }
}

#[test]
fn single_coefficient_matches_batch() {
    let rep = representation_of(&expr("1/E4"), PREC).unwrap();
    let all = assemble_coefficients(&rep, 4, B, PREC).unwrap();
    let one = assemble_coefficient(&rep, 4, B, PREC).unwrap();
    assert_eq!(one.value, all[4].value);
}

#[test]
fn generic_point_path_reproduces_elliptic_path() {
    // The pole at i, treated as a generic point, summed over all coprime pairs.
    let rep = representation_of(&expr("1/E10"), PREC).unwrap();
    let mut generic = BasisRepresentation::new(rep.k);
    for t in &rep.terms {
        let point = if t.point.tag == PointTag::I {
            EllipticPoint::generic(Complex::with_val(PREC, (0, 1))).unwrap()
        } else {
            t.point.clone()
        };
        generic.terms.push(BasisTerm { point, n: t.n, coeff: t.coeff.clone() });
    }
    let bound = 1500;
    let a = assemble_coefficients(&rep, 3, bound, PREC).unwrap();
    let g = assemble_coefficients(&generic, 3, bound, PREC).unwrap();
    for (m, q) in oracle("1/E10", 3).iter().enumerate() {
        assert!(within_tail(&g[m], q), "m = {m}");
        let d = numeric::abs(&Complex::with_val(PREC, &a[m].value - &g[m].value));
        assert!(d <= Float::with_val(PREC, &a[m].tail_bound + &g[m].tail_bound));
    }
}

#[test]
fn all_pairs_sum_is_four_ideal_sums_at_i() {
    let i = EllipticPoint::i(PREC);
    for (w, j, m) in [(12u32, 0u32, 0u64), (12, 1, 2), (16, 2, 3), (24, 0, 5)] {
        let all = general_coeff_sum(w, &i, j, 0, m, 2000, PREC).unwrap();
        let ideals = f_series_coeff(w, j, 0, PointTag::I, m, 2000, PREC).unwrap();
        let four = Complex::with_val(PREC, &ideals.value * 4u32);
        let d = numeric::abs(&Complex::with_val(PREC, &all.value - &four));
        let slack = Float::with_val(PREC, &all.tail_bound + Float::with_val(PREC, &ideals.tail_bound * 4u32));
        assert!(d <= slack, "W={w} j={j} m={m}");
    }
}

#[test]
fn derivative_channels_vanish_at_m0() {
    let s = f_series_coeff(24, 1, 2, PointTag::Rho, 0, 100, PREC).unwrap();
    assert!(s.value.is_zero());
    assert!(s.tail_bound.is_zero());
}

#[test]
fn constant_sum_stable_under_doubling() {
    let a = f_series_coeff(12, 0, 0, PointTag::I, 0, 1000, PREC).unwrap();
    let b = f_series_coeff(12, 0, 0, PointTag::I, 0, 2000, PREC).unwrap();
    let d = numeric::abs(&Complex::with_val(PREC, &a.value - &b.value));
    assert!(d <= a.tail_bound);
    assert!(a.tail_bound < 1e-10);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let channels = [Channel::new(12, 0, 0), Channel::new(24, 2, 1)];
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| f_series_batch(PointTag::I, &channels, 4, 4000, PREC).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn quasi_paths_agree_with_oracle() {
    let f = expr("1/E10");
    let rep = simple_pole_rep(&f, PREC).unwrap();
    for n in 0..=2u32 {
        let simple = simple_pole_quasi_coeffs(&rep, n, 4, B, PREC).unwrap();
        let general = quasi_coeffs_general(&f, n, 4, B, PREC).unwrap();
        let exact = oracle(&format!("E2^{n}/E10"), 4);
        for m in 0..=4 {
            assert!(within_tail(&simple[m], &exact[m]), "simple n={n} m={m}");
            assert!(within_tail(&general[m], &exact[m]), "general n={n} m={m}");
        }
    }
    let zeroth = simple_pole_quasi_coeffs(&rep, 0, 3, B, PREC).unwrap();
    let plain = assemble_coefficients(&rep, 3, B, PREC).unwrap();
    for (a, b) in zeroth.iter().zip(&plain) {
        assert!(rel(&a.value, &b.value) < 1e-60);
    }
}

#[test]
fn e2_squared_over_e6_fourth() {
    let sums = quasi_coeffs_general(&expr("1/E6^4"), 2, 4, B, PREC).unwrap();
    assert!(worst_rel(&sums, &oracle("E2^2/E6^4", 4)) < 1e-30);
    let one = quasi_coeff_general(&expr("1/E6^4"), 2, 4, B, PREC).unwrap();
    assert_eq!(one.value, sums[4].value);
}

#[test]
fn first_level_form() {
    // E2/E6^4 = (3/pi) F_1 + (i/(4 pi)) d/dz (1/E6^4), so
    // (3/pi) [F_1]_m = [E2/E6^4]_m + (m/2) [1/E6^4]_m.
    let q = QuasiExpansion::build(&expr("1/E6^4"), 1, PREC).unwrap();
    let f1 = assemble_coefficients(&q.levels[1], 5, B, PREC).unwrap();
    let a = oracle("E2/E6^4", 5);
    let b = oracle("1/E6^4", 5);
    let three_pi = Float::with_val(PREC, 3) / pi(PREC);
    for m in 0..=5usize {
        let want = Rational::from(&a[m] + Rational::from(&b[m] * Rational::from((m as i64, 2))));
        let got = Complex::with_val(PREC, &f1[m].value * &three_pi);
        assert!(rel_to_rational(&got, &want) < 1e-30, "m = {m}");
    }
    // Only even raise orders survive at i.
    let orders: Vec<u32> = q.levels[1].terms.iter().filter(|t| t.point.tag == PointTag::I).map(|t| t.n).collect();
    assert!(orders.iter().all(|n| n % 2 == 0));
    assert_eq!(q.fn_coeffs.len(), 2);
}

#[test]
fn constant_term_identity_holds() {
    let v = constant_term_identity(2000, PREC).unwrap();
    assert!(v.abs_err <= Float::with_val(PREC, &v.tail_bound + 1e-60));
    assert!(v.tail_bound < 1e-30);
}

#[test]
fn stated_identity_sides() {
    let v = identity_check_m0(500, PREC).unwrap();
    let e4 = e4i(PREC);
    let want = pi_pow(PREC, 3) * Float::with_val(PREC, e4.pow(8u32)) * 27u32 / 182u32;
    assert!(rel(&real(PREC, v.rhs.clone()), &real(PREC, want)) < 1e-70);
    assert_eq!(v.abs_err, Float::with_val(PREC, &v.lhs - &v.rhs).abs());
}

#[test]
fn invalid_requests() {
    assert!(matches!(f_series_coeff(12, 5, 0, PointTag::I, 0, 100, PREC), Err(Error::Nonconvergent { .. })));
    assert!(f_series_coeff(12, 0, 0, PointTag::I, 10, 50, PREC).is_err());
    assert!(f_series_coeff(12, 0, 0, PointTag::Generic, 0, 100, PREC).is_err());
    let rep = simple_pole_rep(&expr("1/E10"), PREC).unwrap();
    assert!(matches!(simple_pole_quasi_coeffs(&rep, 5, 0, 100, PREC), Err(Error::Nonconvergent { .. })));
    assert!(QuasiExpansion::build(&expr("1/E10"), 5, PREC).is_err());
    assert!(QuasiExpansion::build(&expr("E2/E10"), 1, PREC).is_err());
    let bad = BasisRepresentation {
        k: 7,
        terms: vec![BasisTerm { point: EllipticPoint::i(PREC), n: 0, coeff: Complex::with_val(PREC, (1, 0)) }],
    };
    assert!(matches!(assemble_coefficients(&bad, 0, 100, PREC), Err(Error::Congruence { .. })));
    assert!(assemble_coefficients(&BasisRepresentation::new(6), 2, 100, PREC).unwrap().iter().all(|s| s.value.is_zero()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tail_bound_covers_doubling(
        gaussian in any::<bool>(), t in 2u32..6, jfrac in 0.0f64..1.0, r in 0u32..3, m in 0u64..5, extra in 0u64..300,
    ) {
        let (tag, omega, v) = if gaussian { (PointTag::I, 2, 1.0) } else { (PointTag::Rho, 3, 0.866) };
        let w = 2 * omega * t;
        let j = ((w / 2 - 2) as f64 * jfrac) as u32;
        let least = ((4.0 * std::f64::consts::PI * m as f64 * v).ceil() as u64).max(16);
        let bound = least + extra;
        let a = f_series_coeff(w, j, r, tag, m, bound, PREC).unwrap();
        let b = f_series_coeff(w, j, r, tag, m, 2 * bound, PREC).unwrap();
        let d = numeric::abs(&Complex::with_val(PREC, &a.value - &b.value));
        prop_assert!(d <= a.tail_bound);
    }
}
