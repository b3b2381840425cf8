use super::*;
use crate::qfactorial::FactorSpec;
use crate::qring::ExponentVector;
use crate::summation::{monomial, weight, Domain, LinearForm, PochTerm, QuadForm};
use num_bigint::BigInt;

fn tag(s: &str) -> VarTag {
    VarTag::new(s).unwrap()
}

fn mono_series(c: i64, q: i64, vars: &[(VarTag, i64)], order: i64) -> Series {
    Series::from_terms([monomial(c, q, vars)], order)
}

#[test]
fn triple_product_coefficients() {
    let j = jtp_zseries(&Monomial::one(), 6);
    assert_eq!(z_extract(&j, 0).unwrap(), Series::one(6));
    assert_eq!(z_extract(&j, 1).unwrap(), mono_series(-1, 0, &[], 6));
    assert_eq!(z_extract(&j, 2).unwrap(), mono_series(1, 1, &[], 6));
    assert_eq!(z_extract(&j, -1).unwrap(), mono_series(-1, 1, &[], 6));
    let x = tag("x");
    let jx = jtp_zseries(&Monomial::var(x), 6);
    assert_eq!(z_extract(&jx, 2).unwrap(), mono_series(1, 1, &[(x, 2)], 6));
}

#[test]
fn triple_product_window_at_order_zero() {
    let j = jtp_zseries(&Monomial::one(), 0);
    assert_eq!(j.bounds(), (ZBound::Exact(0), ZBound::Exact(1)));
    assert!(z_extract(&j, 5).unwrap().is_zero());
}

#[test]
fn triple_product_window_property() {
    let order = 40;
    let j = jtp_zseries(&Monomial::one(), order);
    for n in -8i64..=8 {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(z_extract(&j, n).unwrap(), mono_series(sign, n * (n - 1) / 2, &[], order), "n={n}");
    }
}

#[test]
fn triple_product_matches_product_expansion() {
    // (q, z, q/z; q)_inf expanded as a product in z
    let z = tag("z");
    let order = 10;
    let p = ProductSpec::default()
        .with(FactorSpec::infinite(Monomial::q_pow(1), 1, 1))
        .with(FactorSpec::infinite(Monomial::var(z), 1, 1))
        .with(FactorSpec::infinite(monomial(1, 1, &[(z, -1)]), 1, 1));
    let got = product_zseries(&p, z, order, 6).unwrap();
    let j = jtp_zseries(&Monomial::one(), order);
    for k in -6..=6 {
        assert_eq!(got.coeff(k).unwrap(), j.coeff(k).unwrap(), "k={k}");
    }
}

#[test]
fn unit_and_inverse_powers() {
    let j = jtp_zseries(&Monomial::one(), 5);
    assert_eq!(zmul(&j, &ZSeries::unit(5)).unwrap(), j);
    assert_eq!(zmul(&ZSeries::z_power(1, 5), &ZSeries::z_power(-1, 5)).unwrap(), ZSeries::unit(5));
}

#[test]
fn delta_orthogonality() {
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            let c = zmul_extract(&ZSeries::z_power(a, 4), &ZSeries::z_power(b, 4), 0).unwrap();
            assert_eq!(!c.is_zero(), a + b == 0);
        }
    }
}

#[test]
fn outside_cut_window_is_an_error() {
    let z = ZSeries::unit(3).restrict(0, 0);
    assert!(z.coeff(2).is_ok());
    let cut = geometric(3);
    assert!(matches!(cut.coeff(4), Err(CtError::Window { .. })));
}

fn geometric(kmax: i64) -> ZSeries {
    let z = tag("z");
    let p = ProductSpec::default().with(FactorSpec::infinite(Monomial::var(z), 1, -1));
    product_zseries(&p, z, 6, kmax).unwrap()
}

#[test]
fn cut_reciprocal_product() {
    // 1/(z;q)_inf has [z^2] = 1/(q;q)_2
    let c = geometric(3);
    let s = c.coeff(2).unwrap();
    let v: Vec<i64> = s.q_coeffs(6).unwrap().iter().map(|c| i64::try_from(c).unwrap()).collect();
    assert_eq!(v, vec![1, 1, 2, 2, 3, 3, 4]);
}

#[test]
fn theta_pairing() {
    let (x, y) = (tag("x"), tag("y"));
    let order = 9;
    let c =
        zmul_extract(&jtp_zseries(&Monomial::var(x), order), &jtp_zseries(&Monomial::var(y).inv().unwrap(), order), 0)
            .unwrap();
    let e = |i: i64| ExponentVector::new(i * i, crate::qring::VarExps::from_pairs([(x, i), (y, i)]));
    for i in -3..=3 {
        assert_eq!(c.coeff(&e(i)).unwrap(), BigInt::from(1));
    }
    assert_eq!(c.len(), 7);
}

#[test]
fn bilateral_euler_at_zero() {
    // sum_k (-z)^k q^{binom(k,2)}/(q^2;q)_k against (q, z, q/z; q)_inf / (q^2, q^2/z; q)_inf
    let z = tag("z");
    let order = 8;
    let k = QuadForm::index(1, 0);
    let mut s = SumSpec::new(vec!["k".into()], vec![Domain::Integer]);
    s.form = k.binom(2).unwrap();
    s.signform = k.clone();
    s.varweights = vec![weight(z, 1)];
    s.denoms = vec![PochTerm::new(Monomial::q_pow(2), 1, LinearForm::index(1, 0))];
    let rhs = ProductSpec::default()
        .with(FactorSpec::infinite(Monomial::q_pow(1), 1, 1))
        .with(FactorSpec::infinite(Monomial::var(z), 1, 1))
        .with(FactorSpec::infinite(monomial(1, 1, &[(z, -1)]), 1, 1))
        .with(FactorSpec::infinite(Monomial::q_pow(2), 1, -1))
        .with(FactorSpec::infinite(monomial(1, 2, &[(z, -1)]), 1, -1));
    let rz = product_zseries(&rhs, z, order, 3).unwrap();
    let lhs = sum_coefficients(&s, z, 3, order, &SumOptions::default()).unwrap();
    assert_eq!(lhs[&0], Series::one(order));
    let checks = verify_zcoeff_identity(&lhs, &rz, 3, order).unwrap();
    assert!(checks.iter().all(|c| c.mismatch.is_none()), "{checks:?}");
}

#[test]
fn circle_expansion_in_x() {
    let (x, z) = (tag("x"), tag("z"));
    let order = 12;
    let specs = main_theorem_specs();
    let rhs = ProductSpec::default()
        .with(FactorSpec::infinite(Monomial::q_pow(1), 1, 1))
        .with(FactorSpec::infinite(monomial(1, 0, &[(x, 1), (z, 1)]), 1, 1))
        .with(FactorSpec::infinite(monomial(1, 1, &[(x, -1), (z, -1)]), 1, 1))
        .with(FactorSpec::infinite(monomial(1, 1, &[(x, 1)]), 1, -1))
        .with(FactorSpec::infinite(monomial(1, 1, &[(z, -1)]), 1, -1));
    let rz = product_zseries(&rhs, z, order, 4).unwrap();
    let lhs = sum_coefficients(&specs.circle_x, z, 4, order, &SumOptions::default()).unwrap();
    let checks = verify_zcoeff_identity(&lhs, &rz, 4, order).unwrap();
    assert!(checks.iter().all(|c| c.mismatch.is_none()), "{checks:?}");
}

#[test]
fn main_theorem_replay_small_order() {
    let r = prove_main_theorem(6).unwrap();
    assert!(r.passed(), "{:?}", r.checks);
    assert!(r.route2.is_some());
    let (x, y) = (tag("x"), tag("y"));
    let e = |qe: i64, a: i64, b: i64| ExponentVector::new(qe, crate::qring::VarExps::from_pairs([(x, a), (y, b)]));
    for s in [&r.route1, r.route2.as_ref().unwrap(), &r.direct] {
        assert_eq!(s.coeff(&e(1, 1, 1)).unwrap(), BigInt::from(1));
        assert_eq!(s.coeff(&e(1, -1, 0)).unwrap(), BigInt::from(0));
        assert_eq!(s.coeff(&e(1, -1, -1)).unwrap(), BigInt::from(1));
    }
}

#[test]
fn exponent_identity() {
    assert!(replay::exponent_identity_holds(10));
}
