use super::*;
use crate::qfactorial::{expand_product_spec, FactorSpec, ProductSpec};
use num_bigint::BigInt;

fn tag(s: &str) -> VarTag {
    VarTag::new(s).unwrap()
}

fn dense(s: &Series, n: i64) -> Vec<i64> {
    s.q_coeffs(n).unwrap().iter().map(|c| i64::try_from(c).unwrap()).collect()
}

fn names(n: usize) -> Vec<String> {
    ["i", "j", "k", "l", "m"][..n].iter().map(|s| s.to_string()).collect()
}

/// `i^2 - i j + j^2`
fn eisenstein_form() -> QuadForm {
    let i = QuadForm::index(2, 0);
    let j = QuadForm::index(2, 1);
    i.pow(2).unwrap().add(&i.mul(&j).unwrap().neg()).add(&j.pow(2).unwrap())
}

fn main_spec() -> SumSpec {
    let (x, y) = (tag("x"), tag("y"));
    let mut s = SumSpec::new(names(2), vec![Domain::Integer; 2]);
    s.form = eisenstein_form();
    s.varweights = vec![weight(x, 1), weight(y, 1)];
    s.denoms = vec![
        PochTerm::new(monomial(1, 1, &[(x, 1)]), 1, LinearForm::index(2, 0)),
        PochTerm::new(monomial(1, 1, &[(y, 1)]), 1, LinearForm::index(2, 1)),
    ];
    s
}

fn double_spec(domain: Domain) -> SumSpec {
    let mut s = SumSpec::new(names(2), vec![domain; 2]);
    s.form = eisenstein_form();
    s.denoms = vec![PochTerm::q_factorial(2, 0), PochTerm::q_factorial(2, 1)];
    s
}

fn rr1_spec() -> SumSpec {
    let mut s = SumSpec::new(names(1), vec![Domain::Natural]);
    s.form = QuadForm::index(1, 0).pow(2).unwrap();
    s.denoms = vec![PochTerm::q_factorial(1, 0)];
    s
}

#[test]
fn origin_term_is_one() {
    assert_eq!(main_spec().term_series(&[0, 0], 5).unwrap(), Series::one(5));
}

#[test]
fn negative_index_term() {
    let x = tag("x");
    let t = main_spec().term_series(&[-1, 0], 4).unwrap();
    let expected = Series::from_terms([monomial(1, 1, &[(x, -1)]), monomial(-1, 1, &[])], 4);
    assert_eq!(t, expected);
}

#[test]
fn double_sum_single_term() {
    let t = double_spec(Domain::Integer).term_series(&[2, 1], 4).unwrap();
    assert_eq!(dense(&t, 4), vec![0, 0, 0, 1, 2]);
}

#[test]
fn out_of_domain_point_is_rejected() {
    let e = rr1_spec().term_series(&[-1], 4).unwrap_err();
    assert_eq!(e.name(), "DomainError");
}

#[test]
fn main_support_at_order_one() {
    let r = main_spec().enumerate_support(1, None, &SumOptions::default()).unwrap();
    let mut expected = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1], vec![-1, 0], vec![0, -1], vec![-1, -1]];
    expected.sort();
    assert_eq!(r.points, expected);
    assert!(!r.capped);
    assert!(r.warnings.is_empty());
}

#[test]
fn unilateral_support() {
    let r = rr1_spec().enumerate_support(4, None, &SumOptions::default()).unwrap();
    assert_eq!(r.points, vec![vec![0], vec![1], vec![2]]);
}

#[test]
fn support_at_order_zero_contains_origin() {
    for spec in [main_spec(), double_spec(Domain::Natural), rr1_spec()] {
        let r = spec.enumerate_support(0, None, &SumOptions::default()).unwrap();
        assert!(r.points.contains(&vec![0; spec.dim()]));
    }
}

#[test]
fn double_sum_values() {
    let s = eval_sum(&double_spec(Domain::Integer), 4).unwrap();
    assert_eq!(dense(&s, 4), vec![1, 3, 4, 7, 13]);
}

#[test]
fn first_rogers_ramanujan_sum() {
    let s = eval_sum(&rr1_spec(), 6).unwrap();
    assert_eq!(dense(&s, 6), vec![1, 1, 1, 1, 2, 2, 3]);
}

#[test]
fn main_left_side_at_order_one() {
    let (x, y) = (tag("x"), tag("y"));
    let s = eval_sum(&main_spec(), 1).unwrap();
    let expected = Series::from_terms(
        [
            monomial(1, 0, &[]),
            monomial(1, 1, &[(x, 1)]),
            monomial(1, 1, &[(y, 1)]),
            monomial(1, 1, &[(x, 1), (y, 1)]),
            monomial(1, 1, &[(x, -1), (y, -1)]),
            monomial(-1, 1, &[]),
        ],
        1,
    );
    assert_eq!(s, expected);
}

#[test]
fn bilateral_collapse() {
    let a = eval_sum(&double_spec(Domain::Integer), 20).unwrap();
    let b = eval_sum(&double_spec(Domain::Natural), 20).unwrap();
    assert_eq!(a, b);
}

#[test]
fn symmetric_in_x_and_y() {
    let (x, y, t) = (tag("x"), tag("y"), tag("t"));
    let s = eval_sum(&main_spec(), 10).unwrap();
    let swapped: Vec<Monomial> = s
        .monomials()
        .into_iter()
        .map(|m| {
            let vars = m.exps.vars.iter().map(|(v, e)| {
                (
                    if v == x {
                        t
                    } else if v == y {
                        x
                    } else {
                        v
                    },
                    e,
                )
            });
            let vars: Vec<_> = vars.map(|(v, e)| (if v == t { y } else { v }, e)).collect();
            Monomial::new(m.coeff.clone(), ExponentVector::new(m.qexp(), VarExps::from_pairs(vars)))
        })
        .collect();
    assert_eq!(Series::from_terms(swapped, 10), s);
}

#[test]
fn product_of_reciprocal_factorials_expands() {
    // 1/((q;q)_i (q;q)_j) = sum_k q^{(i-k)(j-k)} / ((q;q)_k (q;q)_{i-k} (q;q)_{j-k})
    let order = 16;
    for i in 0..=6 {
        for j in 0..=6 {
            let mut s = SumSpec::new(names(1), vec![Domain::Integer]);
            let k = QuadForm::index(1, 0);
            let c = |v: i64| QuadForm::constant(1, Rational64::from_integer(v));
            s.form = c(i).add(&k.neg()).mul(&c(j).add(&k.neg())).unwrap();
            s.denoms = vec![
                PochTerm::q_factorial(1, 0),
                PochTerm::new(Monomial::q_pow(1), 1, LinearForm { coeffs: vec![-1], constant: i }),
                PochTerm::new(Monomial::q_pow(1), 1, LinearForm { coeffs: vec![-1], constant: j }),
            ];
            let lhs = ProductSpec::default()
                .with(FactorSpec::new(Monomial::q_pow(1), 1, crate::qfactorial::Count::Finite(i), -1))
                .with(FactorSpec::new(Monomial::q_pow(1), 1, crate::qfactorial::Count::Finite(j), -1));
            assert_eq!(eval_sum(&s, order).unwrap(), expand_product_spec(&lhs, order).unwrap(), "i={i} j={j}");
        }
    }
}

#[test]
fn half_integral_nahm_sum_rescales() {
    // sum q^{n^2/2}/(q;q)_n = (-q^{1/2}; q)_inf, i.e. (-q; q^2)_inf in q^{1/2}
    let spec = SumSpec::nahm(&[vec![Rational64::from_integer(1)]], &[Rational64::zero()], Rational64::zero());
    assert_eq!(spec.base_scale(), 2);
    let got = eval_sum(&spec, 6).unwrap();
    let rhs = ProductSpec::default().with(FactorSpec::infinite(monomial(-1, 1, &[]), 2, 1));
    assert_eq!(got, expand_product_spec(&rhs, 12).unwrap());
}

#[test]
fn indefinite_form_hits_the_cap() {
    let mut s = SumSpec::new(names(2), vec![Domain::Integer; 2]);
    s.form = QuadForm::index(2, 0).mul(&QuadForm::index(2, 1)).unwrap();
    let e = s.enumerate_support(3, None, &SumOptions { shell_cap: Some(6) }).unwrap_err();
    assert_eq!(e.name(), "EnumerationCapped");
}

#[test]
fn negative_residual_is_reported() {
    let mut s = SumSpec::new(names(1), vec![Domain::Natural]);
    s.form = QuadForm::index(1, 0).pow(2).unwrap();
    s.scale = Monomial::q_pow(-1);
    s.denoms = vec![PochTerm::q_factorial(1, 0)];
    let e = eval_sum(&s, 4).unwrap_err();
    assert_eq!(e, SumError::NegativeValuationResidual { qexp: -1 });
}

#[test]
fn slice_selects_one_power() {
    // sum_n z^n q^{n^2} / (q;q)_n, coefficient of z^2 is q^4/(q;q)_2
    let z = tag("z");
    let mut s = rr1_spec();
    s.varweights = vec![weight(z, 1)];
    let got = eval_sum_slice(&s, z, 2, 6, &SumOptions::default()).unwrap();
    assert_eq!(got.support.points, vec![vec![2]]);
    assert_eq!(dense(&got.series, 6), vec![0, 0, 0, 0, 1, 1, 2]);
    assert_eq!(got.series.coeff(&ExponentVector::q(4)).unwrap(), BigInt::from(1));
}
