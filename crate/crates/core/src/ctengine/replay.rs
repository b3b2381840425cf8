//! Mechanical replay of the contour-integral proof of the bilateral double-sum identity.

use num_rational::Rational64;

use super::{jtp_zseries, sum_zseries, zmul_extract, zmul_window, CtError};
use crate::qfactorial::{expand_product_spec, FactorSpec, ProductSpec};
use crate::qring::{Monomial, Series, VarTag};
use crate::summation::{eval_sum, monomial, weight, Domain, LinearForm, PochTerm, QuadForm, SumOptions, SumSpec};
use crate::verify::{compare, Mismatch};

/// One pairwise comparison made during the replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayCheck {
    pub name: String,
    pub mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug)]
pub struct ProofReplay {
    pub order: i64,
    /// Prefactor times the constant term of the two triple products.
    pub route1: Series,
    /// Constant term of the two circle sums times the third triple product.
    pub route2: Option<Series>,
    /// The double sum with exponent `i^2 - ij + j^2`.
    pub direct: Series,
    pub checks: Vec<ReplayCheck>,
}

impl ProofReplay {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.mismatch.is_none())
    }
}

pub struct MainSpecs {
    pub direct: SumSpec,
    pub binomial: SumSpec,
    pub circle_x: SumSpec,
    pub circle_y: SumSpec,
    pub product: ProductSpec,
}

fn tag(s: &str) -> VarTag {
    VarTag::new(s).expect("valid tag")
}

fn one(dim: usize) -> QuadForm {
    QuadForm::constant(dim, Rational64::from_integer(1))
}

/// The sums and the product side used by the replay.
pub fn main_theorem_specs() -> MainSpecs {
    let (x, y, z) = (tag("x"), tag("y"), tag("z"));
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let i = QuadForm::index(2, 0);
    let j = QuadForm::index(2, 1);
    let xq = monomial(1, 1, &[(x, 1)]);
    let yq = monomial(1, 1, &[(y, 1)]);

    let mut direct = SumSpec::new(names(&["i", "j"]), vec![Domain::Integer; 2]);
    direct.form = i.pow(2).unwrap().add(&i.mul(&j).unwrap().neg()).add(&j.pow(2).unwrap());
    direct.varweights = vec![weight(x, 1), weight(y, 1)];
    direct.denoms = vec![
        PochTerm::new(xq.clone(), 1, LinearForm::index(2, 0)),
        PochTerm::new(yq.clone(), 1, LinearForm::index(2, 1)),
    ];

    let mut binomial = direct.clone();
    binomial.form = i.binom(2).unwrap().add(&j.add(&one(2)).binom(2).unwrap()).add(&j.add(&i.neg()).binom(2).unwrap());

    let k = QuadForm::index(1, 0);
    let mut circle_x = SumSpec::new(names(&["i"]), vec![Domain::Integer]);
    circle_x.form = k.binom(2).unwrap();
    circle_x.signform = k.clone();
    circle_x.varweights = vec![[(x, 1), (z, 1)].into_iter().collect()];
    circle_x.denoms = vec![PochTerm::new(xq.clone(), 1, LinearForm::index(1, 0))];

    let mut circle_y = SumSpec::new(names(&["j"]), vec![Domain::Integer]);
    circle_y.form = k.binom(2).unwrap().add(&k);
    circle_y.signform = k.clone();
    circle_y.varweights = vec![[(y, 1), (z, -1)].into_iter().collect()];
    circle_y.denoms = vec![PochTerm::new(yq.clone(), 1, LinearForm::index(1, 0))];

    let product = ProductSpec::default()
        .with(FactorSpec::infinite(Monomial::q_pow(1), 1, 1))
        .with(FactorSpec::infinite(monomial(-1, 1, &[(x, 1), (y, 1)]), 2, 1))
        .with(FactorSpec::infinite(monomial(-1, 1, &[(x, -1), (y, -1)]), 2, 1))
        .with(FactorSpec::infinite(Monomial::q_pow(2), 2, 1))
        .with(FactorSpec::infinite(xq, 1, -1))
        .with(FactorSpec::infinite(yq, 1, -1));
    MainSpecs { direct, binomial, circle_x, circle_y, product }
}

fn check(name: &str, a: &Series, b: &Series, order: i64) -> Result<ReplayCheck, CtError> {
    Ok(ReplayCheck { name: name.into(), mismatch: compare(a, b, order)? })
}

/// `(q;q)_inf / (xq, yq; q)_inf`.
fn prefactor(order: i64) -> Result<Series, CtError> {
    let (x, y) = (tag("x"), tag("y"));
    let p = ProductSpec::default()
        .with(FactorSpec::infinite(Monomial::q_pow(1), 1, 1))
        .with(FactorSpec::infinite(monomial(1, 1, &[(x, 1)]), 1, -1))
        .with(FactorSpec::infinite(monomial(1, 1, &[(y, 1)]), 1, -1));
    Ok(expand_product_spec(&p, order)?)
}

/// `sum_i (xy)^i q^{i^2}` through `order`.
fn theta_xy(order: i64) -> Series {
    let (x, y) = (tag("x"), tag("y"));
    let mut terms = Vec::new();
    let mut i = 0i64;
    while i * i <= order {
        terms.push(monomial(1, i * i, &[(x, i), (y, i)]));
        if i > 0 {
            terms.push(monomial(1, i * i, &[(x, -i), (y, -i)]));
        }
        i += 1;
    }
    Series::from_terms(terms, order)
}

/// `binom(i,2) + binom(j+1,2) + binom(j-i,2) = i^2 - ij + j^2` on `-r..=r` squared.
pub fn exponent_identity_holds(r: i64) -> bool {
    let b = |n: i64| n * (n - 1) / 2;
    (-r..=r).all(|i| (-r..=r).all(|j| b(i) + b(j + 1) + b(j - i) == i * i - i * j + j * j))
}

/// Replay both evaluations of the integral and compare them with the double sum.
pub fn prove_main_theorem(order: i64) -> Result<ProofReplay, CtError> {
    let (x, y, z) = (tag("x"), tag("y"), tag("z"));
    let specs = main_theorem_specs();
    let opts = SumOptions::default();
    let mut checks = Vec::new();

    // First evaluation: only j = -i survives in the product of the two triple products.
    let jx = jtp_zseries(&Monomial::var(x), order);
    let jy = jtp_zseries(&Monomial::var(y).inv().expect("unit"), order);
    let paired = zmul_extract(&jx, &jy, 0)?;
    checks.push(check("constant term pairs j = -i", &paired, &theta_xy(order), order)?);
    let route1 = prefactor(order)?.mul_to(&paired, order)?;
    let product = expand_product_spec(&specs.product, order)?;
    checks.push(check("first evaluation = product side", &route1, &product, order)?);

    // Second evaluation: circle expansions times a third triple product, k = j - i.
    let j1 = jtp_zseries(&Monomial::one(), order);
    let (j1_lo, j1_hi) = (j1.bounds().0.value(), j1.bounds().1.value());
    let cx = sum_zseries(&specs.circle_x, z, order, (0, 0), &opts)?;
    let reach = -cx.bounds().0.value() - j1_lo;
    let cy = sum_zseries(&specs.circle_y, z, order, (0, reach.max(0)), &opts)?;
    let route2 = zmul_window(&cx, &cy, -j1_hi, -j1_lo).and_then(|c| zmul_extract(&c, &j1, 0));
    let route2 = match route2 {
        Ok(s) => Some(s),
        Err(e) => {
            checks.push(ReplayCheck {
                name: "second evaluation".into(),
                mismatch: Some(Mismatch { exponent: e.name().into(), lhs: e.to_string(), rhs: String::new() }),
            });
            None
        }
    };

    let direct = eval_sum(&specs.direct, order)?;
    let binomial = eval_sum(&specs.binomial, order)?;
    if let Some(r2) = &route2 {
        checks.push(check("first evaluation = second evaluation", &route1, r2, order)?);
        checks.push(check("second evaluation = double sum", r2, &direct, order)?);
    }
    checks.push(check("binomial exponent sum = double sum", &binomial, &direct, order)?);
    checks.push(check("first evaluation = double sum", &route1, &direct, order)?);
    checks.push(ReplayCheck {
        name: "exponent identity on -10..=10".into(),
        mismatch: (!exponent_identity_holds(10)).then(|| Mismatch {
            exponent: "polynomial".into(),
            lhs: "binom(i,2)+binom(j+1,2)+binom(j-i,2)".into(),
            rhs: "i^2-ij+j^2".into(),
        }),
    });
    Ok(ProofReplay { order, route1, route2, direct, checks })
}
