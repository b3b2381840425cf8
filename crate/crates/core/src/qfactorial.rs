//! q-shifted factorials `(a; q^b)_n` for finite, negative and infinite `n`, and
//! expansion of symbolic product sides.
//!
//! Negative subscripts follow `(a;q)_{-n} = 1/(a q^{-n}; q)_n`. When that
//! polynomial has a vanishing factor the factorial itself is infinite: the plain
//! factorial reports [`QError::ZeroDivisor`] and the reciprocal is the zero series.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::qring::{Monomial, QError, Series, VarTag};

/// Subscript of a q-shifted factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Count {
    Finite(i64),
    Infinite,
}

/// `(arg; q^basepow)_count ^ expo`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorSpec {
    pub arg: Monomial,
    pub basepow: i64,
    pub count: Count,
    pub expo: i64,
}

impl FactorSpec {
    pub fn new(arg: Monomial, basepow: i64, count: Count, expo: i64) -> Self {
        assert!(basepow >= 1, "base power must be positive");
        assert!(expo != 0, "factor exponent must be nonzero");
        FactorSpec { arg, basepow, count, expo }
    }

    pub fn infinite(arg: Monomial, basepow: i64, expo: i64) -> Self {
        FactorSpec::new(arg, basepow, Count::Infinite, expo)
    }
}

/// A prefactor monomial times a product of factorial powers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductSpec {
    pub factors: Vec<FactorSpec>,
    pub prefactor: Monomial,
}

impl Default for ProductSpec {
    fn default() -> Self {
        ProductSpec { factors: Vec::new(), prefactor: Monomial::one() }
    }
}

impl ProductSpec {
    pub fn new(prefactor: Monomial, factors: Vec<FactorSpec>) -> Self {
        ProductSpec { factors, prefactor }
    }

    pub fn with(mut self, f: FactorSpec) -> Self {
        self.factors.push(f);
        self
    }

    /// Multiply two product specs.
    pub fn times(&self, other: &ProductSpec) -> ProductSpec {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        ProductSpec { prefactor: self.prefactor.mul(&other.prefactor), factors }
    }

    /// Raise to an integer power; negative powers need a unit prefactor.
    pub fn powi(&self, k: i64) -> Option<ProductSpec> {
        let prefactor = self.prefactor.pow(k)?;
        if k == 0 {
            return Some(ProductSpec::default());
        }
        let factors = self.factors.iter().map(|f| FactorSpec { expo: f.expo * k, ..f.clone() }).collect();
        Some(ProductSpec { prefactor, factors })
    }

    pub fn mentions(&self, tag: VarTag) -> bool {
        self.prefactor.var_exp(tag) != 0 || self.factors.iter().any(|f| f.arg.var_exp(tag) != 0)
    }

    pub fn substitute(&self, tag: VarTag, value: i64) -> ProductSpec {
        ProductSpec {
            prefactor: self.prefactor.substitute(tag, value),
            factors: self
                .factors
                .iter()
                .map(|f| FactorSpec { arg: f.arg.substitute(tag, value), ..f.clone() })
                .collect(),
        }
    }

    /// Substitute `q -> q^d` symbolically.
    pub fn rescale_base(&self, d: i64) -> ProductSpec {
        ProductSpec {
            prefactor: scale_monomial(&self.prefactor, d),
            factors: self
                .factors
                .iter()
                .map(|f| FactorSpec { arg: scale_monomial(&f.arg, d), basepow: f.basepow * d, ..f.clone() })
                .collect(),
        }
    }
}

pub(crate) fn scale_monomial(m: &Monomial, d: i64) -> Monomial {
    let mut m = m.clone();
    m.exps.qexp *= d;
    m
}

impl fmt::Display for ProductSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.prefactor != Monomial::one() || self.factors.is_empty() {
            parts.push(self.prefactor.dsl_text());
        }
        for fac in &self.factors {
            let count = match fac.count {
                Count::Finite(n) => n.to_string(),
                Count::Infinite => "inf".to_string(),
            };
            parts.push(format!("poch({}; q^{}; {})^{}", fac.arg.dsl_text(), fac.basepow, count, fac.expo));
        }
        f.write_str(&parts.join("*"))
    }
}

/// Valuation of the single factor `1 - a q^{b k}`; `None` when the factor is 0.
fn factor_valuation(a: &Monomial, basepow: i64, k: i64) -> Option<i64> {
    let e = a.qexp() + basepow * k;
    if e == 0 && !a.has_vars() {
        if a.coeff.is_one() {
            return None;
        }
        return Some(0);
    }
    Some(e.min(0))
}

/// Outcome of the exact valuation of a finite factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochValuation {
    /// The factorial is the zero polynomial.
    Zero,
    /// The factorial is infinite (negative subscript over a vanishing polynomial).
    Infinite,
    Finite(i64),
}

impl PochValuation {
    pub fn recip(self) -> PochValuation {
        match self {
            PochValuation::Zero => PochValuation::Infinite,
            PochValuation::Infinite => PochValuation::Zero,
            PochValuation::Finite(v) => PochValuation::Finite(-v),
        }
    }
}

/// Lowest `q`-power of `(a; q^b)_n` for any integer `n`, without expanding it.
pub fn poch_valuation(a: &Monomial, basepow: i64, n: i64) -> PochValuation {
    let (start, len) = if n >= 0 { (0, n) } else { (n, -n) };
    let mut v = 0;
    for k in start..start + len {
        match factor_valuation(a, basepow, k) {
            Some(x) => v += x,
            None => return if n >= 0 { PochValuation::Zero } else { PochValuation::Infinite },
        }
    }
    if n >= 0 {
        PochValuation::Finite(v)
    } else {
        PochValuation::Finite(-v)
    }
}

/// Exact `prod_{k=start}^{start+len-1} (1 - a q^{b k})`, or `None` if a factor is 0.
pub fn shifted_product(a: &Monomial, basepow: i64, start: i64, len: i64) -> Option<Series> {
    let mut acc = Series::one_exact();
    for k in start..start + len {
        let m = a.shift_q(basepow * k);
        factor_valuation(a, basepow, k)?;
        acc = acc.mul_one_minus(&m);
    }
    Some(acc)
}

/// `(a; q^b)_n`: the exact polynomial for `n >= 0`, the inverse series of
/// `(a q^{b n}; q^b)_{-n}` for `n < 0`.
pub fn poch_finite(a: &Monomial, basepow: i64, n: i64, order: i64) -> Result<Series, QError> {
    if n >= 0 {
        return Ok(shifted_product(a, basepow, 0, n).unwrap_or_else(Series::zero_exact));
    }
    match shifted_product(a, basepow, n, -n) {
        Some(p) => p.invert(order),
        None => Err(QError::ZeroDivisor(format!("({}; q^{})_{} has a vanishing factor", a.dsl_text(), basepow, n))),
    }
}

/// `1/(a; q^b)_n` for all integer `n`. Negative `n` gives an exact polynomial,
/// and the zero series when the factorial is infinite.
pub fn poch_recip_finite(a: &Monomial, basepow: i64, n: i64, order: i64) -> Result<Series, QError> {
    if n < 0 {
        return Ok(shifted_product(a, basepow, n, -n).unwrap_or_else(Series::zero_exact));
    }
    match shifted_product(a, basepow, 0, n) {
        Some(p) => p.invert(order),
        None => Err(QError::NotInvertible(format!("({}; q^{})_{} vanishes", a.dsl_text(), basepow, n))),
    }
}

fn check_truncatable(a: &Monomial) -> Result<(), QError> {
    if a.qexp() < 1 {
        return Err(QError::NotTruncatable(format!(
            "infinite product over {} needs an argument of positive q-degree",
            a.dsl_text()
        )));
    }
    Ok(())
}

/// Multiply `acc` by `(a; q^b)_inf^power` in place, through the order of `acc`.
fn apply_infinite(acc: Series, a: &Monomial, basepow: i64, power: i64) -> Result<Series, QError> {
    check_truncatable(a)?;
    let order = acc.order().expect("accumulator is truncated");
    let mut acc = acc;
    for _ in 0..power.unsigned_abs() {
        let mut k = 0;
        while a.qexp() + basepow * k <= order {
            let m = a.shift_q(basepow * k);
            acc = if power > 0 { acc.mul_one_minus(&m) } else { acc.div_one_minus(&m, order)? };
            k += 1;
        }
    }
    Ok(acc)
}

/// `(a; q^b)_inf` through `order`; requires `a` of positive `q`-degree.
pub fn poch_infinite(a: &Monomial, basepow: i64, order: i64) -> Result<Series, QError> {
    apply_infinite(Series::one(order), a, basepow, 1)
}

/// `1/(a; q^b)_inf` through `order`.
pub fn poch_infinite_recip(a: &Monomial, basepow: i64, order: i64) -> Result<Series, QError> {
    apply_infinite(Series::one(order), a, basepow, -1)
}

/// Collects the factors of a product whose valuation is known in advance.
///
/// Each factor is normalised to valuation 0, the normalised product is formed
/// through `N - V` (`V` the total valuation) and shifted back by `q^V`. Laurent
/// factors with very negative powers are therefore never expanded in full.
#[derive(Clone, Debug)]
pub(crate) struct ProductAssembler {
    lead: Monomial,
    /// `(1 - m)^power`
    binomials: Vec<(Monomial, i64)>,
    infinite: Vec<(Monomial, i64, i64)>,
}

impl ProductAssembler {
    pub fn new() -> Self {
        ProductAssembler { lead: Monomial::one(), binomials: Vec::new(), infinite: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.lead.is_zero()
    }

    pub fn mul_monomial(&mut self, m: &Monomial) {
        self.lead = self.lead.mul(m);
    }

    /// Multiply by `prod_{k=start}^{start+len-1} (1 - a q^{b k})^power`;
    /// `false` (and no change) if one of the factors is 0.
    pub fn mul_factorial(&mut self, a: &Monomial, b: i64, start: i64, len: i64, power: i64) -> bool {
        if (start..start + len).any(|k| factor_valuation(a, b, k).is_none()) {
            return false;
        }
        if power != 0 {
            self.binomials.extend((start..start + len).map(|k| (a.shift_q(b * k), power)));
        }
        true
    }

    pub fn mul_infinite(&mut self, a: Monomial, basepow: i64, power: i64) {
        self.infinite.push((a, basepow, power));
    }

    fn valuation(&self) -> i64 {
        let mut v = self.lead.qexp();
        for (m, p) in &self.binomials {
            v += p * m.qexp().min(0);
        }
        v
    }

    pub fn finish(self, order: i64) -> Result<Series, QError> {
        if self.is_zero() {
            return Ok(Series::zero(order));
        }
        let v = self.valuation();
        let level = order - v;
        if level < 0 {
            return Ok(Series::zero(order));
        }
        let mut acc = Series::one(level);
        for (a, b, power) in &self.infinite {
            acc = apply_infinite(acc, a, *b, *power)?;
        }
        for (m, power) in &self.binomials {
            let w = m.qexp().min(0);
            for _ in 0..power.unsigned_abs() {
                acc = if *power > 0 {
                    acc.mul_monomial(&Monomial::q_pow(-w)).sub(&acc.mul_monomial(&m.shift_q(-w))).truncate(level)
                } else {
                    divide_normalised(&acc, m, level)?
                };
            }
        }
        Ok(acc.mul_monomial(&self.lead.shift_q(v - self.lead.qexp())))
    }
}

/// `acc / (q^{-w} (1 - m))` through `level`, where `w = min(0, deg m)`.
fn divide_normalised(acc: &Series, m: &Monomial, level: i64) -> Result<Series, QError> {
    let e = m.qexp();
    if e > 0 {
        return acc.div_one_minus(m, level);
    }
    if e == 0 {
        if m.is_constant() {
            let u = BigInt::one() - &m.coeff;
            if u.abs().is_one() {
                return Ok(acc.mul_monomial(&Monomial::constant(u)));
            }
        }
        return Err(QError::NotInvertible(format!("1 - {} has no unit lowest term", m.dsl_text())));
    }
    // q^{-e}(1 - m) = -m'(1 - q^{-e}/m') with m' = m q^{-e} of degree 0.
    let mp = m.shift_q(-e);
    let inv =
        mp.inv().ok_or_else(|| QError::NotInvertible(format!("1 - {} has a non-unit lowest term", m.dsl_text())))?;
    acc.mul_monomial(&inv.neg()).div_one_minus(&inv.shift_q(-e), level)
}

/// Expand `prefactor * prod factor^expo` through `order`.
pub fn expand_product_spec(p: &ProductSpec, order: i64) -> Result<Series, QError> {
    let mut asm = ProductAssembler::new();
    asm.mul_monomial(&p.prefactor);
    for f in &p.factors {
        match f.count {
            Count::Infinite => asm.mul_infinite(f.arg.clone(), f.basepow, f.expo),
            Count::Finite(n) => {
                let (start, len, power) = if n >= 0 { (0, n, f.expo) } else { (n, -n, -f.expo) };
                if !asm.mul_factorial(&f.arg, f.basepow, start, len, power) {
                    if power > 0 {
                        // A zero polynomial in the numerator kills the product.
                        return Ok(Series::zero(order));
                    }
                    return Err(if n >= 0 {
                        QError::NotInvertible(format!("({}; q^{})_{} vanishes", f.arg.dsl_text(), f.basepow, n))
                    } else {
                        QError::ZeroDivisor(format!("({}; q^{})_{} is infinite", f.arg.dsl_text(), f.basepow, n))
                    });
                }
            }
        }
    }
    asm.finish(order)
}
