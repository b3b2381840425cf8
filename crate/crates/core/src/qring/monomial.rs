//! Exponent vectors and monomials over `q` and the formal variables.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::var::VarTag;

/// Laurent exponents of the formal variables, sorted by tag, zero entries omitted.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VarExps(SmallVec<[(VarTag, i64); 4]>);

impl VarExps {
    pub fn new() -> Self {
        VarExps(SmallVec::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarTag, i64)>) -> Self {
        let mut out = VarExps::new();
        for (tag, e) in pairs {
            out.add_exp(tag, e);
        }
        out
    }

    pub fn single(tag: VarTag, e: i64) -> Self {
        Self::from_pairs([(tag, e)])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarTag, i64)> + '_ {
        self.0.iter().copied()
    }

    pub fn get(&self, tag: VarTag) -> i64 {
        self.0.binary_search_by(|(t, _)| t.cmp(&tag)).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn add_exp(&mut self, tag: VarTag, e: i64) {
        if e == 0 {
            return;
        }
        match self.0.binary_search_by(|(t, _)| t.cmp(&tag)) {
            Ok(i) => {
                self.0[i].1 += e;
                if self.0[i].1 == 0 {
                    self.0.remove(i);
                }
            }
            Err(i) => self.0.insert(i, (tag, e)),
        }
    }

    pub fn add(&self, other: &VarExps) -> VarExps {
        if other.0.is_empty() {
            return self.clone();
        }
        if self.0.is_empty() {
            return other.clone();
        }
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        VarExps(out)
    }

    pub fn scale(&self, k: i64) -> VarExps {
        if k == 0 {
            return VarExps::new();
        }
        VarExps(self.0.iter().map(|&(t, e)| (t, e * k)).collect())
    }

    pub fn without(&self, tag: VarTag) -> VarExps {
        VarExps(self.0.iter().copied().filter(|(t, _)| *t != tag).collect())
    }
}

/// Lexicographic over the union of tags in ascending order, absent exponents read as 0.
impl Ord for VarExps {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            let (ta, tb) = (a.get(i), b.get(j));
            let (ea, eb) = match (ta, tb) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, ea)), None) => {
                    i += 1;
                    (ea, 0)
                }
                (None, Some(&(_, eb))) => {
                    j += 1;
                    (0, eb)
                }
                (Some(&(t1, e1)), Some(&(t2, e2))) => match t1.cmp(&t2) {
                    Ordering::Less => {
                        i += 1;
                        (e1, 0)
                    }
                    Ordering::Greater => {
                        j += 1;
                        (0, e2)
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (e1, e2)
                    }
                },
            };
            match ea.cmp(&eb) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
    }
}

impl PartialOrd for VarExps {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VarExps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter().map(|(t, e)| (t.as_str(), e))).finish()
    }
}

/// Exponent of `q` together with the formal-variable exponents.
///
/// Ordered graded by `qexp` first, then lexicographically on the variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ExponentVector {
    pub qexp: i64,
    pub vars: VarExps,
}

impl ExponentVector {
    pub fn new(qexp: i64, vars: VarExps) -> Self {
        ExponentVector { qexp, vars }
    }

    pub fn q(qexp: i64) -> Self {
        ExponentVector { qexp, vars: VarExps::new() }
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector { qexp: self.qexp + other.qexp, vars: self.vars.add(&other.vars) }
    }

    pub fn scale(&self, k: i64) -> ExponentVector {
        ExponentVector { qexp: self.qexp * k, vars: self.vars.scale(k) }
    }

    /// Canonical text, e.g. `q^1*x^-1*y^2`.
    pub fn canonical_text(&self) -> String {
        let mut s = format!("q^{}", self.qexp);
        for (t, e) in self.vars.iter() {
            s.push_str(&format!("*{}^{}", t, e));
        }
        s
    }
}

/// Integer coefficient times an exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub coeff: BigInt,
    pub exps: ExponentVector,
}

impl Monomial {
    pub fn new(coeff: impl Into<BigInt>, exps: ExponentVector) -> Self {
        Monomial { coeff: coeff.into(), exps }
    }

    pub fn one() -> Self {
        Monomial::new(1, ExponentVector::default())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Monomial::new(c, ExponentVector::default())
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        Monomial::new(1, ExponentVector::q(e))
    }

    pub fn var(tag: VarTag) -> Self {
        Monomial::new(1, ExponentVector::new(0, VarExps::single(tag, 1)))
    }

    pub fn qexp(&self) -> i64 {
        self.exps.qexp
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Coefficient is ±1, so the monomial is invertible in the Laurent ring.
    pub fn is_unit(&self) -> bool {
        self.coeff.abs().is_one()
    }

    /// True when the monomial is a plain integer (no `q`, no variables).
    pub fn is_constant(&self) -> bool {
        self.exps.qexp == 0 && self.exps.vars.is_empty()
    }

    pub fn has_vars(&self) -> bool {
        !self.exps.vars.is_empty()
    }

    pub fn var_exp(&self, tag: VarTag) -> i64 {
        self.exps.vars.get(tag)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { coeff: &self.coeff * &other.coeff, exps: self.exps.add(&other.exps) }
    }

    pub fn neg(&self) -> Monomial {
        Monomial { coeff: -&self.coeff, exps: self.exps.clone() }
    }

    /// Multiply by `q^e`.
    pub fn shift_q(&self, e: i64) -> Monomial {
        let mut m = self.clone();
        m.exps.qexp += e;
        m
    }

    /// Integer power; negative powers need a unit coefficient.
    pub fn pow(&self, k: i64) -> Option<Monomial> {
        if k < 0 && !self.is_unit() {
            return None;
        }
        let coeff = if k >= 0 {
            num_traits::pow(self.coeff.clone(), k as usize)
        } else if self.coeff.is_negative() && k % 2 != 0 {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        Some(Monomial { coeff, exps: self.exps.scale(k) })
    }

    pub fn inv(&self) -> Option<Monomial> {
        self.pow(-1)
    }

    /// Drop `tag`, multiplying the coefficient by `value^e` (value must be ±1).
    pub fn substitute(&self, tag: VarTag, value: i64) -> Monomial {
        assert!(value == 1 || value == -1, "only ±1 keeps coefficients integral");
        let e = self.var_exp(tag);
        let mut coeff = self.coeff.clone();
        if value == -1 && e % 2 != 0 {
            coeff = -coeff;
        }
        Monomial { coeff, exps: ExponentVector::new(self.exps.qexp, self.exps.vars.without(tag)) }
    }

    /// Render in identity-file syntax, e.g. `-x*y*q^2` or `q^(-1)/z`.
    pub fn dsl_text(&self) -> String {
        let mut factors: Vec<String> = Vec::new();
        let fmt_pow = |name: &str, e: i64| match e {
            1 => name.to_string(),
            e if e < 0 => format!("{}^({})", name, e),
            e => format!("{}^{}", name, e),
        };
        for (t, e) in self.exps.vars.iter() {
            factors.push(fmt_pow(t.as_str(), e));
        }
        if self.exps.qexp != 0 {
            factors.push(fmt_pow("q", self.exps.qexp));
        }
        let mag = self.coeff.abs();
        let body = if factors.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            factors.join("*")
        } else {
            format!("{}*{}", mag, factors.join("*"))
        };
        if self.coeff.is_negative() {
            format!("-{}", body)
        } else {
            body
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}", self.coeff, self.exps.canonical_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> VarTag {
        VarTag::new(s).unwrap()
    }

    #[test]
    fn varexps_merge_cancels() {
        let a = VarExps::from_pairs([(t("x"), 1), (t("y"), -2)]);
        let b = VarExps::from_pairs([(t("x"), -1), (t("z"), 3)]);
        let c = a.add(&b);
        assert_eq!(c.get(t("x")), 0);
        assert_eq!(c.get(t("y")), -2);
        assert_eq!(c.get(t("z")), 3);
        assert_eq!(c.iter().count(), 2);
    }

    #[test]
    fn lex_order_reads_absent_as_zero() {
        let inv = VarExps::single(t("x"), -1);
        let one = VarExps::new();
        let x = VarExps::single(t("x"), 1);
        assert!(inv < one && one < x);
        let y = VarExps::single(t("y"), 1);
        // x^0 y^1 vs x^1: x decides first.
        assert!(y < x);
    }

    #[test]
    fn exponent_vector_is_graded_by_q() {
        let a = ExponentVector::new(1, VarExps::single(t("x"), 5));
        let b = ExponentVector::new(2, VarExps::single(t("x"), -5));
        assert!(a < b);
    }

    #[test]
    fn monomial_powers() {
        let m = Monomial::new(-1, ExponentVector::new(2, VarExps::single(t("x"), 1)));
        let inv = m.inv().unwrap();
        assert_eq!(m.mul(&inv), Monomial::one());
        assert!(Monomial::constant(2).inv().is_none());
        assert_eq!(m.pow(3).unwrap().coeff, BigInt::from(-1));
    }

    #[test]
    fn dsl_rendering() {
        let m = Monomial::new(-1, ExponentVector::new(1, VarExps::from_pairs([(t("x"), -1), (t("y"), -1)])));
        assert_eq!(m.dsl_text(), "-x^(-1)*y^(-1)*q");
        assert_eq!(Monomial::q_pow(5).dsl_text(), "q^5");
        assert_eq!(Monomial::constant(-3).dsl_text(), "-3");
    }
}
