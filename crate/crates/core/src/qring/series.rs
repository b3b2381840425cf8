//! Truncated sparse Laurent series in `q` with Laurent-polynomial coefficients in
//! the formal variables.
//!
//! Terms are stored graded by the exponent of `q`. A series is either *exact*
//! (a finite Laurent polynomial, nothing discarded) or *truncated* at an order `N`,
//! meaning every coefficient with `qexp <= N` is determined and nothing above `N`
//! is stored.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::{ExponentVector, Monomial, VarExps};
use super::var::VarTag;
use super::QError;

/// The part of a series at a fixed power of `q`.
pub type Grade = BTreeMap<VarExps, BigInt>;

#[derive(Clone, Debug)]
pub struct Series {
    grades: BTreeMap<i64, Grade>,
    /// `None` for exact series.
    order: Option<i64>,
    floor: i64,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

fn grade_mul_into(out: &mut Grade, a: &Grade, b: &Grade) {
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea.add(eb);
            let p = ca * cb;
            match out.get_mut(&e) {
                Some(c) => *c += p,
                None => {
                    out.insert(e, p);
                }
            }
        }
    }
}

fn grade_mul_monomial(g: &Grade, coeff: &BigInt, vars: &VarExps) -> Grade {
    g.iter().map(|(e, c)| (e.add(vars), c * coeff)).collect()
}

fn grade_add_into(out: &mut Grade, g: &Grade) {
    for (e, c) in g {
        match out.get_mut(e) {
            Some(x) => *x += c,
            None => {
                out.insert(e.clone(), c.clone());
            }
        }
    }
}

fn prune(grades: &mut BTreeMap<i64, Grade>) {
    grades.retain(|_, g| {
        g.retain(|_, c| !c.is_zero());
        !g.is_empty()
    });
}

impl Series {
    fn from_grades(mut grades: BTreeMap<i64, Grade>, order: Option<i64>, floor: i64) -> Self {
        if let Some(n) = order {
            grades.retain(|&d, _| d <= n);
        }
        prune(&mut grades);
        Series { grades, order, floor }
    }

    /// Zero, truncated at `order`.
    pub fn zero(order: i64) -> Self {
        Series { grades: BTreeMap::new(), order: Some(order), floor: 0 }
    }

    pub fn zero_exact() -> Self {
        Series { grades: BTreeMap::new(), order: None, floor: 0 }
    }

    /// The constant 1, truncated at `order`.
    pub fn one(order: i64) -> Self {
        Series::from_terms([Monomial::one()], order)
    }

    pub fn one_exact() -> Self {
        Series::exact([Monomial::one()])
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Series::exact([m])
    }

    /// A finite Laurent polynomial; nothing is discarded.
    pub fn exact(terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut grades: BTreeMap<i64, Grade> = BTreeMap::new();
        for m in terms {
            let g = grades.entry(m.exps.qexp).or_default();
            *g.entry(m.exps.vars).or_insert_with(BigInt::zero) += m.coeff;
        }
        prune(&mut grades);
        let floor = grades.keys().next().copied().unwrap_or(0).min(0);
        Series { grades, order: None, floor }
    }

    /// Terms above `order` are discarded.
    pub fn from_terms(terms: impl IntoIterator<Item = Monomial>, order: i64) -> Self {
        let mut s = Series::exact(terms);
        s.grades.retain(|&d, _| d <= order);
        s.order = Some(order);
        s
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_zero(&self) -> bool {
        self.grades.is_empty()
    }

    /// Lowest power of `q` carrying a nonzero term.
    pub fn valuation(&self) -> Option<i64> {
        self.grades.keys().next().copied()
    }

    pub fn max_qexp(&self) -> Option<i64> {
        self.grades.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.grades.values().map(|g| g.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn grade(&self, qexp: i64) -> Option<&Grade> {
        self.grades.get(&qexp)
    }

    pub fn grades(&self) -> impl Iterator<Item = (i64, &Grade)> {
        self.grades.iter().map(|(d, g)| (*d, g))
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &VarExps, &BigInt)> {
        self.grades.iter().flat_map(|(d, g)| g.iter().map(move |(e, c)| (*d, e, c)))
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms().map(|(d, e, c)| Monomial::new(c.clone(), ExponentVector::new(d, e.clone()))).collect()
    }

    /// Exact coefficient at `e`; asking above the truncation order is an error.
    pub fn coeff(&self, e: &ExponentVector) -> Result<BigInt, QError> {
        if let Some(n) = self.order {
            if e.qexp > n {
                return Err(QError::QueryBeyondOrder { requested: e.qexp, order: n });
            }
        }
        Ok(self.grades.get(&e.qexp).and_then(|g| g.get(&e.vars)).cloned().unwrap_or_else(BigInt::zero))
    }

    /// Coefficient of `q^d` when no formal variables are involved.
    pub fn q_coeff(&self, d: i64) -> Result<BigInt, QError> {
        self.coeff(&ExponentVector::q(d))
    }

    /// Dense list of the `q^0..=q^n` coefficients of a variable-free series.
    pub fn q_coeffs(&self, n: i64) -> Result<Vec<BigInt>, QError> {
        (0..=n).map(|d| self.q_coeff(d)).collect()
    }

    /// Truncate to a (lower) order.
    pub fn truncate(&self, n: i64) -> Series {
        let order = min_opt(self.order, Some(n));
        Series::from_grades(self.grades.clone(), order, self.floor)
    }

    pub fn neg(&self) -> Series {
        let grades = self.grades.iter().map(|(d, g)| (*d, g.iter().map(|(e, c)| (e.clone(), -c)).collect())).collect();
        Series { grades, order: self.order, floor: self.floor }
    }

    pub fn add(&self, other: &Series) -> Series {
        let order = min_opt(self.order, other.order);
        let mut grades = self.grades.clone();
        for (d, g) in &other.grades {
            if order.is_some_and(|n| *d > n) {
                break;
            }
            grade_add_into(grades.entry(*d).or_default(), g);
        }
        Series::from_grades(grades, order, self.floor.min(other.floor))
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    /// Multiply by an exact monomial.
    pub fn mul_monomial(&self, m: &Monomial) -> Series {
        if m.is_zero() {
            return match self.order {
                Some(n) => Series::zero(n),
                None => Series::zero_exact(),
            };
        }
        let shift = m.exps.qexp;
        let grades =
            self.grades.iter().map(|(d, g)| (d + shift, grade_mul_monomial(g, &m.coeff, &m.exps.vars))).collect();
        Series { grades, order: self.order.map(|n| n + shift), floor: (self.floor + shift.min(0)).min(0) }
    }

    /// Highest order at which the product of `self` and `other` is fully determined.
    fn product_sound_order(&self, other: &Series) -> Option<i64> {
        // A discarded term of one factor meets the lowest term of the other.
        let v1 = self.valuation();
        let v2 = other.valuation();
        min_opt(add_opt(self.order, v2), add_opt(other.order, v1))
    }

    /// Product with result order `min(order1, order2)`, lowered further when a
    /// negative-valuation factor meets a truncated one, and capped at `limit`.
    pub fn mul_truncated(&self, other: &Series, limit: Option<i64>) -> Series {
        let order = min_opt(min_opt(min_opt(self.order, other.order), self.product_sound_order(other)), limit);
        let mut grades: BTreeMap<i64, Grade> = BTreeMap::new();
        let vb = match other.valuation() {
            Some(v) => v,
            None => return Series::from_grades(grades, order, 0),
        };
        for (da, ga) in &self.grades {
            if order.is_some_and(|n| da + vb > n) {
                break;
            }
            let iter: Box<dyn Iterator<Item = (&i64, &Grade)>> = match order {
                Some(n) => Box::new(other.grades.range(..=n - da)),
                None => Box::new(other.grades.iter()),
            };
            for (db, gb) in iter {
                grade_mul_into(grades.entry(da + db).or_default(), ga, gb);
            }
        }
        Series::from_grades(grades, order, (self.floor + other.floor).min(0))
    }

    pub fn mul(&self, other: &Series) -> Series {
        self.mul_truncated(other, None)
    }

    /// Product guaranteed to be determined through `order`.
    pub fn mul_to(&self, other: &Series, order: i64) -> Result<Series, QError> {
        let p = self.mul_truncated(other, Some(order));
        match p.order {
            Some(n) if n < order => Err(QError::TruncationUnsound { needed: order, available: n }),
            _ => Ok(p),
        }
    }

    pub fn pow(&self, k: u32) -> Series {
        let mut acc = match self.order {
            Some(n) => Series::one(n),
            None => Series::one_exact(),
        };
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self * (1 - m)`.
    pub fn mul_one_minus(&self, m: &Monomial) -> Series {
        self.sub(&self.mul_monomial(m))
    }

    /// `self / (1 - m)` through `order`, for `m` of positive `q`-degree.
    pub fn div_one_minus(&self, m: &Monomial, order: i64) -> Result<Series, QError> {
        let step = m.exps.qexp;
        if step < 1 {
            return Err(QError::NotTruncatable(format!("1/(1 - {}) needs positive q-degree", m.dsl_text())));
        }
        let order = min_opt(self.order, Some(order)).expect("bounded order");
        let mut grades = self.grades.clone();
        grades.retain(|&d, _| d <= order);
        let Some(start) = grades.keys().next().copied() else {
            return Ok(Series::zero(order));
        };
        // Geometric recursion t = s + m t, ascending in q.
        for d in (start + step)..=order {
            if let Some(prev) = grades.get(&(d - step)) {
                let add = grade_mul_monomial(prev, &m.coeff, &m.exps.vars);
                grade_add_into(grades.entry(d).or_default(), &add);
            }
        }
        Ok(Series::from_grades(grades, Some(order), self.floor))
    }

    /// Multiplicative inverse through `order`.
    ///
    /// The lowest `q`-grade must be a single monomial with coefficient ±1; it is
    /// factored out, the remaining `1 + (higher)` part is inverted by the usual
    /// coefficient recursion, and the monomial's inverse multiplied back in.
    pub fn invert(&self, order: i64) -> Result<Series, QError> {
        let Some((&v, low)) = self.grades.iter().next() else {
            return Err(QError::NotInvertible("zero series".into()));
        };
        if low.len() != 1 {
            return Err(QError::NotInvertible(format!("lowest q-grade q^{} has {} terms", v, low.len())));
        }
        let (lead_vars, lead_coeff) = low.iter().next().unwrap();
        if !lead_coeff.abs().is_one() {
            return Err(QError::NotInvertible(format!("leading coefficient {} is not a unit", lead_coeff)));
        }
        let lead = Monomial::new(lead_coeff.clone(), ExponentVector::new(v, lead_vars.clone()));
        let lead_inv = lead.inv().expect("unit");
        // Result order in the caller's units, and the depth needed in the 1+h part.
        let sound = self.order.map(|n| n - 2 * v);
        let out_order = min_opt(sound, Some(order)).unwrap();
        let depth = out_order + v;
        let unit_coeff = lead_inv.coeff.clone();
        let unit_vars = lead_inv.exps.vars.clone();
        let h: BTreeMap<i64, Grade> = self
            .grades
            .iter()
            .skip(1)
            .map(|(d, g)| (d - v, grade_mul_monomial(g, &unit_coeff, &unit_vars)))
            .filter(|(k, _)| *k <= depth)
            .collect();
        let mut t: BTreeMap<i64, Grade> = BTreeMap::new();
        let mut g0 = Grade::new();
        g0.insert(VarExps::new(), BigInt::one());
        t.insert(0, g0);
        for n in 1..=depth.max(0) {
            let mut acc = Grade::new();
            for (&k, hk) in h.range(1..=n) {
                if let Some(tn) = t.get(&(n - k)) {
                    grade_mul_into(&mut acc, hk, tn);
                }
            }
            acc.retain(|_, c| !c.is_zero());
            if !acc.is_empty() {
                for c in acc.values_mut() {
                    *c = -&*c;
                }
                t.insert(n, acc);
            }
        }
        if depth < 0 {
            t.clear();
        }
        let inner = Series::from_grades(t, Some(depth), 0);
        let mut out = inner.mul_monomial(&lead_inv);
        out.floor = (-v).min(0);
        Ok(out)
    }

    /// Substitute `q -> q^d`.
    pub fn rescale_base(&self, d: i64) -> Series {
        assert!(d >= 1, "rescale factor must be positive");
        let grades = self.grades.iter().map(|(k, g)| (k * d, g.clone())).collect();
        Series { grades, order: self.order.map(|n| n * d), floor: self.floor * d }
    }

    /// Substitute a formal variable by ±1.
    pub fn substitute(&self, tag: VarTag, value: i64) -> Series {
        let terms = self.monomials().into_iter().map(|m| m.substitute(tag, value));
        match self.order {
            Some(n) => Series::from_terms(terms, n),
            None => Series::exact(terms),
        }
    }

    /// Split by the exponent of `tag`: `self = sum_k tag^k * parts[k]`.
    pub fn split_var(&self, tag: VarTag) -> BTreeMap<i64, Series> {
        let mut parts: BTreeMap<i64, Vec<Monomial>> = BTreeMap::new();
        for (d, e, c) in self.terms() {
            let k = e.get(tag);
            parts.entry(k).or_default().push(Monomial::new(c.clone(), ExponentVector::new(d, e.without(tag))));
        }
        parts
            .into_iter()
            .map(|(k, ms)| {
                let s = match self.order {
                    Some(n) => Series::from_terms(ms, n),
                    None => Series::exact(ms),
                };
                (k, s)
            })
            .collect()
    }

    /// Declare a floor; fails when a stored term sits below it.
    pub fn into_floor(mut self, floor: i64) -> Result<Series, QError> {
        if let Some(v) = self.valuation() {
            if v < floor {
                return Err(QError::BelowFloor { qexp: v, floor });
            }
        }
        self.floor = floor;
        Ok(self)
    }

    /// First exponent (canonical order, `qexp <= upto`) where the two differ.
    pub fn first_difference(&self, other: &Series, upto: i64) -> Option<(ExponentVector, BigInt, BigInt)> {
        let zero = BigInt::zero();
        let degrees: std::collections::BTreeSet<i64> =
            self.grades.range(..=upto).map(|(d, _)| *d).chain(other.grades.range(..=upto).map(|(d, _)| *d)).collect();
        for d in degrees {
            let empty = Grade::new();
            let a = self.grades.get(&d).unwrap_or(&empty);
            let b = other.grades.get(&d).unwrap_or(&empty);
            let keys: std::collections::BTreeSet<&VarExps> = a.keys().chain(b.keys()).collect();
            for k in keys {
                let ca = a.get(k).unwrap_or(&zero);
                let cb = b.get(k).unwrap_or(&zero);
                if ca != cb {
                    return Some((ExponentVector::new(d, k.clone()), ca.clone(), cb.clone()));
                }
            }
        }
        None
    }

    /// Canonical serialization: `<coeff>*q^<e>[*<var>^<e>...]` joined by ` + `.
    pub fn canonical_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(d, e, c)| Monomial::new(c.clone(), ExponentVector::new(d, e.clone())).to_string())
            .collect();
        parts.join(" + ")
    }

    /// Parse the canonical serialization into an exact series.
    pub fn parse_canonical(text: &str) -> Result<Series, QError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Series::zero_exact());
        }
        let mut terms = Vec::new();
        for part in text.split(" + ") {
            let mut pieces = part.split('*');
            let coeff: BigInt = pieces
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| QError::Malformed(format!("bad coefficient in `{}`", part)))?;
            let mut exps = ExponentVector::default();
            let mut seen_q = false;
            for p in pieces {
                let (name, e) =
                    p.split_once('^').ok_or_else(|| QError::Malformed(format!("missing exponent in `{}`", p)))?;
                let e: i64 = e.parse().map_err(|_| QError::Malformed(format!("bad exponent in `{}`", p)))?;
                if name == "q" {
                    exps.qexp = e;
                    seen_q = true;
                } else {
                    let tag = VarTag::new(name).map_err(|err| QError::Malformed(err.to_string()))?;
                    exps.vars.add_exp(tag, e);
                }
            }
            if !seen_q {
                return Err(QError::Malformed(format!("term `{}` lacks q^<e>", part)));
            }
            terms.push(Monomial::new(coeff, exps));
        }
        Ok(Series::exact(terms))
    }
}

/// Equality of stored terms and truncation order.
impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.grades == other.grades
    }
}

impl Eq for Series {}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i64) -> Monomial {
        Monomial::q_pow(e)
    }

    fn poly(coeffs: &[i64], order: i64) -> Series {
        Series::from_terms(
            coeffs.iter().enumerate().map(|(i, &c)| Monomial::new(c, ExponentVector::q(i as i64))),
            order,
        )
    }

    fn dense(s: &Series, n: i64) -> Vec<i64> {
        s.q_coeffs(n).unwrap().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    fn x() -> VarTag {
        VarTag::new("x").unwrap()
    }

    #[test]
    fn add_cancels_to_constant() {
        let s = poly(&[1, 1], 5).add(&poly(&[1, -1], 5));
        assert_eq!(s.canonical_text(), "2*q^0");
    }

    #[test]
    fn add_zero_is_identity() {
        let s = poly(&[3, 0, -2], 4);
        assert_eq!(s.add(&Series::zero(4)), s);
    }

    #[test]
    fn like_terms_merge() {
        let xq = Monomial::new(1, ExponentVector::new(1, VarExps::single(x(), 1)));
        let s = Series::from_terms([xq.clone()], 3).add(&Series::from_terms([xq], 3));
        assert_eq!(s.canonical_text(), "2*q^1*x^1");
    }

    #[test]
    fn product_truncates() {
        let s = poly(&[1, -1], 3).mul(&poly(&[1, 1, 1, 1], 3));
        assert_eq!(s.canonical_text(), "1*q^0");
        assert_eq!(s.order(), Some(3));
    }

    #[test]
    fn laurent_cancellation() {
        let a = Monomial::new(1, ExponentVector::new(1, VarExps::single(x(), -1)));
        let b = Monomial::new(1, ExponentVector::new(-1, VarExps::single(x(), 1)));
        let p = Series::from_monomial(a).mul(&Series::from_monomial(b));
        assert_eq!(p, Series::one_exact());
    }

    #[test]
    fn square_matches_convolution() {
        let a = [1i64, 1, 0, 1, 1];
        let mut conv = [0i64; 5];
        for i in 0..5 {
            for j in 0..5 - i {
                conv[i + j] += a[i] * a[j];
            }
        }
        let s = poly(&a, 4);
        assert_eq!(dense(&s.mul(&s), 4), conv.to_vec());
        assert_eq!(conv, [1, 2, 1, 2, 4]);
    }

    #[test]
    fn invert_geometric() {
        let inv = poly(&[1, -1], 4).invert(4).unwrap();
        assert_eq!(dense(&inv, 4), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn invert_partitions_into_ones_and_twos() {
        let p = Series::exact([q(0), q(1).neg()]).mul(&Series::exact([q(0), q(2).neg()]));
        let inv = p.invert(4).unwrap();
        // partitions of n into parts 1 and 2: floor(n/2)+1
        let oracle: Vec<i64> = (0..=4).map(|n| n / 2 + 1).collect();
        assert_eq!(dense(&inv, 4), oracle);
        assert_eq!(oracle, vec![1, 1, 2, 2, 3]);
    }

    #[test]
    fn invert_non_unit_fails() {
        let err = poly(&[2, -1], 4).invert(4).unwrap_err();
        assert_eq!(err.name(), "NotInvertible");
    }

    #[test]
    fn invert_with_unit_monomial_factoring() {
        // 1/(1 - q^-1) = -q/(1 - q)
        let s = Series::exact([q(0), q(-1).neg()]);
        let inv = s.invert(4).unwrap();
        assert_eq!(dense(&inv, 4), vec![0, -1, -1, -1, -1]);
        assert_eq!(s.mul_to(&inv, 3).unwrap().truncate(3), Series::one(3));
    }

    #[test]
    fn coeff_queries() {
        let s = poly(&[1, 2], 3);
        assert_eq!(s.q_coeff(1).unwrap(), BigInt::from(2));
        let xq = Series::from_terms([Monomial::new(1, ExponentVector::new(1, VarExps::single(x(), 1)))], 3);
        let yq = ExponentVector::new(1, VarExps::single(VarTag::new("y").unwrap(), 1));
        assert_eq!(xq.coeff(&yq).unwrap(), BigInt::zero());
        assert_eq!(s.q_coeff(4).unwrap_err().name(), "QueryBeyondOrder");
    }

    #[test]
    fn rescale() {
        assert_eq!(poly(&[1, -1], 5).rescale_base(2), poly(&[1, 0, -1], 10));
        let s = poly(&[1, 4, 0, 2], 6);
        assert_eq!(s.rescale_base(1), s);
        let xq3 = Series::exact([Monomial::new(1, ExponentVector::new(3, VarExps::single(x(), 1)))]);
        assert_eq!(xq3.rescale_base(3).canonical_text(), "1*q^9*x^1");
    }

    #[test]
    fn negative_valuation_against_truncated_partner() {
        let inv_q = Series::from_monomial(q(-2));
        let t = poly(&[1, 1, 1, 1], 5);
        let p = inv_q.mul(&t);
        assert_eq!(p.order(), Some(3));
        assert_eq!(inv_q.mul_to(&t, 5).unwrap_err().name(), "TruncationUnsound");
    }

    #[test]
    fn div_one_minus_matches_invert() {
        let a = Series::one(10).div_one_minus(&q(2), 10).unwrap();
        let b = poly(&[1, 0, -1], 10).invert(10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_round_trip() {
        let m = Monomial::new(-3, ExponentVector::new(2, VarExps::from_pairs([(x(), -1)])));
        let s = Series::exact([q(0), m]);
        let text = s.canonical_text();
        assert_eq!(text, "1*q^0 + -3*q^2*x^-1");
        assert_eq!(Series::parse_canonical(&text).unwrap().canonical_text(), text);
        assert!(Series::parse_canonical("3*x^1").is_err());
    }

    #[test]
    fn first_difference_in_canonical_order() {
        let a = poly(&[1, 2, 3], 5);
        let b = poly(&[1, 2, 4], 5);
        let (e, ca, cb) = a.first_difference(&b, 5).unwrap();
        assert_eq!((e.qexp, ca, cb), (2, BigInt::from(3), BigInt::from(4)));
        assert!(a.first_difference(&a, 5).is_none());
    }

    #[test]
    fn floor_enforcement() {
        let s = Series::exact([q(-1)]);
        assert_eq!(s.clone().into_floor(0).unwrap_err().name(), "BelowFloor");
        assert!(s.into_floor(-1).is_ok());
    }
}
