//! Laurent series in an auxiliary variable `z` with truncated-series
//! coefficients, and extraction of single `z`-coefficients.

mod replay;

pub use replay::{
    exponent_identity_holds, main_theorem_specs, prove_main_theorem, MainSpecs, ProofReplay, ReplayCheck,
};

use std::collections::BTreeMap;

use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::qfactorial::{expand_product_spec, poch_recip_finite, shifted_product, Count, ProductSpec};
use crate::qfactorial::{poch_infinite, poch_infinite_recip};
use crate::qring::{Monomial, QError, Series, VarTag};
use crate::summation::{terms_by_weight, SumError, SumOptions, SumSpec, WeightFilter};
use crate::verify::{compare, Mismatch};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtError {
    #[error("[z^{k}] lies outside the determined window {lo}..={hi}")]
    Window { k: i64, lo: i64, hi: i64 },
    #[error("z-product not determined: {0}")]
    Undetermined(String),
    #[error(transparent)]
    Kernel(#[from] QError),
    #[error(transparent)]
    Sum(#[from] SumError),
}

impl CtError {
    pub fn name(&self) -> &'static str {
        match self {
            CtError::Window { .. } => "ZWindowExceeded",
            CtError::Undetermined(_) => "ZUndetermined",
            CtError::Kernel(e) => e.name(),
            CtError::Sum(e) => e.name(),
        }
    }
}

/// One end of the retained `z`-range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZBound {
    /// Every coefficient beyond this exponent vanishes at the working order.
    Exact(i64),
    /// Coefficients beyond this exponent were not computed.
    Cut(i64),
}

impl ZBound {
    pub fn value(self) -> i64 {
        match self {
            ZBound::Exact(k) | ZBound::Cut(k) => k,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, ZBound::Exact(_))
    }
}

/// `sum_k c_k z^k` with every `c_k` truncated at a common `q`-order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSeries {
    coeffs: BTreeMap<i64, Series>,
    lo: ZBound,
    hi: ZBound,
    order: i64,
}

impl ZSeries {
    fn build(coeffs: BTreeMap<i64, Series>, lo: ZBound, hi: ZBound, order: i64) -> Self {
        let coeffs = coeffs.into_iter().filter(|(k, s)| !s.is_zero() && *k >= lo.value() && *k <= hi.value()).collect();
        ZSeries { coeffs, lo, hi, order }
    }

    pub fn unit(order: i64) -> Self {
        ZSeries::z_power(0, order)
    }

    /// `z^k`.
    pub fn z_power(k: i64, order: i64) -> Self {
        ZSeries::build(BTreeMap::from([(k, Series::one(order))]), ZBound::Exact(k), ZBound::Exact(k), order)
    }

    /// Split a series in which `tag` plays the role of `z`.
    pub fn from_series(s: &Series, tag: VarTag, order: i64) -> Self {
        let s = s.truncate(order);
        let parts = s.split_var(tag);
        let lo = parts.keys().next().copied().unwrap_or(0);
        let hi = parts.keys().last().copied().unwrap_or(0);
        ZSeries::build(parts, ZBound::Exact(lo), ZBound::Exact(hi), order)
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn bounds(&self) -> (ZBound, ZBound) {
        (self.lo, self.hi)
    }

    /// Stored (nonzero) coefficients.
    pub fn coeffs(&self) -> &BTreeMap<i64, Series> {
        &self.coeffs
    }

    /// `[z^k]`; zero outside an exact end, an error outside a cut end.
    pub fn coeff(&self, k: i64) -> Result<Series, CtError> {
        let below = k < self.lo.value() && !self.lo.is_exact();
        let above = k > self.hi.value() && !self.hi.is_exact();
        if below || above {
            return Err(CtError::Window { k, lo: self.lo.value(), hi: self.hi.value() });
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_else(|| Series::zero(self.order)))
    }

    /// Keep only `lo..=hi`; ends that move inward become cut.
    pub fn restrict(&self, lo: i64, hi: i64) -> ZSeries {
        let lo_b = if lo > self.lo.value() { ZBound::Cut(lo) } else { self.lo };
        let hi_b = if hi < self.hi.value() { ZBound::Cut(hi) } else { self.hi };
        ZSeries::build(self.coeffs.clone(), lo_b, hi_b, self.order)
    }

    /// Multiply every coefficient by `s`.
    pub fn scale(&self, s: &Series) -> ZSeries {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, c.mul_truncated(s, Some(self.order)))).collect();
        ZSeries::build(coeffs, self.lo, self.hi, self.order)
    }
}

/// `f + g`; an end is exact only when it is exact on both sides.
pub fn zadd(f: &ZSeries, g: &ZSeries) -> ZSeries {
    let order = f.order.min(g.order);
    let end = |a: ZBound, b: ZBound, low: bool| match (a, b) {
        (ZBound::Exact(x), ZBound::Exact(y)) => ZBound::Exact(if low { x.min(y) } else { x.max(y) }),
        (ZBound::Cut(x), ZBound::Cut(y)) => ZBound::Cut(if low { x.max(y) } else { x.min(y) }),
        (ZBound::Cut(x), ZBound::Exact(_)) | (ZBound::Exact(_), ZBound::Cut(x)) => ZBound::Cut(x),
    };
    let mut coeffs: BTreeMap<i64, Series> = BTreeMap::new();
    for (k, c) in f.coeffs.iter().chain(&g.coeffs) {
        let c = c.truncate(order);
        let slot = coeffs.entry(*k).or_insert_with(|| Series::zero(order));
        *slot = slot.add(&c);
    }
    ZSeries::build(coeffs, end(f.lo, g.lo, true), end(f.hi, g.hi, false), order)
}

impl ZSeries {
    pub fn neg(&self) -> ZSeries {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, c.neg())).collect();
        ZSeries::build(coeffs, self.lo, self.hi, self.order)
    }
}

/// `[z^k] f`.
pub fn z_extract(f: &ZSeries, k: i64) -> Result<Series, CtError> {
    f.coeff(k)
}

/// Range of `k` for which `[z^k](f g)` is determined, plus the bound kinds.
fn product_bounds(f: &ZSeries, g: &ZSeries) -> Result<(ZBound, ZBound), CtError> {
    let (fl, fh, gl, gh) = (f.lo, f.hi, g.lo, g.hi);
    let hi = if fh.is_exact() && gh.is_exact() {
        ZBound::Exact(fh.value() + gh.value())
    } else {
        let mut kh = i64::MAX;
        for (cut, other_lo) in [(fh, gl), (gh, fl)] {
            if !cut.is_exact() {
                if !other_lo.is_exact() {
                    return Err(CtError::Undetermined("both factors are cut on opposite ends".into()));
                }
                kh = kh.min(cut.value() + other_lo.value());
            }
        }
        ZBound::Cut(kh)
    };
    let lo = if fl.is_exact() && gl.is_exact() {
        ZBound::Exact(fl.value() + gl.value())
    } else {
        let mut kl = i64::MIN;
        for (cut, other_hi) in [(fl, gh), (gl, fh)] {
            if !cut.is_exact() {
                if !other_hi.is_exact() {
                    return Err(CtError::Undetermined("both factors are cut on opposite ends".into()));
                }
                kl = kl.max(cut.value() + other_hi.value());
            }
        }
        ZBound::Cut(kl)
    };
    Ok((lo, hi))
}

fn coeff_product(f: &ZSeries, g: &ZSeries, k: i64, order: i64) -> Series {
    let mut acc = Series::zero(order);
    for (a, fa) in &f.coeffs {
        if let Some(gb) = g.coeffs.get(&(k - a)) {
            acc = acc.add(&fa.mul_truncated(gb, Some(order)));
        }
    }
    acc
}

/// Cauchy product in `z`.
pub fn zmul(f: &ZSeries, g: &ZSeries) -> Result<ZSeries, CtError> {
    let (lo, hi) = product_bounds(f, g)?;
    zmul_range(f, g, lo, hi)
}

/// Cauchy product computed only for `lo..=hi` (intersected with what is determined).
pub fn zmul_window(f: &ZSeries, g: &ZSeries, lo: i64, hi: i64) -> Result<ZSeries, CtError> {
    let (l, h) = product_bounds(f, g)?;
    let l = if lo > l.value() { ZBound::Cut(lo) } else { l };
    let h = if hi < h.value() { ZBound::Cut(hi) } else { h };
    zmul_range(f, g, l, h)
}

fn zmul_range(f: &ZSeries, g: &ZSeries, lo: ZBound, hi: ZBound) -> Result<ZSeries, CtError> {
    if lo.value() > hi.value() {
        return Err(CtError::Undetermined(format!("empty window {}..={}", lo.value(), hi.value())));
    }
    let order = f.order.min(g.order);
    // Only exponents reachable from stored coefficients can be nonzero.
    let reach_lo = f.coeffs.keys().next().zip(g.coeffs.keys().next()).map(|(a, b)| a + b);
    let reach_hi = f.coeffs.keys().last().zip(g.coeffs.keys().last()).map(|(a, b)| a + b);
    let ks: Vec<i64> = match (reach_lo, reach_hi) {
        (Some(a), Some(b)) => (a.max(lo.value())..=b.min(hi.value())).collect(),
        _ => Vec::new(),
    };
    let coeffs: BTreeMap<i64, Series> = ks.par_iter().map(|&k| (k, coeff_product(f, g, k, order))).collect();
    Ok(ZSeries::build(coeffs, lo, hi, order))
}

/// `[z^k](f g)` without forming the whole product.
pub fn zmul_extract(f: &ZSeries, g: &ZSeries, k: i64) -> Result<Series, CtError> {
    let (lo, hi) = product_bounds(f, g)?;
    let below = k < lo.value() && !lo.is_exact();
    let above = k > hi.value() && !hi.is_exact();
    if below || above {
        return Err(CtError::Window { k, lo: lo.value(), hi: hi.value() });
    }
    Ok(coeff_product(f, g, k, f.order.min(g.order)))
}

/// `(q, m z, q/(m z); q)_inf = sum_n (-1)^n q^{binom(n,2)} m^n z^n` through `order`.
pub fn jtp_zseries(m: &Monomial, order: i64) -> ZSeries {
    assert!(m.is_unit(), "triple product needs a unit monomial");
    let d = m.qexp();
    let reach = order.max(0) + 2 * d.abs() + 3;
    let mut coeffs = BTreeMap::new();
    for n in -reach..=reach {
        let v = n * (n - 1) / 2;
        let mono = m.pow(n).expect("unit").shift_q(v);
        if mono.qexp() <= order {
            let mono = if n.is_odd() { mono.neg() } else { mono };
            coeffs.insert(n, Series::from_terms([mono], order));
        }
    }
    let lo = coeffs.keys().next().copied().unwrap_or(0);
    let hi = coeffs.keys().last().copied().unwrap_or(0);
    ZSeries::build(coeffs, ZBound::Exact(lo), ZBound::Exact(hi), order)
}

/// The sum with `tag` as `z`, coefficients computed at least for `hint`.
///
/// Each end is extended to exact when the support beyond it is finite, and
/// cut at the hint otherwise.
pub fn sum_zseries(
    spec: &SumSpec,
    tag: VarTag,
    order: i64,
    hint: (i64, i64),
    opts: &SumOptions,
) -> Result<ZSeries, CtError> {
    if spec.poch_mentions(tag) {
        return Err(QError::NotTruncatable(format!("factorial arguments mention {tag}")).into());
    }
    let (lo, hi) = hint;
    let mut points = Vec::new();
    for k in lo..=hi {
        points.extend(spec.enumerate_support(order, Some((tag, WeightFilter::Eq(k))), opts)?.points);
    }
    let mut side = |f: WeightFilter, edge: i64, up: bool| -> Result<ZBound, CtError> {
        match spec.enumerate_support(order, Some((tag, f)), opts) {
            Ok(r) => {
                let ws = r.points.iter().map(|p| spec.var_weight(tag, p));
                let far = if up { ws.max().unwrap_or(edge).max(edge) } else { ws.min().unwrap_or(edge).min(edge) };
                points.extend(r.points);
                Ok(ZBound::Exact(far))
            }
            Err(SumError::EnumerationCapped { .. }) => Ok(ZBound::Cut(edge)),
            Err(e) => Err(e.into()),
        }
    };
    let hi_b = side(WeightFilter::Above(hi), hi, true)?;
    let lo_b = side(WeightFilter::Below(lo), lo, false)?;
    let coeffs = terms_by_weight(spec, &points, tag, order)?;
    Ok(ZSeries::build(coeffs, lo_b, hi_b, order))
}

/// Euler's expansion `(m; q^b)_inf = sum_n (-1)^n q^{b binom(n,2)} m^n / (q^b;q^b)_n`,
/// used when `m` has no positive `q`-degree but carries `z`.
fn euler_zseries(m: &Monomial, b: i64, tag: VarTag, order: i64) -> Result<ZSeries, CtError> {
    let d = m.qexp();
    let mut s = Series::zero(order);
    let mut n = 0i64;
    loop {
        let v = b * n * (n - 1) / 2 + d * n;
        if v > order && b * n + d >= 0 {
            break;
        }
        if v <= order {
            let mono = m.pow(n).expect("non-negative power").shift_q(b * n * (n - 1) / 2);
            let mono = if n.is_odd() { mono.neg() } else { mono };
            let inv = poch_recip_finite(&Monomial::q_pow(b), b, n, order - v)?;
            s = s.add(&inv.mul_monomial(&mono));
        }
        n += 1;
    }
    Ok(ZSeries::from_series(&s, tag, order))
}

/// `1/(m; q^b)_inf = sum_n m^n / (q^b;q^b)_n` for `m` of `q`-degree 0, cut at
/// `z`-exponent `kcut` on the side of `m`'s `z`-exponent.
fn geometric_zseries(m: &Monomial, b: i64, tag: VarTag, order: i64, kcut: i64) -> Result<ZSeries, CtError> {
    let e = m.var_exp(tag);
    let stripped = m.substitute(tag, 1);
    let nmax = if e > 0 { kcut.div_euclid(e) } else { (-kcut).div_euclid(-e) };
    let mut coeffs = BTreeMap::new();
    for n in 0..=nmax {
        let inv = poch_recip_finite(&Monomial::q_pow(b), b, n, order)?;
        coeffs.insert(e * n, inv.mul_monomial(&stripped.pow(n).expect("non-negative power")));
    }
    let (lo, hi) = if e > 0 { (ZBound::Exact(0), ZBound::Cut(kcut)) } else { (ZBound::Cut(kcut), ZBound::Exact(0)) };
    Ok(ZSeries::build(coeffs, lo, hi, order))
}

/// A product in which `tag` plays the role of `z`, determined at least on `|k| <= kmax`.
pub fn product_zseries(p: &ProductSpec, tag: VarTag, order: i64, kmax: i64) -> Result<ZSeries, CtError> {
    let mut plain = ProductSpec::new(p.prefactor.substitute(tag, 1), Vec::new());
    let mut exact: Vec<ZSeries> = vec![ZSeries::z_power(p.prefactor.var_exp(tag), order)];
    let mut cut: Vec<(Monomial, i64)> = Vec::new();
    for f in &p.factors {
        let e = f.arg.var_exp(tag);
        if e == 0 {
            plain.factors.push(f.clone());
            continue;
        }
        let d = f.arg.qexp();
        match f.count {
            Count::Finite(n) => {
                let (start, len) = if n >= 0 { (0, n) } else { (n, -n) };
                let positive = (n >= 0) == (f.expo > 0);
                let poly = match shifted_product(&f.arg, f.basepow, start, len) {
                    Some(poly) => poly,
                    None if positive => {
                        return Ok(ZSeries::build(BTreeMap::new(), ZBound::Exact(0), ZBound::Exact(0), order))
                    }
                    None => {
                        return Err(QError::NotInvertible(format!(
                            "factor ({}; q^{})_{} vanishes",
                            f.arg.dsl_text(),
                            f.basepow,
                            n
                        ))
                        .into())
                    }
                };
                let poly = poly.pow(f.expo.unsigned_abs() as u32);
                let s = if positive { poly.truncate(order) } else { poly.invert(order)? };
                exact.push(ZSeries::from_series(&s, tag, order));
            }
            Count::Infinite if d >= 1 => {
                let one = if f.expo > 0 {
                    poch_infinite(&f.arg, f.basepow, order)?
                } else {
                    poch_infinite_recip(&f.arg, f.basepow, order)?
                };
                let s = one.pow(f.expo.unsigned_abs() as u32);
                exact.push(ZSeries::from_series(&s, tag, order));
            }
            Count::Infinite if f.expo > 0 => {
                for _ in 0..f.expo {
                    exact.push(euler_zseries(&f.arg, f.basepow, tag, order)?);
                }
            }
            Count::Infinite if d == 0 => {
                for _ in 0..-f.expo {
                    cut.push((f.arg.clone(), f.basepow));
                }
            }
            Count::Infinite => {
                return Err(QError::NotTruncatable(format!(
                    "1/({}; q^{})_inf has unbounded negative q-powers per z-coefficient",
                    f.arg.dsl_text(),
                    f.basepow
                ))
                .into())
            }
        }
    }
    exact.push(ZSeries::from_series(&expand_product_spec(&plain, order)?, tag, order));
    let low: i64 = exact.iter().map(|z| z.lo.value()).sum();
    let high: i64 = exact.iter().map(|z| z.hi.value()).sum();
    let mut acc = ZSeries::unit(order);
    for z in &exact {
        acc = zmul(&acc, z)?;
    }
    for (m, b) in &cut {
        let kcut = if m.var_exp(tag) > 0 { kmax - low } else { -kmax - high };
        acc = zmul(&acc, &geometric_zseries(m, *b, tag, order, kcut)?)?;
    }
    Ok(acc)
}

/// Outcome for one `z`-coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZCoeffCheck {
    pub k: i64,
    pub mismatch: Option<Mismatch>,
}

/// Compare `[z^k]` of both sides for `|k| <= kmax`.
pub fn verify_zcoeff_identity(
    lhs: &BTreeMap<i64, Series>,
    rhs: &ZSeries,
    kmax: i64,
    order: i64,
) -> Result<Vec<ZCoeffCheck>, CtError> {
    (-kmax..=kmax)
        .map(|k| {
            let l = lhs.get(&k).cloned().unwrap_or_else(|| Series::zero(order));
            let r = rhs.coeff(k)?;
            Ok(ZCoeffCheck { k, mismatch: compare(&l, &r, order)? })
        })
        .collect()
}

/// `[z^k]` of a sum, for `|k| <= kmax`.
pub fn sum_coefficients(
    spec: &SumSpec,
    tag: VarTag,
    kmax: i64,
    order: i64,
    opts: &SumOptions,
) -> Result<BTreeMap<i64, Series>, CtError> {
    let z = sum_zseries(spec, tag, order, (-kmax, kmax), opts)?;
    (-kmax..=kmax).map(|k| Ok((k, z.coeff(k)?))).collect()
}

#[cfg(test)]
mod tests;
