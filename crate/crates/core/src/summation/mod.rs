//! Unilateral and bilateral multiple sums
//! `sum_n sign(n) v^{w.n} q^{Q(n)} prod (a; q^b)_{L(n)} / prod (a; q^b)_{L(n)}`.

mod forms;

pub use forms::{LinearForm, QuadForm};

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::qfactorial::{poch_valuation, scale_monomial, PochValuation, ProductAssembler};
use crate::qring::{ExponentVector, Monomial, QError, Series, VarExps, VarTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `n >= 0`
    Natural,
    /// `n in Z`
    Integer,
}

/// `(arg; q^basepow)_{count(n)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PochTerm {
    pub arg: Monomial,
    pub basepow: i64,
    pub count: LinearForm,
}

impl PochTerm {
    pub fn new(arg: Monomial, basepow: i64, count: LinearForm) -> Self {
        PochTerm { arg, basepow, count }
    }

    /// `(q; q)_{n_i}`.
    pub fn q_factorial(dim: usize, i: usize) -> Self {
        PochTerm::new(Monomial::q_pow(1), 1, LinearForm::index(dim, i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSpec {
    pub names: Vec<String>,
    pub domains: Vec<Domain>,
    pub form: QuadForm,
    /// Parity of this polynomial gives the sign.
    pub signform: QuadForm,
    /// Per index, the exponent each variable picks up per unit step.
    pub varweights: Vec<BTreeMap<VarTag, i64>>,
    /// Constant monomial factor in front of every term.
    pub scale: Monomial,
    pub numers: Vec<PochTerm>,
    pub denoms: Vec<PochTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumError {
    #[error("point {point:?} lies outside the declared domain")]
    Domain { point: Vec<i64> },
    #[error("support enumeration reached the shell cap {cap} with {points} points collected")]
    EnumerationCapped { cap: i64, points: usize },
    #[error("sum leaves a residual term at q^{qexp}")]
    NegativeValuationResidual { qexp: i64 },
    #[error("exponent or sign is not an integer at {point:?}")]
    NonIntegral { point: Vec<i64> },
    #[error(transparent)]
    Kernel(#[from] QError),
}

impl SumError {
    pub fn name(&self) -> &'static str {
        match self {
            SumError::Domain { .. } => "DomainError",
            SumError::EnumerationCapped { .. } => "EnumerationCapped",
            SumError::NegativeValuationResidual { .. } => "NegativeValuationResidual",
            SumError::NonIntegral { .. } => "NonIntegralExponent",
            SumError::Kernel(e) => e.name(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportReport {
    pub points: Vec<Vec<i64>>,
    pub shells_scanned: i64,
    pub capped: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SumOptions {
    /// Override for the shell radius cap (default `4 (N + 4)`).
    pub shell_cap: Option<i64>,
}

pub fn default_shell_cap(order: i64) -> i64 {
    4 * (order.max(0) + 4)
}

/// Restriction on the exponent of one variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightFilter {
    Eq(i64),
    Above(i64),
    Below(i64),
}

impl WeightFilter {
    fn admits(self, w: i64) -> bool {
        match self {
            WeightFilter::Eq(k) => w == k,
            WeightFilter::Above(k) => w > k,
            WeightFilter::Below(k) => w < k,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SumEvaluation {
    pub series: Series,
    pub support: SupportReport,
}

/// Exact valuation of a single term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TermValuation {
    Zero,
    Finite(Rational64),
}

impl SumSpec {
    /// Empty sum shell over `names`: `Q = 0`, no sign, no factorials.
    pub fn new(names: Vec<String>, domains: Vec<Domain>) -> Self {
        let dim = names.len();
        assert_eq!(dim, domains.len());
        SumSpec {
            names,
            domains,
            form: QuadForm::zero(dim),
            signform: QuadForm::zero(dim),
            varweights: vec![BTreeMap::new(); dim],
            scale: Monomial::one(),
            numers: Vec::new(),
            denoms: Vec::new(),
        }
    }

    /// The Nahm sum `sum_{n >= 0} q^{½nᵀAn + Bn + C} / prod (q;q)_{n_i}`.
    pub fn nahm(a: &[Vec<Rational64>], b: &[Rational64], c: Rational64) -> Self {
        let dim = b.len();
        let names = (1..=dim).map(|i| format!("n{i}")).collect();
        let mut spec = SumSpec::new(names, vec![Domain::Natural; dim]);
        spec.form = QuadForm::from_abc(a, b, c);
        spec.denoms = (0..dim).map(|i| PochTerm::q_factorial(dim, i)).collect();
        spec
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn in_domain(&self, p: &[i64]) -> bool {
        p.len() == self.dim() && self.domains.iter().zip(p).all(|(d, &x)| *d == Domain::Integer || x >= 0)
    }

    /// Exponent of `tag` carried by the term at `p`.
    pub fn var_weight(&self, tag: VarTag, p: &[i64]) -> i64 {
        let mut e = self.scale.var_exp(tag);
        for (w, x) in self.varweights.iter().zip(p) {
            e += w.get(&tag).copied().unwrap_or(0) * x;
        }
        e
    }

    /// Does any factorial argument mention `tag`?
    pub fn poch_mentions(&self, tag: VarTag) -> bool {
        self.numers.iter().chain(&self.denoms).any(|t| t.arg.var_exp(tag) != 0)
    }

    /// Smallest `d` such that `q -> q^d` makes every exponent integral.
    pub fn base_scale(&self) -> i64 {
        self.form.integrality_scale()
    }

    /// Substitute `q -> q^d` throughout.
    pub fn rescaled(&self, d: i64) -> SumSpec {
        let mut out = self.clone();
        out.form = self.form.rescaled(d);
        out.scale = scale_monomial(&self.scale, d);
        for t in out.numers.iter_mut().chain(out.denoms.iter_mut()) {
            t.arg = scale_monomial(&t.arg, d);
            t.basepow *= d;
        }
        out
    }

    fn valuation(&self, p: &[i64]) -> Result<TermValuation, SumError> {
        let mut v = self.form.eval(p) + Rational64::from_integer(self.scale.qexp());
        for t in &self.numers {
            match poch_valuation(&t.arg, t.basepow, t.count.eval(p)) {
                PochValuation::Zero => return Ok(TermValuation::Zero),
                PochValuation::Infinite => return Err(zero_divisor(t, t.count.eval(p)).into()),
                PochValuation::Finite(x) => v += x,
            }
        }
        for t in &self.denoms {
            match poch_valuation(&t.arg, t.basepow, t.count.eval(p)).recip() {
                PochValuation::Zero => return Ok(TermValuation::Zero),
                PochValuation::Infinite => return Err(vanishing_denominator(t, t.count.eval(p)).into()),
                PochValuation::Finite(x) => v += x,
            }
        }
        Ok(TermValuation::Finite(v))
    }

    /// Substitute a formal variable by ±1.
    pub fn substitute(&self, tag: VarTag, value: i64) -> SumSpec {
        assert!(value == 1 || value == -1, "only ±1 keeps coefficients integral");
        let dim = self.dim();
        let mut out = self.clone();
        for i in 0..dim {
            if let Some(e) = out.varweights[i].remove(&tag) {
                if value == -1 {
                    out.signform = out.signform.add(&QuadForm::index(dim, i).scale(Rational64::from_integer(e)));
                }
            }
        }
        out.scale = self.scale.substitute(tag, value);
        for t in out.numers.iter_mut().chain(out.denoms.iter_mut()) {
            t.arg = t.arg.substitute(tag, value);
        }
        out
    }

    /// Is `Q` positive definite on the bilateral directions? With `slice`, only
    /// directions along which the exponent of that variable stays fixed count.
    pub fn is_definite(&self, slice: Option<VarTag>) -> bool {
        let dim = self.dim();
        let bilateral: Vec<usize> = (0..dim).filter(|&i| self.domains[i] == Domain::Integer).collect();
        if bilateral.is_empty() {
            return true;
        }
        match slice {
            Some(tag) => {
                let w: Vec<i64> = (0..dim).map(|i| self.varweights[i].get(&tag).copied().unwrap_or(0)).collect();
                self.form.is_positive_definite_on_span(&kernel_basis(&w, &bilateral, dim))
            }
            None => self.form.is_positive_definite_on(&bilateral),
        }
    }

    /// Points whose term has valuation `<= order`, scanning L-infinity shells.
    ///
    /// With `filter = Some((t, f))` only points whose `t`-exponent passes `f` count.
    pub fn enumerate_support(
        &self,
        order: i64,
        filter: Option<(VarTag, WeightFilter)>,
        opts: &SumOptions,
    ) -> Result<SupportReport, SumError> {
        let cap = opts.shell_cap.unwrap_or_else(|| default_shell_cap(order));
        let mut report = SupportReport::default();
        let limit = Rational64::from_integer(order);

        let slice = match filter {
            Some((tag, WeightFilter::Eq(_))) => Some(tag),
            _ => None,
        };
        let definite = self.is_definite(slice);
        if !definite {
            report.warnings.push("quadratic part is not positive definite on the bilateral directions".into());
        }
        let center_radius =
            self.form.center().map(|c| c.iter().map(|x| x.abs().ceil().to_integer()).max().unwrap_or(0)).unwrap_or(0);
        let needed_empty = if definite { 2 } else { 4 };
        let filter_radius = filter.map_or(0, |(tag, f)| self.filter_radius(tag, f));

        let mut empty_run = 0;
        let mut radius = 0;
        loop {
            if radius > cap {
                report.capped = true;
                return Err(SumError::EnumerationCapped { cap, points: report.points.len() });
            }
            let mut found = false;
            for p in shell_points(&self.domains, radius) {
                if let Some((tag, f)) = filter {
                    if !f.admits(self.var_weight(tag, &p)) {
                        continue;
                    }
                }
                if let TermValuation::Finite(v) = self.valuation(&p)? {
                    if v <= limit {
                        found = true;
                        report.points.push(p);
                    }
                }
            }
            report.shells_scanned = radius + 1;
            empty_run = if found { 0 } else { empty_run + 1 };
            if empty_run >= needed_empty && radius > center_radius + 1 && radius > filter_radius {
                break;
            }
            radius += 1;
        }
        report.points.sort();
        Ok(report)
    }

    /// Smallest L-infinity radius at which a point can pass the filter.
    fn filter_radius(&self, tag: VarTag, f: WeightFilter) -> i64 {
        let base = self.scale.var_exp(tag);
        let total: i64 = self.varweights.iter().map(|w| w.get(&tag).copied().unwrap_or(0).abs()).sum();
        let gap = match f {
            WeightFilter::Eq(k) => (k - base).abs(),
            WeightFilter::Above(k) => (k + 1 - base).max(0),
            WeightFilter::Below(k) => (base - (k - 1)).max(0),
        };
        if total == 0 {
            0
        } else {
            Integer::div_ceil(&gap, &total)
        }
    }

    /// The term at `p` through `order`.
    pub fn term_series(&self, p: &[i64], order: i64) -> Result<Series, SumError> {
        self.assemble_term(p, order, None)
    }

    pub(crate) fn assemble_term(&self, p: &[i64], order: i64, drop: Option<VarTag>) -> Result<Series, SumError> {
        if !self.in_domain(p) {
            return Err(SumError::Domain { point: p.to_vec() });
        }
        let qv = self.form.eval(p);
        let sv = self.signform.eval(p);
        if !qv.is_integer() || !sv.is_integer() {
            return Err(SumError::NonIntegral { point: p.to_vec() });
        }
        let mut vars = self.scale.exps.vars.clone();
        for (w, &x) in self.varweights.iter().zip(p) {
            for (&tag, &e) in w {
                vars.add_exp(tag, e * x);
            }
        }
        if let Some(tag) = drop {
            vars = vars.without(tag);
        }
        let mut lead =
            Monomial::new(self.scale.coeff.clone(), ExponentVector::new(self.scale.qexp() + qv.to_integer(), vars));
        if sv.to_integer().is_odd() {
            lead = lead.neg();
        }

        let mut asm = ProductAssembler::new();
        asm.mul_monomial(&lead);
        for t in &self.numers {
            let n = t.count.eval(p);
            if n >= 0 {
                if !asm.mul_factorial(&t.arg, t.basepow, 0, n, 1) {
                    return Ok(Series::zero(order));
                }
            } else if !asm.mul_factorial(&t.arg, t.basepow, n, -n, -1) {
                return Err(zero_divisor(t, n).into());
            }
        }
        for t in &self.denoms {
            let n = t.count.eval(p);
            if n < 0 {
                if !asm.mul_factorial(&t.arg, t.basepow, n, -n, 1) {
                    return Ok(Series::zero(order));
                }
            } else if !asm.mul_factorial(&t.arg, t.basepow, 0, n, -1) {
                return Err(vanishing_denominator(t, n).into());
            }
        }
        Ok(asm.finish(order)?)
    }
}

fn zero_divisor(t: &PochTerm, n: i64) -> QError {
    QError::ZeroDivisor(format!("({}; q^{})_{} is infinite", t.arg.dsl_text(), t.basepow, n))
}

fn vanishing_denominator(t: &PochTerm, n: i64) -> QError {
    QError::NotInvertible(format!("({}; q^{})_{} vanishes in a denominator", t.arg.dsl_text(), t.basepow, n))
}

/// Basis of `{v : v_i = 0 off idx, w.v = 0}` as rational vectors.
fn kernel_basis(w: &[i64], idx: &[usize], dim: usize) -> Vec<Vec<Rational64>> {
    let unit = |i: usize| {
        let mut v = vec![Rational64::zero(); dim];
        v[i] = Rational64::from_integer(1);
        v
    };
    let Some(&pivot) = idx.iter().find(|&&i| w[i] != 0) else {
        return idx.iter().map(|&i| unit(i)).collect();
    };
    idx.iter()
        .filter(|&&i| i != pivot)
        .map(|&i| {
            let mut v = unit(i);
            v[pivot] = -Rational64::new(w[i], w[pivot]);
            v
        })
        .collect()
}

/// Lattice points of the domain with L-infinity norm exactly `radius`.
fn shell_points(domains: &[Domain], radius: i64) -> Vec<Vec<i64>> {
    let dim = domains.len();
    if dim == 0 {
        return if radius == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let ranges: Vec<(i64, i64)> = domains
        .iter()
        .map(|d| match d {
            Domain::Natural => (0, radius),
            Domain::Integer => (-radius, radius),
        })
        .collect();
    let mut out = Vec::new();
    let mut p: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        if p.iter().any(|x| x.abs() == radius) {
            out.push(p.clone());
        }
        let mut i = 0;
        loop {
            if i == dim {
                return out;
            }
            if p[i] < ranges[i].1 {
                p[i] += 1;
                break;
            }
            p[i] = ranges[i].0;
            i += 1;
        }
    }
}

fn sum_terms(terms: Vec<Series>, order: i64) -> Series {
    terms.iter().fold(Series::zero(order), |acc, t| acc.add(t))
}

/// `sum` through `order`, rescaling `q` first if the exponents are fractional.
///
/// The returned series is in the rescaled base; `support` lists the points used.
pub fn eval_sum_with(spec: &SumSpec, order: i64, opts: &SumOptions) -> Result<SumEvaluation, SumError> {
    let d = spec.base_scale();
    let (spec, order) = if d > 1 { (spec.rescaled(d), order * d) } else { (spec.clone(), order) };
    let support = spec.enumerate_support(order, None, opts)?;
    let terms = support.points.par_iter().map(|p| spec.assemble_term(p, order, None)).collect::<Result<Vec<_>, _>>()?;
    let series = sum_terms(terms, order).truncate(order);
    let series = series.into_floor(0).map_err(|e| match e {
        QError::BelowFloor { qexp, .. } => SumError::NegativeValuationResidual { qexp },
        e => e.into(),
    })?;
    Ok(SumEvaluation { series, support })
}

pub fn eval_sum(spec: &SumSpec, order: i64) -> Result<Series, SumError> {
    Ok(eval_sum_with(spec, order, &SumOptions::default())?.series)
}

/// The part of the sum carrying `tag^k`, with `tag` removed, through `order`.
///
/// Exponents must already be integral. No floor is imposed: a single slice may
/// legitimately start below `q^0`.
pub fn eval_sum_slice(
    spec: &SumSpec,
    tag: VarTag,
    k: i64,
    order: i64,
    opts: &SumOptions,
) -> Result<SumEvaluation, SumError> {
    if spec.poch_mentions(tag) {
        return Err(QError::NotTruncatable(format!("factorial arguments mention the sliced variable {tag}")).into());
    }
    let support = spec.enumerate_support(order, Some((tag, WeightFilter::Eq(k))), opts)?;
    let terms =
        support.points.par_iter().map(|p| spec.assemble_term(p, order, Some(tag))).collect::<Result<Vec<_>, _>>()?;
    Ok(SumEvaluation { series: sum_terms(terms, order).truncate(order), support })
}

/// Terms at `points` summed per exponent of `tag`, with `tag` removed.
pub(crate) fn terms_by_weight(
    spec: &SumSpec,
    points: &[Vec<i64>],
    tag: VarTag,
    order: i64,
) -> Result<BTreeMap<i64, Series>, SumError> {
    let terms = points
        .par_iter()
        .map(|p| Ok((spec.var_weight(tag, p), spec.assemble_term(p, order, Some(tag))?)))
        .collect::<Result<Vec<_>, SumError>>()?;
    let mut out: BTreeMap<i64, Series> = BTreeMap::new();
    for (k, t) in terms {
        let slot = out.entry(k).or_insert_with(|| Series::zero(order));
        *slot = slot.add(&t);
    }
    Ok(out)
}

/// Weight map helper: `{tag: e}`.
pub fn weight(tag: VarTag, e: i64) -> BTreeMap<VarTag, i64> {
    BTreeMap::from([(tag, e)])
}

/// A monomial `coeff * vars * q^e` from parts.
pub fn monomial(coeff: i64, qexp: i64, vars: &[(VarTag, i64)]) -> Monomial {
    Monomial::new(coeff, ExponentVector::new(qexp, VarExps::from_pairs(vars.iter().copied())))
}

#[cfg(test)]
mod tests;
