//! Comparison of the two sides of an identity and the resulting reports.

use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;

use crate::ctengine::{product_zseries, sum_zseries, zadd, zmul, CtError, ZSeries};
use crate::qfactorial::expand_product_spec;
use crate::qring::{ExponentVector, QError, Series, VarTag};
use crate::speclang::{Identity, LExpr};
use crate::summation::{eval_sum_with, SumOptions};

/// First exponent (canonical order) where two series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub exponent: String,
    pub lhs: String,
    pub rhs: String,
}

impl Mismatch {
    pub fn new(e: &ExponentVector, lhs: &BigInt, rhs: &BigInt) -> Self {
        Mismatch { exponent: e.canonical_text(), lhs: lhs.to_string(), rhs: rhs.to_string() }
    }
}

/// Compare through `order`; both sides must be determined that far.
pub fn compare(lhs: &Series, rhs: &Series, order: i64) -> Result<Option<Mismatch>, QError> {
    for s in [lhs, rhs] {
        if let Some(n) = s.order() {
            if n < order {
                return Err(QError::TruncationUnsound { needed: order, available: n });
            }
        }
    }
    Ok(lhs.first_difference(rhs, order).map(|(e, a, b)| Mismatch::new(&e, &a, &b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Mismatch,
    Error,
}

/// Lattice points and shells scanned over all sums of an identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SupportStats {
    pub points: usize,
    pub shells: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    /// Requested order in the identity's own `q`.
    pub order: i64,
    /// Sides were compared in `q^(1/scale)`, through order `order * scale`;
    /// mismatch exponents are in that variable.
    pub scale: i64,
    pub status: Status,
    pub first_mismatch: Option<Mismatch>,
    pub elapsed_ms: u64,
    pub support: Option<SupportStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Transcript>,
}

impl VerificationReport {
    pub fn error(identity: &str, order: i64, kind: &str, message: impl Into<String>) -> Self {
        VerificationReport {
            identity: identity.to_string(),
            order,
            scale: 1,
            status: Status::Error,
            first_mismatch: None,
            elapsed_ms: 0,
            support: None,
            error: Some(ErrorInfo { kind: kind.to_string(), message: message.into() }),
            transcript: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub order: i64,
    /// For identities compared per coefficient of a variable: `|k| <= zwindow`.
    pub zwindow: i64,
    pub shell_cap: Option<i64>,
    pub transcript: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { order: 32, zwindow: 4, shell_cap: None, transcript: false }
    }
}

struct Evaluator {
    sums: SumOptions,
    stats: SupportStats,
}

enum Part<'a> {
    Plain(&'a LExpr),
    Inverse(&'a LExpr),
}

impl Evaluator {
    fn eval(&mut self, e: &LExpr, order: i64) -> Result<Series, CtError> {
        Ok(match e {
            LExpr::Product(p) => expand_product_spec(p, order)?,
            LExpr::Sum(s) => {
                let r = eval_sum_with(s, order, &self.sums)?;
                self.stats.points += r.support.points.len();
                self.stats.shells += r.support.shells_scanned;
                r.series
            }
            LExpr::Add(v) => {
                let mut acc = Series::zero(order);
                for t in v {
                    acc = acc.add(&self.eval(t, order)?.truncate(order));
                }
                acc
            }
            LExpr::Neg(a) => self.eval(a, order)?.neg(),
            LExpr::Mul(v) => self.product(&v.iter().map(Part::Plain).collect::<Vec<_>>(), order)?,
            LExpr::Div(a, b) => self.product(&[Part::Plain(a), Part::Inverse(b)], order)?,
            LExpr::Pow(a, k) => {
                let part = |_| if *k >= 0 { Part::Plain(a) } else { Part::Inverse(a) };
                self.product(&(0..k.unsigned_abs()).map(part).collect::<Vec<_>>(), order)?
            }
        })
    }

    fn part(&mut self, p: &Part, order: i64) -> Result<Series, CtError> {
        match p {
            Part::Plain(e) => self.eval(e, order),
            Part::Inverse(e) => {
                let s = self.eval(e, order)?;
                let v = s.valuation().unwrap_or(0);
                let s = if v > 0 { self.eval(e, order + 2 * v)? } else { s };
                Ok(s.invert(order)?)
            }
        }
    }

    /// Factors of negative valuation are compensated by evaluating the others further.
    fn product(&mut self, parts: &[Part], order: i64) -> Result<Series, CtError> {
        let mut values = Vec::with_capacity(parts.len());
        for p in parts {
            values.push(self.part(p, order)?);
        }
        let low: Vec<i64> = values.iter().map(|s| s.valuation().unwrap_or(0).min(0)).collect();
        let deficit: i64 = low.iter().sum();
        if deficit < 0 {
            for (i, p) in parts.iter().enumerate() {
                let need = order - (deficit - low[i]);
                if need > order && !values[i].is_exact() {
                    values[i] = self.part(p, need)?;
                }
            }
        }
        let mut acc = Series::one_exact();
        for v in &values {
            acc = acc.mul_truncated(v, Some(order - deficit));
        }
        let acc = acc.truncate(order);
        if let Some(n) = acc.order() {
            if n < order {
                return Err(QError::TruncationUnsound { needed: order, available: n }.into());
            }
        }
        Ok(acc)
    }

    fn eval_z(&mut self, e: &LExpr, tag: VarTag, order: i64, kmax: i64) -> Result<ZSeries, CtError> {
        if !e.mentions(tag) {
            return Ok(ZSeries::from_series(&self.eval(e, order)?, tag, order));
        }
        Ok(match e {
            LExpr::Product(p) => product_zseries(p, tag, order, kmax)?,
            LExpr::Sum(s) => sum_zseries(s, tag, order, (-kmax, kmax), &self.sums)?,
            LExpr::Add(v) => {
                let mut acc: Option<ZSeries> = None;
                for t in v {
                    let z = self.eval_z(t, tag, order, kmax)?;
                    acc = Some(match acc {
                        None => z,
                        Some(a) => zadd(&a, &z),
                    });
                }
                acc.expect("nonempty sum")
            }
            LExpr::Neg(a) => self.eval_z(a, tag, order, kmax)?.neg(),
            LExpr::Mul(v) => {
                let mut acc = ZSeries::unit(order);
                for t in v {
                    acc = zmul(&acc, &self.eval_z(t, tag, order, kmax)?)?;
                }
                acc
            }
            LExpr::Div(a, b) => {
                if b.mentions(tag) {
                    return Err(CtError::Undetermined(format!("division by an expression in {tag}")));
                }
                let inv = self.part(&Part::Inverse(b), order)?;
                self.eval_z(a, tag, order, kmax)?.scale(&inv)
            }
            LExpr::Pow(a, k) => {
                if *k < 0 {
                    return Err(CtError::Undetermined(format!("negative power of an expression in {tag}")));
                }
                let base = self.eval_z(a, tag, order, kmax)?;
                let mut acc = ZSeries::unit(order);
                for _ in 0..*k {
                    acc = zmul(&acc, &base)?;
                }
                acc
            }
        })
    }
}

/// Evaluate one side in `q^(1/scale)` through `order` (already scaled).
pub fn eval_side(e: &LExpr, order: i64, sums: &SumOptions) -> Result<Series, CtError> {
    Evaluator { sums: *sums, stats: SupportStats::default() }.eval(e, order)
}

/// Expand both sides of `id` and compare them.
pub fn verify_identity(id: &Identity, opts: &VerifyOptions) -> VerificationReport {
    let start = Instant::now();
    let order = opts.order * id.scale;
    let mut ev = Evaluator { sums: SumOptions { shell_cap: opts.shell_cap }, stats: SupportStats::default() };
    let outcome = match id.extract {
        None => compare_q(&mut ev, id, order, opts.transcript),
        Some(tag) => compare_z(&mut ev, id, tag, order, opts),
    };
    let has_sums = !id.lhs.sums().is_empty() || !id.rhs.sums().is_empty();
    let mut report = VerificationReport {
        identity: id.name.clone(),
        order: opts.order,
        scale: id.scale,
        status: Status::Pass,
        first_mismatch: None,
        elapsed_ms: 0,
        support: (has_sums && id.extract.is_none()).then_some(ev.stats),
        error: None,
        transcript: None,
    };
    match outcome {
        Ok((mismatch, transcript)) => {
            if mismatch.is_some() {
                report.status = Status::Mismatch;
            }
            report.first_mismatch = mismatch;
            report.transcript = transcript;
        }
        Err(e) => {
            report.status = Status::Error;
            report.support = None;
            report.error = Some(ErrorInfo { kind: e.name().to_string(), message: e.to_string() });
        }
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

type Outcome = Result<(Option<Mismatch>, Option<Transcript>), CtError>;

fn compare_q(ev: &mut Evaluator, id: &Identity, order: i64, transcript: bool) -> Outcome {
    let lhs = ev.eval(&id.lhs, order)?;
    let rhs = ev.eval(&id.rhs, order)?;
    let mismatch = compare(&lhs, &rhs, order)?;
    let t = transcript
        .then(|| Transcript { lhs: lhs.truncate(order).canonical_text(), rhs: rhs.truncate(order).canonical_text() });
    Ok((mismatch, t))
}

fn compare_z(ev: &mut Evaluator, id: &Identity, tag: VarTag, order: i64, opts: &VerifyOptions) -> Outcome {
    let k = opts.zwindow;
    let lhs = ev.eval_z(&id.lhs, tag, order, k)?;
    let rhs = ev.eval_z(&id.rhs, tag, order, k)?;
    let mut mismatch = None;
    let (mut lt, mut rt) = (Vec::new(), Vec::new());
    for j in -k..=k {
        let (l, r) = (lhs.coeff(j)?, rhs.coeff(j)?);
        if mismatch.is_none() {
            mismatch = compare(&l, &r, order)?.map(|m| with_var(m, tag, j));
        }
        if opts.transcript {
            lt.push(format!("[{tag}^{j}] {}", l.truncate(order).canonical_text()));
            rt.push(format!("[{tag}^{j}] {}", r.truncate(order).canonical_text()));
        }
    }
    let t = opts.transcript.then(|| Transcript { lhs: lt.join("; "), rhs: rt.join("; ") });
    Ok((mismatch, t))
}

fn with_var(m: Mismatch, tag: VarTag, k: i64) -> Mismatch {
    Mismatch { exponent: format!("{tag}^{k} * {}", m.exponent), ..m }
}
