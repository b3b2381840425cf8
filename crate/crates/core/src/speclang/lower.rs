use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::ast::{Expr, IdentityAst};
use crate::qfactorial::{Count, FactorSpec, ProductSpec};
use crate::qring::{ExponentVector, Monomial, VarExps, VarTag};
use crate::summation::{PochTerm, QuadForm, SumSpec};

/// A side of an identity after lowering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LExpr {
    Product(ProductSpec),
    Sum(SumSpec),
    Add(Vec<LExpr>),
    Neg(Box<LExpr>),
    Mul(Vec<LExpr>),
    Div(Box<LExpr>, Box<LExpr>),
    Pow(Box<LExpr>, i64),
}

impl LExpr {
    fn monomial(m: Monomial) -> LExpr {
        LExpr::Product(ProductSpec::new(m, Vec::new()))
    }

    fn as_monomial(&self) -> Option<&Monomial> {
        match self {
            LExpr::Product(p) if p.factors.is_empty() => Some(&p.prefactor),
            _ => None,
        }
    }

    fn mul(self, other: LExpr) -> LExpr {
        match (self, other) {
            (LExpr::Product(a), LExpr::Product(b)) => LExpr::Product(a.times(&b)),
            (LExpr::Mul(mut a), LExpr::Mul(b)) => {
                a.extend(b);
                LExpr::Mul(a)
            }
            (LExpr::Mul(mut a), b) => {
                a.push(b);
                LExpr::Mul(a)
            }
            (a, LExpr::Mul(mut b)) => {
                b.insert(0, a);
                LExpr::Mul(b)
            }
            (a, b) => LExpr::Mul(vec![a, b]),
        }
    }

    fn add(self, other: LExpr) -> LExpr {
        match (self, other) {
            (LExpr::Add(mut a), b) => {
                a.push(b);
                LExpr::Add(a)
            }
            (a, b) => LExpr::Add(vec![a, b]),
        }
    }

    fn neg(self) -> LExpr {
        match self {
            LExpr::Product(mut p) => {
                p.prefactor = p.prefactor.neg();
                LExpr::Product(p)
            }
            LExpr::Sum(mut s) => {
                s.scale = s.scale.neg();
                LExpr::Sum(s)
            }
            LExpr::Neg(a) => *a,
            other => LExpr::Neg(Box::new(other)),
        }
    }

    /// Substitute a formal variable by ±1 throughout.
    pub fn substitute(&self, tag: VarTag, value: i64) -> LExpr {
        match self {
            LExpr::Product(p) => LExpr::Product(p.substitute(tag, value)),
            LExpr::Sum(s) => LExpr::Sum(s.substitute(tag, value)),
            LExpr::Add(v) => LExpr::Add(v.iter().map(|e| e.substitute(tag, value)).collect()),
            LExpr::Mul(v) => LExpr::Mul(v.iter().map(|e| e.substitute(tag, value)).collect()),
            LExpr::Neg(a) => LExpr::Neg(Box::new(a.substitute(tag, value))),
            LExpr::Div(a, b) => LExpr::Div(Box::new(a.substitute(tag, value)), Box::new(b.substitute(tag, value))),
            LExpr::Pow(a, k) => LExpr::Pow(Box::new(a.substitute(tag, value)), *k),
        }
    }

    /// Does `tag` occur anywhere in the expression?
    pub fn mentions(&self, tag: VarTag) -> bool {
        match self {
            LExpr::Product(p) => p.mentions(tag),
            LExpr::Sum(s) => {
                s.poch_mentions(tag) || s.scale.var_exp(tag) != 0 || s.varweights.iter().any(|w| w.contains_key(&tag))
            }
            LExpr::Add(v) | LExpr::Mul(v) => v.iter().any(|e| e.mentions(tag)),
            LExpr::Neg(a) | LExpr::Pow(a, _) => a.mentions(tag),
            LExpr::Div(a, b) => a.mentions(tag) || b.mentions(tag),
        }
    }

    /// Every sum in the expression.
    pub fn sums(&self) -> Vec<&SumSpec> {
        match self {
            LExpr::Sum(s) => vec![s],
            LExpr::Product(_) => Vec::new(),
            LExpr::Neg(a) | LExpr::Pow(a, _) => a.sums(),
            LExpr::Div(a, b) => a.sums().into_iter().chain(b.sums()).collect(),
            LExpr::Add(v) | LExpr::Mul(v) => v.iter().flat_map(|e| e.sums()).collect(),
        }
    }

    /// Every product in the expression.
    pub fn products(&self) -> Vec<&ProductSpec> {
        match self {
            LExpr::Product(p) => vec![p],
            LExpr::Sum(_) => Vec::new(),
            LExpr::Neg(a) | LExpr::Pow(a, _) => a.products(),
            LExpr::Div(a, b) => a.products().into_iter().chain(b.products()).collect(),
            LExpr::Add(v) | LExpr::Mul(v) => v.iter().flat_map(|e| e.products()).collect(),
        }
    }
}

/// A validated identity ready for evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub name: String,
    pub vars: Vec<VarTag>,
    pub lhs: LExpr,
    pub rhs: LExpr,
    /// Both sides are written in `q^(1/scale)`; compare at order `N * scale`.
    pub scale: i64,
    /// Compare coefficients of this variable one by one.
    pub extract: Option<VarTag>,
}

impl Identity {
    /// Substitute a formal variable by ±1 on both sides.
    pub fn substitute(&self, tag: VarTag, value: i64) -> Identity {
        Identity {
            name: self.name.clone(),
            vars: self.vars.iter().copied().filter(|t| *t != tag).collect(),
            lhs: self.lhs.substitute(tag, value),
            rhs: self.rhs.substitute(tag, value),
            scale: self.scale,
            extract: self.extract.filter(|t| *t != tag),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LowerOptions {
    /// Accept bilateral sums whose quadratic part is not positive definite;
    /// their enumeration is then bounded by the shell cap alone.
    pub allow_indefinite: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LoweringError {
    #[error("'{name}' is not a declared variable, parameter or bound index")]
    UndeclaredName { name: String },
    #[error("'{name}' is declared twice")]
    DuplicateName { name: String },
    #[error("'{name}' is not a valid variable name")]
    BadVariable { name: String },
    #[error("denominator {expr} is not a unit")]
    NonUnitDenominator { expr: String },
    #[error("{expr} must be a monomial")]
    NotMonomial { expr: String },
    #[error("base {expr} must be q^b with b >= 1")]
    BadBase { expr: String },
    #[error("exponent in {expr} is not an integer")]
    NonIntegerExponent { expr: String },
    #[error("{expr} must be linear in the indices with integer coefficients")]
    NonLinear { expr: String },
    #[error("exponent in {expr} has degree above 2")]
    DegreeTooHigh { expr: String },
    #[error("{expr} cannot appear inside a summand")]
    UnsupportedInSum { expr: String },
    #[error("{expr} depends on a summation index")]
    IndexDependentArgument { expr: String },
    #[error("quadratic part of {expr} is not positive definite on its bilateral indices")]
    NotPositiveDefinite { expr: String },
}

impl LoweringError {
    /// The failed condition, for reports.
    pub fn condition(&self) -> &'static str {
        match self {
            LoweringError::UndeclaredName { .. } => "UndeclaredName",
            LoweringError::DuplicateName { .. } => "DuplicateName",
            LoweringError::BadVariable { .. } => "BadVariable",
            LoweringError::NonUnitDenominator { .. } => "NonUnitDenominator",
            LoweringError::NotMonomial { .. } => "NotMonomial",
            LoweringError::BadBase { .. } => "BadBase",
            LoweringError::NonIntegerExponent { .. } => "NonIntegerExponent",
            LoweringError::NonLinear { .. } => "NonLinear",
            LoweringError::DegreeTooHigh { .. } => "DegreeTooHigh",
            LoweringError::UnsupportedInSum { .. } => "UnsupportedInSum",
            LoweringError::IndexDependentArgument { .. } => "IndexDependentArgument",
            LoweringError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
        }
    }
}

type LResult<T> = Result<T, LoweringError>;

fn text(e: &Expr) -> String {
    e.to_string()
}

fn ri(x: i64) -> Rational64 {
    Rational64::from_integer(x)
}

struct Lowerer<'a> {
    vars: BTreeMap<&'a str, VarTag>,
    params: BTreeMap<&'a str, i64>,
    /// `q` is lowered to `q^d`.
    d: i64,
    /// Extra factor of `d` still needed to clear rational exponents.
    needed: i64,
    opts: LowerOptions,
    extract: Option<VarTag>,
}

/// Index names and positions of the innermost sum.
struct Scope<'a> {
    names: &'a [String],
}

impl Scope<'_> {
    fn dim(&self) -> usize {
        self.names.len()
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

const NO_INDICES: Scope<'static> = Scope { names: &[] };

/// Accumulated summand `sign * c * vars * q^form * prod numers / prod denoms`.
struct Summand {
    form: QuadForm,
    sign: QuadForm,
    weights: BTreeMap<VarTag, QuadForm>,
    coeff: BigInt,
    numers: Vec<PochTerm>,
    denoms: Vec<PochTerm>,
}

impl<'a> Lowerer<'a> {
    fn need(&mut self, x: Rational64) {
        self.needed = self.needed.lcm(x.denom());
    }

    /// Exponent arithmetic: a polynomial in the indices of `scope`.
    fn exponent(&self, e: &Expr, scope: &Scope) -> LResult<QuadForm> {
        let dim = scope.dim();
        let degree = || LoweringError::DegreeTooHigh { expr: text(e) };
        Ok(match e {
            Expr::Int(n) => QuadForm::constant(dim, ri(*n as i64)),
            Expr::Name(s) => {
                if let Some(i) = scope.position(s) {
                    QuadForm::index(dim, i)
                } else if let Some(v) = self.params.get(s.as_str()) {
                    QuadForm::constant(dim, ri(*v))
                } else {
                    return Err(LoweringError::UndeclaredName { name: s.clone() });
                }
            }
            Expr::Neg(a) => self.exponent(a, scope)?.neg(),
            Expr::Add(a, b) => self.exponent(a, scope)?.add(&self.exponent(b, scope)?),
            Expr::Sub(a, b) => self.exponent(a, scope)?.add(&self.exponent(b, scope)?.neg()),
            Expr::Mul(a, b) => self.exponent(a, scope)?.mul(&self.exponent(b, scope)?).ok_or_else(degree)?,
            Expr::Div(a, b) => {
                let c = self.exponent(b, scope)?.as_constant().filter(|c| !c.is_zero());
                let c = c.ok_or_else(|| LoweringError::NonLinear { expr: text(e) })?;
                self.exponent(a, scope)?.scale(c.recip())
            }
            Expr::Pow(a, k) => {
                let base = self.exponent(a, scope)?;
                let k = self.exponent(k, scope)?.as_constant();
                match k {
                    Some(k) if k.is_integer() && !k.is_negative() => {
                        base.pow(k.to_integer() as u32).ok_or_else(degree)?
                    }
                    Some(k) if k.is_integer() && base.as_constant().is_some_and(|b| !b.is_zero()) => {
                        let b = base.as_constant().expect("constant");
                        QuadForm::constant(dim, b.pow(k.to_integer() as i32))
                    }
                    _ => return Err(LoweringError::NonIntegerExponent { expr: text(e) }),
                }
            }
            Expr::Binom(a, k) => self.exponent(a, scope)?.binom(*k as u32).ok_or_else(degree)?,
            Expr::Poch { .. } | Expr::Sum { .. } => return Err(LoweringError::NotMonomial { expr: text(e) }),
        })
    }

    fn constant_exponent(&self, e: &Expr) -> LResult<Rational64> {
        self.exponent(e, &NO_INDICES)?
            .as_constant()
            .ok_or_else(|| LoweringError::IndexDependentArgument { expr: text(e) })
    }

    fn int_exponent(&self, e: &Expr) -> LResult<i64> {
        let r = self.constant_exponent(e)?;
        if r.is_integer() {
            Ok(r.to_integer())
        } else {
            Err(LoweringError::NonIntegerExponent { expr: text(e) })
        }
    }

    /// `m^r` for a rational `r`; `q`-exponents that are not yet integral are
    /// recorded and replaced by zero so that a larger `d` can be tried.
    fn monomial_power(&mut self, m: &Monomial, r: Rational64, e: &Expr) -> LResult<Monomial> {
        let bad = || LoweringError::NonIntegerExponent { expr: text(e) };
        if r.is_integer() {
            return m.pow(r.to_integer()).ok_or_else(|| LoweringError::NonUnitDenominator { expr: text(e) });
        }
        if !m.coeff.is_one() {
            return Err(bad());
        }
        let mut vars = VarExps::new();
        for (t, k) in m.exps.vars.iter() {
            let x = ri(k) * r;
            if !x.is_integer() {
                return Err(bad());
            }
            vars.add_exp(t, x.to_integer());
        }
        let qx = ri(m.qexp()) * r;
        let qexp = if qx.is_integer() {
            qx.to_integer()
        } else {
            self.need(qx);
            0
        };
        Ok(Monomial::new(1, ExponentVector::new(qexp, vars)))
    }

    fn name(&self, s: &str, scope: &Scope) -> LResult<Monomial> {
        if s == "q" {
            Ok(Monomial::q_pow(self.d))
        } else if let Some(t) = self.vars.get(s) {
            Ok(Monomial::var(*t))
        } else if let Some(v) = self.params.get(s) {
            Ok(Monomial::constant(*v))
        } else if scope.position(s).is_some() {
            Err(LoweringError::IndexDependentArgument { expr: s.to_string() })
        } else {
            Err(LoweringError::UndeclaredName { name: s.to_string() })
        }
    }

    /// An index-free expression that must be a single monomial.
    fn monomial(&mut self, e: &Expr, scope: &Scope) -> LResult<Monomial> {
        let not = || LoweringError::NotMonomial { expr: text(e) };
        Ok(match e {
            Expr::Int(n) => Monomial::constant(*n),
            Expr::Name(s) => self.name(s, scope)?,
            Expr::Neg(a) => self.monomial(a, scope)?.neg(),
            Expr::Mul(a, b) => self.monomial(a, scope)?.mul(&self.monomial(b, scope)?),
            Expr::Div(a, b) => {
                let den = self.monomial(b, scope)?;
                let inv = den.inv().ok_or_else(|| LoweringError::NonUnitDenominator { expr: text(b) })?;
                self.monomial(a, scope)?.mul(&inv)
            }
            Expr::Pow(a, k) => {
                let r = self
                    .exponent(k, scope)?
                    .as_constant()
                    .ok_or_else(|| LoweringError::IndexDependentArgument { expr: text(e) })?;
                let m = self.monomial(a, scope)?;
                self.monomial_power(&m, r, e)?
            }
            _ => return Err(not()),
        })
    }

    fn base(&mut self, e: &Expr) -> LResult<i64> {
        let m = self.monomial(e, &NO_INDICES)?;
        if m.coeff.is_one() && !m.has_vars() && m.qexp() >= 1 {
            Ok(m.qexp())
        } else if self.needed > 1 && m.qexp() == 0 {
            Ok(1)
        } else {
            Err(LoweringError::BadBase { expr: text(e) })
        }
    }

    fn lower(&mut self, e: &Expr) -> LResult<LExpr> {
        Ok(match e {
            Expr::Int(_) | Expr::Name(_) => LExpr::monomial(self.monomial(e, &NO_INDICES)?),
            Expr::Neg(a) => self.lower(a)?.neg(),
            Expr::Add(a, b) => self.lower(a)?.add(self.lower(b)?),
            Expr::Sub(a, b) => self.lower(a)?.add(self.lower(b)?.neg()),
            Expr::Mul(a, b) => self.lower(a)?.mul(self.lower(b)?),
            Expr::Div(a, b) => {
                let num = self.lower(a)?;
                match self.lower(b)? {
                    LExpr::Product(p) => {
                        let inv = p.powi(-1).ok_or_else(|| LoweringError::NonUnitDenominator { expr: text(b) })?;
                        num.mul(LExpr::Product(inv))
                    }
                    den => LExpr::Div(Box::new(num), Box::new(den)),
                }
            }
            Expr::Pow(a, k) => {
                let r = self.constant_exponent(k)?;
                let base = self.lower(a)?;
                if let Some(m) = base.as_monomial() {
                    let m = m.clone();
                    return Ok(LExpr::monomial(self.monomial_power(&m, r, e)?));
                }
                if !r.is_integer() {
                    return Err(LoweringError::NonIntegerExponent { expr: text(e) });
                }
                let k = r.to_integer();
                match base {
                    LExpr::Product(p) => {
                        LExpr::Product(p.powi(k).ok_or_else(|| LoweringError::NonUnitDenominator { expr: text(e) })?)
                    }
                    other => LExpr::Pow(Box::new(other), k),
                }
            }
            Expr::Binom(..) => return Err(LoweringError::NotMonomial { expr: text(e) }),
            Expr::Poch { arg, base, count } => {
                let arg_m = self.monomial(arg, &NO_INDICES)?;
                let b = self.base(base)?;
                let count = match count {
                    None => Count::Infinite,
                    Some(c) => Count::Finite(self.int_exponent(c)?),
                };
                LExpr::Product(ProductSpec::new(Monomial::one(), vec![FactorSpec::new(arg_m, b, count, 1)]))
            }
            Expr::Sum { indices, body } => {
                for d in indices {
                    if d.name == "q"
                        || self.vars.contains_key(d.name.as_str())
                        || self.params.contains_key(d.name.as_str())
                    {
                        return Err(LoweringError::DuplicateName { name: d.name.clone() });
                    }
                }
                let names: Vec<String> = indices.iter().map(|d| d.name.clone()).collect();
                let scope = Scope { names: &names };
                let dim = names.len();
                let mut acc = Summand {
                    form: QuadForm::zero(dim),
                    sign: QuadForm::zero(dim),
                    weights: BTreeMap::new(),
                    coeff: BigInt::one(),
                    numers: Vec::new(),
                    denoms: Vec::new(),
                };
                self.summand(body, &QuadForm::constant(dim, ri(1)), &scope, &mut acc)?;
                let mut spec = SumSpec::new(names, indices.iter().map(|d| d.domain).collect());
                spec.form = acc.form;
                if spec.form.integrality_scale() > 1 {
                    self.needed = self.needed.lcm(&spec.form.integrality_scale());
                }
                if acc.sign.integrality_scale() > 1 {
                    return Err(LoweringError::NonIntegerExponent { expr: text(e) });
                }
                spec.signform = acc.sign;
                let mut scale = Monomial::constant(acc.coeff);
                for (t, w) in &acc.weights {
                    let lf = w.as_integer_linear().ok_or_else(|| LoweringError::NonLinear { expr: text(e) })?;
                    for (i, c) in lf.coeffs.iter().enumerate() {
                        if *c != 0 {
                            spec.varweights[i].insert(*t, *c);
                        }
                    }
                    scale = scale.mul(&Monomial::new(1, ExponentVector::new(0, VarExps::single(*t, lf.constant))));
                }
                spec.scale = scale;
                spec.numers = acc.numers;
                spec.denoms = acc.denoms;
                let slice = self.extract.filter(|t| spec.varweights.iter().any(|w| w.contains_key(t)));
                if !self.opts.allow_indefinite && !spec.is_definite(slice) {
                    return Err(LoweringError::NotPositiveDefinite { expr: text(e) });
                }
                LExpr::Sum(spec)
            }
        })
    }

    /// Fold `e^power` into the summand.
    fn summand(&mut self, e: &Expr, power: &QuadForm, scope: &Scope, acc: &mut Summand) -> LResult<()> {
        let dim = scope.dim();
        let constant_power = power.as_constant();
        let unsupported = || LoweringError::UnsupportedInSum { expr: text(e) };
        match e {
            Expr::Int(n) => self.summand_constant(BigInt::from(*n), power, e, acc)?,
            Expr::Name(s) if s == "q" => {
                acc.form = acc.form.add(&power.scale(ri(self.d)));
            }
            Expr::Name(s) => {
                if let Some(t) = self.vars.get(s.as_str()) {
                    let w = acc.weights.entry(*t).or_insert_with(|| QuadForm::zero(dim));
                    *w = w.add(power);
                } else if let Some(v) = self.params.get(s.as_str()) {
                    self.summand_constant(BigInt::from(*v), power, e, acc)?;
                } else if scope.position(s).is_some() {
                    return Err(unsupported());
                } else {
                    return Err(LoweringError::UndeclaredName { name: s.clone() });
                }
            }
            Expr::Neg(a) => {
                acc.sign = acc.sign.add(power);
                self.summand(a, power, scope, acc)?;
            }
            Expr::Mul(a, b) => {
                self.summand(a, power, scope, acc)?;
                self.summand(b, power, scope, acc)?;
            }
            Expr::Div(a, b) => {
                self.summand(a, power, scope, acc)?;
                self.summand(b, &power.neg(), scope, acc)?;
            }
            Expr::Pow(a, k) => {
                let k = self.exponent(k, scope)?;
                let p = power.mul(&k).ok_or_else(|| LoweringError::DegreeTooHigh { expr: text(e) })?;
                self.summand(a, &p, scope, acc)?;
            }
            Expr::Poch { arg, base, count } => {
                let k = constant_power
                    .filter(|k| k.is_integer())
                    .ok_or_else(|| LoweringError::NonIntegerExponent { expr: text(e) })?
                    .to_integer();
                let arg_m = self.monomial(arg, scope)?;
                let b = self.base(base)?;
                let Some(c) = count else { return Err(unsupported()) };
                let lf = self
                    .exponent(c, scope)?
                    .as_integer_linear()
                    .ok_or_else(|| LoweringError::NonLinear { expr: text(c) })?;
                let term = PochTerm::new(arg_m, b, lf);
                let list = if k > 0 { &mut acc.numers } else { &mut acc.denoms };
                for _ in 0..k.abs() {
                    list.push(term.clone());
                }
            }
            Expr::Add(..) | Expr::Sub(..) | Expr::Binom(..) | Expr::Sum { .. } => return Err(unsupported()),
        }
        Ok(())
    }

    fn summand_constant(&mut self, c: BigInt, power: &QuadForm, e: &Expr, acc: &mut Summand) -> LResult<()> {
        if c.is_one() {
            return Ok(());
        }
        let minus_one = c == BigInt::from(-1);
        if minus_one {
            acc.sign = acc.sign.add(power);
            return Ok(());
        }
        match power.as_constant() {
            Some(k) if k.is_integer() && !k.is_negative() => {
                acc.coeff *= num_traits::pow(c, k.to_integer() as usize);
                Ok(())
            }
            Some(k) if k.is_integer() => {
                if c.is_negative() {
                    acc.sign = acc.sign.add(power);
                }
                if c.abs().is_one() {
                    Ok(())
                } else {
                    Err(LoweringError::NonUnitDenominator { expr: text(e) })
                }
            }
            _ => Err(LoweringError::NotMonomial { expr: text(e) }),
        }
    }
}

/// Lower a parsed identity: sums to [`SumSpec`], products to [`ProductSpec`],
/// with a global `q -> q^d` when exponents are fractional.
pub fn validate_identity(ast: &IdentityAst, opts: LowerOptions) -> Result<Identity, LoweringError> {
    let mut vars = BTreeMap::new();
    let mut tags = Vec::new();
    for v in &ast.vars {
        let t = VarTag::new(v).map_err(|_| LoweringError::BadVariable { name: v.clone() })?;
        if v == "q" || vars.insert(v.as_str(), t).is_some() {
            return Err(LoweringError::DuplicateName { name: v.clone() });
        }
        tags.push(t);
    }
    let mut params = BTreeMap::new();
    for (n, v) in &ast.params {
        if n == "q" || vars.contains_key(n.as_str()) || params.insert(n.as_str(), *v).is_some() {
            return Err(LoweringError::DuplicateName { name: n.clone() });
        }
    }
    let extract = match &ast.extract {
        None => None,
        Some(z) => Some(*vars.get(z.as_str()).ok_or_else(|| LoweringError::UndeclaredName { name: z.clone() })?),
    };
    let mut d = 1i64;
    for _ in 0..8 {
        let mut l = Lowerer { vars: vars.clone(), params: params.clone(), d, needed: 1, opts, extract };
        let lhs = l.lower(&ast.lhs)?;
        let rhs = l.lower(&ast.rhs)?;
        if l.needed == 1 {
            return Ok(Identity { name: ast.name.clone(), vars: tags, lhs, rhs, scale: d, extract });
        }
        d = d
            .checked_mul(l.needed)
            .filter(|d| d.to_i32().is_some())
            .ok_or_else(|| LoweringError::NonIntegerExponent { expr: "q-exponents".into() })?;
    }
    Err(LoweringError::NonIntegerExponent { expr: "q-exponents".into() })
}
