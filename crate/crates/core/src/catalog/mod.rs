//! Built-in identities, generated as `.qid` text from their parameters.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::speclang::{parse_identity, validate_identity, Identity, LowerOptions};

pub type Params = BTreeMap<String, i64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub min: i64,
    /// Upper bound given by another parameter, as in `i <= k`.
    pub max_param: Option<&'static str>,
    pub default: i64,
}

const fn param(name: &'static str, min: i64, default: i64) -> ParamSpec {
    ParamSpec { name, min, max_param: None, default }
}

const fn bounded(name: &'static str, min: i64, max_param: &'static str, default: i64) -> ParamSpec {
    ParamSpec { name, min, max_param: Some(max_param), default }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamSpec>,
    /// Compared per coefficient of this variable.
    pub extract: Option<&'static str>,
    #[serde(skip)]
    build: fn(&Params) -> String,
    #[serde(skip)]
    suite: fn() -> Vec<Params>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog key '{0}'")]
    UnknownKey(String),
    #[error("{key}: parameter {param} = {value} is out of range ({reason})")]
    ParamOutOfRange { key: String, param: String, value: i64, reason: String },
    #[error("{key}: generated text does not validate: {message}")]
    Invalid { key: String, message: String },
}

impl CatalogError {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogError::UnknownKey(_) => "UnknownKey",
            CatalogError::ParamOutOfRange { .. } => "ParamOutOfRange",
            CatalogError::Invalid { .. } => "InvalidEntry",
        }
    }
}

fn p(params: &Params, name: &str) -> i64 {
    params[name]
}

fn one(name: &str, v: i64) -> Params {
    Params::from([(name.to_string(), v)])
}

fn two(a: &str, x: i64, b: &str, y: i64) -> Params {
    Params::from([(a.to_string(), x), (b.to_string(), y)])
}

fn none() -> Vec<Params> {
    vec![Params::new()]
}

fn ki_grid() -> Vec<Params> {
    (2..=4).flat_map(|k| (1..=k).map(move |i| two("k", k, "i", i))).collect()
}

/// `n_from + ... + n_to`, parenthesised when it has several terms.
fn index_sum(from: i64, to: i64) -> String {
    let parts: Vec<String> = (from..=to).map(|j| format!("n{j}")).collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("({})", parts.join(" + "))
    }
}

/// Shared left side of the Andrews-Gordon and Bressoud identities.
fn gordon_sum(k: i64, i: i64, last_base: i64) -> String {
    let decls: Vec<String> = (1..k).map(|j| format!("n{j}>=0")).collect();
    let mut expo: Vec<String> = (1..k).map(|j| format!("{}^2", index_sum(j, k - 1))).collect();
    expo.extend((i..k).map(|j| index_sum(j, k - 1)));
    let mut den: Vec<String> = (1..k - 1).map(|j| format!("poch(q; q; n{j})")).collect();
    den.push(format!("poch(q^{last_base}; q^{last_base}; n{})", k - 1));
    format!("sum({}; q^({})/{})", decls.join(", "), expo.join(" + "), den.join("/"))
}

fn rr1(_: &Params) -> String {
    "identity rr1 {
       lhs: sum(n>=0; q^(n^2)/poch(q; q; n));
       rhs: 1/poch(q; q^5; inf)/poch(q^4; q^5; inf);
     }"
    .into()
}

fn rr2(_: &Params) -> String {
    "identity rr2 {
       lhs: sum(n>=0; q^(n^2 + n)/poch(q; q; n));
       rhs: 1/poch(q^2; q^5; inf)/poch(q^3; q^5; inf);
     }"
    .into()
}

fn andrews_gordon(ps: &Params) -> String {
    let (k, i) = (p(ps, "k"), p(ps, "i"));
    format!(
        "identity andrews-gordon-{k}-{i} {{
           params: k = {k}, i = {i};
           lhs: {};
           rhs: poch(q^i; q^(2*k + 1); inf)*poch(q^(2*k + 1 - i); q^(2*k + 1); inf)
                *poch(q^(2*k + 1); q^(2*k + 1); inf)/poch(q; q; inf);
         }}",
        gordon_sum(k, i, 1)
    )
}

fn bressoud(ps: &Params) -> String {
    let (k, i) = (p(ps, "k"), p(ps, "i"));
    format!(
        "identity bressoud-{k}-{i} {{
           params: k = {k}, i = {i};
           lhs: {};
           rhs: poch(q^i; q^(2*k); inf)*poch(q^(2*k - i); q^(2*k); inf)*poch(q^(2*k); q^(2*k); inf)/poch(q; q; inf);
         }}",
        gordon_sum(k, i, 2)
    )
}

fn ramanujan_1psi1(ps: &Params) -> String {
    let m = p(ps, "m");
    format!(
        "identity ramanujan-1psi1-{m} {{
           vars: a, z;
           params: m = {m};
           extract: z;
           lhs: sum(k in Z; z^k*poch(a; q; k)/poch(q^m; q; k));
           rhs: poch(q; q; inf)*poch(a*z; q; inf)*poch(q/(a*z); q; inf)*poch(q^m/a; q; inf)
                /poch(q^m; q; inf)/poch(z; q; inf)/poch(q^m/(a*z); q; inf)/poch(q/a; q; inf);
         }}"
    )
}

fn q_binomial(_: &Params) -> String {
    "identity q-binomial {
       vars: a, z;
       extract: z;
       lhs: sum(k>=0; z^k*poch(a; q; k)/poch(q; q; k));
       rhs: poch(a*z; q; inf)/poch(z; q; inf);
     }"
    .into()
}

fn cao_wang(ps: &Params) -> String {
    let a = p(ps, "a");
    format!(
        "identity cao-wang-{a} {{
           vars: u;
           params: a = {a};
           lhs: sum(i>=0, j>=0; u^(i - j)*q^(binom(i, 2) + binom(j + 1, 2) + a*binom(j - i, 2))/poch(q; q; i)/poch(q; q; j));
           rhs: poch(-u*q^a; q^(a + 1); inf)*poch(-q/u; q^(a + 1); inf)*poch(q^(a + 1); q^(a + 1); inf)/poch(q; q; inf);
         }}"
    )
}

const COR_RHS: &str = "poch(-q; q^2; inf)*poch(-q; q^2; inf)*poch(q^2; q^2; inf)/poch(q; q; inf)";

fn main_theorem(_: &Params) -> String {
    "identity main {
       vars: x, y;
       lhs: sum(i in Z, j in Z; x^i*y^j*q^(i^2 - i*j + j^2)/poch(x*q; q; i)/poch(y*q; q; j));
       rhs: poch(q; q; inf)*poch(-x*y*q; q^2; inf)*poch(-q/(x*y); q^2; inf)*poch(q^2; q^2; inf)
            /poch(x*q; q; inf)/poch(y*q; q; inf);
     }"
    .into()
}

fn cor_double(_: &Params) -> String {
    format!(
        "identity cor-double {{
           lhs: sum(i>=0, j>=0; q^(i^2 - i*j + j^2)/poch(q; q; i)/poch(q; q; j));
           rhs: {COR_RHS};
         }}"
    )
}

fn cor_triple(_: &Params) -> String {
    format!(
        "identity cor-triple {{
           lhs: sum(i>=0, j>=0, k>=0; q^(i^2 + j^2 + k^2 + i*k + j*k)/poch(q; q; i)/poch(q; q; j)/poch(q; q; k));
           rhs: {COR_RHS};
         }}"
    )
}

fn cor_multi(ps: &Params) -> String {
    let l = p(ps, "l");
    let tail = |from: i64| -> Vec<String> { (from..=l).map(|j| format!("n{j}")).collect() };
    let group = |first: &str, from: i64| {
        let mut v = vec![first.to_string()];
        v.extend(tail(from));
        format!("({})", v.join(" + "))
    };
    let (a, b) = (group("n1", 3), group("n2", 3));
    let mut expo = vec![format!("{a}^2 - {a}*{b} + {b}^2")];
    expo.extend((4..=l).map(|i| format!("{}*{}", group("n1", i), group("n2", i))));
    expo.push("n1*n2".into());
    let decls: Vec<String> = (1..=l).map(|j| format!("n{j}>=0")).collect();
    let den: Vec<String> = (1..=l).map(|j| format!("poch(q; q; n{j})")).collect();
    format!(
        "identity cor-multi-{l} {{
           params: l = {l};
           lhs: sum({}; q^({})/{});
           rhs: {COR_RHS};
         }}",
        decls.join(", "),
        expo.join(" + "),
        den.join("/")
    )
}

fn bilateral_euler(ps: &Params) -> String {
    let m = p(ps, "m");
    format!(
        "identity bilateral-euler-{m} {{
           vars: z;
           params: m = {m};
           extract: z;
           lhs: sum(k in Z; (-z)^k*q^(binom(k, 2))/poch(q^m; q; k));
           rhs: poch(q; q; inf)*poch(z; q; inf)*poch(q/z; q; inf)/poch(q^m; q; inf)/poch(q^m/z; q; inf);
         }}"
    )
}

fn circle_x(_: &Params) -> String {
    "identity circle-x {
       vars: x, z;
       extract: z;
       lhs: sum(i in Z; (-x*z)^i*q^(binom(i, 2))/poch(x*q; q; i));
       rhs: poch(q; q; inf)*poch(x*z; q; inf)*poch(q/(x*z); q; inf)/poch(x*q; q; inf)/poch(q/z; q; inf);
     }"
    .into()
}

fn circle_y(_: &Params) -> String {
    "identity circle-y {
       vars: y, z;
       extract: z;
       lhs: sum(j in Z; (-y*q/z)^j*q^(binom(j, 2))/poch(y*q; q; j));
       rhs: poch(q; q; inf)*poch(y*q/z; q; inf)*poch(z/y; q; inf)/poch(y*q; q; inf)/poch(z; q; inf);
     }"
    .into()
}

fn andrews_p20(ps: &Params) -> String {
    let (i, j) = (p(ps, "i"), p(ps, "j"));
    format!(
        "identity andrews-p20-{i}-{j} {{
           params: i = {i}, j = {j};
           lhs: 1/poch(q; q; i)/poch(q; q; j);
           rhs: sum(k>=0; q^((i - k)*(j - k))/poch(q; q; k)/poch(q; q; i - k)/poch(q; q; j - k));
         }}"
    )
}

fn remark_ua1(_: &Params) -> String {
    format!(
        "identity remark-ua1 {{
           lhs: sum(i>=0, j>=0; q^(binom(i, 2) + binom(j + 1, 2) + binom(j - i, 2))/poch(q; q; i)/poch(q; q; j));
           rhs: {COR_RHS};
         }}"
    )
}

/// All entries in listing order.
pub fn list_identities() -> Vec<CatalogEntry> {
    let e = |key, description, params, extract, build, suite| CatalogEntry {
        key,
        description,
        params,
        extract,
        build,
        suite,
    };
    vec![
        e("rr1", "first Rogers-Ramanujan identity, moduli 1 and 4 mod 5", vec![], None, rr1, none),
        e("rr2", "second Rogers-Ramanujan identity, moduli 2 and 3 mod 5", vec![], None, rr2, none),
        e(
            "andrews-gordon",
            "Andrews-Gordon identity, (k-1)-fold sum with N_j = n_j + ... + n_{k-1}",
            vec![param("k", 2, 3), bounded("i", 1, "k", 2)],
            None,
            andrews_gordon,
            ki_grid,
        ),
        e(
            "bressoud",
            "Bressoud's even-modulus analogue of the Andrews-Gordon identity",
            vec![param("k", 2, 3), bounded("i", 1, "k", 2)],
            None,
            bressoud,
            ki_grid,
        ),
        e(
            "ramanujan-1psi1",
            "Ramanujan's 1psi1 summation with b = q^m, a and z formal",
            vec![param("m", 1, 2)],
            Some("z"),
            ramanujan_1psi1,
            || (1..=3).map(|m| one("m", m)).collect(),
        ),
        e("q-binomial", "q-binomial theorem, a and z formal", vec![], Some("z"), q_binomial, none),
        e(
            "cao-wang",
            "Cao-Wang double sum with u formal and integer a",
            vec![param("a", 1, 1)],
            None,
            cao_wang,
            || (1..=3).map(|a| one("a", a)).collect(),
        ),
        e("main", "bilateral double sum in x and y with exponent i^2 - ij + j^2", vec![], None, main_theorem, none),
        e("cor-double", "x = y = 1 specialisation of main: double sum over i, j >= 0", vec![], None, cor_double, none),
        e("cor-triple", "triple-sum form of cor-double", vec![], None, cor_triple, none),
        e("cor-multi", "l-fold form of cor-double, l >= 4", vec![param("l", 4, 4)], None, cor_multi, || {
            vec![one("l", 4), one("l", 5)]
        }),
        e(
            "bilateral-euler",
            "bilateral Euler expansion, the a -> infinity limit of 1psi1, with b = q^m",
            vec![param("m", 1, 2)],
            Some("z"),
            bilateral_euler,
            || (1..=3).map(|m| one("m", m)).collect(),
        ),
        e("circle-x", "bilateral Euler expansion at b = xq, z -> xz", vec![], Some("z"), circle_x, none),
        e("circle-y", "bilateral Euler expansion at b = yq, z -> yq/z", vec![], Some("z"), circle_y, none),
        e(
            "andrews-p20",
            "expansion of 1/((q;q)_i (q;q)_j) as a sum over k",
            vec![param("i", 0, 3), param("j", 0, 4)],
            None,
            andrews_p20,
            || vec![two("i", 0, "j", 0), two("i", 2, "j", 5), two("i", 4, "j", 4), two("i", 6, "j", 3)],
        ),
        e("remark-ua1", "cao-wang at u = a = 1 against the cor-double product", vec![], None, remark_ua1, none),
    ]
}

pub fn entry(key: &str) -> Result<CatalogEntry, CatalogError> {
    list_identities().into_iter().find(|e| e.key == key).ok_or_else(|| CatalogError::UnknownKey(key.to_string()))
}

impl CatalogEntry {
    /// Fill defaults and check ranges.
    pub fn resolve(&self, given: &Params) -> Result<Params, CatalogError> {
        let out_of_range = |param: &str, value: i64, reason: String| CatalogError::ParamOutOfRange {
            key: self.key.to_string(),
            param: param.to_string(),
            value,
            reason,
        };
        if let Some((name, v)) = given.iter().find(|(n, _)| !self.params.iter().any(|s| s.name == n.as_str())) {
            return Err(out_of_range(name, *v, format!("{} takes no parameter {name}", self.key)));
        }
        let mut ps = Params::new();
        for s in &self.params {
            ps.insert(s.name.to_string(), given.get(s.name).copied().unwrap_or(s.default));
        }
        for s in &self.params {
            let v = ps[s.name];
            if v < s.min {
                return Err(out_of_range(s.name, v, format!("need {} >= {}", s.name, s.min)));
            }
            if let Some(m) = s.max_param {
                if v > ps[m] {
                    return Err(out_of_range(s.name, v, format!("need {} <= {m}", s.name)));
                }
            }
        }
        Ok(ps)
    }

    /// Canonical `.qid` text for the given parameters.
    pub fn qid_text(&self, given: &Params) -> Result<String, CatalogError> {
        let ps = self.resolve(given)?;
        let raw = (self.build)(&ps);
        let ast = parse_identity(&raw)
            .map_err(|e| CatalogError::Invalid { key: self.key.to_string(), message: e.to_string() })?;
        Ok(ast.to_string())
    }

    /// Parameter sets checked by the default suite.
    pub fn suite(&self) -> Vec<Params> {
        (self.suite)()
    }
}

/// The lowered identity for `key` with `params` (missing ones take defaults).
pub fn get_identity(key: &str, params: &Params) -> Result<Identity, CatalogError> {
    get_identity_with(key, params, LowerOptions::default())
}

pub fn get_identity_with(key: &str, params: &Params, opts: LowerOptions) -> Result<Identity, CatalogError> {
    let e = entry(key)?;
    let text = e.qid_text(params)?;
    let ast = parse_identity(&text)
        .map_err(|err| CatalogError::Invalid { key: key.to_string(), message: err.to_string() })?;
    validate_identity(&ast, opts)
        .map_err(|err| CatalogError::Invalid { key: key.to_string(), message: err.to_string() })
}

/// Every `(key, params)` in the default suite, in listing order.
pub fn default_suite() -> Vec<(&'static str, Params)> {
    list_identities().iter().flat_map(|e| e.suite().into_iter().map(move |p| (e.key, p))).collect()
}

#[cfg(test)]
mod tests;
