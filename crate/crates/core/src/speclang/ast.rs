use std::collections::BTreeSet;
use std::fmt;

use crate::summation::Domain;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    /// `q`, a declared variable, a parameter or a summation index.
    Name(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Binom(Box<Expr>, u64),
    /// `poch(arg; base; count)`, `count = None` for `inf`.
    Poch {
        arg: Box<Expr>,
        base: Box<Expr>,
        count: Option<Box<Expr>>,
    },
    Sum {
        indices: Vec<IndexDecl>,
        body: Box<Expr>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexDecl {
    pub name: String,
    pub domain: Domain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityAst {
    pub name: String,
    pub vars: Vec<String>,
    pub params: Vec<(String, i64)>,
    /// Compare coefficients of this variable one by one.
    pub extract: Option<String>,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write(&self, out: &mut String, min: u8) {
        let paren = self.prec() < min;
        if paren {
            out.push('(');
        }
        match self {
            Expr::Int(n) => out.push_str(&n.to_string()),
            Expr::Name(s) => out.push_str(s),
            Expr::Neg(a) => {
                out.push('-');
                a.write(out, 3);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(out, 1);
                out.push_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " });
                b.write(out, 2);
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write(out, 2);
                out.push(if matches!(self, Expr::Mul(..)) { '*' } else { '/' });
                b.write(out, 3);
            }
            Expr::Pow(a, e) => {
                a.write(out, 5);
                out.push('^');
                match **e {
                    Expr::Int(_) | Expr::Name(_) => e.write(out, 5),
                    _ => {
                        out.push('(');
                        e.write(out, 0);
                        out.push(')');
                    }
                }
            }
            Expr::Binom(a, k) => {
                out.push_str("binom(");
                a.write(out, 0);
                out.push_str(&format!(", {k})"));
            }
            Expr::Poch { arg, base, count } => {
                out.push_str("poch(");
                arg.write(out, 0);
                out.push_str("; ");
                base.write(out, 0);
                out.push_str("; ");
                match count {
                    Some(c) => c.write(out, 0),
                    None => out.push_str("inf"),
                }
                out.push(')');
            }
            Expr::Sum { indices, body } => {
                out.push_str("sum(");
                let decls: Vec<String> = indices.iter().map(|d| d.to_string()).collect();
                out.push_str(&decls.join(", "));
                out.push_str("; ");
                body.write(out, 0);
                out.push(')');
            }
        }
        if paren {
            out.push(')');
        }
    }

    /// Names used but not bound by an enclosing sum, in sorted order.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Name(s) => {
                if !bound.contains(s) {
                    out.insert(s.clone());
                }
            }
            Expr::Neg(a) | Expr::Binom(a, _) => a.collect_free(bound, out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Poch { arg, base, count } => {
                arg.collect_free(bound, out);
                base.collect_free(bound, out);
                if let Some(c) = count {
                    c.collect_free(bound, out);
                }
            }
            Expr::Sum { indices, body } => {
                let depth = bound.len();
                bound.extend(indices.iter().map(|d| d.name.clone()));
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    /// Does `name` occur anywhere in the expression?
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Expr::Int(_) => false,
            Expr::Name(s) => s == name,
            Expr::Neg(a) | Expr::Binom(a, _) => a.mentions(name),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.mentions(name) || b.mentions(name)
            }
            Expr::Poch { arg, base, count } => {
                arg.mentions(name) || base.mentions(name) || count.as_ref().is_some_and(|c| c.mentions(name))
            }
            Expr::Sum { indices, body } => !indices.iter().any(|d| d.name == name) && body.mentions(name),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, 0);
        f.write_str(&s)
    }
}

impl fmt::Display for IndexDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.domain {
            Domain::Natural => write!(f, "{}>=0", self.name),
            Domain::Integer => write!(f, "{} in Z", self.name),
        }
    }
}

impl fmt::Display for IdentityAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "identity {} {{", self.name)?;
        if !self.vars.is_empty() {
            writeln!(f, "  vars: {};", self.vars.join(", "))?;
        }
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(n, v)| format!("{n} = {v}")).collect();
            writeln!(f, "  params: {};", ps.join(", "))?;
        }
        if let Some(z) = &self.extract {
            writeln!(f, "  extract: {z};")?;
        }
        writeln!(f, "  lhs: {};", self.lhs)?;
        writeln!(f, "  rhs: {};", self.rhs)?;
        writeln!(f, "}}")
    }
}

/// Serialize several identities as one file.
pub fn print_file(ids: &[IdentityAst]) -> String {
    ids.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("\n")
}
