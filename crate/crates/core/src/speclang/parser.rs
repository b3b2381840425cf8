use super::ast::{Expr, IdentityAst, IndexDecl};
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;
use crate::summation::Domain;

const MAX_EXPONENT_DEGREE: u64 = 2;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Index names bound by enclosing sums, innermost last.
    scope: Vec<String>,
}

/// Parse a `.qid` file holding one or more identity blocks.
pub fn parse_file(src: &str) -> Result<Vec<IdentityAst>, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0, scope: Vec::new() };
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        out.push(p.identity()?);
    }
    if out.is_empty() {
        return Err(p.error("expected 'identity'"));
    }
    Ok(out)
}

/// Parse text holding exactly one identity block.
pub fn parse_identity(src: &str) -> Result<IdentityAst, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0, scope: Vec::new() };
    let id = p.identity()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error("expected end of input after identity block"));
    }
    Ok(id)
}

/// Parse a bare expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0, scope: Vec::new() };
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error("unexpected token after expression"));
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> ParseError {
        ParseError { line: t.line, column: t.column, message: message.into(), token: t.tok.text() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(&self.toks[self.pos], message)
    }

    fn expect(&mut self, t: Tok) -> Result<Token, ParseError> {
        if *self.peek() == t {
            Ok(self.bump())
        } else {
            Err(self.error(format!("expected '{}'", t.text())))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected '{kw}'")))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    /// Identity names may contain interior dashes (`andrews-gordon`, `ramanujan-1psi1`).
    fn identity_name(&mut self) -> Result<String, ParseError> {
        let first = self.toks[self.pos].clone();
        let mut s = match &first.tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error("expected identity name")),
        };
        self.bump();
        let mut end = first.offset + first.len;
        loop {
            let t = &self.toks[self.pos];
            let next = &self.toks[(self.pos + 1).min(self.toks.len() - 1)];
            let word = |t: &Token| matches!(t.tok, Tok::Ident(_) | Tok::Int(_));
            if t.offset != end {
                break;
            }
            if word(t) {
                s.push_str(&t.tok.text());
            } else if t.tok == Tok::Minus {
                if !(word(next) && next.offset == end + 1) {
                    self.bump();
                    return Err(self.error("expected a name part after '-'"));
                }
                s.push('-');
                s.push_str(&next.tok.text());
                self.bump();
            } else {
                break;
            }
            end = self.toks[self.pos].offset + self.toks[self.pos].len;
            self.bump();
        }
        Ok(s)
    }

    fn identity(&mut self) -> Result<IdentityAst, ParseError> {
        self.keyword("identity")?;
        let name = self.identity_name()?;
        self.expect(Tok::LBrace)?;
        let mut vars = Vec::new();
        if self.is_keyword("vars") {
            self.bump();
            self.expect(Tok::Colon)?;
            vars.push(self.name()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                vars.push(self.name()?);
            }
            self.expect(Tok::Semi)?;
        }
        let mut params = Vec::new();
        if self.is_keyword("params") {
            self.bump();
            self.expect(Tok::Colon)?;
            loop {
                let n = self.name()?;
                self.expect(Tok::Eq)?;
                let neg = if *self.peek() == Tok::Minus {
                    self.bump();
                    true
                } else {
                    false
                };
                let v = match self.peek() {
                    Tok::Int(v) => *v,
                    _ => return Err(self.error("expected an integer")),
                };
                let v = i64::try_from(v).map_err(|_| self.error("parameter value out of range"))?;
                self.bump();
                params.push((n, if neg { -v } else { v }));
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
            self.expect(Tok::Semi)?;
        }
        let mut extract = None;
        if self.is_keyword("extract") {
            self.bump();
            self.expect(Tok::Colon)?;
            extract = Some(self.name()?);
            self.expect(Tok::Semi)?;
        }
        self.keyword("lhs")?;
        self.expect(Tok::Colon)?;
        let lhs = self.expr()?;
        self.expect(Tok::Semi)?;
        self.keyword("rhs")?;
        self.expect(Tok::Colon)?;
        let rhs = self.expr()?;
        self.expect(Tok::Semi)?;
        self.expect(Tok::RBrace)?;
        Ok(IdentityAst { name, vars, params, extract, lhs, rhs })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    e = Expr::Add(Box::new(e), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    e = Expr::Sub(Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    e = Expr::Div(Box::new(e), Box::new(self.unary()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    /// Exponent errors point at the last token of the exponent.
    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let e = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Expr::Int(n)
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        Expr::Neg(Box::new(Expr::Int(n)))
                    }
                    _ => return Err(self.error("expected an integer exponent")),
                }
            }
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Expr::Name(s)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                e
            }
            _ => return Err(self.error("expected an exponent")),
        };
        let end = self.toks[self.pos - 1].clone();
        let d = self.degree(&e).map_err(|m| self.error_at(&end, m))?;
        if d > MAX_EXPONENT_DEGREE {
            return Err(self.error_at(&end, format!("exponent has degree {d}, at most 2 is allowed")));
        }
        Ok(Expr::Pow(Box::new(base), Box::new(e)))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "poch" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let arg = self.expr()?;
                self.expect(Tok::Semi)?;
                let base = self.expr()?;
                self.expect(Tok::Semi)?;
                let count = if self.is_keyword("inf") {
                    self.bump();
                    None
                } else {
                    let c = self.expr()?;
                    let end = self.toks[self.pos - 1].clone();
                    let d = self.degree(&c).map_err(|m| self.error_at(&end, m))?;
                    if d > 1 {
                        return Err(self.error_at(&end, "factorial length must be linear in the indices"));
                    }
                    Some(Box::new(c))
                };
                self.expect(Tok::RParen)?;
                Ok(Expr::Poch { arg: Box::new(arg), base: Box::new(base), count })
            }
            Tok::Ident(s) if s == "sum" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let mut indices = Vec::new();
                loop {
                    let at = self.toks[self.pos].clone();
                    let name = self.name()?;
                    if indices.iter().any(|d: &IndexDecl| d.name == name) || self.scope.contains(&name) {
                        return Err(self.error_at(&at, format!("index '{name}' is already bound")));
                    }
                    let domain = if *self.peek() == Tok::Ge {
                        self.bump();
                        match self.peek() {
                            Tok::Int(0) => {
                                self.bump();
                                Domain::Natural
                            }
                            _ => return Err(self.error("expected '0'")),
                        }
                    } else if self.is_keyword("in") {
                        self.bump();
                        self.keyword("Z")?;
                        Domain::Integer
                    } else {
                        return Err(self.error("expected '>=0' or 'in Z'"));
                    };
                    indices.push(IndexDecl { name, domain });
                    if *self.peek() != Tok::Comma {
                        break;
                    }
                    self.bump();
                }
                self.expect(Tok::Semi)?;
                let depth = self.scope.len();
                self.scope.extend(indices.iter().map(|d| d.name.clone()));
                let body = self.expr();
                self.scope.truncate(depth);
                let body = body?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Sum { indices, body: Box::new(body) })
            }
            Tok::Ident(s) if s == "binom" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Comma)?;
                let k = match self.peek() {
                    Tok::Int(k) => *k,
                    _ => return Err(self.error("expected an integer")),
                };
                self.bump();
                self.expect(Tok::RParen)?;
                Ok(Expr::Binom(Box::new(e), k))
            }
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(Expr::Name(s))
            }
            Tok::Ident(s) if matches!(s.as_str(), "poch" | "sum" | "binom") => {
                self.bump();
                Err(self.error(format!("expected '(' after '{s}'")))
            }
            _ => Err(self.error("expected an expression")),
        }
    }

    /// Total degree in the bound indices, if the expression is a polynomial.
    fn degree(&self, e: &Expr) -> Result<u64, String> {
        Ok(match e {
            Expr::Int(_) => 0,
            Expr::Name(s) => u64::from(self.scope.contains(s)),
            Expr::Neg(a) => self.degree(a)?,
            Expr::Add(a, b) | Expr::Sub(a, b) => self.degree(a)?.max(self.degree(b)?),
            Expr::Mul(a, b) => self.degree(a)? + self.degree(b)?,
            Expr::Div(a, b) => {
                if self.degree(b)? > 0 {
                    return Err("division by an index expression in an exponent".into());
                }
                self.degree(a)?
            }
            Expr::Pow(a, k) => {
                let da = self.degree(a)?;
                match (da, &**k) {
                    (0, _) if self.degree(k)? == 0 => 0,
                    (_, Expr::Int(k)) => da.saturating_mul(*k),
                    _ => return Err("index expressions may only be raised to integer powers".into()),
                }
            }
            Expr::Binom(a, k) => self.degree(a)?.saturating_mul(*k),
            Expr::Poch { .. } | Expr::Sum { .. } => {
                return Err("exponents must be polynomial in the indices".into());
            }
        })
    }
}

fn is_reserved(s: &str) -> bool {
    matches!(s, "identity" | "vars" | "params" | "extract" | "lhs" | "rhs" | "sum" | "poch" | "binom" | "inf" | "in")
}
