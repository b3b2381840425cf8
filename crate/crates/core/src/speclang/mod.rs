//! The `.qid` identity file format: parser, canonical printer and lowering to
//! sum and product specifications.
//!
//! ```text
//! # first Rogers-Ramanujan identity
//! identity rr1 {
//!   lhs: sum(n>=0; q^(n^2)/poch(q; q; n));
//!   rhs: 1/poch(q; q^5; inf)/poch(q^4; q^5; inf);
//! }
//! ```

mod ast;
mod lexer;
mod lower;
mod parser;

pub use ast::{print_file, Expr, IdentityAst, IndexDecl};
pub use lower::{validate_identity, Identity, LExpr, LowerOptions, LoweringError};
pub use parser::{parse_expr, parse_file, parse_identity};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message} (at '{token}')")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}

#[cfg(test)]
mod tests;
