//! Exact q-series kernel for checking Rogers–Ramanujan type and bilateral
//! identities coefficient by coefficient.
//!
//! Layers, bottom up:
//! - [`qring`]: truncated sparse Laurent series in `q` over formal variables
//! - [`qfactorial`]: q-shifted factorials and product sides
//! - [`summation`]: unilateral/bilateral multiple sums with quadratic exponents
//! - [`ctengine`]: Laurent series in an auxiliary `z` and constant-term extraction
//! - [`speclang`]: the `.qid` identity language
//! - [`catalog`]: built-in identities
//! - [`verify`]: comparison of both sides and reports

pub mod catalog;
pub mod ctengine;
pub mod qfactorial;
pub mod qring;
pub mod speclang;
pub mod summation;
pub mod verify;
