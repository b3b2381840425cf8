use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use qverify_core::catalog::{self, Params};
use qverify_core::ctengine::prove_main_theorem;
use qverify_core::speclang::{parse_expr, parse_file, validate_identity, Expr, Identity, IdentityAst, LowerOptions};
use qverify_core::summation::SumOptions;
use qverify_core::verify::{eval_side, verify_identity, Status, VerificationReport, VerifyOptions};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

pub struct VerifyRequest {
    pub files: Vec<PathBuf>,
    pub catalog: Vec<String>,
    pub order: i64,
    pub params: Vec<String>,
    pub zwindow: i64,
    pub shell_cap: Option<i64>,
    pub transcript: bool,
}

enum Job {
    Ready(Box<Identity>),
    Failed(VerificationReport),
}

fn parse_params(raw: &[String]) -> Result<Params, String> {
    let mut out = Params::new();
    for item in raw.iter().filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("parameter '{item}' is not name=value"))?;
        let v: i64 = v.trim().parse().map_err(|_| format!("parameter '{item}' needs an integer value"))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn file_jobs(path: &PathBuf, order: i64, lower: LowerOptions) -> Vec<Job> {
    let name = path.display().to_string();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return vec![Job::Failed(VerificationReport::error(&name, order, "IoError", e.to_string()))],
    };
    match parse_file(&text) {
        Err(e) => vec![Job::Failed(VerificationReport::error(&name, order, "ParseError", e.to_string()))],
        Ok(asts) => asts
            .iter()
            .map(|ast| match validate_identity(ast, lower) {
                Ok(id) => Job::Ready(Box::new(id)),
                Err(e) => Job::Failed(VerificationReport::error(
                    &ast.name,
                    order,
                    "LoweringError",
                    format!("{}: {e}", e.condition()),
                )),
            })
            .collect(),
    }
}

fn catalog_jobs(key: &str, params: &Params, order: i64, lower: LowerOptions) -> Vec<Job> {
    let sets: Vec<(String, Params)> = if key == "all" {
        if !params.is_empty() {
            let msg = "--param cannot be combined with --catalog all";
            return vec![Job::Failed(VerificationReport::error("all", order, "ParamOutOfRange", msg))];
        }
        catalog::default_suite().into_iter().map(|(k, p)| (k.to_string(), p)).collect()
    } else {
        match catalog::entry(key) {
            Err(e) => return vec![Job::Failed(VerificationReport::error(key, order, e.name(), e.to_string()))],
            Ok(entry) if params.is_empty() => entry.suite().into_iter().map(|p| (key.to_string(), p)).collect(),
            Ok(_) => vec![(key.to_string(), params.clone())],
        }
    };
    sets.into_iter()
        .map(|(k, p)| match catalog::get_identity_with(&k, &p, lower) {
            Ok(id) => Job::Ready(Box::new(id)),
            Err(e) => Job::Failed(VerificationReport::error(&k, order, e.name(), e.to_string())),
        })
        .collect()
}

pub fn verify(req: &VerifyRequest, as_json: bool) -> u8 {
    let lower = LowerOptions { allow_indefinite: req.shell_cap.is_some() };
    let mut jobs = Vec::new();
    match parse_params(&req.params) {
        Ok(params) => {
            for f in &req.files {
                jobs.extend(file_jobs(f, req.order, lower));
            }
            for key in &req.catalog {
                jobs.extend(catalog_jobs(key, &params, req.order, lower));
            }
        }
        Err(msg) => jobs.push(Job::Failed(VerificationReport::error("--param", req.order, "ParamOutOfRange", msg))),
    }
    if jobs.is_empty() {
        eprintln!("qverify: nothing to verify; give .qid files or --catalog");
        return EXIT_ERROR;
    }
    let opts =
        VerifyOptions { order: req.order, zwindow: req.zwindow, shell_cap: req.shell_cap, transcript: req.transcript };
    let reports: Vec<VerificationReport> = jobs
        .into_par_iter()
        .map(|j| match j {
            Job::Ready(id) => verify_identity(&id, &opts),
            Job::Failed(r) => r,
        })
        .collect();
    for r in &reports {
        if as_json {
            println!("{}", serde_json::to_string(r).expect("report serializes"));
        } else {
            print_text(r);
        }
    }
    if reports.iter().any(|r| r.status == Status::Error) {
        EXIT_ERROR
    } else if reports.iter().any(|r| r.status == Status::Mismatch) {
        EXIT_MISMATCH
    } else {
        EXIT_PASS
    }
}

fn print_text(r: &VerificationReport) {
    let scale = if r.scale > 1 { format!(" (in q^(1/{}))", r.scale) } else { String::new() };
    match r.status {
        Status::Pass => println!("PASS {} through q^{}{} [{} ms]", r.identity, r.order, scale, r.elapsed_ms),
        Status::Mismatch => {
            let m = r.first_mismatch.as_ref().expect("mismatch recorded");
            println!("MISMATCH {} at {}{}: lhs {} rhs {}", r.identity, m.exponent, scale, m.lhs, m.rhs);
        }
        Status::Error => {
            let e = r.error.as_ref().expect("error recorded");
            println!("ERROR {} {}: {}", r.identity, e.kind, e.message);
        }
    }
    if let Some(t) = &r.transcript {
        println!("  lhs = {}", t.lhs);
        println!("  rhs = {}", t.rhs);
    }
}

fn emit_error(as_json: bool, kind: &str, message: &str, extra: serde_json::Value) {
    if as_json {
        let mut v = json!({ "error": { "kind": kind, "message": message } });
        if let (Some(err), Some(obj)) = (v["error"].as_object_mut(), extra.as_object()) {
            err.extend(obj.clone());
        }
        println!("{v}");
    } else {
        eprintln!("{kind}: {message}");
    }
}

#[derive(Serialize)]
struct Expansion {
    expr: String,
    order: i64,
    scale: i64,
    series: String,
}

pub fn expand(src: &str, order: i64, as_json: bool) -> u8 {
    let expr = match parse_expr(src) {
        Ok(e) => e,
        Err(e) => {
            let extra = json!({ "line": e.line, "column": e.column, "token": e.token });
            emit_error(as_json, "ParseError", &e.to_string(), extra);
            return EXIT_ERROR;
        }
    };
    let vars: Vec<String> = expr.free_names().into_iter().filter(|n| n != "q").collect();
    let ast =
        IdentityAst { name: "expand".into(), vars, params: Vec::new(), extract: None, lhs: expr, rhs: Expr::Int(0) };
    let id = match validate_identity(&ast, LowerOptions::default()) {
        Ok(id) => id,
        Err(e) => {
            emit_error(as_json, "LoweringError", &format!("{}: {e}", e.condition()), json!({}));
            return EXIT_ERROR;
        }
    };
    let n = order * id.scale;
    match eval_side(&id.lhs, n, &SumOptions::default()) {
        Ok(s) => {
            let out =
                Expansion { expr: ast.lhs.to_string(), order, scale: id.scale, series: s.truncate(n).canonical_text() };
            if as_json {
                println!("{}", serde_json::to_string(&out).expect("expansion serializes"));
            } else {
                println!("{}", out.series);
            }
            EXIT_PASS
        }
        Err(e) => {
            emit_error(as_json, e.name(), &e.to_string(), json!({}));
            EXIT_ERROR
        }
    }
}

pub fn prove_main(order: i64, as_json: bool) -> u8 {
    match prove_main_theorem(order) {
        Ok(replay) => {
            if as_json {
                let checks: Vec<_> = replay
                    .checks
                    .iter()
                    .map(|c| json!({ "name": c.name, "status": if c.mismatch.is_none() { "pass" } else { "mismatch" }, "mismatch": c.mismatch }))
                    .collect();
                println!("{}", json!({ "order": order, "passed": replay.passed(), "checks": checks }));
            } else {
                for c in &replay.checks {
                    match &c.mismatch {
                        None => println!("PASS {}", c.name),
                        Some(m) => println!("MISMATCH {} at {}: {} vs {}", c.name, m.exponent, m.lhs, m.rhs),
                    }
                }
            }
            if replay.passed() {
                EXIT_PASS
            } else {
                EXIT_MISMATCH
            }
        }
        Err(e) => {
            emit_error(as_json, e.name(), &e.to_string(), json!({}));
            EXIT_ERROR
        }
    }
}

pub fn list(as_json: bool) -> u8 {
    for e in catalog::list_identities() {
        if as_json {
            println!("{}", serde_json::to_string(&e).expect("entry serializes"));
        } else {
            let ps: Vec<String> = e
                .params
                .iter()
                .map(|p| match p.max_param {
                    Some(m) => format!("{}>={}..<={m}", p.name, p.min),
                    None => format!("{}>={}", p.name, p.min),
                })
                .collect();
            println!("{:<16} {:<14} {}", e.key, ps.join(","), e.description);
        }
    }
    EXIT_PASS
}
