use num_rational::Rational64;

use super::*;
use crate::qfactorial::{expand_product_spec, Count};
use crate::qring::VarTag;
use crate::summation::{eval_sum, Domain, QuadForm};

const RR1: &str = "identity rr1 { lhs: sum(n>=0; q^(n^2) / poch(q; q; n)); \
                   rhs: 1 / poch(q; q^5; inf) / poch(q^4; q^5; inf); }";

const MAIN: &str = "\
# bilateral double sum
identity main {
  vars: x, y;
  lhs: sum(i in Z, j in Z; x^i*y^j*q^(i^2 - i*j + j^2)/poch(x*q; q; i)/poch(y*q; q; j));
  rhs: poch(q; q; inf)*poch(-x*y*q; q^2; inf)*poch(-q/(x*y); q^2; inf)*poch(q^2; q^2; inf)
       /poch(x*q; q; inf)/poch(y*q; q; inf);
}
";

fn r(x: i64) -> Rational64 {
    Rational64::from_integer(x)
}

#[test]
fn rr1_parses_and_lowers() {
    let ast = parse_identity(RR1).unwrap();
    assert_eq!(ast.name, "rr1");
    assert!(ast.vars.is_empty());
    let id = validate_identity(&ast, LowerOptions::default()).unwrap();
    assert_eq!(id.scale, 1);
    let LExpr::Sum(s) = &id.lhs else { panic!("lhs is not a sum: {:?}", id.lhs) };
    assert_eq!(s.dim(), 1);
    assert_eq!(s.domains, vec![Domain::Natural]);
    assert_eq!(s.form, QuadForm::index(1, 0).pow(2).unwrap());
    assert_eq!(s.denoms.len(), 1);
    let LExpr::Product(p) = &id.rhs else { panic!("rhs is not a product") };
    assert_eq!(p.factors.len(), 2);
    assert!(p.factors.iter().all(|f| f.count == Count::Infinite && f.expo == -1 && f.basepow == 5));
    let l = eval_sum(s, 30).unwrap();
    let rr = expand_product_spec(p, 30).unwrap();
    assert_eq!(l.first_difference(&rr, 30), None);
}

#[test]
fn cubic_exponent_is_a_parse_error() {
    let e = parse_identity("identity bad { lhs: sum(n>=0; q^(n^3)); rhs: 1; }").unwrap_err();
    assert_eq!((e.line, e.column), (1, 37));
    assert!(e.message.contains("degree 3"), "{e}");
    let e = parse_identity("identity bad {\n  lhs: sum(n>=0; q^(binom(n, 3)));\n  rhs: 1;\n}").unwrap_err();
    assert_eq!(e.line, 2);
}

#[test]
fn binom_sugar_is_quadratic() {
    let ast =
        parse_identity("identity b { lhs: sum(n>=0; q^(binom(n, 2) + n)/poch(q; q; n)); rhs: poch(-q; q; inf); }")
            .unwrap();
    let id = validate_identity(&ast, LowerOptions::default()).unwrap();
    let LExpr::Sum(s) = &id.lhs else { panic!() };
    assert_eq!(s.form.eval(&[3]), r(6));
}

#[test]
fn main_theorem_lowers_to_bilateral_sum() {
    let ast = parse_identity(MAIN).unwrap();
    let id = validate_identity(&ast, LowerOptions::default()).unwrap();
    let (x, y) = (VarTag::new("x").unwrap(), VarTag::new("y").unwrap());
    let LExpr::Sum(s) = &id.lhs else { panic!() };
    assert_eq!(s.domains, vec![Domain::Integer; 2]);
    assert_eq!(s.varweights[0].get(&x), Some(&1));
    assert_eq!(s.varweights[1].get(&y), Some(&1));
    assert!(!s.varweights[0].contains_key(&y));
    let LExpr::Product(p) = &id.rhs else { panic!() };
    assert_eq!(p.factors.len(), 6);
}

#[test]
fn indefinite_bilateral_form_is_rejected() {
    let ast = parse_identity("identity ind { lhs: sum(i in Z, j in Z; q^(i*j)); rhs: 1; }").unwrap();
    let e = validate_identity(&ast, LowerOptions::default()).unwrap_err();
    assert_eq!(e.condition(), "NotPositiveDefinite");
    assert!(validate_identity(&ast, LowerOptions { allow_indefinite: true }).is_ok());
}

#[test]
fn round_trip_is_canonical() {
    for src in [RR1, MAIN] {
        let ast = parse_identity(src).unwrap();
        let printed = ast.to_string();
        let again = parse_identity(&printed).unwrap();
        assert_eq!(again, ast);
        assert_eq!(again.to_string(), printed);
    }
}

#[test]
fn printer_keeps_structure() {
    let cases = [
        "a - (b - c)",
        "a - -b",
        "-(a*b)",
        "-a^2",
        "(-a)^i",
        "(a^2)^3",
        "a/(b*c)",
        "a*(b + c)",
        "q^(-1)",
        "(x*z)^(i - j)",
    ];
    for c in cases {
        let src = format!("identity t {{ lhs: {c}; rhs: 1; }}");
        let ast = parse_identity(&src).unwrap();
        assert_eq!(ast.lhs.to_string(), c);
    }
}

#[test]
fn fractional_exponents_set_the_scale() {
    let src = "identity half { lhs: sum(n>=0; q^(n^2/2)/poch(q; q; n)); rhs: poch(-q^(1/2); q; inf); }";
    let id = validate_identity(&parse_identity(src).unwrap(), LowerOptions::default()).unwrap();
    assert_eq!(id.scale, 2);
    let LExpr::Sum(s) = &id.lhs else { panic!() };
    let LExpr::Product(p) = &id.rhs else { panic!() };
    assert_eq!(p.factors[0].basepow, 2);
    assert_eq!(p.factors[0].arg.qexp(), 1);
    let l = eval_sum(s, 20).unwrap();
    let rr = expand_product_spec(p, 20).unwrap();
    assert_eq!(l.first_difference(&rr, 20), None);
}

#[test]
fn params_substitute() {
    let src = "identity p { params: k = 3, a = -1; lhs: sum(n>=0; q^(k*n^2 + a*n)/poch(q; q; n)); rhs: poch(q; q^(2*k); k); }";
    let ast = parse_identity(src).unwrap();
    assert_eq!(ast.params, vec![("k".to_string(), 3), ("a".to_string(), -1)]);
    let id = validate_identity(&ast, LowerOptions::default()).unwrap();
    let LExpr::Sum(s) = &id.lhs else { panic!() };
    assert_eq!(s.form.eval(&[2]), r(10));
    let LExpr::Product(p) = &id.rhs else { panic!() };
    assert_eq!((p.factors[0].basepow, p.factors[0].count), (6, Count::Finite(3)));
}

#[test]
fn lowering_errors_name_the_condition() {
    let cases = [
        ("lhs: w; rhs: 1;", "UndeclaredName"),
        ("lhs: 1/(2*q); rhs: 1;", "NonUnitDenominator"),
        ("lhs: poch(1 + q; q; 2); rhs: 1;", "NotMonomial"),
        ("lhs: poch(q; 2*q; 2); rhs: 1;", "BadBase"),
        ("lhs: sum(n>=0; q^n*poch(q; q; n/2)); rhs: 1;", "NonLinear"),
        ("lhs: sum(n>=0; q^(n^2)*(1 + q)); rhs: 1;", "UnsupportedInSum"),
        ("lhs: sum(n>=0; q^n*poch(q^n; q; 2)); rhs: 1;", "IndexDependentArgument"),
        ("lhs: sum(n>=0; (q^(n^2))^n); rhs: 1;", "DegreeTooHigh"),
    ];
    for (body, cond) in cases {
        let ast = parse_identity(&format!("identity e {{ {body} }}")).unwrap();
        let e = validate_identity(&ast, LowerOptions::default()).unwrap_err();
        assert_eq!(e.condition(), cond, "{body}: {e}");
    }
}

#[test]
fn parse_errors_have_positions() {
    let e = parse_identity("identity x {\n  lhs: 1 +;\n  rhs: 1;\n}").unwrap_err();
    assert_eq!((e.line, e.column, e.token.as_str()), (2, 11, ";"));
    let e = parse_identity("identity x { lhs: 1 $ 2; rhs: 1; }").unwrap_err();
    assert_eq!(e.token, "$");
    let e = parse_identity("identity x { rhs: 1; }").unwrap_err();
    assert!(e.message.contains("lhs"));
    let e = parse_identity("identity x { lhs: sum(n>=0, n>=0; q); rhs: 1; }").unwrap_err();
    assert!(e.message.contains("already bound"));
}

#[test]
fn dashed_names_and_files() {
    let src = "identity andrews-gordon-3-1 { lhs: 1; rhs: 1; }\n# second\nidentity b { lhs: q; rhs: q; }";
    let ids = parse_file(src).unwrap();
    assert_eq!(ids[0].name, "andrews-gordon-3-1");
    assert_eq!(ids[1].name, "b");
    assert_eq!(parse_file(&print_file(&ids)).unwrap(), ids);
    assert!(parse_identity("identity a - b { lhs: 1; rhs: 1; }").is_err());
}
