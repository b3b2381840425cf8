use super::*;
use crate::qring::VarTag;
use crate::speclang::print_file;
use crate::summation::SumOptions;
use crate::verify::{eval_side, verify_identity, Status, VerifyOptions};

fn params(pairs: &[(&str, i64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn sides(key: &str, ps: &[(&str, i64)], order: i64) -> (crate::qring::Series, crate::qring::Series) {
    let id = get_identity(key, &params(ps)).unwrap();
    let o = SumOptions::default();
    (eval_side(&id.lhs, order, &o).unwrap(), eval_side(&id.rhs, order, &o).unwrap())
}

#[test]
fn listing_is_ordered_and_complete() {
    let keys: Vec<&str> = list_identities().iter().map(|e| e.key).collect();
    assert_eq!(
        keys,
        [
            "rr1",
            "rr2",
            "andrews-gordon",
            "bressoud",
            "ramanujan-1psi1",
            "q-binomial",
            "cao-wang",
            "main",
            "cor-double",
            "cor-triple",
            "cor-multi",
            "bilateral-euler",
            "circle-x",
            "circle-y",
            "andrews-p20",
            "remark-ua1"
        ]
    );
    let multi = entry("cor-multi").unwrap();
    assert_eq!((multi.params[0].name, multi.params[0].min), ("l", 4));
}

#[test]
fn lookup_errors() {
    assert_eq!(get_identity("nope", &Params::new()).unwrap_err().name(), "UnknownKey");
    let extra = get_identity("main", &params(&[("k", 3)])).unwrap_err();
    assert_eq!(extra.name(), "ParamOutOfRange");
    assert_eq!(get_identity("andrews-gordon", &params(&[("k", 3), ("i", 4)])).unwrap_err().name(), "ParamOutOfRange");
    assert_eq!(get_identity("andrews-gordon", &params(&[("k", 1), ("i", 1)])).unwrap_err().name(), "ParamOutOfRange");
    assert_eq!(get_identity("cor-multi", &params(&[("l", 3)])).unwrap_err().name(), "ParamOutOfRange");
}

#[test]
fn suite_entries_validate_and_round_trip() {
    let mut asts = Vec::new();
    for (key, ps) in default_suite() {
        let e = entry(key).unwrap();
        let text = e.qid_text(&ps).unwrap();
        let ast = crate::speclang::parse_identity(&text).unwrap();
        assert_eq!(ast.to_string(), text, "{key}");
        get_identity(key, &ps).unwrap();
        asts.push(ast);
    }
    let file = print_file(&asts);
    assert_eq!(print_file(&crate::speclang::parse_file(&file).unwrap()), file);
}

#[test]
fn andrews_gordon_k2_is_rogers_ramanujan() {
    let (ag22, _) = sides("andrews-gordon", &[("k", 2), ("i", 2)], 40);
    let (rr1, _) = sides("rr1", &[], 40);
    assert_eq!(ag22.first_difference(&rr1, 40), None);
    let (_, ag21) = sides("andrews-gordon", &[("k", 2), ("i", 1)], 40);
    let (_, rr2) = sides("rr2", &[], 40);
    assert_eq!(ag21.first_difference(&rr2, 40), None);
}

#[test]
fn main_at_one_is_cor_double() {
    let x = VarTag::new("x").unwrap();
    let y = VarTag::new("y").unwrap();
    let main = get_identity("main", &Params::new()).unwrap().substitute(x, 1).substitute(y, 1);
    let o = SumOptions::default();
    let (l, r) = (eval_side(&main.lhs, 40, &o).unwrap(), eval_side(&main.rhs, 40, &o).unwrap());
    let (cl, cr) = sides("cor-double", &[], 40);
    assert_eq!(l.first_difference(&cl, 40), None);
    assert_eq!(r.first_difference(&cr, 40), None);
}

#[test]
fn whole_suite_passes_at_low_order() {
    let opts = VerifyOptions { order: 10, ..VerifyOptions::default() };
    for (key, ps) in default_suite() {
        let id = get_identity(key, &ps).unwrap();
        let r = verify_identity(&id, &opts);
        assert_eq!(r.status, Status::Pass, "{key} {ps:?}: {r:?}");
    }
}
