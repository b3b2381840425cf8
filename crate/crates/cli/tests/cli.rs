use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qverify")).args(args).output().expect("qverify runs")
}

fn reports(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qverify-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn rr1_transcript() {
    let out = qverify(&["verify", "--catalog", "rr1", "--order", "6", "--transcript"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &reports(&out)[0];
    assert_eq!(r["status"], "pass");
    assert_eq!(r["transcript"]["lhs"], "1*q^0 + 1*q^1 + 1*q^2 + 1*q^3 + 2*q^4 + 2*q^5 + 3*q^6");
    assert_eq!(r["transcript"]["lhs"], r["transcript"]["rhs"]);
}

#[test]
fn main_identity_passes() {
    let out = qverify(&["verify", "--catalog", "main", "--order", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(reports(&out)[0]["status"], "pass");
}

#[test]
fn broken_file_reports_first_mismatch() {
    let p = scratch(
        "broken.qid",
        "identity broken {\n  lhs: sum(n>=0; q^(n^2)/poch(q; q; n));\n  rhs: 2/poch(q; q^5; inf)/poch(q^4; q^5; inf);\n}\n",
    );
    let out = qverify(&["verify", p.to_str().unwrap(), "--order", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &reports(&out)[0];
    assert_eq!(r["status"], "mismatch");
    assert_eq!(r["first_mismatch"]["exponent"], "q^0");
    assert_eq!(r["first_mismatch"]["lhs"], "1");
    assert_eq!(r["first_mismatch"]["rhs"], "2");
}

#[test]
fn parse_errors_exit_two() {
    let p = scratch("bad.qid", "identity bad {\n  lhs: poch(q; q; ;\n  rhs: 1;\n}\n");
    let out = qverify(&["verify", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = &reports(&out)[0];
    assert_eq!(r["status"], "error");
    assert_eq!(r["error"]["kind"], "ParseError");
    assert!(r["error"]["message"].as_str().unwrap().starts_with("2:"));
}

#[test]
fn unknown_key_and_bad_param() {
    let out = qverify(&["verify", "--catalog", "nonesuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(reports(&out)[0]["error"]["kind"], "UnknownKey");
    let out = qverify(&["verify", "--catalog", "andrews-gordon", "--param", "k=3,i=7"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(reports(&out)[0]["error"]["kind"], "ParamOutOfRange");
}

#[test]
fn catalog_params_select_one_instance() {
    let out = qverify(&["verify", "--catalog", "andrews-gordon", "--param", "k=3,i=1", "--order", "15"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = reports(&out);
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0]["identity"], "andrews-gordon-3-1");
}

#[test]
fn expand_partitions_and_finite_product() {
    let out = qverify(&["expand", "1/poch(q;q;inf)", "--order", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1*q^0 + 1*q^1 + 2*q^2 + 3*q^3 + 5*q^4 + 7*q^5");
    let out = qverify(&["expand", "poch(q;q;3)"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1*q^0 + -1*q^1 + -1*q^2 + 1*q^4 + 1*q^5 + -1*q^6");
    let out = qverify(&["expand", "poch(q;q;3)", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["expr"], "poch(q; q; 3)");
}

#[test]
fn expand_parse_error() {
    let out = qverify(&["expand", "(", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "ParseError");
    assert_eq!(v["error"]["line"], 1);
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "--catalog", "bressoud", "--catalog", "cao-wang", "--order", "10", "--transcript"];
    let strip = |out: &Output| {
        reports(out)
            .into_iter()
            .map(|mut v| {
                v.as_object_mut().unwrap().remove("elapsed_ms");
                v
            })
            .collect::<Vec<_>>()
    };
    let a = strip(&qverify(&args));
    let b = strip(&qverify(&args));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn list_covers_catalog() {
    let out = qverify(&["list", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let keys: Vec<String> = reports(&out).iter().map(|v| v["key"].as_str().unwrap().to_string()).collect();
    for k in ["rr1", "rr2", "andrews-gordon", "bressoud", "ramanujan-1psi1", "main", "cor-double", "andrews-p20"] {
        assert!(keys.iter().any(|x| x == k), "{k} missing");
    }
}

#[test]
fn prove_main_replay() {
    let out = qverify(&["prove-main", "--order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
}
