use std::io::Write;
use std::process::{Command, Stdio};

use proptest::prelude::*;
use serde_json::{json, Value};
use strata_kit::commands::{execute, Options, COMMANDS};

fn run(args: &[&str], stdin: &str) -> (Value, String, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_strata-kit"))
        .args(args)
        .env_remove("STRATA_KIT_PREC")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or(Value::Null);
    (v, text, out.status.code().unwrap())
}

const RUNNING_EXAMPLE: &str =
    r#"{"tower":{"base_q":3,"levels":[{"f":1,"e":2,"twist":[1]}]},"beta":{"digits":[[-4,[1]],[-1,[1]]]}}"#;

#[test]
fn sr_of_two_over_t_plus_one() {
    let (v, _, code) = run(&["sr"], r#"{"tower":{"base_q":3},"c":{"digits":[[-1,[2]],[0,[1]]]}}"#);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"sr": [[-1, [2]]]}));
}

#[test]
fn factorize_running_example() {
    let (v, _, code) = run(&["factorize"], RUNNING_EXAMPLE);
    assert_eq!(code, 0);
    assert_eq!(v["factorization"]["chunks"].as_array().unwrap().len(), 2);
    assert_eq!(v["check"]["valid"], json!(true));
}

#[test]
fn fuzz_seed_zero_matches_golden() {
    let (_, text, code) = run(&["fuzz", "--seed", "0"], "");
    assert_eq!(code, 0);
    assert_eq!(text, include_str!("golden/fuzz_seed0.json"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let a = run(&["fuzz", "--seed", "11", "--count", "5", "--kind", "strata"], "");
    let b = run(&["fuzz", "--seed", "11", "--count", "5", "--kind", "strata"], "");
    assert_eq!(a.1, b.1);
    let a = run(&["groups"], &a.0["instances"][0].to_string());
    let b = run(&["groups"], &b.0["instances"][0].to_string());
    assert_eq!(a.2, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn exit_codes_and_error_shape() {
    let (v, _, code) = run(&["minimal"], "{bad");
    assert_eq!(code, 1);
    assert_eq!(v["error"]["clause"], json!("schema"));

    let (v, _, code) = run(&["sr"], r#"{"tower":{"base_q":3,"levels":[{"f":1,"e":3,"twist":[1]}]},"c":{"digits":[]}}"#);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["clause"], json!("wild_ramification"));

    let zero_gen = r#"{"tower":{"base_q":3,"levels":[{"f":2,"e":1,"twist":[1,0]}]},
        "c":{"digits":[[-1,[0,1]]]},"base":{"generators":[{"digits":[],"prec":3}]}}"#;
    let (v, _, code) = run(&["minimal"], zero_gen);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["clause"], json!("precision"));

    let (_, _, code) = run(&["--prec", "4", "sr"], "{}");
    assert_eq!(code, 1);
}

#[test]
fn schemas_are_printable() {
    for cmd in COMMANDS {
        let (v, _, code) = run(&[cmd, "--schema"], "");
        assert_eq!(code, 0, "{cmd}");
        assert!(v.get("$schema").is_some(), "{cmd}");
    }
}

#[test]
fn verify_reports_counts() {
    let (v, _, code) = run(&["verify", "--suite", "filtration"], "");
    assert_eq!(code, 0);
    assert_eq!(v["passed"], json!(true));
    let suite = &v["suites"][0];
    assert!(suite["cases"].as_u64().unwrap() > 0);
}

fn mutate(v: &Value, path: &[usize], junk: &Value) -> Value {
    match (v, path.split_first()) {
        (_, None) => junk.clone(),
        (Value::Object(m), Some((&i, rest))) if !m.is_empty() => {
            let mut m = m.clone();
            let key = m.keys().nth(i % m.len()).unwrap().clone();
            let child = mutate(&m[&key], rest, junk);
            m.insert(key, child);
            Value::Object(m)
        }
        (Value::Array(a), Some((&i, rest))) if !a.is_empty() => {
            let mut a = a.clone();
            let k = i % a.len();
            a[k] = mutate(&a[k], rest, junk);
            Value::Array(a)
        }
        _ => junk.clone(),
    }
}

fn junk() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::Null),
        any::<i64>().prop_map(|n| json!(n)),
        Just(json!(-1)),
        Just(json!(0)),
        Just(json!("x")),
        Just(json!([])),
        Just(json!({})),
        Just(json!([[0, [99, 99, 99]]])),
        Just(json!(1e300)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn malformed_inputs_give_structured_errors(
        cmd in proptest::sample::select(COMMANDS[..10].to_vec()),
        path in proptest::collection::vec(0usize..6, 0..5),
        j in junk(),
    ) {
        let base: Value = serde_json::from_str(RUNNING_EXAMPLE).unwrap();
        let mut input = base.clone();
        input["c"] = base["beta"].clone();
        input["x"] = base["beta"].clone();
        let input = mutate(&input, &path, &j);
        let opts = Options { prec: 32, seed: 0, suite: None, dump: false };
        let (out, code) = execute(cmd, &input, &opts);
        if code == 0 {
            prop_assert!(out.get("error").is_none());
        } else {
            prop_assert!(matches!(code, 1..=3), "code {code}");
            prop_assert!(out["error"]["clause"].is_string());
            prop_assert!(out["error"]["location"].is_string());
        }
    }
}
