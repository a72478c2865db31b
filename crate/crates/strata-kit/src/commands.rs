//! One function per subcommand: JSON in, JSON out.

use serde_json::{json, Value};

use strata_core::json::{
    element_from_json, element_to_json, error_to_json, factorization_to_json, genericity_to_json, get,
    minimality_to_json, presentation_to_json, rational_to_json, stratum_from_json, stratum_to_json,
    subfield_from_json, tower_from_json, tower_to_json, validity_to_json, yu_from_json, yu_to_json, Tower,
    digits_to_json, depth_to_json,
};
use strata_core::fuzz;
use strata_core::minimal::{check_factorization, howe_factorize, is_generic, minimality_report};
use strata_core::oracle::{chain_from_field, Frame};
use strata_core::stratum::{
    compare_presentations, index_card, presentation_secherre, presentation_yu, yu_jump_indices, DepthMode,
};
use strata_core::translate::{factchar_indices, secherre_to_yu, yu_to_secherre};
use strata_core::{Error, Result, Subfield, TameElement};

use crate::suites;

pub const COMMANDS: [&str; 11] = [
    "expand",
    "sr",
    "minimal",
    "factorize",
    "embeddings",
    "generic",
    "stratum2yu",
    "yu2stratum",
    "groups",
    "indices",
    "verify",
];

pub const SUITES: [&str; 7] = ["sr", "minimal", "factorize", "filtration", "presentations", "roundtrip", "oracle"];

#[derive(Clone, Debug)]
pub struct Options {
    pub prec: i64,
    pub seed: u64,
    pub suite: Option<String>,
    pub dump: bool,
}

fn tower_of(input: &Value) -> Result<Tower> {
    tower_from_json(get(input, "tower")?)
}

fn element(input: &Value, key: &str, tower: &Tower, prec: i64) -> Result<TameElement> {
    element_from_json(get(input, key)?, tower, prec)?.coerce(tower.top())
}

fn subfield_or_base(input: &Value, key: &str, tower: &Tower, prec: i64) -> Result<Subfield> {
    match input.get(key) {
        Some(v) => subfield_from_json(v, tower, prec),
        None => Subfield::base(tower.top()),
    }
}

pub fn run(cmd: &str, input: &Value, opts: &Options) -> Result<Value> {
    let prec = opts.prec;
    match cmd {
        "expand" => {
            let t = tower_of(input)?;
            let x = element(input, "x", &t, prec)?;
            let result = match input.get("op").and_then(Value::as_str) {
                None => x,
                Some("neg") => x.neg(),
                Some("inv") => x.inv()?,
                Some("pow") => {
                    let n = get(input, "n")?
                        .as_i64()
                        .ok_or_else(|| Error::Schema("`n` must be an integer".into()))?;
                    x.pow(n)?
                }
                Some(op @ ("add" | "sub" | "mul" | "div")) => {
                    let y = element(input, "y", &t, prec)?;
                    match op {
                        "add" => x.add(&y)?,
                        "sub" => x.sub(&y)?,
                        "mul" => x.mul(&y)?,
                        _ => x.div(&y)?,
                    }
                }
                Some(other) => return Err(Error::Schema(format!("unknown op `{other}`"))),
            };
            Ok(json!({
                "result": element_to_json(&result),
                "valuation": result.valuation(),
                "ord": result.ord().ok().map(rational_to_json),
            }))
        }
        "sr" => {
            let t = tower_of(input)?;
            let c = element(input, "c", &t, prec)?;
            Ok(json!({"sr": digits_to_json(&c.sr()?)}))
        }
        "minimal" => {
            let t = tower_of(input)?;
            let c = element(input, "c", &t, prec)?;
            let base = subfield_or_base(input, "base", &t, prec)?;
            Ok(minimality_to_json(&minimality_report(&c, &base)?))
        }
        "factorize" => {
            let t = tower_of(input)?;
            let beta = element(input, "beta", &t, prec)?;
            let base = subfield_or_base(input, "base", &t, prec)?;
            let fac = howe_factorize(&beta, &base)?;
            Ok(json!({
                "factorization": factorization_to_json(&fac),
                "check": validity_to_json(&check_factorization(&fac)?),
            }))
        }
        "embeddings" => {
            let t = tower_of(input)?;
            let top = t.top();
            let x = match input.get("x") {
                Some(_) => Some(element(input, "x", &t, prec)?),
                None => None,
            };
            let embs = top.embeddings()?;
            let kl = embs[0].target.residue().clone();
            let rows: Vec<Value> = embs
                .iter()
                .map(|s| {
                    let image = x.as_ref().map(|x| s.apply(x).map(|y| digits_to_json(&y))).transpose()?;
                    Ok(json!({
                        "index": s.index,
                        "frob": s.frob_exp,
                        "xi": kl.decode(s.xi),
                        "image": image,
                    }))
                })
                .collect::<Result<_>>()?;
            Ok(json!({"splitting_tower": tower_to_json(&embs[0].target), "embeddings": rows}))
        }
        "generic" => {
            let t = tower_of(input)?;
            let c = element(input, "c", &t, prec)?;
            let upper = subfield_from_json(get(input, "upper")?, &t, prec)?;
            let lower = subfield_or_base(input, "lower", &t, prec)?;
            Ok(genericity_to_json(&is_generic(&c, &upper, &lower)?))
        }
        "stratum2yu" => {
            let st = stratum_from_json(input, None, prec)?;
            Ok(yu_to_json(&secherre_to_yu(&st)?))
        }
        "yu2stratum" => {
            let yu = yu_from_json(input, prec)?;
            Ok(stratum_to_json(&yu_to_secherre(&yu)?))
        }
        "groups" => {
            let st = stratum_from_json(input, None, prec)?;
            let yu = secherre_to_yu(&st)?;
            let sp = presentation_secherre(&st)?;
            let yp = presentation_yu(&yu)?;
            let cmp = |a, b| -> Result<Value> {
                let d = compare_presentations(a, b)?;
                Ok(json!({"equal": d.equal, "diffs": d.diffs}))
            };
            Ok(json!({
                "secherre": {
                    "H1": presentation_to_json(&sp.h1),
                    "J1": presentation_to_json(&sp.j1),
                    "J": presentation_to_json(&sp.j),
                    "Jhat": presentation_to_json(&sp.jhat),
                },
                "yu": {
                    "K+": presentation_to_json(&yp.k_plus),
                    "K0": presentation_to_json(&yp.k_circ),
                    "K": presentation_to_json(&yp.k),
                },
                "compare": {
                    "H1=K+": cmp(&sp.h1, &yp.k_plus)?,
                    "J=K0": cmp(&sp.j, &yp.k_circ)?,
                    "Jhat=K": cmp(&sp.jhat, &yp.k)?,
                },
            }))
        }
        "indices" => {
            let st = stratum_from_json(input, None, prec)?;
            let t = match input.get("t") {
                Some(v) => v.as_i64().ok_or_else(|| Error::Schema("`t` must be an integer".into()))?,
                None => 0,
            };
            let tab = factchar_indices(&st, t)?;
            let rows: Vec<Value> = tab
                .rows
                .iter()
                .map(|(ti, d)| json!({"t": ti, "depth": depth_to_json(*d)}))
                .collect();
            let yu = secherre_to_yu(&st)?;
            let sp = presentation_secherre(&st)?;
            Ok(json!({
                "t": t,
                "windows": rows,
                "j1_over_h1": index_card(&sp.j1, &sp.h1)?,
                "jump_indices": yu_jump_indices(&yu)?,
            }))
        }
        "verify" => verify(opts),
        "fuzz" => fuzz_corpus(input, opts),
        other => Err(Error::Schema(format!("unknown command `{other}`"))),
    }
}

fn suite_json(name: &str, opts: &Options) -> Result<Vec<Value>> {
    let seed = opts.seed;
    let reports = match name {
        "sr" => vec![suites::suite_sr(opts.prec)?],
        "minimal" => vec![suites::suite_minimal(opts.prec, seed, 3, 1000)?],
        "factorize" => vec![suites::suite_factorize(seed, 1000, 100)?],
        "filtration" => vec![suites::suite_filtration(12)?],
        "presentations" => {
            let (a, b) = suites::suite_presentations(seed, 200, 4)?;
            vec![a, b]
        }
        "roundtrip" => vec![suites::suite_roundtrip(seed, 200)?],
        "oracle" => vec![suites::suite_valuation(seed, 1000)?, suites::suite_psi(seed, 100, 100)?],
        other => return Err(Error::Schema(format!("unknown suite `{other}`"))),
    };
    Ok(reports.iter().map(|r| r.to_json()).collect())
}

fn dump_lattices() -> Result<Value> {
    let mut out = Vec::new();
    for top in suites::chain_shapes()? {
        let chain = chain_from_field(&top)?;
        let frame = Frame::for_valuations(0, 6);
        for n in 0..=2 {
            let l = chain.filt_lattice(DepthMode::Plain.exponent(n), frame)?;
            out.push(json!({"tower": tower_to_json(&top), "n": n, "lattice": l.dump()}));
        }
    }
    Ok(Value::Array(out))
}

fn verify(opts: &Options) -> Result<Value> {
    let names: Vec<&str> = match &opts.suite {
        Some(s) => vec![s.as_str()],
        None => SUITES.to_vec(),
    };
    let mut table = Vec::new();
    for n in names {
        table.extend(suite_json(n, opts)?);
    }
    let passed = table.iter().all(|r| r["passed"] == json!(true));
    let mut out = json!({"seed": opts.seed, "passed": passed, "suites": table});
    if opts.dump {
        out["lattices"] = dump_lattices()?;
    }
    Ok(out)
}

const TOWER_SCHEMA: &str = r#"{"type":"object","required":["base_q"],"properties":{"base_q":{"type":"integer"},"levels":{"type":"array","items":{"type":"object","required":["f","e","twist"],"properties":{"f":{"type":"integer","minimum":1},"e":{"type":"integer","minimum":1},"twist":{"type":"array","items":{"type":"integer"}}}}}}}"#;
const ELEMENT_SCHEMA: &str = r#"{"type":"object","required":["digits"],"properties":{"field":{"type":"integer"},"digits":{"type":"array","items":{"type":"array","prefixItems":[{"type":"integer"},{"type":"array","items":{"type":"integer"}}]}},"prec":{"type":"integer"}}}"#;
const SUBFIELD_SCHEMA: &str = r#"{"type":"object","properties":{"node":{"type":"integer"},"generators":{"type":"array"}}}"#;

/// JSON Schema of a command's input.
pub fn schema(cmd: &str) -> Result<Value> {
    let tower: Value = serde_json::from_str(TOWER_SCHEMA).unwrap();
    let elem: Value = serde_json::from_str(ELEMENT_SCHEMA).unwrap();
    let sub: Value = serde_json::from_str(SUBFIELD_SCHEMA).unwrap();
    let obj = |req: &[&str], props: Value| {
        json!({
            "$schema": "https://json-schema.org/draft/2020-12/schema",
            "title": format!("strata-kit {cmd} input"),
            "type": "object",
            "required": req,
            "properties": props,
        })
    };
    let stratum = obj(
        &["tower", "order", "beta"],
        json!({
            "schema": {"const": strata_core::translate::SCHEMA},
            "tower": tower,
            "order": {"type": "object", "required": ["m", "e_a", "pure_over", "b_maximal"], "properties": {
                "m": {"type": "integer"}, "d": {"type": "integer"}, "e_a": {"type": "integer"},
                "pure_over": sub, "b_maximal": {"type": "boolean"}}},
            "r": {"type": "integer"},
            "beta": elem,
            "t": {"type": "integer"},
        }),
    );
    Ok(match cmd {
        "expand" => obj(&["tower", "x"], json!({
            "tower": tower, "x": elem, "y": elem,
            "op": {"enum": ["neg", "inv", "pow", "add", "sub", "mul", "div"]}, "n": {"type": "integer"}})),
        "sr" => obj(&["tower", "c"], json!({"tower": tower, "c": elem})),
        "minimal" => obj(&["tower", "c"], json!({"tower": tower, "c": elem, "base": sub})),
        "factorize" => obj(&["tower", "beta"], json!({"tower": tower, "beta": elem, "base": sub})),
        "embeddings" => obj(&["tower"], json!({"tower": tower, "x": elem})),
        "generic" => obj(&["tower", "c", "upper"], json!({"tower": tower, "c": elem, "upper": sub, "lower": sub})),
        "stratum2yu" | "groups" | "indices" => stratum,
        "yu2stratum" => obj(
            &["tower", "fields", "n_dim", "e_a", "vertex", "depths", "realizers", "d", "trivial_top"],
            json!({
                "schema": {"const": strata_core::translate::SCHEMA},
                "tower": tower,
                "fields": {"type": "array", "items": sub},
                "n_dim": {"type": "integer"}, "e_a": {"type": "integer"}, "vertex": {"type": "boolean"},
                "depths": {"type": "array", "items": {"type": "string"}},
                "realizers": {"type": "array", "items": elem},
                "s": {"type": ["integer", "null"]}, "d": {"type": "integer"},
                "trivial_top": {"type": "boolean"}, "rho": {"type": "string"}}),
        ),
        "verify" => obj(&[], json!({})),
        "fuzz" => obj(
            &[],
            json!({
                "count": {"type": "integer", "minimum": 1, "maximum": 10000},
                "kind": {"enum": ["betas", "strata"]}
            }),
        ),
        other => return Err(Error::Schema(format!("unknown command `{other}`"))),
    })
}

fn fuzz_corpus(input: &Value, opts: &Options) -> Result<Value> {
    let count = match input.get("count") {
        None => 1,
        Some(v) => v
            .as_u64()
            .filter(|&n| (1..=10_000).contains(&n))
            .ok_or_else(|| Error::Schema("count must be an integer in 1..=10000".into()))? as usize,
    };
    let caps = fuzz::FuzzCaps {
        prec: opts.prec,
        ..Default::default()
    };
    let items: Vec<Value> = match input.get("kind").and_then(Value::as_str).unwrap_or("betas") {
        "betas" => fuzz::corpus(opts.seed, count, &caps)?.iter().map(|i| i.to_json()).collect(),
        "strata" => fuzz::strata_corpus(opts.seed, count, &caps)?.iter().map(stratum_to_json).collect(),
        other => return Err(Error::Schema(format!("unknown corpus kind `{other}`"))),
    };
    Ok(json!({"seed": opts.seed, "instances": items}))
}

/// Output value and exit code; panics become internal errors.
pub fn execute(cmd: &str, input: &Value, opts: &Options) -> (Value, i32) {
    let res = std::panic::catch_unwind(|| run(cmd, input, opts))
        .unwrap_or_else(|_| Err(Error::Internal(format!("{cmd} aborted unexpectedly"))));
    match res {
        Ok(v) => {
            let code = if cmd == "verify" && v["passed"] != json!(true) { 2 } else { 0 };
            (v, code)
        }
        Err(e) => (error_to_json(&e), e.exit_code()),
    }
}
