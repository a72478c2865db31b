//! JSON forms of towers, elements and the derived data.
//!
//! Objects use `serde_json`'s default sorted map, so output key order is
//! deterministic. Rationals are strings `"a/b"`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::minimal::{Factorization, GenericityReport, MinimalityReport, ValidityReport};
use crate::residue::make_field;
use crate::stratum::{FiltDepth, GroupPresentation, OrderSkeleton, StratumSkeleton};
use crate::tower::{base_field, extend, prime_power, Subfield, TameElement, TameField};
use crate::translate::{YuSkeleton, SCHEMA};
use crate::Rational;

fn schema_err(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

pub fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| schema_err(format!("missing key `{key}`")))
}

pub fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema_err(format!("`{what}` must be an integer")))
}

pub fn as_u32(v: &Value, what: &str) -> Result<u32> {
    v.as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| schema_err(format!("`{what}` must be a non-negative integer")))
}

fn as_bool(v: &Value, what: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| schema_err(format!("`{what}` must be a boolean")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema_err(format!("`{what}` must be an array")))
}

pub fn rational_to_json(r: Rational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    if let Some(i) = v.as_i64() {
        return Ok(Rational::from(i));
    }
    let s = v.as_str().ok_or_else(|| schema_err("rational must be a string \"a/b\""))?;
    let parse = |x: &str| x.trim().parse::<i64>().map_err(|_| schema_err(format!("bad rational `{s}`")));
    match s.split_once('/') {
        Some((a, b)) => {
            let den = parse(b)?;
            if den == 0 {
                return Err(schema_err("zero denominator"));
            }
            Ok(Rational::new(parse(a)?, den))
        }
        None => Ok(Rational::from(parse(s)?)),
    }
}

pub fn depth_to_json(d: FiltDepth) -> Value {
    json!({"value": rational_to_json(d.value), "plus": d.plus})
}

pub fn depth_from_json(v: &Value) -> Result<FiltDepth> {
    Ok(FiltDepth {
        value: rational_from_json(get(v, "value")?)?,
        plus: as_bool(get(v, "plus")?, "plus")?,
    })
}

/// A tower: `nodes[0]` is the base, `nodes[i]` the `i`-th level.
#[derive(Clone, Debug)]
pub struct Tower {
    pub nodes: Vec<TameField>,
}

impl Tower {
    pub fn top(&self) -> &TameField {
        self.nodes.last().unwrap()
    }

    pub fn node(&self, i: usize) -> Result<&TameField> {
        self.nodes
            .get(i)
            .ok_or_else(|| schema_err(format!("field index {i} outside the tower")))
    }

    pub fn from_field(top: &TameField) -> Self {
        Tower { nodes: top.chain() }
    }
}

pub fn tower_from_json(v: &Value) -> Result<Tower> {
    let q = get(v, "base_q")?
        .as_u64()
        .ok_or_else(|| schema_err("`base_q` must be an integer"))?;
    let mut nodes = vec![base_field(q)?];
    let (p, f0) = prime_power(q).ok_or_else(|| schema_err("`base_q` is not a prime power"))?;
    let levels = match v.get("levels") {
        Some(l) => as_array(l, "levels")?.clone(),
        None => Vec::new(),
    };
    for lv in &levels {
        let parent = nodes.last().unwrap().clone();
        let f = as_u32(get(lv, "f")?, "f")?;
        let e = as_u32(get(lv, "e")?, "e")?;
        let coords: Vec<u32> = as_array(get(lv, "twist")?, "twist")?
            .iter()
            .map(|c| as_u32(c, "twist"))
            .collect::<Result<_>>()?;
        let k = make_field(p, f0 * parent.f_abs() * f)?;
        if coords.len() != k.f() as usize || coords.iter().any(|&c| c >= p) {
            return Err(schema_err("`twist` must list f coordinates below p"));
        }
        nodes.push(extend(&parent, f, e, k.encode(&coords))?);
    }
    Ok(Tower { nodes })
}

pub fn tower_to_json(top: &TameField) -> Value {
    let chain = top.chain();
    let levels: Vec<Value> = chain[1..]
        .iter()
        .map(|n| {
            json!({
                "f": n.f_rel(),
                "e": n.e_rel(),
                "twist": n.residue().decode(n.twist()),
            })
        })
        .collect();
    json!({"base_q": top.q(), "levels": levels})
}

pub fn element_from_json(v: &Value, tower: &Tower, default_prec: i64) -> Result<TameElement> {
    let idx = match v.get("field") {
        Some(x) => as_u32(x, "field")? as usize,
        None => tower.nodes.len() - 1,
    };
    let field = tower.node(idx)?;
    let k = field.residue();
    let mut digits = Vec::new();
    for d in as_array(get(v, "digits")?, "digits")? {
        let pair = as_array(d, "digit")?;
        if pair.len() != 2 {
            return Err(schema_err("a digit is [v, coords]"));
        }
        let val = as_i64(&pair[0], "digit valuation")?;
        let coords: Vec<u32> = match &pair[1] {
            Value::Array(cs) => cs.iter().map(|c| as_u32(c, "coordinate")).collect::<Result<_>>()?,
            other => vec![as_u32(other, "coordinate")?],
        };
        if coords.len() > k.f() as usize || coords.iter().any(|&c| c >= k.p()) {
            return Err(schema_err("digit coordinates must be below p, at most f of them"));
        }
        let mut full = coords;
        full.resize(k.f() as usize, 0);
        digits.push((val, k.encode(&full)));
    }
    let prec = match v.get("prec") {
        Some(p) => as_i64(p, "prec")?,
        None => default_prec,
    };
    if let Some(&(v0, _)) = digits.iter().find(|(v0, _)| *v0 >= prec) {
        return Err(schema_err(format!("digit at {v0} lies beyond precision {prec}")));
    }
    Ok(TameElement::new(field, digits, prec))
}

pub fn digits_to_json(x: &TameElement) -> Value {
    let k = x.field().residue();
    Value::Array(
        x.digits()
            .iter()
            .map(|(&v, &a)| json!([v, k.decode(a)]))
            .collect(),
    )
}

pub fn element_to_json(x: &TameElement) -> Value {
    json!({
        "field": x.field().level(),
        "digits": digits_to_json(x),
        "prec": x.prec(),
    })
}

pub fn subfield_to_json(k: &Subfield) -> Value {
    json!({
        "degree": k.degree(),
        "e": k.e_abs(),
        "f": k.f_abs(),
        "generators": k.generators().iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

pub fn subfield_from_json(v: &Value, tower: &Tower, prec: i64) -> Result<Subfield> {
    let amb = tower.top();
    if let Some(node) = v.get("node") {
        let n = tower.node(as_u32(node, "node")? as usize)?;
        return Subfield::of_node(n, amb);
    }
    let gens = as_array(get(v, "generators")?, "generators")?
        .iter()
        .map(|g| element_from_json(g, tower, prec)?.coerce(amb))
        .collect::<Result<Vec<_>>>()?;
    Subfield::generated(&gens, amb)
}

pub fn minimality_to_json(r: &MinimalityReport) -> Value {
    json!({
        "minimal": r.verdict(),
        "agree": r.agree(),
        "in_base": r.in_base,
        "criteria": {
            "classical": r.crit1_classical,
            "sr_generates": r.crit2_sr_generates,
            "embedding_ord": r.crit3_embedding_ord,
        },
        "field_degree": r.field.degree(),
        "witness": r.witness.map(|(i, j)| json!([i, j])),
    })
}

pub fn genericity_to_json(r: &GenericityReport) -> Value {
    let table: Vec<Value> = r
        .table
        .iter()
        .map(|(i, j, o)| json!([i, j, o.map(rational_to_json)]))
        .collect();
    json!({
        "generic": r.verdict,
        "minimal": r.minimal,
        "depth": rational_to_json(r.depth),
        "pairs": table,
    })
}

pub fn factorization_to_json(fac: &Factorization) -> Value {
    let chunks: Vec<Value> = fac
        .chunks
        .iter()
        .map(|c| {
            json!({
                "c": element_to_json(&c.c),
                "field_degree": c.field_degree,
                "ord": rational_to_json(c.ord),
            })
        })
        .collect();
    json!({
        "beta": element_to_json(&fac.beta),
        "chunks": chunks,
        "s": fac.s(),
        "degenerate": fac.degenerate,
    })
}

pub fn validity_to_json(r: &ValidityReport) -> Value {
    json!({"valid": r.valid(), "clause": r.clause, "detail": r.detail})
}

pub fn presentation_to_json(p: &GroupPresentation) -> Value {
    let factors: Vec<Value> = p
        .normal_form
        .iter()
        .map(|(l, d)| {
            json!({
                "level": l,
                "depth": if d.plus { "r+" } else { "r" },
                "value": rational_to_json(d.value),
            })
        })
        .collect();
    let rules: Vec<Value> = p
        .factors
        .iter()
        .map(|f| json!({"level": f.level, "rule": f.rule.label()}))
        .collect();
    json!({
        "name": p.name,
        "factors": factors,
        "rules": rules,
        "normalizer": p.normalizer,
    })
}

pub fn order_to_json(o: &OrderSkeleton) -> Value {
    json!({
        "m": o.m,
        "d": o.d,
        "e_a": o.e_a,
        "pure_over": subfield_to_json(&o.pure_over),
        "b_maximal": o.b_maximal,
    })
}

pub fn order_from_json(v: &Value, tower: &Tower, prec: i64) -> Result<OrderSkeleton> {
    let d = match v.get("d") {
        Some(x) => as_u32(x, "d")?,
        None => 1,
    };
    let pure = subfield_from_json(get(v, "pure_over")?, tower, prec)?;
    OrderSkeleton::new(
        as_u32(get(v, "m")?, "m")?,
        d,
        as_u32(get(v, "e_a")?, "e_a")?,
        pure,
        as_bool(get(v, "b_maximal")?, "b_maximal")?,
    )
}

pub fn stratum_to_json(s: &StratumSkeleton) -> Value {
    json!({
        "schema": SCHEMA,
        "tower": tower_to_json(s.beta.field()),
        "order": order_to_json(&s.order),
        "n": s.n,
        "r": s.r,
        "beta": element_to_json(&s.beta),
        "kind": s.kind.as_str(),
        "factorization": factorization_to_json(&s.fac),
    })
}

/// `{"tower", "order", "r", "beta"}`; the tower may be supplied separately.
pub fn stratum_from_json(v: &Value, tower: Option<&Tower>, prec: i64) -> Result<StratumSkeleton> {
    check_schema(v)?;
    let owned;
    let tower = match tower {
        Some(t) => t,
        None => {
            owned = tower_from_json(get(v, "tower")?)?;
            &owned
        }
    };
    let order = order_from_json(get(v, "order")?, tower, prec)?;
    let beta = element_from_json(get(v, "beta")?, tower, prec)?.coerce(tower.top())?;
    let r = match v.get("r") {
        Some(x) => as_i64(x, "r")?,
        None => 0,
    };
    StratumSkeleton::new(order, r, &beta)
}

fn check_schema(v: &Value) -> Result<()> {
    match v.get("schema") {
        None => Ok(()),
        Some(Value::String(s)) if s == SCHEMA => Ok(()),
        Some(other) => Err(schema_err(format!("unsupported schema {other}"))),
    }
}

pub fn yu_to_json(y: &YuSkeleton) -> Value {
    json!({
        "schema": SCHEMA,
        "tower": tower_to_json(&y.ambient),
        "fields": y.fields.iter().map(subfield_to_json).collect::<Vec<_>>(),
        "n_dim": y.n_dim,
        "e_a": y.e_a,
        "vertex": y.vertex,
        "depths": y.depths.iter().map(|r| rational_to_json(*r)).collect::<Vec<_>>(),
        "realizers": y.realizers.iter().map(element_to_json).collect::<Vec<_>>(),
        "s": y.s,
        "d": y.d,
        "trivial_top": y.trivial_top,
        "rho": y.rho,
    })
}

pub fn yu_from_json(v: &Value, prec: i64) -> Result<YuSkeleton> {
    check_schema(v)?;
    let tower = tower_from_json(get(v, "tower")?)?;
    let amb = tower.top().clone();
    let fields = as_array(get(v, "fields")?, "fields")?
        .iter()
        .map(|f| subfield_from_json(f, &tower, prec))
        .collect::<Result<Vec<_>>>()?;
    let depths = as_array(get(v, "depths")?, "depths")?
        .iter()
        .map(rational_from_json)
        .collect::<Result<Vec<_>>>()?;
    let realizers = as_array(get(v, "realizers")?, "realizers")?
        .iter()
        .map(|x| element_from_json(x, &tower, prec)?.coerce(&amb))
        .collect::<Result<Vec<_>>>()?;
    let s = match v.get("s") {
        None | Some(Value::Null) => None,
        Some(x) => Some(as_u32(x, "s")? as usize),
    };
    let y = YuSkeleton {
        ambient: amb,
        fields,
        n_dim: as_u32(get(v, "n_dim")?, "n_dim")?,
        e_a: as_u32(get(v, "e_a")?, "e_a")?,
        vertex: as_bool(get(v, "vertex")?, "vertex")?,
        depths,
        realizers,
        s,
        d: as_u32(get(v, "d")?, "d")? as usize,
        trivial_top: as_bool(get(v, "trivial_top")?, "trivial_top")?,
        rho: v.get("rho").and_then(|r| r.as_str()).unwrap_or("rho").to_string(),
    };
    y.validate_shape()?;
    Ok(y)
}

/// `{"error": {"clause", "location"}}`.
pub fn error_to_json(e: &Error) -> Value {
    let location = match e {
        Error::Domain { location, .. } => location.clone(),
        Error::Schema(m) | Error::Precision(m) | Error::Internal(m) => m.clone(),
    };
    let mut inner = Map::new();
    inner.insert("clause".into(), Value::String(e.clause().to_string()));
    inner.insert("location".into(), Value::String(location));
    json!({ "error": Value::Object(inner) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_round_trip() {
        for r in [Rational::new(1, 2), Rational::from(-3), Rational::new(-7, 4)] {
            assert_eq!(rational_from_json(&rational_to_json(r)).unwrap(), r);
        }
        assert_eq!(rational_to_json(Rational::from(2)), json!("2/1"));
    }

    #[test]
    fn tower_round_trip() {
        let v = json!({"base_q": 9, "levels": [{"f": 1, "e": 2, "twist": [1, 0]}, {"f": 2, "e": 1, "twist": [0, 1, 0, 0]}]});
        let t = tower_from_json(&v).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert_eq!(tower_to_json(t.top()), v);
    }

    #[test]
    fn element_round_trip() {
        let t = tower_from_json(&json!({"base_q": 3, "levels": [{"f": 1, "e": 2, "twist": [1]}]})).unwrap();
        let v = json!({"field": 1, "digits": [[-4, [1]], [-1, [2]]], "prec": 20});
        let x = element_from_json(&v, &t, 64).unwrap();
        assert_eq!(element_to_json(&x), v);
    }
}
