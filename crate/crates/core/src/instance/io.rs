//! Text formats for instances, payoff vectors and coalitions.
//!
//! Instances are JSON objects:
//!
//! ```text
//! {
//!   "u_side": ["u"],
//!   "v_side": ["v1", "v2"],
//!   "capacities": {"u": 2, "v1": 1, "v2": 2},
//!   "edges": [{"u": "u", "v": "v1", "w": 3}, {"u": "u", "v": "v2", "w": "5/2"}]
//! }
//! ```
//!
//! Values are decimal integers of any size or strings `"num/den"`.
//! Generated instances may also carry a `provenance` object.

use num_rational::BigRational;
use serde_json::{Map, Number, Value};

use super::{Coalition, GameInstance, PayoffVector, Provenance};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::scalar::{format_rational, parse_rational, Scalar};

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::format(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

pub(crate) fn read_scalar<T: Scalar>(v: &Value, loc: &str) -> Result<T> {
    let r = read_rational(v, loc)?;
    T::from_rational(&r).ok_or_else(|| {
        Error::format(
            loc,
            format!("{} does not fit the scalar type", format_rational(&r)),
        )
    })
}

fn read_rational(v: &Value, loc: &str) -> Result<BigRational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => {
            return Err(Error::format(
                loc,
                format!("expected a number, got {other}"),
            ))
        }
    };
    parse_rational(&text)
        .ok_or_else(|| Error::format(loc, format!("invalid exact number `{text}`")))
}

pub(crate) fn read_u64(v: &Value, loc: &str) -> Result<u64> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse::<u64>()
            .map_err(|_| Error::format(loc, format!("expected a nonnegative integer, got {n}"))),
        other => Err(Error::format(
            loc,
            format!("expected a nonnegative integer, got {other}"),
        )),
    }
}

pub(crate) fn json_number(digits: String) -> Value {
    Value::Number(digits.parse::<Number>().expect("integer literal"))
}

/// Integers are written as numbers, fractions as `"num/den"` strings.
pub(crate) fn json_scalar<T: Scalar>(x: &T) -> Value {
    let r = x.to_rational();
    if r.is_integer() {
        json_number(r.numer().to_string())
    } else {
        Value::String(format_rational(&r))
    }
}

fn read_str<'a>(v: &'a Value, loc: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::format(loc, format!("expected a string, got {v}")))
}

fn read_array<'a>(v: &'a Value, loc: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::format(loc, "expected an array"))
}

fn read_object<'a>(v: &'a Value, loc: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::format(loc, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, loc: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::format(loc, format!("missing field `{key}`")))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], loc: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::format(loc, format!("unknown field `{k}`"))),
        None => Ok(()),
    }
}

fn read_ids(v: &Value, loc: &str) -> Result<Vec<String>> {
    read_array(v, loc)?
        .iter()
        .enumerate()
        .map(|(i, x)| read_str(x, &format!("{loc}[{i}]")).map(str::to_string))
        .collect()
}

pub fn parse_instance<T: Scalar>(text: &str) -> Result<GameInstance<T>> {
    let doc = parse_json(text)?;
    let top = read_object(&doc, "instance")?;
    reject_unknown(
        top,
        &["u_side", "v_side", "capacities", "edges", "provenance"],
        "instance",
    )?;
    let u_side = read_ids(field(top, "u_side", "instance")?, "u_side")?;
    let v_side = read_ids(field(top, "v_side", "instance")?, "v_side")?;

    let caps = read_object(field(top, "capacities", "instance")?, "capacities")?;
    let mut capacities = Vec::with_capacity(u_side.len() + v_side.len());
    for id in u_side.iter().chain(&v_side) {
        let loc = format!("capacities.{id}");
        let value = caps
            .get(id)
            .ok_or_else(|| Error::format(&loc, "missing capacity"))?;
        capacities.push(read_u64(value, &loc)?);
    }
    if let Some(extra) = caps
        .keys()
        .find(|k| !u_side.contains(k) && !v_side.contains(k))
    {
        return Err(Error::format(
            format!("capacities.{extra}"),
            "capacity for an unknown vertex",
        ));
    }

    let mut edges = Vec::new();
    for (k, e) in read_array(field(top, "edges", "instance")?, "edges")?
        .iter()
        .enumerate()
    {
        let loc = format!("edges[{k}]");
        let obj = read_object(e, &loc)?;
        reject_unknown(obj, &["u", "v", "w"], &loc)?;
        let u = read_str(field(obj, "u", &loc)?, &format!("{loc}.u"))?;
        let v = read_str(field(obj, "v", &loc)?, &format!("{loc}.v"))?;
        let w: T = read_scalar(field(obj, "w", &loc)?, &format!("{loc}.w"))?;
        edges.push((u.to_string(), v.to_string(), w));
    }

    let g = GameInstance::new(u_side, v_side, capacities, edges)?;
    match top.get("provenance") {
        None => Ok(g),
        Some(p) => {
            let provenance = read_provenance(p, &g)?;
            Ok(g.with_provenance(provenance))
        }
    }
}

fn read_provenance<T: Scalar>(v: &Value, g: &GameInstance<T>) -> Result<Provenance<T>> {
    let loc = "provenance";
    let obj = read_object(v, loc)?;
    let known = |id: &str, what: &str| -> Result<String> {
        g.agent(id)
            .map(|_| id.to_string())
            .map_err(|_| Error::format(format!("{loc}.{what}"), format!("unknown vertex `{id}`")))
    };
    match read_str(field(obj, "kind", loc)?, "provenance.kind")? {
        "knapsack-to-star" => {
            reject_unknown(obj, &["kind", "knapsack"], loc)?;
            let knapsack = KnapsackInstance::from_json(field(obj, "knapsack", loc)?)?;
            Ok(Provenance::KnapsackToStar { knapsack })
        }
        "star-to-bipartite" => {
            reject_unknown(obj, &["kind", "x", "y"], loc)?;
            let x = known(read_str(field(obj, "x", loc)?, "provenance.x")?, "x")?;
            let y = known(read_str(field(obj, "y", loc)?, "provenance.y")?, "y")?;
            Ok(Provenance::StarToBipartite { x, y })
        }
        "partner-duplication" => {
            reject_unknown(obj, &["kind", "p_star", "partners"], loc)?;
            let p_star = read_scalar(field(obj, "p_star", loc)?, "provenance.p_star")?;
            let mut partners = Vec::new();
            for (i, pair) in read_array(field(obj, "partners", loc)?, "provenance.partners")?
                .iter()
                .enumerate()
            {
                let ploc = format!("provenance.partners[{i}]");
                let ids = read_ids(pair, &ploc)?;
                let [orig, partner]: [String; 2] = ids
                    .try_into()
                    .map_err(|_| Error::format(&ploc, "expected [original, partner]"))?;
                partners.push((known(&orig, "partners")?, known(&partner, "partners")?));
            }
            Ok(Provenance::PartnerDuplication { p_star, partners })
        }
        other => Err(Error::format(
            "provenance.kind",
            format!("unknown provenance kind `{other}`"),
        )),
    }
}

fn provenance_json<T: Scalar>(p: &Provenance<T>) -> Value {
    let mut obj = Map::new();
    match p {
        Provenance::KnapsackToStar { knapsack } => {
            obj.insert("kind".into(), "knapsack-to-star".into());
            obj.insert("knapsack".into(), knapsack.to_json());
        }
        Provenance::StarToBipartite { x, y } => {
            obj.insert("kind".into(), "star-to-bipartite".into());
            obj.insert("x".into(), x.as_str().into());
            obj.insert("y".into(), y.as_str().into());
        }
        Provenance::PartnerDuplication { p_star, partners } => {
            obj.insert("kind".into(), "partner-duplication".into());
            obj.insert("p_star".into(), json_scalar(p_star));
            let pairs = partners
                .iter()
                .map(|(a, b)| Value::Array(vec![a.as_str().into(), b.as_str().into()]))
                .collect();
            obj.insert("partners".into(), Value::Array(pairs));
        }
    }
    Value::Object(obj)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

/// Canonical text form: vertices and edges in stored order.
pub fn serialize_instance<T: Scalar>(g: &GameInstance<T>) -> String {
    let ids = |xs: &[String]| Value::Array(xs.iter().map(|s| s.as_str().into()).collect());
    let mut top = Map::new();
    top.insert("u_side".into(), ids(g.u_side()));
    top.insert("v_side".into(), ids(g.v_side()));
    let caps = g
        .ids()
        .iter()
        .zip(g.capacities())
        .map(|(id, c)| (id.clone(), json_number(c.to_string())))
        .collect();
    top.insert("capacities".into(), Value::Object(caps));
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let mut obj = Map::new();
            obj.insert("u".into(), g.id(e.u).into());
            obj.insert("v".into(), g.id(e.v).into());
            obj.insert("w".into(), json_scalar(&e.weight));
            Value::Object(obj)
        })
        .collect();
    top.insert("edges".into(), Value::Array(edges));
    if let Some(p) = g.provenance() {
        top.insert("provenance".into(), provenance_json(p));
    }
    pretty(&Value::Object(top))
}

/// Payoff file: object mapping every agent id to its payoff.
pub fn parse_payoff<T: Scalar>(g: &GameInstance<T>, text: &str) -> Result<PayoffVector<T>> {
    let doc = parse_json(text)?;
    let obj = read_object(&doc, "payoff")?;
    let pairs = obj
        .iter()
        .map(|(id, v)| Ok((id.as_str(), read_scalar::<T>(v, id)?)))
        .collect::<Result<Vec<_>>>()?;
    PayoffVector::from_pairs(g, pairs)
}

pub fn serialize_payoff<T: Scalar>(g: &GameInstance<T>, p: &PayoffVector<T>) -> String {
    let obj = g
        .ids()
        .iter()
        .zip(p.values())
        .map(|(id, x)| (id.clone(), json_scalar(x)))
        .collect();
    pretty(&Value::Object(obj))
}

/// Coalition file: array of agent ids.
pub fn parse_coalition<T: Scalar>(g: &GameInstance<T>, text: &str) -> Result<Coalition> {
    let doc = parse_json(text)?;
    let ids = read_ids(&doc, "coalition")?;
    for (i, id) in ids.iter().enumerate() {
        if g.index_of(id).is_none() {
            return Err(Error::format(
                format!("coalition[{i}]"),
                format!("unknown agent `{id}`"),
            ));
        }
    }
    Coalition::from_ids(g, &ids)
}

pub fn serialize_coalition<T: Scalar>(g: &GameInstance<T>, s: &Coalition) -> String {
    pretty(&Value::Array(
        s.ids(g).into_iter().map(Value::from).collect(),
    ))
}
