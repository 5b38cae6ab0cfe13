//! Model files: JSON with fields `functor`, `states`, `transition` and
//! `valuation`.
//!
//! Transition values are written per functor:
//!
//! - subset: `["a", "b"]`
//! - multiset: `{"a": 2, "b": "inf"}`
//! - selection: `[{"arg": ["a"], "val": ["a"]}, …]`, one entry per subset
//! - distribution: `{"a": "1/2", "b": "1/2"}`
//! - measure: `{"domain": [["a"], ["a", "b"]], "mu": [1, 2]}`
//!
//! Selections and measures may also be given along a list of states, as
//! `{"along": ["a", "c"], "value": …}` where the inner value names those
//! states `#0, #1, …`. Such a value only sees which of the listed states a
//! set contains.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::functor::FunctorKind;
use super::model::{Coalgebra, Model};
use super::stateset::StateSet;
use super::tvalue::{Measure, Mult, Selection, TValue, MAX_TABLE_SUPPORT};
use crate::error::{Error, Result};
use crate::formula::{rat_to_string, Rational, Scalar};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    functor: FunctorField,
    states: Vec<String>,
    transition: Map<String, Value>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FunctorField {
    Name(String),
    Spec(FunctorSpec),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctorSpec {
    name: String,
    #[serde(default)]
    param: Option<Value>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Parses a model file. Valuation keys `pN` denote proposition `N`; other
/// keys are returned as aliases, numbered from the smallest unused index.
pub fn read_model(text: &str) -> Result<(Model, BTreeMap<String, u32>)> {
    let file: ModelFile = serde_json::from_str(text)?;
    let functor = match &file.functor {
        FunctorField::Name(n) => FunctorKind::from_name(n, None)?,
        FunctorField::Spec(s) => {
            let p = match &s.param {
                None | Some(Value::Null) => None,
                Some(Value::String(p)) => Some(p.clone()),
                Some(v) => Some(v.to_string()),
            };
            FunctorKind::from_name(&s.name, p.as_deref())?
        }
    };
    let ids: BTreeMap<&str, usize> = file.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if ids.len() != file.states.len() {
        return Err(bad("duplicate state id"));
    }
    if let Some(k) = file.transition.keys().find(|k| !ids.contains_key(k.as_str())) {
        return Err(Error::UnknownState(k.clone()));
    }
    let n = file.states.len();
    let mut transition = Vec::with_capacity(n);
    for s in &file.states {
        let v = file.transition.get(s).ok_or_else(|| bad(format!("no transition for state `{s}`")))?;
        let t = parse_value(&functor, v, &|id: &str| ids.get(id).copied().ok_or_else(|| Error::UnknownState(id.into())), n)
            .map_err(|e| match e {
                Error::Format(m) => bad(format!("state `{s}`: {m}")),
                e => e,
            })?;
        transition.push(t);
    }
    let coalgebra = Coalgebra::new(functor, file.states.clone(), transition)?;

    let mut numbered = BTreeMap::new();
    let mut named = Vec::new();
    for (key, members) in &file.valuation {
        let set = members
            .iter()
            .map(|m| ids.get(m.as_str()).copied().ok_or_else(|| Error::UnknownState(m.clone())))
            .collect::<Result<StateSet>>()?;
        match key.strip_prefix('p').and_then(|d| d.parse::<u32>().ok()) {
            Some(i) if key[1..] == i.to_string() => {
                numbered.insert(i, set);
            }
            _ => named.push((key.clone(), set)),
        }
    }
    let mut aliases = BTreeMap::new();
    let mut next = 0u32;
    for (name, set) in named {
        while numbered.contains_key(&next) {
            next += 1;
        }
        numbered.insert(next, set);
        aliases.insert(name, next);
    }
    Ok((Model::new(coalgebra, numbered)?, aliases))
}

fn id_list(v: &Value, resolve: &dyn Fn(&str) -> Result<usize>) -> Result<StateSet> {
    let items = v.as_array().ok_or_else(|| bad("expected a list of state ids"))?;
    items
        .iter()
        .map(|x| x.as_str().ok_or_else(|| bad("state ids are strings")).and_then(resolve))
        .collect()
}

fn parse_value(functor: &FunctorKind, v: &Value, resolve: &dyn Fn(&str) -> Result<usize>, n: usize) -> Result<TValue> {
    if let Some(obj) = v.as_object().filter(|o| o.contains_key("along")) {
        return parse_along(functor, obj, resolve, n);
    }
    match functor {
        FunctorKind::Powerset { .. } => Ok(TValue::Subset(id_list(v, resolve)?)),
        FunctorKind::InfMultiset | FunctorKind::FinMultiset => {
            let obj = v.as_object().ok_or_else(|| bad("multiset must map ids to counts"))?;
            let mut entries = Vec::new();
            for (id, c) in obj {
                let m = match c {
                    Value::String(s) if s == "inf" => Mult::Inf,
                    Value::Number(k) => Mult::Fin(k.as_u64().ok_or_else(|| bad(format!("bad multiplicity {k}")))?),
                    other => return Err(bad(format!("bad multiplicity {other}"))),
                };
                entries.push((resolve(id)?, m));
            }
            Ok(TValue::multiset(entries))
        }
        FunctorKind::Selection | FunctorKind::SubSelection(_) => {
            if n > MAX_TABLE_SUPPORT {
                return Err(Error::Budget(format!("explicit selection over {n} states")));
            }
            let items = v.as_array().ok_or_else(|| bad("selection must be a list of {arg, val} entries"))?;
            let mut table: Vec<Option<u64>> = vec![None; 1 << n];
            for item in items {
                let obj = item.as_object().ok_or_else(|| bad("selection entry must be an object"))?;
                if let Some(k) = obj.keys().find(|k| *k != "arg" && *k != "val") {
                    return Err(bad(format!("unknown field `{k}` in selection entry")));
                }
                let arg = id_list(obj.get("arg").ok_or_else(|| bad("missing `arg`"))?, resolve)?;
                let val = id_list(obj.get("val").ok_or_else(|| bad("missing `val`"))?, resolve)?;
                let slot = &mut table[arg.mask() as usize];
                if slot.is_some() {
                    return Err(bad(format!("selection gives {arg:?} twice")));
                }
                *slot = Some(val.mask());
            }
            let table = table
                .into_iter()
                .enumerate()
                .map(|(a, v)| v.ok_or_else(|| bad(format!("selection misses {:?}", StateSet::from_mask(a as u64)))))
                .collect::<Result<Vec<_>>>()?;
            Ok(TValue::Selection(Selection::explicit(n, table)?))
        }
        FunctorKind::Distribution => {
            let obj = v.as_object().ok_or_else(|| bad("distribution must map ids to weights"))?;
            let entries = obj
                .iter()
                .map(|(id, w)| Ok((resolve(id)?, parse_rational(w)?)))
                .collect::<Result<Vec<_>>>()?;
            TValue::distribution(entries)
        }
        FunctorKind::AddMeasure(_) | FunctorKind::BoundedMeasure | FunctorKind::ExactProb => {
            let obj = v.as_object().ok_or_else(|| bad("measure must be {domain, mu}"))?;
            if let Some(k) = obj.keys().find(|k| *k != "domain" && *k != "mu") {
                return Err(bad(format!("unknown field `{k}` in measure")));
            }
            let domain = obj.get("domain").and_then(Value::as_array).ok_or_else(|| bad("missing `domain` list"))?;
            let mu = obj.get("mu").and_then(Value::as_array).ok_or_else(|| bad("missing `mu` list"))?;
            if domain.len() != mu.len() {
                return Err(bad("`domain` and `mu` differ in length"));
            }
            let rational = matches!(functor, FunctorKind::ExactProb)
                || matches!(functor, FunctorKind::AddMeasure(m) if m.zero().as_rat().is_some());
            let sets = domain
                .iter()
                .zip(mu)
                .map(|(d, m)| {
                    let v = if rational {
                        Scalar::Rat(parse_rational(m)?)
                    } else {
                        Scalar::Nat(m.as_u64().ok_or_else(|| bad(format!("bad measure value {m}")))?)
                    };
                    Ok((id_list(d, resolve)?, v))
                })
                .collect::<Result<Vec<_>>>()?;
            functor.complete_measure(n, sets)
        }
    }
}

fn parse_along(
    functor: &FunctorKind,
    obj: &Map<String, Value>,
    resolve: &dyn Fn(&str) -> Result<usize>,
    n: usize,
) -> Result<TValue> {
    if let Some(k) = obj.keys().find(|k| *k != "along" && *k != "value") {
        return Err(bad(format!("unknown field `{k}`")));
    }
    let along = obj
        .get("along")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("`along` must be a list of state ids"))?
        .iter()
        .map(|x| x.as_str().ok_or_else(|| bad("state ids are strings")).and_then(resolve))
        .collect::<Result<Vec<usize>>>()?;
    if along.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("`along` must list states in increasing order"));
    }
    let k = along.len();
    let local = |id: &str| -> Result<usize> {
        id.strip_prefix('#')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|i| *i < k)
            .ok_or_else(|| bad(format!("`{id}` is not a local id below #{k}")))
    };
    let inner = parse_value(functor, obj.get("value").ok_or_else(|| bad("missing `value`"))?, &local, k)?;
    let t = match inner {
        TValue::Selection(s) => TValue::Selection(Selection::new(along, s.table().to_vec())?),
        TValue::Measure(m) => TValue::Measure(Measure::new(along, m.domain().clone())?),
        other => return Err(bad(format!("{} values cannot be given along states", other.kind_name()))),
    };
    functor.validate(&t, n)?;
    Ok(t)
}

fn parse_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(k) => k
            .as_u64()
            .map(|k| Rational::from_integer(k.into()))
            .ok_or_else(|| bad(format!("`{k}`: write non-integral weights as \"p/q\""))),
        Value::String(s) => {
            let r: Option<Rational> = match s.split_once('/') {
                Some((p, q)) => p.trim().parse().ok().zip(q.trim().parse().ok()).and_then(
                    |(p, q): (num_bigint::BigInt, num_bigint::BigInt)| {
                        (q != 0.into()).then(|| Rational::new(p, q))
                    },
                ),
                None => s.trim().parse().ok().map(Rational::from_integer),
            };
            r.ok_or_else(|| bad(format!("bad rational `{s}`")))
        }
        other => Err(bad(format!("bad rational {other}"))),
    }
}

/// Largest carrier whose selections and measures are written explicitly.
const EXPLICIT_LIMIT: usize = 6;

/// Serializes a model; `names` overrides the `pN` keys of the valuation.
pub fn model_to_json(m: &Model, names: &BTreeMap<u32, String>) -> Value {
    let c = &m.coalgebra;
    let states = c.states();
    let (fname, param) = c.functor().name_and_param();
    let functor = match param {
        Some(p) => json!({"name": fname, "param": p}),
        None => json!({"name": fname}),
    };
    let mut transition = Map::new();
    for (i, s) in states.iter().enumerate() {
        transition.insert(s.clone(), value_to_json(c.transition(i), &|x| states[x].clone(), c.len()));
    }
    let valuation: Map<String, Value> = m
        .valuation
        .iter()
        .map(|(p, set)| {
            let key = names.get(p).cloned().unwrap_or_else(|| format!("p{p}"));
            (key, Value::from(set.iter().map(|x| states[x].clone()).collect::<Vec<_>>()))
        })
        .collect();
    json!({
        "functor": functor,
        "states": states,
        "transition": transition,
        "valuation": valuation,
    })
}

pub fn write_model(m: &Model, names: &BTreeMap<u32, String>) -> String {
    serde_json::to_string_pretty(&model_to_json(m, names)).expect("serializable")
}

fn set_json(s: &StateSet, name: &dyn Fn(usize) -> String) -> Value {
    Value::from(s.iter().map(name).collect::<Vec<_>>())
}

fn value_to_json(t: &TValue, name: &dyn Fn(usize) -> String, n: usize) -> Value {
    match t {
        TValue::Subset(s) => set_json(s, name),
        TValue::Multiset(ms) => Value::Object(
            ms.iter()
                .map(|(x, m)| {
                    let v = match m {
                        Mult::Fin(k) => Value::from(*k),
                        Mult::Inf => Value::from("inf"),
                    };
                    (name(*x), v)
                })
                .collect(),
        ),
        TValue::Distribution(d) => {
            Value::Object(d.iter().map(|(x, w)| (name(*x), Value::from(rat_to_string(w)))).collect())
        }
        TValue::Selection(s) => {
            let explicit = s.support().len() == n && n <= EXPLICIT_LIMIT;
            let support = s.support().to_vec();
            if explicit {
                selection_table_json(s, name)
            } else {
                let local = |i: usize| format!("#{i}");
                json!({
                    "along": support.iter().map(|x| name(*x)).collect::<Vec<_>>(),
                    "value": selection_table_json(&Selection::new((0..support.len()).collect(), s.table().to_vec()).expect("local table"), &local),
                })
            }
        }
        TValue::Measure(m) => {
            let explicit = m.support().len() == n && n <= EXPLICIT_LIMIT;
            if explicit {
                measure_json(m, name)
            } else {
                let k = m.support().len();
                let local = |i: usize| format!("#{i}");
                json!({
                    "along": m.support().iter().map(|x| name(*x)).collect::<Vec<_>>(),
                    "value": measure_json(&Measure::explicit(k, m.domain().clone()).expect("local measure"), &local),
                })
            }
        }
    }
}

fn selection_table_json(s: &Selection, name: &dyn Fn(usize) -> String) -> Value {
    let k = s.support().len();
    Value::from(
        (0..1u64 << k)
            .map(|a| {
                let arg = StateSet::from_mask(a);
                json!({"arg": set_json(&arg, name), "val": set_json(&s.apply(&arg), name)})
            })
            .collect::<Vec<_>>(),
    )
}

fn measure_json(m: &Measure, name: &dyn Fn(usize) -> String) -> Value {
    let mut domain = Vec::new();
    let mut mu = Vec::new();
    for (set, v) in m.sets() {
        domain.push(set_json(&set, name));
        mu.push(match v {
            Scalar::Nat(k) => Value::from(*k),
            Scalar::Rat(r) => Value::from(rat_to_string(r)),
        });
    }
    json!({"domain": domain, "mu": mu})
}
