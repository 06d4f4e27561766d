//! Task answers and the comparison policy used for accuracy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::graph::NodeId;

/// Shape of an answer a task expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerTag {
    Null,
    Boolean,
    Integer,
    Real,
    NodeId,
    NodeList,
    NodeSet,
    RealList,
    LabeledMap,
    Tuple,
}

/// A task answer.
///
/// `NodeList` is order-sensitive (an explicit path); `NodeSet` is kept sorted
/// and compared as a set. `Null` is what a candidate program yields when it
/// gives up ("return None"); it never matches a concrete label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum AnswerValue {
    Null,
    Boolean(bool),
    Integer(i64),
    Real(f64),
    NodeId(NodeId),
    NodeList(Vec<NodeId>),
    NodeSet(Vec<NodeId>),
    RealList(Vec<f64>),
    LabeledMap(BTreeMap<String, f64>),
    Tuple(Vec<AnswerValue>),
}

/// Real comparison tolerance: `|a - b| <= max(abs, rel * |b|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-6,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn close(&self, a: f64, b: f64) -> bool {
        if a.is_nan() || b.is_nan() {
            return false;
        }
        if a.is_infinite() || b.is_infinite() {
            return a == b;
        }
        (a - b).abs() <= self.abs.max(self.rel * b.abs())
    }
}

impl AnswerValue {
    pub fn node_set(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut v: Vec<NodeId> = nodes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        AnswerValue::NodeSet(v)
    }

    pub fn tag(&self) -> AnswerTag {
        match self {
            AnswerValue::Null => AnswerTag::Null,
            AnswerValue::Boolean(_) => AnswerTag::Boolean,
            AnswerValue::Integer(_) => AnswerTag::Integer,
            AnswerValue::Real(_) => AnswerTag::Real,
            AnswerValue::NodeId(_) => AnswerTag::NodeId,
            AnswerValue::NodeList(_) => AnswerTag::NodeList,
            AnswerValue::NodeSet(_) => AnswerTag::NodeSet,
            AnswerValue::RealList(_) => AnswerTag::RealList,
            AnswerValue::LabeledMap(_) => AnswerTag::LabeledMap,
            AnswerValue::Tuple(_) => AnswerTag::Tuple,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, AnswerValue::Null)
    }

    /// Plain JSON rendering, the same shape a candidate program returns.
    pub fn to_json(&self) -> Value {
        match self {
            AnswerValue::Null => Value::Null,
            AnswerValue::Boolean(b) => Value::Bool(*b),
            AnswerValue::Integer(i) | AnswerValue::NodeId(i) => Value::from(*i),
            AnswerValue::Real(x) => real_json(*x),
            AnswerValue::NodeList(v) | AnswerValue::NodeSet(v) => {
                Value::Array(v.iter().map(|&i| Value::from(i)).collect())
            }
            AnswerValue::RealList(v) => Value::Array(v.iter().map(|&x| real_json(x)).collect()),
            AnswerValue::LabeledMap(m) => {
                Value::Object(m.iter().map(|(k, &x)| (k.clone(), real_json(x))).collect())
            }
            AnswerValue::Tuple(items) => Value::Array(items.iter().map(Self::to_json).collect()),
        }
    }

    /// Interpret plain JSON. With a tag, coerce toward that shape when the
    /// JSON admits it; otherwise (or with no tag) infer the shape.
    pub fn from_json(value: &Value, tag: Option<AnswerTag>) -> AnswerValue {
        if let Some(tag) = tag {
            if let Some(v) = coerce(value, tag) {
                return v;
            }
        }
        infer(value)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AnswerValue::Integer(i) | AnswerValue::NodeId(i) => Some(*i as f64),
            AnswerValue::Real(x) => Some(*x),
            _ => None,
        }
    }

    /// Numeric sequence view used when lists of differing tags meet.
    fn as_numbers(&self) -> Option<Vec<f64>> {
        match self {
            AnswerValue::NodeList(v) | AnswerValue::NodeSet(v) => {
                Some(v.iter().map(|&i| i as f64).collect())
            }
            AnswerValue::RealList(v) => Some(v.clone()),
            AnswerValue::Tuple(items) => items.iter().map(AnswerValue::as_f64).collect(),
            _ => None,
        }
    }

    fn as_pairs(&self) -> Option<BTreeMap<String, f64>> {
        match self {
            AnswerValue::LabeledMap(m) => Some(m.clone()),
            AnswerValue::Tuple(items) => {
                let mut out = BTreeMap::new();
                for item in items {
                    let (k, v) = match item {
                        AnswerValue::Tuple(pair) => match pair.as_slice() {
                            [k, v] => (k.as_f64()?, v.as_f64()?),
                            _ => return None,
                        },
                        other => match other.as_numbers()?.as_slice() {
                            [k, v] => (*k, *v),
                            _ => return None,
                        },
                    };
                    if k.fract() != 0.0 {
                        return None;
                    }
                    let key = (k as i64).to_string();
                    out.insert(key, v);
                }
                Some(out)
            }
            AnswerValue::NodeList(v) if v.is_empty() => Some(BTreeMap::new()),
            AnswerValue::RealList(v) if v.is_empty() => Some(BTreeMap::new()),
            _ => None,
        }
    }
}

fn real_json(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn json_int(value: &Value) -> Option<i64> {
    match value {
        Value::Number(n) => n.as_i64().or_else(|| {
            n.as_f64()
                .filter(|x| x.fract() == 0.0 && x.abs() < 9.0e15)
                .map(|x| x as i64)
        }),
        _ => None,
    }
}

fn coerce(value: &Value, tag: AnswerTag) -> Option<AnswerValue> {
    Some(match tag {
        AnswerTag::Null => match value {
            Value::Null => AnswerValue::Null,
            _ => return None,
        },
        AnswerTag::Boolean => AnswerValue::Boolean(value.as_bool()?),
        AnswerTag::Integer => AnswerValue::Integer(json_int(value)?),
        AnswerTag::NodeId => AnswerValue::NodeId(json_int(value)?),
        AnswerTag::Real => AnswerValue::Real(value.as_f64()?),
        AnswerTag::NodeList => AnswerValue::NodeList(
            value
                .as_array()?
                .iter()
                .map(json_int)
                .collect::<Option<_>>()?,
        ),
        AnswerTag::NodeSet => AnswerValue::node_set(
            value
                .as_array()?
                .iter()
                .map(json_int)
                .collect::<Option<Vec<_>>>()?,
        ),
        AnswerTag::RealList => AnswerValue::RealList(
            value
                .as_array()?
                .iter()
                .map(Value::as_f64)
                .collect::<Option<_>>()?,
        ),
        AnswerTag::LabeledMap => match value {
            Value::Object(m) => AnswerValue::LabeledMap(
                m.iter()
                    .map(|(k, v)| v.as_f64().map(|x| (k.clone(), x)))
                    .collect::<Option<_>>()?,
            ),
            Value::Array(_) => AnswerValue::LabeledMap(infer(value).as_pairs()?),
            _ => return None,
        },
        AnswerTag::Tuple => AnswerValue::Tuple(value.as_array()?.iter().map(infer).collect()),
    })
}

fn infer(value: &Value) -> AnswerValue {
    match value {
        Value::Null => AnswerValue::Null,
        Value::Bool(b) => AnswerValue::Boolean(*b),
        Value::Number(n) => match n.as_i64() {
            Some(i) => AnswerValue::Integer(i),
            None => AnswerValue::Real(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => match s.trim().parse::<i64>() {
            Ok(i) => AnswerValue::Integer(i),
            Err(_) => s
                .trim()
                .parse::<f64>()
                .map(AnswerValue::Real)
                .unwrap_or(AnswerValue::Null),
        },
        Value::Array(items) => {
            if items.iter().all(|v| v.as_i64().is_some()) {
                AnswerValue::NodeList(items.iter().filter_map(Value::as_i64).collect())
            } else if items.iter().all(Value::is_number) {
                AnswerValue::RealList(items.iter().filter_map(Value::as_f64).collect())
            } else {
                AnswerValue::Tuple(items.iter().map(infer).collect())
            }
        }
        Value::Object(m) => {
            let mut out = BTreeMap::new();
            for (k, v) in m {
                match v.as_f64() {
                    Some(x) => {
                        out.insert(k.clone(), x);
                    }
                    None => return AnswerValue::Null,
                }
            }
            AnswerValue::LabeledMap(out)
        }
    }
}

/// Does `predicted` match `label`?
///
/// The label's tag decides the policy: exact for booleans, integers and node
/// ids; order-sensitive for node lists; set equality for node sets;
/// tolerance for reals (elementwise for lists and maps). Integer and real
/// encodings of the same number are interchangeable.
pub fn answers_equal(predicted: &AnswerValue, label: &AnswerValue, tol: &Tolerance) -> bool {
    use AnswerValue as A;
    match label {
        A::Null => predicted.is_null(),
        A::Boolean(b) => matches!(predicted, A::Boolean(p) if p == b),
        A::Integer(i) | A::NodeId(i) => match predicted {
            A::Integer(p) | A::NodeId(p) => p == i,
            A::Real(x) => x.fract() == 0.0 && *x == *i as f64,
            _ => false,
        },
        A::Real(x) => match predicted {
            A::Boolean(_) | A::Null => false,
            other => other.as_f64().is_some_and(|p| tol.close(p, *x)),
        },
        A::NodeList(v) => match predicted.as_numbers() {
            Some(p) if !matches!(predicted, A::NodeSet(_)) => {
                p.len() == v.len() && p.iter().zip(v).all(|(a, &b)| *a == b as f64)
            }
            _ => false,
        },
        A::NodeSet(v) => match predicted.as_numbers() {
            Some(p) => {
                if p.iter().any(|x| x.fract() != 0.0) {
                    return false;
                }
                let mut p: Vec<i64> = p.iter().map(|&x| x as i64).collect();
                p.sort_unstable();
                p.dedup();
                &p == v
            }
            None => false,
        },
        A::RealList(v) => match predicted.as_numbers() {
            Some(p) => p.len() == v.len() && p.iter().zip(v).all(|(a, b)| tol.close(*a, *b)),
            None => false,
        },
        A::LabeledMap(m) => match predicted.as_pairs() {
            Some(p) => {
                p.len() == m.len()
                    && p.iter()
                        .zip(m)
                        .all(|((pk, pv), (lk, lv))| pk == lk && tol.close(*pv, *lv))
            }
            None => false,
        },
        A::Tuple(items) => match predicted {
            A::Tuple(p) => {
                p.len() == items.len() && p.iter().zip(items).all(|(a, b)| answers_equal(a, b, tol))
            }
            other => match other.as_numbers() {
                Some(p) => {
                    p.len() == items.len()
                        && p.iter()
                            .zip(items)
                            .all(|(a, b)| answers_equal(&A::Real(*a), b, tol))
                }
                None => false,
            },
        },
    }
}
