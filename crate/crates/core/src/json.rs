//! JSON forms of series, algebra elements and tensors.
//!
//! Series are objects from exponent to coefficient string, in increasing
//! exponent order. Elements and tensors refer to generators through short
//! ids `g0, g1, ...` explained by a `graphs` table.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::graph::CanonicalKey;
use crate::hopf::{Element, HopfAlgebra, HopfError, Monomial, Rational, Tensor};
use crate::renorm::{LaurentError, LaurentSeries, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("expected {0}")]
    Shape(String),
    #[error("bad exponent {0:?}")]
    Exponent(String),
    #[error("bad coefficient {0:?}")]
    Coefficient(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

pub fn rational_to_string(c: &Rational) -> String {
    c.to_string()
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    Rational::from_str(s.trim()).ok()
}

pub fn laurent_to_json(s: &LaurentSeries) -> Value {
    let mut m = Map::new();
    for (e, c) in s.terms() {
        m.insert(e.to_string(), Value::String(rational_to_string(c)));
    }
    Value::Object(m)
}

/// Reads `{"-1": "1", "0": "1/2"}`. Numbers are accepted as coefficients too.
pub fn laurent_from_json(v: &Value, window: Window) -> Result<LaurentSeries, JsonError> {
    let obj = v
        .as_object()
        .ok_or_else(|| JsonError::Shape("an object from exponent to coefficient".into()))?;
    let mut terms = Vec::new();
    for (k, c) in obj {
        let e: i32 = k.trim().parse().map_err(|_| JsonError::Exponent(k.clone()))?;
        let coeff = match c {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n.as_i64().map(|i| Rational::from_integer(i.into())),
            _ => None,
        }
        .ok_or_else(|| JsonError::Coefficient(c.to_string()))?;
        terms.push((e, coeff));
    }
    Ok(LaurentSeries::from_terms(window, terms)?)
}

/// Assigns short ids to the generators met while rendering.
#[derive(Debug, Default)]
pub struct GraphTable {
    ids: BTreeMap<CanonicalKey, usize>,
}

impl GraphTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers every generator of the monomials, in key order.
    pub fn collect<'a>(&mut self, monomials: impl IntoIterator<Item = &'a Monomial>) {
        let mut keys: Vec<&CanonicalKey> = monomials.into_iter().flat_map(|m| m.factors()).collect();
        keys.sort();
        for k in keys {
            let next = self.ids.len();
            self.ids.entry(k.clone()).or_insert(next);
        }
    }

    pub fn id(&self, key: &CanonicalKey) -> String {
        format!("g{}", self.ids[key])
    }

    pub fn refs(&self, m: &Monomial) -> Value {
        Value::Array(m.factors().iter().map(|k| Value::String(self.id(k))).collect())
    }

    /// Human-readable form of a monomial: factor names joined by `·`, `1`
    /// for the unit.
    pub fn label(&self, algebra: &HopfAlgebra, m: &Monomial) -> String {
        if m.is_unit() {
            return "1".into();
        }
        m.factors()
            .iter()
            .map(|k| match algebra.representative(k).ok().and_then(|g| g.name.clone()) {
                Some(name) => name,
                None => self.id(k),
            })
            .collect::<Vec<_>>()
            .join("·")
    }

    pub fn to_json(&self, algebra: &HopfAlgebra) -> Result<Value, HopfError> {
        let mut ordered: Vec<(&CanonicalKey, &usize)> = self.ids.iter().collect();
        ordered.sort_by_key(|(_, &i)| i);
        let mut m = Map::new();
        for (key, &i) in ordered {
            let g = algebra.representative(key)?;
            let mut entry = Map::new();
            if let Some(name) = &g.name {
                entry.insert("name".into(), json!(name));
            }
            entry.insert("key".into(), json!(key.to_hex()));
            entry.insert("V".into(), json!(g.vertex_count()));
            entry.insert("I".into(), json!(g.internal_count()));
            entry.insert("E".into(), json!(g.external_count()));
            entry.insert("L".into(), json!(g.loop_number()));
            m.insert(format!("g{i}"), Value::Object(entry));
        }
        Ok(Value::Object(m))
    }
}

/// `{"terms": [{"left": [...], "right": [...], "coeff": "p/q"}], "graphs": {...}}`.
pub fn tensor_to_json(algebra: &HopfAlgebra, t: &Tensor) -> Result<Value, HopfError> {
    let mut table = GraphTable::new();
    table.collect(t.iter().flat_map(|((l, r), _)| [l, r]));
    let terms: Vec<Value> = t
        .iter()
        .map(|((l, r), c)| {
            json!({
                "left": table.refs(l),
                "right": table.refs(r),
                "coeff": rational_to_string(c),
            })
        })
        .collect();
    Ok(json!({ "terms": terms, "graphs": table.to_json(algebra)? }))
}

/// `{"terms": [{"monomial": [...], "coeff": "p/q"}], "graphs": {...}}`.
pub fn element_to_json(algebra: &HopfAlgebra, a: &Element) -> Result<Value, HopfError> {
    let mut table = GraphTable::new();
    table.collect(a.iter().map(|(m, _)| m));
    let terms: Vec<Value> = a
        .iter()
        .map(|(m, c)| json!({ "monomial": table.refs(m), "coeff": rational_to_string(c) }))
        .collect();
    Ok(json!({ "terms": terms, "graphs": table.to_json(algebra)? }))
}
