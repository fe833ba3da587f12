//! JSON problem files.
//!
//! ```json
//! {"sense":"minimize-cost",
//!  "variables":[{"id":"x0","domain":["0","1"]}],
//!  "factors":[{"id":"r0","scope":["x0"],"table":[0.01,-0.01]}],
//!  "agents":{"x0":"a0"}}
//! ```
//!
//! Tables are written in the file's sense (costs for `minimize-cost`).
//! Infinite entries are the strings `"-inf"` and `"inf"`. Output uses a fixed
//! key order and shortest round-trip float formatting, so serializing a parsed
//! file reproduces it byte for byte.

use std::collections::{BTreeMap, HashMap};

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::dcop::{Dcop, Factor, Sense, Variable};
use crate::error::{Error, Result, Violation};

/// Variable, factor, and agent ids may be written as strings or integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Id(String);

impl Serialize for Id {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Id {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::S(s) => Id(s),
            Raw::I(i) => Id(i.to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry(f64);

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(x) => Ok(Entry(x)),
            Raw::S(s) => match s.as_str() {
                "-inf" => Ok(Entry(f64::NEG_INFINITY)),
                "inf" | "+inf" => Ok(Entry(f64::INFINITY)),
                other => Err(de::Error::custom(format!("invalid table entry {other:?}"))),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    id: Id,
    domain: Vec<Id>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    id: Id,
    scope: Vec<Id>,
    table: Vec<Entry>,
}

/// Agent map written in variable order.
struct Agents(Vec<(Id, Id)>);

impl Serialize for Agents {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Agents {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, Id>::deserialize(d)?;
        Ok(Agents(m.into_iter().map(|(k, v)| (Id(k), v)).collect()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    sense: String,
    variables: Vec<VariableDoc>,
    factors: Vec<FactorDoc>,
    #[serde(default)]
    agents: Option<Agents>,
}

fn to_file_value(sense: Sense, utility: f64) -> f64 {
    match sense {
        Sense::MaximizeUtility => utility,
        Sense::MinimizeCost => -utility,
    }
}

/// Renders a problem in the canonical JSON form (one line, newline-terminated).
pub fn serialize_dcop(dcop: &Dcop) -> Vec<u8> {
    let doc = ProblemDoc {
        sense: dcop.sense.as_str().to_string(),
        variables: dcop
            .variables
            .iter()
            .map(|v| VariableDoc {
                id: Id(v.id.clone()),
                domain: v.domain.iter().cloned().map(Id).collect(),
            })
            .collect(),
        factors: dcop
            .factors
            .iter()
            .map(|f| FactorDoc {
                id: Id(f.id.clone()),
                scope: f
                    .scope
                    .iter()
                    .map(|&v| Id(dcop.variables[v].id.clone()))
                    .collect(),
                table: f
                    .table
                    .iter()
                    .map(|&u| Entry(to_file_value(dcop.sense, u)))
                    .collect(),
            })
            .collect(),
        agents: Some(Agents(
            dcop.variables
                .iter()
                .zip(&dcop.agents)
                .map(|(v, a)| (Id(v.id.clone()), Id(a.clone())))
                .collect(),
        )),
    };
    let mut out = serde_json::to_vec(&doc).expect("problem documents always serialize");
    out.push(b'\n');
    out
}

/// Parses and validates a problem document. A missing `agents` map assigns
/// each variable to an agent named after it.
pub fn parse_dcop(bytes: &[u8]) -> Result<Dcop> {
    let doc: ProblemDoc = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let sense = Sense::parse(&doc.sense)
        .ok_or_else(|| Error::Parse(format!("unknown sense {:?}", doc.sense)))?;

    let variables: Vec<Variable> = doc
        .variables
        .into_iter()
        .map(|v| Variable {
            id: v.id.0,
            domain: v.domain.into_iter().map(|l| l.0).collect(),
        })
        .collect();
    let index: HashMap<&str, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.as_str(), i))
        .collect();

    let mut violations = Vec::new();
    let mut factors = Vec::with_capacity(doc.factors.len());
    for f in doc.factors {
        let mut scope = Vec::with_capacity(f.scope.len());
        for id in &f.scope {
            match index.get(id.0.as_str()) {
                Some(&i) => scope.push(i),
                None => violations.push(Violation::UnknownVariable {
                    factor: f.id.0.clone(),
                    variable: id.0.clone(),
                }),
            }
        }
        let table = f.table.iter().map(|e| to_file_value(sense, e.0)).collect();
        factors.push(Factor::new(f.id.0, scope, table));
    }

    let agents = match doc.agents {
        None => variables.iter().map(|v| v.id.clone()).collect(),
        Some(Agents(pairs)) => {
            let map: HashMap<String, String> = pairs.into_iter().map(|(k, v)| (k.0, v.0)).collect();
            for k in map.keys() {
                if !index.contains_key(k.as_str()) {
                    violations.push(Violation::UnknownVariable {
                        factor: "agents".into(),
                        variable: k.clone(),
                    });
                }
            }
            variables
                .iter()
                .map(|v| map.get(&v.id).cloned().unwrap_or_default())
                .collect()
        }
    };

    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let dcop = Dcop {
        sense,
        variables,
        factors,
        agents,
    };
    dcop.validate()?;
    Ok(dcop)
}
