//! JSON documents for sequence families.
//!
//! ```json
//! {
//!   "metadata": {"kind": "ccc", "M": 2, "N": 2, "lengthSet": [4]},
//!   "mode": "exact",
//!   "sets": [[["+", "+", "+", "-"], ["+", "-", "+", "+"]],
//!            [["+", "+", "-", "+"], ["+", "-", "-", "-"]]]
//! }
//! ```
//!
//! `metadata` and `mode` are optional on input; when present they are checked
//! against the parsed family. The kind is a claim only and is not verified here.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::corr::Claim;
use crate::error::{Error, Result};
use crate::model::{Mode, Scalar, Sequence, SequenceFamily, SequenceSet};

/// Claimed kind of a family document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Raw,
    Claim(Claim),
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Raw => f.write_str("raw"),
            Kind::Claim(c) => c.fmt(f),
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("raw") {
            Ok(Kind::Raw)
        } else {
            s.parse().map(Kind::Claim)
        }
    }
}

impl Serialize for Kind {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Kind {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(de)?.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub kind: Kind,
    #[serde(rename = "M")]
    pub family_size: usize,
    #[serde(rename = "N")]
    pub set_size: usize,
    #[serde(rename = "lengthSet")]
    pub length_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub sets: Vec<Vec<Vec<Scalar>>>,
}

impl FamilyDocument {
    pub fn from_family(f: &SequenceFamily, kind: Kind) -> Self {
        FamilyDocument {
            metadata: Some(Metadata {
                kind,
                family_size: f.family_size(),
                set_size: f.set_size(),
                length_set: f.length_set().into_iter().collect(),
            }),
            mode: Some(f.mode()),
            sets: f
                .sets()
                .iter()
                .map(|set| set.sequences().iter().map(|s| s.entries().to_vec()).collect())
                .collect(),
        }
    }

    pub fn kind(&self) -> Kind {
        self.metadata.as_ref().map_or(Kind::Raw, |m| m.kind)
    }

    /// Builds the family and checks it against any metadata present.
    pub fn to_family(&self) -> Result<SequenceFamily> {
        let sets = self
            .sets
            .iter()
            .map(|set| {
                SequenceSet::new(
                    set.iter()
                        .map(|entries| Sequence::new(entries.clone()))
                        .collect::<Result<Vec<_>>>()?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let f = SequenceFamily::new(sets)?;
        if let Some(mode) = self.mode {
            if mode != f.mode() {
                return Err(Error::ModeMismatch(format!(
                    "document declares {mode} but holds {} scalars",
                    f.mode()
                )));
            }
        }
        if let Some(m) = &self.metadata {
            if m.family_size != f.family_size() {
                return Err(Error::SizeMismatch {
                    expected: m.family_size,
                    got: f.family_size(),
                });
            }
            if m.set_size != f.set_size() {
                return Err(Error::SizeMismatch {
                    expected: m.set_size,
                    got: f.set_size(),
                });
            }
            let lengths: Vec<usize> = f.length_set().into_iter().collect();
            let mut declared = m.length_set.clone();
            declared.sort_unstable();
            declared.dedup();
            if declared != lengths {
                return Err(Error::Precondition(format!(
                    "declared length set {:?} does not match {lengths:?}",
                    m.length_set
                )));
            }
        }
        Ok(f)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Pretty JSON with one sequence per line.
    pub fn to_json(&self) -> String {
        to_json_layout(self, 3)
    }
}

/// JSON that is indented down to `depth` levels of nesting and compact below.
/// Containers holding only scalars always stay on one line.
pub fn to_json_layout<T: Serialize + ?Sized>(value: &T, depth: usize) -> String {
    let value = serde_json::to_value(value).expect("in-memory serialization");
    let mut out = String::new();
    write_value(&mut out, &value, 1, depth);
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_array() && !i.is_object()),
        Value::Object(map) => map.values().all(|i| !i.is_array() && !i.is_object()),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, level: usize, max: usize) {
    let indent = level <= max && !is_flat(v);
    let sep = |out: &mut String, first: bool, lvl: usize| {
        if !first {
            out.push(',');
        }
        if indent {
            out.push('\n');
            out.push_str(&"  ".repeat(lvl));
        } else if !first {
            out.push(' ');
        }
    };
    let close = |out: &mut String, empty: bool, bracket: char| {
        if indent && !empty {
            out.push('\n');
            out.push_str(&"  ".repeat(level - 1));
        }
        out.push(bracket);
    };
    match v {
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                sep(out, k == 0, level);
                write_value(out, item, level + 1, max);
            }
            close(out, items.is_empty(), ']');
        }
        Value::Object(map) => {
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                sep(out, k == 0, level);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, level + 1, max);
            }
            close(out, map.is_empty(), '}');
        }
        leaf => out.push_str(&leaf.to_string()),
    }
}
