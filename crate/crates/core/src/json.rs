//! Serde helpers that write arbitrary-precision integers as bare JSON numbers.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

fn number(v: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string()).expect("integers are valid JSON numbers")
}

pub fn big<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    number(v).serialize(s)
}

pub fn big_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&number(x))?;
    }
    seq.end()
}

/// Map keyed by `n` with string keys, as in `{"1": ..., "2": ...}`.
pub fn big_map<S: Serializer>(v: &BTreeMap<u32, BigInt>, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(v.len()))?;
    for (k, x) in v {
        map.serialize_entry(&k.to_string(), &number(x))?;
    }
    map.end()
}

pub fn big_opt<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => number(x).serialize(s),
        None => s.serialize_none(),
    }
}
