//! JSON rendering of reals with 17 significant digits.
//!
//! serde_json prints the shortest round-trip form; the exchange formats
//! written by this crate pin every real to `{:.16e}` instead, which also
//! round-trips exactly and keeps byte output independent of the float
//! formatter in use.

use serde::{Deserialize, Deserializer, Serializer};
use serde_json::value::RawValue;

pub(crate) fn format(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(serde::ser::Error::custom("non-finite real"));
    }
    let raw = RawValue::from_string(format(*x)).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&raw, s)
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    f64::deserialize(d)
}
