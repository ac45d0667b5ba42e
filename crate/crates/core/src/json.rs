//! JSON helpers: floats are written with 17 significant digits so that every
//! `f64` survives a text round trip bit for bit.

use num_complex::Complex64;
use serde::de::Deserializer;
use serde::ser::{Error as _, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

/// `x` in scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of reports
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// An `f64` that serializes with 17 significant digits (non-finite values become `null`).
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Option::<f64>::deserialize(d)?;
        Ok(F17(v.unwrap_or(f64::NAN)))
    }
}

impl From<f64> for F17 {
    fn from(x: f64) -> Self {
        F17(x)
    }
}

/// A complex number serialized as `[re, im]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct C17(pub Complex64);

impl Serialize for C17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&F17(self.0.re))?;
        seq.serialize_element(&F17(self.0.im))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for C17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [re, im] = <[F17; 2]>::deserialize(d)?;
        Ok(C17(Complex64::new(re.0, im.0)))
    }
}

impl From<Complex64> for C17 {
    fn from(z: Complex64) -> Self {
        C17(z)
    }
}

pub fn f17_vec(xs: &[f64]) -> Vec<F17> {
    xs.iter().copied().map(F17).collect()
}

pub fn c17_vec(zs: &[Complex64]) -> Vec<C17> {
    zs.iter().copied().map(C17).collect()
}
