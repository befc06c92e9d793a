//! Serde adapters shared by the trace and report formats.

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serializer};

/// Arbitrary-precision integers travel as decimal strings in every file format,
/// so any consumer can read them without a bignum library quirk.
pub mod biguint_decimal {
    use super::*;

    pub fn serialize<S: Serializer>(value: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(de)?;
        text.parse::<BigUint>()
            .map_err(|e| serde::de::Error::custom(format!("invalid decimal integer {text:?}: {e}")))
    }
}
