//! Textual selection of propositions, as used on command lines and in test
//! harnesses:
//!
//! - `single-hole:M`
//! - `multi-hole:M1,M2,...` (empty list = always true)
//! - `periodic:P:bitstring` (2^P characters, `1` = holds)
//! - `collatz:BUDGET`
//! - `pullback:affine:A:B:<inner>` (inner proposition pulled back along
//!   `n ↦ A·n + B`)

use num_bigint::BigUint;
use thiserror::Error;

use crate::collatz::collatz_proposition;
use crate::props::{multi_hole, periodic, pull_back_affine, single_hole, PropError, Proposition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropSpecError {
    #[error("unknown proposition family in {0:?}")]
    UnknownFamily(String),
    #[error("invalid {field} in proposition spec: {text:?}")]
    InvalidNumber { field: &'static str, text: String },
    #[error("periodic table must be a string of 0s and 1s, got {0:?}")]
    InvalidTable(String),
    #[error("malformed proposition spec: {0}")]
    Malformed(String),
    #[error(transparent)]
    Prop(#[from] PropError),
}

fn parse_biguint(field: &'static str, text: &str) -> Result<BigUint, PropSpecError> {
    text.parse::<BigUint>()
        .map_err(|_| PropSpecError::InvalidNumber {
            field,
            text: text.to_string(),
        })
}

/// Parses a proposition spec string into the proposition it names.
pub fn parse_prop_spec(spec: &str) -> Result<Proposition, PropSpecError> {
    if let Some(rest) = spec.strip_prefix("single-hole:") {
        Ok(single_hole(parse_biguint("hole", rest)?))
    } else if let Some(rest) = spec.strip_prefix("multi-hole:") {
        let holes = rest
            .split(',')
            .filter(|part| !part.is_empty())
            .map(|part| parse_biguint("hole", part))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(multi_hole(holes))
    } else if let Some(rest) = spec.strip_prefix("periodic:") {
        let (p_text, bits) = rest
            .split_once(':')
            .ok_or_else(|| PropSpecError::Malformed(format!("{spec:?} needs periodic:P:bits")))?;
        let p: u32 = p_text.parse().map_err(|_| PropSpecError::InvalidNumber {
            field: "period exponent",
            text: p_text.to_string(),
        })?;
        let table = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(PropSpecError::InvalidTable(bits.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(periodic(p, table)?)
    } else if let Some(rest) = spec.strip_prefix("collatz:") {
        let budget: u64 = rest.parse().map_err(|_| PropSpecError::InvalidNumber {
            field: "budget",
            text: rest.to_string(),
        })?;
        Ok(collatz_proposition(budget))
    } else if let Some(rest) = spec.strip_prefix("pullback:affine:") {
        let mut parts = rest.splitn(3, ':');
        let scale_text = parts.next().unwrap_or_default();
        let shift_text = parts
            .next()
            .ok_or_else(|| PropSpecError::Malformed(format!("{spec:?} needs pullback:affine:A:B:<inner>")))?;
        let inner_spec = parts
            .next()
            .ok_or_else(|| PropSpecError::Malformed(format!("{spec:?} is missing the inner proposition")))?;
        let scale = parse_biguint("affine scale", scale_text)?;
        let shift = parse_biguint("affine shift", shift_text)?;
        let inner = parse_prop_spec(inner_spec)?;
        Ok(pull_back_affine(inner, scale, shift)?)
    } else {
        Err(PropSpecError::UnknownFamily(spec.to_string()))
    }
}
