//! Exact residue classes modulo powers of two.
//!
//! A [`ResidueClass`] represents the infinite set `{r + 2^k·a : a ∈ ℕ}` as the
//! modulus exponent `k` together with the canonical remainder `r < 2^k`. This is
//! the only set representation the dichotomy engine needs: every unsolved set it
//! touches is such a class, and one step refines a class into its two children at
//! modulus `2^(k+1)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResidueError {
    #[error("remainder {remainder} is not canonical for modulus 2^{modulus_exponent}")]
    NonCanonicalRemainder {
        modulus_exponent: u32,
        remainder: BigUint,
    },
}

/// The infinite set `{r + 2^k·a : a ∈ ℕ}` in canonical form (`r < 2^k`).
///
/// `k = 0, r = 0` denotes ℕ itself. The remainder is arbitrary precision so that
/// deep runs (`k > 64`) never overflow; the modulus is stored only as its
/// exponent because it is a power of two by construction. Values are immutable,
/// so they can be shared across threads freely.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawResidueClass", into = "RawResidueClass")]
pub struct ResidueClass {
    modulus_exponent: u32,
    remainder: BigUint,
}

impl ResidueClass {
    /// The class of all natural numbers (`k = 0`, `r = 0`).
    pub fn natural_numbers() -> Self {
        ResidueClass {
            modulus_exponent: 0,
            remainder: BigUint::zero(),
        }
    }

    /// Builds the class `{remainder + 2^modulus_exponent·a}`, rejecting
    /// non-canonical remainders instead of normalizing them silently.
    pub fn new(modulus_exponent: u32, remainder: BigUint) -> Result<Self, ResidueError> {
        if remainder.bits() > u64::from(modulus_exponent) {
            return Err(ResidueError::NonCanonicalRemainder {
                modulus_exponent,
                remainder,
            });
        }
        Ok(ResidueClass {
            modulus_exponent,
            remainder,
        })
    }

    /// `new` with a machine-word remainder, for tests and small constructions.
    pub fn from_u64(modulus_exponent: u32, remainder: u64) -> Result<Self, ResidueError> {
        Self::new(modulus_exponent, BigUint::from(remainder))
    }

    pub fn modulus_exponent(&self) -> u32 {
        self.modulus_exponent
    }

    pub fn remainder(&self) -> &BigUint {
        &self.remainder
    }

    /// The modulus `2^k` as an integer.
    pub fn modulus(&self) -> BigUint {
        BigUint::one() << self.modulus_exponent
    }

    /// Membership test: `n ∈ class ⟺ n mod 2^k = r`.
    pub fn contains(&self, n: &BigUint) -> bool {
        if self.modulus_exponent == 0 {
            return true;
        }
        let mask = (BigUint::one() << self.modulus_exponent) - BigUint::one();
        (n & mask) == self.remainder
    }

    pub fn contains_u64(&self, n: u64) -> bool {
        self.contains(&BigUint::from(n))
    }

    /// Splits the class on the parity of `n / 2^k`: the even-quotient child keeps
    /// remainder `r` (bit `k` is 0), the odd-quotient child takes `r + 2^k`
    /// (bit `k` is 1). Both children live at modulus `2^(k+1)` and partition the
    /// parent.
    pub fn split(&self) -> (ResidueClass, ResidueClass) {
        let even = ResidueClass {
            modulus_exponent: self.modulus_exponent + 1,
            remainder: self.remainder.clone(),
        };
        let odd = ResidueClass {
            modulus_exponent: self.modulus_exponent + 1,
            remainder: &self.remainder + self.modulus(),
        };
        (even, odd)
    }

    /// Members of the class below `bound`, ascending.
    pub fn enumerate(&self, bound: u64) -> Vec<u64> {
        let Some(start) = self.remainder.to_u64() else {
            return Vec::new();
        };
        if start >= bound {
            return Vec::new();
        }
        if self.modulus_exponent >= 64 {
            return vec![start];
        }
        let step = 1u64 << self.modulus_exponent;
        (start..bound).step_by(step as usize).collect()
    }

    /// `|class ∩ [0, bound)|` without materializing the members.
    pub fn count_below(&self, bound: u64) -> u64 {
        let Some(start) = self.remainder.to_u64() else {
            return 0;
        };
        if start >= bound {
            return 0;
        }
        if self.modulus_exponent >= 64 {
            return 1;
        }
        1 + (bound - 1 - start) / (1u64 << self.modulus_exponent)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^{})", self.remainder, self.modulus_exponent)
    }
}

/// Wire form: the remainder travels as a decimal string.
#[derive(Serialize, Deserialize)]
struct RawResidueClass {
    modulus_exponent: u32,
    remainder: String,
}

impl From<ResidueClass> for RawResidueClass {
    fn from(c: ResidueClass) -> Self {
        RawResidueClass {
            modulus_exponent: c.modulus_exponent,
            remainder: c.remainder.to_string(),
        }
    }
}

impl TryFrom<RawResidueClass> for ResidueClass {
    type Error = String;

    fn try_from(raw: RawResidueClass) -> Result<Self, Self::Error> {
        let remainder = raw
            .remainder
            .parse::<BigUint>()
            .map_err(|e| format!("invalid remainder {:?}: {e}", raw.remainder))?;
        ResidueClass::new(raw.modulus_exponent, remainder).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(k: u32, r: u64) -> ResidueClass {
        ResidueClass::from_u64(k, r).unwrap()
    }

    #[test]
    fn membership_basics() {
        assert!(ResidueClass::natural_numbers().contains_u64(0));
        assert!(class(3, 5).contains_u64(13));
        assert!(!class(3, 5).contains_u64(12));
    }

    #[test]
    fn non_canonical_remainder_rejected() {
        assert!(ResidueClass::from_u64(3, 8).is_err());
        assert!(ResidueClass::from_u64(0, 1).is_err());
        assert!(ResidueClass::from_u64(3, 7).is_ok());
    }

    #[test]
    fn split_examples() {
        assert_eq!(
            ResidueClass::natural_numbers().split(),
            (class(1, 0), class(1, 1))
        );
        assert_eq!(class(1, 1).split(), (class(2, 1), class(2, 3)));
        assert_eq!(class(3, 5).split(), (class(4, 5), class(4, 13)));
    }

    #[test]
    fn split_partitions_parent() {
        // Oracle for the (k=3, r=5) example: every n < 64 lands in exactly one
        // child iff it was in the parent.
        let parent = class(3, 5);
        let (even, odd) = parent.split();
        for n in 0..64u64 {
            let in_children = [even.contains_u64(n), odd.contains_u64(n)];
            let hits = in_children.iter().filter(|&&b| b).count();
            assert_eq!(hits, usize::from(parent.contains_u64(n)), "n = {n}");
        }
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(class(2, 3).enumerate(16), vec![3, 7, 11, 15]);
        assert_eq!(ResidueClass::natural_numbers().enumerate(3), vec![0, 1, 2]);
        assert_eq!(class(4, 13).enumerate(64), vec![13, 29, 45, 61]);
        assert_eq!(class(4, 13).enumerate(13), Vec::<u64>::new());
    }

    #[test]
    fn count_matches_enumerate() {
        for k in 0..8u32 {
            for r in (0..1u64 << k).step_by(3).chain([0]) {
                let c = class(k, r);
                for bound in [0u64, 1, 7, 100, 1 << 10] {
                    assert_eq!(c.count_below(bound), c.enumerate(bound).len() as u64);
                }
            }
        }
    }

    #[test]
    fn deep_class_enumerate_below_bound() {
        // k = 70: only the remainder itself can sit below any u64 bound.
        let c = ResidueClass::new(70, BigUint::from(41u32)).unwrap();
        assert_eq!(c.enumerate(100), vec![41]);
        assert_eq!(c.count_below(100), 1);
        let big = ResidueClass::new(70, BigUint::one() << 65).unwrap();
        assert_eq!(big.enumerate(100), Vec::<u64>::new());
        assert_eq!(big.count_below(u64::MAX), 0);
    }

    #[test]
    fn prefix_cardinality_at_depth_twenty() {
        let c = class(6, 21);
        assert_eq!(c.count_below(1 << 20), 1 << 14);
    }

    #[test]
    fn display_form() {
        assert_eq!(class(4, 13).to_string(), "13 (mod 2^4)");
    }

    #[test]
    fn serde_uses_decimal_string() {
        let c = ResidueClass::new(70, (BigUint::one() << 69) + BigUint::one()).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"590295810358705651713\""), "{json}");
        let back: ResidueClass = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn serde_rejects_non_canonical() {
        let bad = r#"{"modulus_exponent":3,"remainder":"9"}"#;
        assert!(serde_json::from_str::<ResidueClass>(bad).is_err());
    }
}
