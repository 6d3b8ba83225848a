//! Exact pass rules. Counts are integers and `ε`, `R` are the exact
//! rationals of their `f64` values, so boundary cases compare bit-exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::exact::{rational_from_f64, to_f64};
use crate::Result;

/// A one-sided rule comparing `K/k` to a fixed value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRule {
    /// `K/k ≤ value` when true, `K/k ≥ value` otherwise.
    pub at_most: bool,
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    pub value_f64: f64,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

impl ThresholdRule {
    fn new(at_most: bool, value: BigRational) -> Self {
        ThresholdRule {
            at_most,
            value_f64: to_f64(&value),
            value,
        }
    }

    /// Ground protocol: accept iff `K/k ≤ 1/2 + ε/(2R)`.
    pub fn ground(epsilon: f64, r: f64) -> Result<Self> {
        let (e, r) = (rational_from_f64(epsilon)?, rational_from_f64(r)?);
        let two = BigRational::from_integer(BigInt::from(2));
        Ok(Self::new(true, half() + e / (two * r)))
    }

    /// Circuit protocol, group `i`: pass iff `K_i/k ≥ 1/2 + (1 − ε)/(2R_i)`.
    pub fn circuit(epsilon: f64, r_i: f64) -> Result<Self> {
        let (e, r) = (rational_from_f64(epsilon)?, rational_from_f64(r_i)?);
        let two = BigRational::from_integer(BigInt::from(2));
        Ok(Self::new(false, half() + (BigRational::one() - e) / (two * r)))
    }

    /// Hypergraph protocol, group `i`: pass iff `K_i/k ≥ 1 − ε`.
    pub fn hypergraph(epsilon: f64) -> Result<Self> {
        Ok(Self::new(false, BigRational::one() - rational_from_f64(epsilon)?))
    }

    pub fn passes(&self, count: u64, k: u64) -> bool {
        let lhs = BigRational::new(BigInt::from(count), BigInt::from(k));
        if self.at_most {
            lhs <= self.value
        } else {
            lhs >= self.value
        }
    }

    /// Passing counts form `[lo, hi]` within `0..=k`; `None` if there are none.
    pub fn passing_range(&self, k: u64) -> Option<(u64, u64)> {
        let kv = BigRational::from_integer(BigInt::from(k)) * &self.value;
        let (lo, hi) = if self.at_most {
            let f = kv.floor().to_integer();
            if f < BigInt::from(0) {
                return None;
            }
            (0, f.to_u64().unwrap_or(u64::MAX).min(k))
        } else {
            let c = kv.ceil().to_integer();
            if c > BigInt::from(k) {
                return None;
            }
            (c.to_u64().unwrap_or(0), k)
        };
        Some((lo, hi))
    }
}
