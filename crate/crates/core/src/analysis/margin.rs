//! The l1 error budget for sampling an IQP distribution from the verified
//! target register: `Σ|p − q| ≤ 2√(1 − F) + (sampler error) ≤ 1/192`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::exact::{ceil_to_biguint, rational_power_bounds, to_f64};
use crate::{Error, Result};

pub const SUPREMACY_THRESHOLD: f64 = 1.0 / 192.0;

fn threshold_exact() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(192))
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginReport {
    pub fidelity: f64,
    pub sampler_error: f64,
    /// `2√(1 − F)`.
    pub state_error: f64,
    pub total_error_bound: f64,
    pub threshold: f64,
    /// `threshold − total_error_bound`.
    pub margin: f64,
    pub supremacy_claim: bool,
    pub mode: super::ComputationMode,
}

pub fn supremacy_margin(fidelity: f64, sampler_error: f64) -> Result<MarginReport> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::invalid(format!("fidelity {fidelity} outside [0, 1]")));
    }
    if !sampler_error.is_finite() || sampler_error < 0.0 {
        return Err(Error::invalid(format!("sampler error {sampler_error} must be non-negative")));
    }
    let state_error = 2.0 * (1.0 - fidelity).sqrt();
    let total = state_error + sampler_error;
    Ok(MarginReport {
        fidelity,
        sampler_error,
        state_error,
        total_error_bound: total,
        threshold: SUPREMACY_THRESHOLD,
        margin: SUPREMACY_THRESHOLD - total,
        supremacy_claim: total <= SUPREMACY_THRESHOLD,
        mode: super::ComputationMode::Bound,
    })
}

/// Smallest `k` for which a target with `F ≥ 1 − k^{-1/7}` keeps the bound
/// `2 k^{-1/14} + s ≤ 1/192`, i.e. `k = ⌈(2 / (1/192 − s))^{14}⌉`.
/// `None` when `s ≥ 1/192`.
pub fn minimal_k_for_margin(sampler_error: &BigRational) -> Option<BigUint> {
    let slack = threshold_exact() - sampler_error;
    if !slack.is_positive() {
        return None;
    }
    let base = BigRational::from_integer(BigInt::from(2)) / slack;
    Some(ceil_to_biguint(&num_traits::pow(base, 14)))
}

/// `2 k^{-1/14} + s ≤ 1/192`, decided exactly.
pub fn margin_holds_at(k: &BigUint, sampler_error: &BigRational) -> bool {
    let slack = threshold_exact() - sampler_error;
    if !slack.is_positive() {
        return false;
    }
    // 2 k^{-1/14} ≤ slack  ⇔  (2/slack)^{14} ≤ k
    let base = BigRational::from_integer(BigInt::from(2)) / slack;
    num_traits::pow(base, 14) <= BigRational::from_integer(BigInt::from(k.clone()))
}

/// `k^{1/14}` to about 30 significant digits, for display.
pub fn fourteenth_root(k: &BigUint) -> f64 {
    let (lo, _) = rational_power_bounds(k, 1, 14, 30);
    to_f64(&lo)
}

/// Decimal digits of `k`.
pub fn digits(k: &BigUint) -> usize {
    k.to_string().len()
}

/// `k` as an `f64` (possibly infinite) for display.
pub fn approx(k: &BigUint) -> f64 {
    k.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn s193() -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(193))
    }

    #[test]
    fn perfect_target_leaves_a_margin() {
        let r = supremacy_margin(1.0, 1.0 / 193.0).unwrap();
        assert!(r.supremacy_claim && r.margin > 0.0);
        assert!(!supremacy_margin(0.5, 0.0).unwrap().supremacy_claim);
        assert!(supremacy_margin(1.1, 0.0).is_err());
    }

    #[test]
    fn minimal_k_for_one_over_193() {
        // 1/192 − 1/193 = 1/37056, so 2k^{-1/14} ≤ 1/37056 ⇔ k ≥ 74112^14.
        let k = minimal_k_for_margin(&s193()).unwrap();
        assert_eq!(k, BigUint::from(74112u32).pow(14));
        assert!(margin_holds_at(&k, &s193()));
        assert!(!margin_holds_at(&(&k - 1u32), &s193()));
        assert!((fourteenth_root(&k) - 74112.0).abs() < 1e-6);
    }

    #[test]
    fn no_k_when_sampler_alone_is_too_large() {
        assert!(minimal_k_for_margin(&threshold_exact()).is_none());
        assert_eq!(minimal_k_for_margin(&BigRational::zero()).unwrap(), BigUint::from(384u32).pow(14));
    }
}
