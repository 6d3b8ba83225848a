//! Exact binomial tails and the Hoeffding bound they are checked against.

use crate::protocol::ThresholdRule;

/// `e^{-2 t² k}`: bound on `P(K/k − p ≥ t)` (and on the lower tail).
pub fn hoeffding_bound(k: u64, t: f64) -> f64 {
    (-2.0 * t * t * k as f64).exp()
}

/// `P(lo ≤ K ≤ hi)` for `K ~ Binomial(k, p)`, summed term by term in log
/// space.
pub fn binomial_pmf_range(k: u64, p: f64, lo: u64, hi: u64) -> f64 {
    let hi = hi.min(k);
    if lo > hi {
        return 0.0;
    }
    if p <= 0.0 {
        return if lo == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if hi == k { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    // ln C(k, j) by the recurrence C(k, j+1) = C(k, j)(k − j)/(j + 1).
    let mut ln_c = 0.0;
    let mut total = 0.0;
    for j in 0..=hi {
        if j >= lo {
            total += (ln_c + j as f64 * lp + (k - j) as f64 * lq).exp();
        }
        if j < k {
            ln_c += ((k - j) as f64).ln() - ((j + 1) as f64).ln();
        }
    }
    total.min(1.0)
}

pub fn binomial_tail_at_least(k: u64, p: f64, c: u64) -> f64 {
    if c == 0 {
        return 1.0;
    }
    // Sum the side away from the mean directly; complementing a tiny tail
    // would leave only rounding noise.
    if c as f64 >= k as f64 * p {
        binomial_pmf_range(k, p, c, k)
    } else {
        1.0 - binomial_pmf_range(k, p, 0, c - 1)
    }
}

pub fn binomial_tail_at_most(k: u64, p: f64, c: u64) -> f64 {
    if c >= k {
        return 1.0;
    }
    if c as f64 <= k as f64 * p {
        binomial_pmf_range(k, p, 0, c)
    } else {
        1.0 - binomial_pmf_range(k, p, c + 1, k)
    }
}

/// Probability that a group with per-test pass probability `p` meets `rule`.
pub fn group_pass_probability(rule: &ThresholdRule, k: u64, p: f64) -> f64 {
    match rule.passing_range(k) {
        None => 0.0,
        Some((0, hi)) => binomial_tail_at_most(k, p, hi),
        Some((lo, _)) => binomial_tail_at_least(k, p, lo),
    }
}

/// Acceptance probability for a prover whose registers are i.i.d., given
/// each group's rule and per-test pass probability.
pub fn predicted_acceptance(groups: &[(ThresholdRule, f64)], k: u64) -> f64 {
    groups.iter().map(|(r, p)| group_pass_probability(r, k, *p)).product()
}
