//! Protocol parameters: the paper-scale schedules, computed exactly, and
//! runnable parameter sets.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::exact::{certified_ceil, ceil_to_biguint, ln2_bounds, rational, rational_from_f64, rational_power_bounds, to_f64};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Ground,
    Circuit,
    Hypergraph,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Ground => "ground",
            ProtocolKind::Circuit => "circuit",
            ProtocolKind::Hypergraph => "hypergraph",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ground" => Ok(ProtocolKind::Ground),
            "circuit" => Ok(ProtocolKind::Circuit),
            "hypergraph" => Ok(ProtocolKind::Hypergraph),
            _ => Err(Error::invalid(format!("unknown protocol {s:?} (expected ground, circuit or hypergraph)"))),
        }
    }

    /// Number of test groups for an `n`-qubit target.
    pub fn groups(self, n: usize) -> usize {
        match self {
            ProtocolKind::Ground => 1,
            _ => n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Desk,
    Paper,
}

/// The minimal conforming schedule, in exact integers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PaperSchedule {
    pub protocol: ProtocolKind,
    pub n: usize,
    /// `R` used by the ground and circuit schedules.
    pub r: Option<f64>,
    /// `ε` as an exact fraction when it is rational.
    #[serde(serialize_with = "ser_opt_rational")]
    pub epsilon_exact: Option<BigRational>,
    pub epsilon: f64,
    #[serde(serialize_with = "ser_biguint")]
    pub k: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub m: BigUint,
    /// Total registers the prover must send.
    #[serde(serialize_with = "ser_biguint")]
    pub registers: BigUint,
    /// The schedule's inequalities, as text.
    pub rule: &'static str,
    /// More than [`EXECUTION_LIMIT`] single-copy tests would be needed.
    pub astronomical: bool,
}

/// Largest number of single-copy tests a paper-mode run will execute.
pub const EXECUTION_LIMIT: u64 = 50_000_000;

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_rational<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_none(),
    }
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn biguint_rational(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

/// `⌈coeff · ln 2⌉` for an exact rational `coeff ≥ 0`.
fn ceil_times_ln2(coeff: &BigRational) -> BigUint {
    certified_ceil(|lvl| {
        let (lo, hi) = ln2_bounds(64 * lvl);
        (coeff * lo, coeff * hi)
    })
    .expect("ln 2 is irrational, so the ceiling resolves")
}

fn registers(protocol: ProtocolKind, n: usize, k: &BigUint, m: &BigUint) -> BigUint {
    k * BigUint::from(protocol.groups(n)) + m + BigUint::one()
}

fn tests_needed(protocol: ProtocolKind, n: usize, k: &BigUint) -> Option<u64> {
    (k * BigUint::from(protocol.groups(n))).to_u64()
}

/// Minimal `(ε, k, m)` for `protocol` at width `n`.
///
/// * ground: `ε = 1/(4N²)`, `k = ⌈32R²N⁵⌉`, `m = ⌈2N⁵k² ln2⌉`
/// * circuit: `ε = 1/(2N³)`, `k = ⌈8R²N⁷⌉`, `m = ⌈2N⁷k² ln2⌉`
/// * hypergraph: `k = (4N)⁷` (or the supplied `k ≥ (4N)⁷`),
///   `ε = 1/(4N k^{2/7})`, `m = ⌈2N³k^{18/7} ln2⌉`
///
/// A supplied `k` below the schedule's minimum is an error; above it, the
/// other quantities follow the supplied value.
pub fn paper_params(protocol: ProtocolKind, n: usize, r: Option<f64>, k: Option<&BigUint>) -> Result<PaperSchedule> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let nn = n as u64;
    let (epsilon_exact, epsilon, k, m, rule, r_used) = match protocol {
        ProtocolKind::Ground | ProtocolKind::Circuit => {
            let r = r.ok_or_else(|| Error::invalid(format!("the {} schedule needs R", protocol.name())))?;
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::invalid(format!("R must be positive and finite, got {r}")));
            }
            let rq = rational_from_f64(r)?;
            let (kcoef, kpow, mpow, eps, rule) = if protocol == ProtocolKind::Ground {
                (32, 5, 5, rational(1, (4 * nn * nn) as i64), "eps = 1/(4N^2); k >= 32 R^2 N^5; m >= 2 N^5 k^2 ln2")
            } else {
                (8, 7, 7, rational(1, (2 * nn * nn * nn) as i64), "eps = 1/(2N^3); k >= 8 R^2 N^7; m >= 2 N^7 k^2 ln2")
            };
            let kmin = ceil_to_biguint(&(int(kcoef) * &rq * &rq * int(nn.pow(kpow))));
            let k = pick_k(kmin, k)?;
            let kq = biguint_rational(&k);
            let m = ceil_times_ln2(&(int(2 * nn.pow(mpow)) * &kq * &kq));
            (Some(eps.clone()), to_f64(&eps), k, m, rule, Some(r))
        }
        ProtocolKind::Hypergraph => {
            let kmin = BigUint::from(4 * nn).pow(7);
            let k = pick_k(kmin, k)?;
            // ε = 1/(4N k^{2/7}); exact when k is a perfect 7th power.
            let (lo, hi) = rational_power_bounds(&k, 2, 7, 30);
            let eps_exact = (lo == hi).then(|| BigRational::one() / (int(4 * nn) * &lo));
            let epsilon = match &eps_exact {
                Some(e) => to_f64(e),
                None => 1.0 / (4.0 * n as f64 * to_f64(&lo)),
            };
            let three = int(2 * nn.pow(3));
            let m = certified_ceil(|lvl| {
                let (plo, phi) = rational_power_bounds(&k, 18, 7, 20 * lvl);
                let (llo, lhi) = ln2_bounds(64 * lvl);
                (&three * plo * llo, &three * phi * lhi)
            })
            .ok_or_else(|| Error::invalid("could not resolve the m threshold"))?;
            (eps_exact, epsilon, k, m, "eps = 1/(4N k^(2/7)); k >= (4N)^7; m >= 2 N^3 k^(18/7) ln2", None)
        }
    };
    let astronomical = tests_needed(protocol, n, &k).is_none_or(|t| t > EXECUTION_LIMIT);
    Ok(PaperSchedule {
        protocol,
        n,
        r: r_used,
        epsilon_exact,
        epsilon,
        registers: registers(protocol, n, &k, &m),
        k,
        m,
        rule,
        astronomical,
    })
}

fn pick_k(kmin: BigUint, k: Option<&BigUint>) -> Result<BigUint> {
    match k {
        None => Ok(kmin),
        Some(k) if *k >= kmin => Ok(k.clone()),
        Some(k) => Err(Error::invalid(format!("k = {k} is below the schedule minimum {kmin}"))),
    }
}

/// Parameters of one executable protocol run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub protocol: ProtocolKind,
    pub n: usize,
    pub k: u64,
    pub m: u64,
    pub epsilon: f64,
    pub mode: Mode,
    /// Whether `(ε, k, m)` satisfy the conforming schedule; desk parameters
    /// never claim to.
    pub conforming: bool,
}

impl ProtocolParams {
    pub fn desk(protocol: ProtocolKind, n: usize, k: u64, m: u64, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("N must be positive"));
        }
        if k == 0 {
            return Err(Error::invalid("k must be positive"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(ProtocolParams {
            protocol,
            n,
            k,
            m,
            epsilon,
            mode: Mode::Desk,
            conforming: false,
        })
    }

    /// Executable form of a paper schedule; errors when it is too large.
    pub fn from_schedule(s: &PaperSchedule) -> Result<Self> {
        if s.astronomical {
            return Err(Error::invalid(format!(
                "paper-scale {} parameters need {} x {} tests; not executable (limit {EXECUTION_LIMIT})",
                s.protocol.name(),
                s.protocol.groups(s.n),
                s.k
            )));
        }
        let m = s
            .m
            .to_u64()
            .ok_or_else(|| Error::invalid(format!("m = {} does not fit in 64 bits", s.m)))?;
        Ok(ProtocolParams {
            protocol: s.protocol,
            n: s.n,
            k: s.k.to_u64().expect("checked by the execution limit"),
            m,
            epsilon: s.epsilon,
            mode: Mode::Paper,
            conforming: true,
        })
    }

    /// Total registers `G·k + m + 1`.
    pub fn registers(&self) -> Result<u64> {
        let g = self.protocol.groups(self.n) as u64;
        g.checked_mul(self.k)
            .and_then(|t| t.checked_add(self.m))
            .and_then(|t| t.checked_add(1))
            .ok_or_else(|| Error::invalid("register count overflows 64 bits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_n3() {
        let s = paper_params(ProtocolKind::Ground, 3, Some(1.0), None).unwrap();
        assert_eq!(s.k, BigUint::from(7776u32));
        assert_eq!(s.epsilon_exact, Some(rational(1, 36)));
        // ⌈2·243·7776²·ln2⌉
        let want = (2.0 * 243.0 * 7776f64.powi(2) * std::f64::consts::LN_2).ceil();
        assert!((s.m.to_f64().unwrap() - want).abs() <= 1.0);
        assert!(!s.astronomical);
    }

    #[test]
    fn circuit_n3() {
        let s = paper_params(ProtocolKind::Circuit, 3, Some(1.0), None).unwrap();
        assert_eq!(s.k, BigUint::from(17496u32));
        assert_eq!(s.epsilon_exact, Some(rational(1, 54)));
    }

    #[test]
    fn hypergraph_n2() {
        let s = paper_params(ProtocolKind::Hypergraph, 2, None, None).unwrap();
        assert_eq!(s.k, BigUint::from(2_097_152u32));
        // k^{2/7} = 64, so ε = 1/512
        assert_eq!(s.epsilon_exact, Some(rational(1, 512)));
        let want = 2.0 * 8.0 * 2_097_152f64.powf(18.0 / 7.0) * std::f64::consts::LN_2;
        assert!((s.m.to_f64().unwrap() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn supplied_k() {
        assert!(paper_params(ProtocolKind::Hypergraph, 2, None, Some(&BigUint::from(10u32))).is_err());
        let s = paper_params(ProtocolKind::Hypergraph, 1, None, Some(&BigUint::from(20000u32))).unwrap();
        assert!(s.epsilon_exact.is_none());
        assert!((s.epsilon - 1.0 / (4.0 * 20000f64.powf(2.0 / 7.0))).abs() < 1e-15);
        assert!(paper_params(ProtocolKind::Ground, 2, None, None).is_err());
    }

    #[test]
    fn desk_validation() {
        assert!(ProtocolParams::desk(ProtocolKind::Ground, 1, 0, 0, 0.1).is_err());
        assert!(ProtocolParams::desk(ProtocolKind::Ground, 1, 1, 0, 1.0).is_err());
        let p = ProtocolParams::desk(ProtocolKind::Circuit, 3, 10, 5, 0.1).unwrap();
        assert_eq!(p.registers().unwrap(), 36);
        assert!(!p.conforming);
    }
}
