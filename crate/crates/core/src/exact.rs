//! Exact rational helpers: lossless `f64` conversion, threshold comparisons,
//! and certified ceilings of expressions involving `ln 2` and rational
//! powers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// The exact dyadic rational equal to a finite `f64`.
pub fn rational_from_f64(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::invalid(format!("non-finite value {v}")))
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.0052"`
/// into the rational it denotes (decimals are read exactly, not via `f64`).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::invalid(format!("cannot parse {text:?} as a rational number"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::invalid(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let q = BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
    Ok(if neg { -q } else { q })
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn ceil_to_biguint(q: &BigRational) -> BigUint {
    let c = q.ceil().to_integer();
    if c.is_negative() {
        BigUint::zero()
    } else {
        c.to_biguint().expect("non-negative")
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Rational interval guaranteed to contain `ln 2`, with width below
/// `2^{-terms}`, from the series `ln 2 = Σ_{j≥1} 1/(j 2^j)`.
pub fn ln2_bounds(terms: u32) -> (BigRational, BigRational) {
    let mut lo = BigRational::zero();
    let mut pow = BigInt::one();
    for j in 1..=terms {
        pow *= 2;
        lo += BigRational::new(BigInt::one(), BigInt::from(j) * &pow);
    }
    // tail Σ_{j>t} 1/(j 2^j) < 1/((t+1) 2^t)
    let tail = BigRational::new(BigInt::one(), BigInt::from(terms + 1) * pow);
    let hi = &lo + tail;
    (lo, hi)
}

/// Interval `[lo, hi]` around `k^{p/q}` for integers `k ≥ 1`, `q ≥ 1`, with
/// relative width about `10^{-digits}`.
pub fn rational_power_bounds(k: &BigUint, p: u32, q: u32, digits: u32) -> (BigRational, BigRational) {
    let kp = num_traits::pow(BigInt::from(k.clone()), p as usize);
    if q == 1 {
        let v = BigRational::from_integer(kp);
        return (v.clone(), v);
    }
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = &kp * num_traits::pow(scale.clone(), q as usize);
    let root = scaled.nth_root(q);
    let exact = num_traits::pow(root.clone(), q as usize) == scaled;
    let lo = BigRational::new(root.clone(), scale.clone());
    let hi = if exact { lo.clone() } else { BigRational::new(root + 1, scale) };
    (lo, hi)
}

/// Smallest integer `≥ x` where `x` is only known through a refinable
/// interval; `bounds(level)` must return `[lo, hi] ∋ x` that shrinks as
/// `level` grows. Returns `None` if the ceiling is not resolved by level 64.
pub fn certified_ceil<F>(mut bounds: F) -> Option<BigUint>
where
    F: FnMut(u32) -> (BigRational, BigRational),
{
    for level in 1..=64u32 {
        let (lo, hi) = bounds(level);
        // ceil is monotone, so ⌈lo⌉ = ⌈hi⌉ pins ⌈x⌉.
        let (a, b) = (ceil_to_biguint(&lo), ceil_to_biguint(&hi));
        if a == b {
            return Some(a);
        }
    }
    None
}

/// `a / b` rounded towards zero, for display.
pub fn ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    let (q, r) = a.div_rem(b);
    q.to_f64().unwrap_or(f64::INFINITY) + r.to_f64().unwrap_or(0.0) / b.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_interval_brackets_the_float() {
        let (lo, hi) = ln2_bounds(60);
        let l = std::f64::consts::LN_2;
        assert!(to_f64(&lo) <= l + 1e-16 && to_f64(&hi) >= l - 1e-16);
        assert!(to_f64(&(hi - lo)) < 1e-17);
    }

    #[test]
    fn power_bounds_are_exact_for_perfect_powers() {
        let k = BigUint::from(8u32).pow(7);
        let (lo, hi) = rational_power_bounds(&k, 2, 7, 10);
        assert_eq!(lo, hi);
        assert_eq!(lo, BigRational::from_integer(BigInt::from(64)));
    }

    #[test]
    fn certified_ceiling_of_a_multiple_of_ln2() {
        // ⌈1000 ln 2⌉ = ⌈693.147…⌉ = 694
        let c = certified_ceil(|lvl| {
            let (lo, hi) = ln2_bounds(8 * lvl);
            let k = BigRational::from_integer(BigInt::from(1000));
            (&k * lo, &k * hi)
        });
        assert_eq!(c, Some(BigUint::from(694u32)));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/193").unwrap(), rational(1, 193));
        assert_eq!(parse_rational(" 0.0052 ").unwrap(), rational(52, 10000));
        assert_eq!(parse_rational("-3").unwrap(), rational(-3, 1));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
        for bad in ["", ".", "1/0", "1e-3", "abc", "1/x"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn f64_conversion_is_lossless() {
        let q = rational_from_f64(0.1).unwrap();
        assert_ne!(q, rational(1, 10));
        assert_eq!(to_f64(&q), 0.1);
        assert!(rational_from_f64(f64::NAN).is_err());
    }
}
