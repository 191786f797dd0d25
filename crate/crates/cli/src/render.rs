//! Rendering helpers: exact mantissa/exponent pairs for JSON, finite decimal
//! strings for CSV, and dyadic-time parsing for `--t` lists.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use randreal::dyadic::rational::parse_rational;
use randreal::{Dyadic, DyadicInterval};
use serde::Serialize;

/// Exact JSON form of a dyadic: value = mantissa * 2^exponent. The mantissa
/// is a decimal string so arbitrary precision survives JSON number limits.
#[derive(Serialize)]
pub struct DyadicJson {
    pub mantissa: String,
    pub exponent: i64,
}

impl DyadicJson {
    pub fn of(d: &Dyadic) -> Self {
        DyadicJson { mantissa: d.mantissa().to_string(), exponent: d.exponent() }
    }
}

#[derive(Serialize)]
pub struct IntervalJson {
    pub lo: DyadicJson,
    pub hi: DyadicJson,
    pub decimal: String,
}

impl IntervalJson {
    pub fn of(v: &DyadicInterval) -> Self {
        IntervalJson {
            lo: DyadicJson::of(v.lo()),
            hi: DyadicJson::of(v.hi()),
            decimal: v.to_decimal_string(),
        }
    }
}

/// Exact finite decimal rendering of one dyadic endpoint.
pub fn decimal_exact(d: &Dyadic) -> String {
    let digits = (-d.exponent()).max(0) as u32;
    d.to_decimal_string(digits)
}

/// Parse a comma-separated list of times into exact dyadics; each entry must
/// be a dyadic rational (denominator a power of two), e.g. `1/4,0.5,3/4`.
pub fn parse_dyadic_times(list: &str) -> Result<Vec<Dyadic>, String> {
    let mut ts = Vec::new();
    for tok in list.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let q = parse_rational(tok).map_err(|e| format!("bad time {tok:?}: {e}"))?;
        ts.push(rational_to_dyadic(&q).ok_or_else(|| {
            format!("time {tok:?} is not a dyadic rational (denominator must be a power of two)")
        })?);
    }
    if ts.is_empty() {
        return Err("no times given".to_string());
    }
    Ok(ts)
}

fn rational_to_dyadic(q: &num_rational::BigRational) -> Option<Dyadic> {
    let denom = q.denom();
    if denom.is_zero() || denom.is_negative() {
        return None;
    }
    if denom.is_one() {
        return Some(Dyadic::new(q.numer().clone(), 0));
    }
    // power of two iff d & (d-1) == 0
    let minus_one = denom - BigInt::one();
    if (denom & &minus_one) != BigInt::zero() {
        return None;
    }
    let k = denom.bits() - 1;
    Some(Dyadic::new(q.numer().clone(), -(k as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_parse_exactly() {
        let ts = parse_dyadic_times("1/4, 0.5 ,3/4").unwrap();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts[0], Dyadic::from_pow2_ratio(1, 2));
        assert_eq!(ts[1], Dyadic::from_pow2_ratio(1, 1));
        assert_eq!(ts[2], Dyadic::from_pow2_ratio(3, 2));
    }

    #[test]
    fn non_dyadic_times_are_rejected() {
        assert!(parse_dyadic_times("1/3").is_err());
        assert!(parse_dyadic_times("").is_err());
        assert!(parse_dyadic_times("x").is_err());
    }

    #[test]
    fn integers_and_large_denominators_parse() {
        let ts = parse_dyadic_times("1,3/1024").unwrap();
        assert_eq!(ts[0], Dyadic::one());
        assert_eq!(ts[1], Dyadic::from_pow2_ratio(3, 10));
    }

    #[test]
    fn exact_decimals_round_trip_the_endpoints() {
        assert_eq!(decimal_exact(&Dyadic::from_pow2_ratio(3, 2)), "0.75");
        assert_eq!(decimal_exact(&Dyadic::from_int(-2)), "-2");
    }
}
