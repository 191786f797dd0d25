//! Exact dyadic rationals `m * 2^e` and interval enclosures built from them.
//!
//! Every number in the sampling core is either an exact dyadic or a closed
//! interval with dyadic endpoints. Ring operations are exact; everything
//! irrational (roots, logarithms, the Gaussian CDF, ...) is produced as an
//! outward-rounded enclosure whose width the caller controls.

mod interval;
pub mod rational;
pub mod transcendental;

pub use interval::{compare_strict, DyadicInterval, StrictCmp};
pub use rational::{dyadic_to_rational, parse_rational, rational_cmp_dyadic, rational_to_enclosure};
pub use transcendental::{
    div_down, div_enclosure, div_up, e_enclosure, exp_enclosure, inv_sqrt_2pi_enclosure,
    ln2_enclosure, ln_enclosure, pi_enclosure, sin_pi, sqrt2_enclosure, sqrt_enclosure,
};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DyadicError {
    #[error("interval endpoints out of order: {0} > {1}")]
    EndpointsOutOfOrder(String, String),
    #[error("square root of an enclosure reaching below zero (lower end {0})")]
    NegativeSqrt(String),
    #[error("logarithm of an enclosure reaching zero or below (lower end {0})")]
    NonpositiveLn(String),
    #[error("division by an enclosure containing zero")]
    DivisorContainsZero,
    #[error("comparison undecided at precision 2^-{cap}")]
    UndecidedComparison { cap: u32 },
    #[error("cannot parse {0:?} as a dyadic number")]
    Parse(String),
}

/// Doubling precision schedule used wherever a comparison has to be decided
/// by refining enclosures: 4, 8, 16, ... bits, capped (2^-256 by default).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ladder {
    pub start: u32,
    pub cap: u32,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder { start: 4, cap: 256 }
    }
}

impl Ladder {
    pub fn with_cap(cap: u32) -> Self {
        Ladder { start: 4, cap }
    }

    /// The doubling sequence of working precisions, ending exactly at the cap.
    pub fn steps(self) -> impl Iterator<Item = u32> {
        let Ladder { start, cap } = self;
        let mut next = start.max(1);
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            if next >= cap {
                done = true;
                return Some(cap);
            }
            let cur = next;
            next = next.saturating_mul(2);
            Some(cur)
        })
    }
}

/// An exact dyadic rational `mantissa * 2^exponent`.
///
/// Canonical form: the mantissa is odd or zero, and zero carries exponent 0,
/// so equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

/// Shift right rounding toward negative infinity, independent of the shift
/// semantics of the underlying integer type.
pub(crate) fn floor_shr(x: &BigInt, k: u64) -> BigInt {
    if k == 0 || x.is_zero() {
        return x.clone();
    }
    let mag = x.magnitude();
    let q = mag >> k;
    match x.sign() {
        Sign::Minus => {
            if (&q << k) == *mag {
                -BigInt::from(q)
            } else {
                -(BigInt::from(q) + 1u32)
            }
        }
        _ => BigInt::from(q),
    }
}

pub(crate) fn ceil_shr(x: &BigInt, k: u64) -> BigInt {
    -floor_shr(&-x, k)
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa = floor_shr(&self.mantissa, tz);
            self.exponent += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    /// `num * 2^-pow`, e.g. `from_pow2_ratio(3, 2)` is 3/4.
    pub fn from_pow2_ratio(num: i64, pow: u32) -> Self {
        Dyadic::new(BigInt::from(num), -(pow as i64))
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: k }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Multiply by `2^k` (exact).
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.mantissa.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    /// Largest multiple of `2^-bits` that is `<= self`. Exact when the value
    /// already lies on that grid.
    pub fn round_down(&self, bits: i64) -> Self {
        if self.exponent >= -bits {
            return self.clone();
        }
        let k = (-bits - self.exponent) as u64;
        Dyadic::new(floor_shr(&self.mantissa, k), -bits)
    }

    /// Smallest multiple of `2^-bits` that is `>= self`.
    pub fn round_up(&self, bits: i64) -> Self {
        if self.exponent >= -bits {
            return self.clone();
        }
        let k = (-bits - self.exponent) as u64;
        Dyadic::new(ceil_shr(&self.mantissa, k), -bits)
    }

    pub fn floor(&self) -> Self {
        self.round_down(0)
    }

    /// `floor(log2 |self|)` for nonzero values.
    pub fn ilog2(&self) -> Option<i64> {
        if self.mantissa.is_zero() {
            None
        } else {
            Some(self.mantissa.bits() as i64 - 1 + self.exponent)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let (m, e) = if bits > 64 {
            let shift = (bits - 64) as u64;
            (floor_shr(&self.mantissa, shift), self.exponent + shift as i64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let mf = m.to_f64().unwrap_or(0.0);
        if e > 1023 {
            if mf > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }
        } else if e < -1200 {
            0.0
        } else {
            mf * 2.0f64.powi(e as i32)
        }
    }

    /// Decimal rendering with `frac_digits` digits after the point, rounded
    /// to nearest (ties away from zero).
    pub fn to_decimal_string(&self, frac_digits: u32) -> String {
        let ten_pow = BigInt::from(10u32).pow(frac_digits);
        let scaled = &self.mantissa * &ten_pow;
        let n = if self.exponent >= 0 {
            scaled << self.exponent as u64
        } else {
            let k = (-self.exponent) as u64;
            // round to nearest: floor((2*scaled + 2^k) / 2^(k+1))
            floor_shr(&((scaled << 1u8) + (BigInt::one() << k)), k + 1)
        };
        let neg = n.is_negative();
        let digits = n.magnitude().to_string();
        let digits = if digits.len() <= frac_digits as usize {
            format!("{}{}", "0".repeat(frac_digits as usize + 1 - digits.len()), digits)
        } else {
            digits
        };
        let split = digits.len() - frac_digits as usize;
        let (int_part, frac_part) = digits.split_at(split);
        let sign = if neg { "-" } else { "" };
        if frac_digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Parse `"m*2^e"`, `"m*2^-e"` or a plain integer string.
    pub fn parse(s: &str) -> Result<Self, DyadicError> {
        let s = s.trim();
        if let Some((m, e)) = s.split_once("*2^") {
            let mantissa: BigInt =
                m.trim().parse().map_err(|_| DyadicError::Parse(s.to_string()))?;
            let exponent: i64 =
                e.trim().parse().map_err(|_| DyadicError::Parse(s.to_string()))?;
            Ok(Dyadic::new(mantissa, exponent))
        } else {
            let mantissa: BigInt = s.parse().map_err(|_| DyadicError::Parse(s.to_string()))?;
            Ok(Dyadic::new(mantissa, 0))
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let ls = self.mantissa.sign();
        let rs = other.mantissa.sign();
        if ls != rs {
            return match (ls, rs) {
                (Sign::Minus, _) => Ordering::Less,
                (_, Sign::Minus) => Ordering::Greater,
                (Sign::NoSign, Sign::Plus) => Ordering::Less,
                (Sign::Plus, Sign::NoSign) => Ordering::Greater,
                _ => Ordering::Equal,
            };
        }
        let e = self.exponent.min(other.exponent);
        let lm = &self.mantissa << (self.exponent - e) as u64;
        let rm = &other.mantissa << (other.exponent - e) as u64;
        lm.cmp(&rm)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.mantissa.is_zero() {
            return rhs.clone();
        }
        if rhs.mantissa.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let lm = &self.mantissa << (self.exponent - e) as u64;
        let rm = &rhs.mantissa << (rhs.exponent - e) as u64;
        Dyadic::new(lm + rm, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: if self.mantissa.is_zero() { 0 } else { self.exponent } }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// JSON form: exact mantissa/exponent pair, mantissa as a decimal string.
#[derive(Serialize, Deserialize)]
struct DyadicRepr {
    m: String,
    e: i64,
}

impl Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DyadicRepr { m: self.mantissa.to_string(), e: self.exponent }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DyadicRepr::deserialize(d)?;
        let m: BigInt = repr.m.parse().map_err(serde::de::Error::custom)?;
        Ok(Dyadic::new(m, repr.e))
    }
}
