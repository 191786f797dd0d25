//! Closed intervals with exact dyadic endpoints.

use super::{Dyadic, DyadicError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Outcome of a strict interval comparison. `Overlap` means the enclosures
/// are not yet fine enough to separate the underlying reals; callers refine
/// and retry along a precision ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrictCmp {
    Lt,
    Gt,
    Overlap,
}

/// `Lt` iff every point of `a` is strictly below every point of `b`.
pub fn compare_strict(a: &DyadicInterval, b: &DyadicInterval) -> StrictCmp {
    if a.hi < b.lo {
        StrictCmp::Lt
    } else if b.hi < a.lo {
        StrictCmp::Gt
    } else {
        StrictCmp::Overlap
    }
}

/// A closed interval `[lo, hi]` with `lo <= hi`, used as a certified
/// enclosure of some real number.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self, DyadicError> {
        if lo > hi {
            return Err(DyadicError::EndpointsOutOfOrder(lo.to_string(), hi.to_string()));
        }
        Ok(DyadicInterval { lo, hi })
    }

    /// Like `new` but for endpoints known to be ordered by construction.
    pub(crate) fn raw(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        DyadicInterval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        DyadicInterval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        DyadicInterval::point(Dyadic::zero())
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    /// True when the width is at most `2^-n`.
    pub fn width_within(&self, n: u32) -> bool {
        self.width() <= Dyadic::pow2(-(n as i64))
    }

    pub fn midpoint(&self) -> Dyadic {
        (&self.lo + &self.hi).mul_pow2(-1)
    }

    pub fn midpoint_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &DyadicInterval) -> DyadicInterval {
        DyadicInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn intersect(&self, other: &DyadicInterval) -> Option<DyadicInterval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Some(DyadicInterval { lo, hi })
        } else {
            None
        }
    }

    /// `[|x| : x in self]`.
    pub fn abs(&self) -> DyadicInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            DyadicInterval {
                lo: Dyadic::zero(),
                hi: self.hi.clone().max(self.lo.abs()),
            }
        }
    }

    /// Exact scaling by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> DyadicInterval {
        DyadicInterval { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k) }
    }

    /// Round endpoints outward onto the grid `2^-bits`; the result contains
    /// `self`. Used to keep mantissas short inside long computations.
    pub fn round_out(&self, bits: i64) -> DyadicInterval {
        DyadicInterval { lo: self.lo.round_down(bits), hi: self.hi.round_up(bits) }
    }

    /// Widen by `2^-n` on both sides (adds an error ball, e.g. a series tail).
    pub fn pad(&self, n: i64) -> DyadicInterval {
        let ball = Dyadic::pow2(-n);
        DyadicInterval { lo: &self.lo - &ball, hi: &self.hi + &ball }
    }

    pub fn to_decimal_string(&self) -> String {
        if self.is_point() {
            return format!("{} (exact)", self.lo.to_decimal_string(decimal_digits(&self.lo)));
        }
        let mid = self.midpoint();
        let rad = self.width().mul_pow2(-1);
        // enough digits that the rounded radius still dominates rendering error
        let digits = rad
            .ilog2()
            .map(|l| ((-l).max(0) as f64 * 0.30103).ceil() as u32 + 2)
            .unwrap_or(6)
            .min(80);
        format!("{} ± {}", mid.to_decimal_string(digits), rad.to_decimal_string(digits))
    }
}

fn decimal_digits(v: &Dyadic) -> u32 {
    let e = v.exponent();
    if e >= 0 {
        0
    } else {
        (-e) as u32 // 2^-k needs exactly k decimal digits
    }
}

impl Add for &DyadicInterval {
    type Output = DyadicInterval;
    fn add(self, rhs: &DyadicInterval) -> DyadicInterval {
        DyadicInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &DyadicInterval {
    type Output = DyadicInterval;
    fn sub(self, rhs: &DyadicInterval) -> DyadicInterval {
        DyadicInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Neg for &DyadicInterval {
    type Output = DyadicInterval;
    fn neg(self) -> DyadicInterval {
        DyadicInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Mul for &DyadicInterval {
    type Output = DyadicInterval;
    fn mul(self, rhs: &DyadicInterval) -> DyadicInterval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        DyadicInterval { lo, hi }
    }
}

impl Mul<&Dyadic> for &DyadicInterval {
    type Output = DyadicInterval;
    fn mul(self, rhs: &Dyadic) -> DyadicInterval {
        let a = &self.lo * rhs;
        let b = &self.hi * rhs;
        if a <= b {
            DyadicInterval { lo: a, hi: b }
        } else {
            DyadicInterval { lo: b, hi: a }
        }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
