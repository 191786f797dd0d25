//! Certified enclosures of the irrational functions the samplers need:
//! directed-rounding division, square roots, logarithms, exponentials, sine
//! at dyadic multiples of pi, and a small cache of constant enclosures.
//!
//! Every function here returns an interval that provably contains the exact
//! value: series are truncated with an explicit tail bound that is added back
//! as an error ball, and all roundings push endpoints outward.

use super::{Dyadic, DyadicError, DyadicInterval};
use num_integer::Integer;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

type Result<T> = std::result::Result<T, DyadicError>;

const GUARD: u32 = 8;

fn div_rounded(a: &Dyadic, b: &Dyadic, bits: u32, up: bool) -> Dyadic {
    debug_assert!(!b.is_zero());
    let shift = a.exponent() - b.exponent() + bits as i64;
    let (num, den) = if shift >= 0 {
        (a.mantissa() << shift as u64, b.mantissa().clone())
    } else {
        (a.mantissa().clone(), b.mantissa() << (-shift) as u64)
    };
    let q = if up { num.div_ceil(&den) } else { num.div_floor(&den) };
    Dyadic::new(q, -(bits as i64))
}

/// Largest multiple of `2^-bits` that is `<= a/b`.
pub fn div_down(a: &Dyadic, b: &Dyadic, bits: u32) -> Dyadic {
    div_rounded(a, b, bits, false)
}

/// Smallest multiple of `2^-bits` that is `>= a/b`.
pub fn div_up(a: &Dyadic, b: &Dyadic, bits: u32) -> Dyadic {
    div_rounded(a, b, bits, true)
}

/// Enclosure of `a / b` on the grid `2^-bits`; the divisor must not contain
/// zero.
pub fn div_enclosure(
    a: &DyadicInterval,
    b: &DyadicInterval,
    bits: u32,
) -> Result<DyadicInterval> {
    if !b.lo().is_positive() && !b.hi().is_negative() {
        return Err(DyadicError::DivisorContainsZero);
    }
    let corners = [
        (a.lo(), b.lo()),
        (a.lo(), b.hi()),
        (a.hi(), b.lo()),
        (a.hi(), b.hi()),
    ];
    let lo = corners.iter().map(|(x, y)| div_down(x, y, bits)).min().unwrap();
    let hi = corners.iter().map(|(x, y)| div_up(x, y, bits)).max().unwrap();
    Ok(DyadicInterval::raw(lo, hi))
}

fn div_by_uint(x: &DyadicInterval, k: u64, bits: u32) -> DyadicInterval {
    let kd = Dyadic::from_int(k as i64);
    DyadicInterval::raw(div_down(x.lo(), &kd, bits), div_up(x.hi(), &kd, bits))
}

fn sqrt_down_point(x: &Dyadic, bits: u32) -> Dyadic {
    debug_assert!(!x.is_negative());
    let a = x.round_down(2 * bits as i64);
    let e = a.exponent() + 2 * bits as i64;
    debug_assert!(e >= 0);
    let whole = a.mantissa() << e as u64;
    Dyadic::new(whole.sqrt(), -(bits as i64))
}

fn sqrt_up_point(x: &Dyadic, bits: u32) -> Dyadic {
    debug_assert!(!x.is_negative());
    let b = x.round_up(2 * bits as i64);
    let e = b.exponent() + 2 * bits as i64;
    debug_assert!(e >= 0);
    let whole = b.mantissa() << e as u64;
    let s = whole.sqrt();
    let s = if &s * &s == whole { s } else { s + 1u32 };
    Dyadic::new(s, -(bits as i64))
}

/// Outward-rounded square root; the input must not reach below zero.
/// Width is at most the propagated interval width plus `2^-n`.
pub fn sqrt_enclosure(x: &DyadicInterval, n: u32) -> Result<DyadicInterval> {
    if x.lo().is_negative() {
        return Err(DyadicError::NegativeSqrt(x.lo().to_string()));
    }
    Ok(DyadicInterval::raw(
        sqrt_down_point(x.lo(), n + 2),
        sqrt_up_point(x.hi(), n + 2),
    ))
}

fn exp_point(x: &Dyadic, p: u32) -> DyadicInterval {
    // halve the argument until |r| <= 1/2, then square back up
    let half = Dyadic::from_pow2_ratio(1, 1);
    let mut squarings = 0u32;
    let mut r = x.clone();
    while r.abs() > half {
        r = r.mul_pow2(-1);
        squarings += 1;
    }
    let wp = (p + 2 * squarings + GUARD) as i64;
    let r_abs = r.abs();
    let r_iv = DyadicInterval::point(r);
    let mut sum = DyadicInterval::point(Dyadic::one());
    let mut term = DyadicInterval::point(Dyadic::one());
    let mut j: u64 = 1;
    loop {
        term = div_by_uint(&(&term * &r_iv), j, wp as u32);
        sum = &sum + &term;
        // tail after term j: sum_{i>j} |r|^(i-j)/((j+1)...) <= |term|*|r|/(j+1)*2
        let tail = div_up(&(&term.abs().hi().clone() * &r_abs), &Dyadic::from_int(j as i64 + 1), wp as u32)
            .mul_pow2(1);
        if tail <= Dyadic::pow2(-(wp - 1)) {
            sum = sum.pad(wp - 1);
            break;
        }
        j += 1;
        assert!(j < 100_000, "exp series failed to converge");
    }
    for _ in 0..squarings {
        sum = (&sum * &sum).round_out(wp);
    }
    sum
}

fn exp_point_auto(x: &Dyadic, n: u32) -> DyadicInterval {
    let mut p = n + GUARD;
    loop {
        let e = exp_point(x, p);
        if e.width_within(n) {
            return e;
        }
        p = p * 2 + 16;
        assert!(p < 1_000_000, "exp enclosure failed to tighten");
    }
}

/// Outward-rounded exponential (total). Width is at most the propagated
/// interval width plus `2^-n`.
pub fn exp_enclosure(x: &DyadicInterval, n: u32) -> DyadicInterval {
    let lo = exp_point_auto(x.lo(), n + 1);
    if x.is_point() {
        return lo;
    }
    let hi = exp_point_auto(x.hi(), n + 1);
    DyadicInterval::raw(lo.lo().clone(), hi.hi().clone())
}

/// atanh series for |t| bounded well below 1/e; used with |t| <= 0.34 so the
/// geometric tail factor 1/(1-t^2) is at most 8/7.
fn atanh_series(t: &DyadicInterval, p: u32) -> DyadicInterval {
    let wp = p as i64 + 4;
    let t2 = (t * t).round_out(wp);
    debug_assert!(*t2.hi() <= Dyadic::from_pow2_ratio(1, 3), "atanh series range");
    let tail_factor = Dyadic::from_pow2_ratio(37, 5); // 37/32 >= 8/7
    let mut pow = t.clone();
    let mut sum = t.clone();
    let mut j: u64 = 1;
    loop {
        pow = (&pow * &t2).round_out(wp);
        j += 2;
        sum = &sum + &div_by_uint(&pow, j, wp as u32);
        let next = &pow.abs().hi().clone() * &t2.hi().clone();
        let tail = &div_up(&next, &Dyadic::from_int(j as i64 + 2), wp as u32) * &tail_factor;
        if tail <= Dyadic::pow2(-(wp - 1)) {
            return sum.pad(wp - 1);
        }
        assert!(j < 100_000, "atanh series failed to converge");
    }
}

fn ln_point(x: &Dyadic, p: u32) -> DyadicInterval {
    debug_assert!(x.is_positive());
    let k = x.ilog2().unwrap();
    let u = x.mul_pow2(-k); // in [1, 2)
    let one = Dyadic::one();
    let num = DyadicInterval::point(&u - &one);
    let den = DyadicInterval::point(&u + &one);
    let t = div_enclosure(&num, &den, p + 6).expect("u+1 is positive");
    let ln_u = atanh_series(&t, p + 2).mul_pow2(1);
    if k == 0 {
        ln_u
    } else {
        &ln_u + &(&ln2_enclosure(p + 2) * &Dyadic::from_int(k))
    }
}

fn ln_point_auto(x: &Dyadic, n: u32) -> DyadicInterval {
    let mut p = n + GUARD;
    loop {
        let e = ln_point(x, p);
        if e.width_within(n) {
            return e;
        }
        p = p * 2 + 16;
        assert!(p < 1_000_000, "ln enclosure failed to tighten");
    }
}

/// Outward-rounded natural logarithm; the input must stay strictly positive.
/// Width is at most the propagated interval width plus `2^-n`.
pub fn ln_enclosure(x: &DyadicInterval, n: u32) -> Result<DyadicInterval> {
    if !x.lo().is_positive() {
        return Err(DyadicError::NonpositiveLn(x.lo().to_string()));
    }
    let lo = ln_point_auto(x.lo(), n + 1);
    if x.is_point() {
        return Ok(lo);
    }
    let hi = ln_point_auto(x.hi(), n + 1);
    Ok(DyadicInterval::raw(lo.lo().clone(), hi.hi().clone()))
}

/// Alternating series for atan(1/k); remainder bounded by the first omitted
/// term.
fn atan_inv_int(k: i64, p: u32) -> DyadicInterval {
    let wp = p as i64 + 6;
    let one = DyadicInterval::point(Dyadic::one());
    let kd = DyadicInterval::point(Dyadic::from_int(k));
    let t = div_enclosure(&one, &kd, wp as u32).expect("k is positive");
    let t2 = (&t * &t).round_out(wp);
    let mut pow = t.clone();
    let mut sum = t;
    let mut j: u64 = 1;
    let mut subtract = true;
    loop {
        pow = (&pow * &t2).round_out(wp);
        j += 2;
        let term = div_by_uint(&pow, j, wp as u32);
        sum = if subtract { &sum - &term } else { &sum + &term };
        subtract = !subtract;
        let next = div_up(&(&pow.abs().hi().clone() * &t2.hi().clone()), &Dyadic::from_int(j as i64 + 2), wp as u32);
        if next <= Dyadic::pow2(-(wp - 1)) {
            return sum.pad(wp - 1);
        }
        assert!(j < 100_000, "atan series failed to converge");
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Constant {
    Pi,
    Ln2,
    Sqrt2,
    E,
    InvSqrt2Pi,
}

static CONSTANTS: Lazy<Mutex<HashMap<(Constant, u32), DyadicInterval>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn cached(which: Constant, n: u32, compute: impl FnOnce() -> DyadicInterval) -> DyadicInterval {
    if let Some(v) = CONSTANTS.lock().unwrap().get(&(which, n)) {
        return v.clone();
    }
    let v = compute();
    CONSTANTS.lock().unwrap().insert((which, n), v.clone());
    v
}

/// Enclosure of pi of width at most `2^-n` (Machin's formula).
pub fn pi_enclosure(n: u32) -> DyadicInterval {
    cached(Constant::Pi, n, || {
        let mut p = n + GUARD;
        loop {
            let a = atan_inv_int(5, p).mul_pow2(4);
            let b = atan_inv_int(239, p).mul_pow2(2);
            let pi = &a - &b;
            if pi.width_within(n) {
                return pi;
            }
            p = p * 2 + 16;
        }
    })
}

/// Enclosure of ln 2 of width at most `2^-n` (2 atanh(1/3)).
pub fn ln2_enclosure(n: u32) -> DyadicInterval {
    cached(Constant::Ln2, n, || {
        let mut p = n + GUARD;
        loop {
            let one = DyadicInterval::point(Dyadic::one());
            let three = DyadicInterval::point(Dyadic::from_int(3));
            let t = div_enclosure(&one, &three, p + 6).expect("3 is positive");
            let v = atanh_series(&t, p).mul_pow2(1);
            if v.width_within(n) {
                return v;
            }
            p = p * 2 + 16;
        }
    })
}

pub fn sqrt2_enclosure(n: u32) -> DyadicInterval {
    cached(Constant::Sqrt2, n, || {
        sqrt_enclosure(&DyadicInterval::point(Dyadic::from_int(2)), n).expect("2 >= 0")
    })
}

pub fn e_enclosure(n: u32) -> DyadicInterval {
    cached(Constant::E, n, || exp_point_auto(&Dyadic::one(), n))
}

/// Enclosure of `1/sqrt(2 pi)` of width at most `2^-n`.
pub fn inv_sqrt_2pi_enclosure(n: u32) -> DyadicInterval {
    cached(Constant::InvSqrt2Pi, n, || {
        let mut p = n + GUARD;
        loop {
            let two_pi = pi_enclosure(p).mul_pow2(1);
            let root = sqrt_enclosure(&two_pi, p).expect("2 pi is positive");
            let one = DyadicInterval::point(Dyadic::one());
            let v = div_enclosure(&one, &root, p).expect("sqrt(2 pi) is positive");
            if v.width_within(n) {
                return v;
            }
            p = p * 2 + 16;
        }
    })
}

fn sin_series(z: &DyadicInterval, p: u32) -> DyadicInterval {
    // |z| <= 1; alternating with factorial decay, remainder <= first omitted term
    let wp = p as i64 + 4;
    let z2 = (z * z).round_out(wp);
    let mut term = z.clone();
    let mut sum = z.clone();
    let mut k: u64 = 0;
    loop {
        let denom = (2 * k + 2) * (2 * k + 3);
        term = div_by_uint(&(&term * &z2).round_out(wp), denom, wp as u32);
        k += 1;
        let bound = term.abs().hi().clone();
        if bound <= Dyadic::pow2(-(wp - 1)) {
            return sum.pad(wp - 1);
        }
        sum = if k % 2 == 1 { &sum - &term } else { &sum + &term };
        assert!(k < 10_000, "sin series failed to converge");
    }
}

fn cos_series(z: &DyadicInterval, p: u32) -> DyadicInterval {
    let wp = p as i64 + 4;
    let z2 = (z * z).round_out(wp);
    let mut term = DyadicInterval::point(Dyadic::one());
    let mut sum = term.clone();
    let mut k: u64 = 0;
    loop {
        let denom = (2 * k + 1) * (2 * k + 2);
        term = div_by_uint(&(&term * &z2).round_out(wp), denom, wp as u32);
        k += 1;
        let bound = term.abs().hi().clone();
        if bound <= Dyadic::pow2(-(wp - 1)) {
            return sum.pad(wp - 1);
        }
        sum = if k % 2 == 1 { &sum - &term } else { &sum + &term };
        assert!(k < 10_000, "cos series failed to converge");
    }
}

/// Enclosure of `sin(pi q)` for an exact dyadic `q`, width at most `2^-n`.
/// The range reduction is exact (mod 2 and the quarter-wave symmetries), so
/// values at integers and half-integers come out as exact points.
pub fn sin_pi(q: &Dyadic, n: u32) -> DyadicInterval {
    let half = Dyadic::from_pow2_ratio(1, 1);
    let quarter = Dyadic::from_pow2_ratio(1, 2);
    let one = Dyadic::one();
    // reduce mod 2 exactly
    let mut qr = q - &q.mul_pow2(-1).floor().mul_pow2(1);
    let mut negate = false;
    if qr >= one {
        qr = &qr - &one;
        negate = true;
    }
    if qr > half {
        qr = &one - &qr;
    }
    let use_cos = qr > quarter;
    let arg = if use_cos { &half - &qr } else { qr };
    if arg.is_zero() {
        let exact = if use_cos { DyadicInterval::point(one) } else { DyadicInterval::zero() };
        return if negate { -&exact } else { exact };
    }
    let mut p = n + GUARD;
    loop {
        let z = (&pi_enclosure(p) * &DyadicInterval::point(arg.clone())).round_out(p as i64 + 4);
        let v = if use_cos { cos_series(&z, p) } else { sin_series(&z, p) };
        if v.width_within(n) {
            return if negate { -&v } else { v };
        }
        p = p * 2 + 16;
        assert!(p < 1_000_000, "sin enclosure failed to tighten");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{parse_rational, rational_cmp_dyadic};
    use num_rational::BigRational;
    use std::cmp::Ordering;

    fn contains_rational(enc: &DyadicInterval, decimal: &str) -> bool {
        let r: BigRational = parse_rational(decimal).unwrap();
        rational_cmp_dyadic(&r, enc.lo()) == Ordering::Greater
            && rational_cmp_dyadic(&r, enc.hi()) == Ordering::Less
    }

    fn point(v: i64, pow: u32) -> DyadicInterval {
        DyadicInterval::point(Dyadic::from_pow2_ratio(v, pow))
    }

    #[test]
    fn division_brackets_one_third() {
        let a = Dyadic::one();
        let b = Dyadic::from_int(3);
        let lo = div_down(&a, &b, 10);
        let hi = div_up(&a, &b, 10);
        assert!(lo < hi);
        assert_eq!((&hi - &lo), Dyadic::pow2(-10));
        let third = parse_rational("1/3").unwrap();
        assert_eq!(rational_cmp_dyadic(&third, &lo), Ordering::Greater);
        assert_eq!(rational_cmp_dyadic(&third, &hi), Ordering::Less);
    }

    #[test]
    fn division_signs() {
        // -1/3 and division by a negative interval
        let lo = div_down(&Dyadic::from_int(-1), &Dyadic::from_int(3), 8);
        let hi = div_up(&Dyadic::from_int(-1), &Dyadic::from_int(3), 8);
        assert!(lo < hi);
        assert!(lo < Dyadic::from_pow2_ratio(-85, 8));
        let a = point(1, 0); // [1,1]
        let b = DyadicInterval::new(Dyadic::from_int(-4), Dyadic::from_int(-2)).unwrap();
        let q = div_enclosure(&a, &b, 12).unwrap();
        assert!(q.contains(&Dyadic::from_pow2_ratio(-1, 2)));
        assert!(q.contains(&Dyadic::from_pow2_ratio(-1, 1)));
        assert!(div_enclosure(&a, &DyadicInterval::new(Dyadic::from_int(-1), Dyadic::one()).unwrap(), 4).is_err());
    }

    #[test]
    fn sqrt_of_two() {
        let enc = sqrt_enclosure(&point(2, 0), 40).unwrap();
        assert!(enc.width_within(40));
        assert!(contains_rational(&enc, "1.41421356237309504880168872"));
        assert!(sqrt_enclosure(&point(-1, 0), 4).is_err());
        let z = sqrt_enclosure(&DyadicInterval::zero(), 16).unwrap();
        assert!(z.contains(&Dyadic::zero()));
        assert!(z.width_within(16));
    }

    #[test]
    fn exp_values() {
        let e1 = exp_enclosure(&point(1, 0), 40);
        assert!(e1.width_within(40));
        assert!(contains_rational(&e1, "2.71828182845904523536028747"));
        let em2 = exp_enclosure(&point(-2, 0), 40);
        assert!(contains_rational(&em2, "0.13533528323661269189399949"));
        let e0 = exp_enclosure(&DyadicInterval::zero(), 40);
        assert!(e0.contains(&Dyadic::one()));
        // a genuinely wide input propagates monotonically
        let wide = exp_enclosure(&DyadicInterval::new(Dyadic::zero(), Dyadic::one()).unwrap(), 16);
        assert!(wide.contains(&Dyadic::one()));
        assert!(contains_rational(&wide, "2.71828182845904523536028747"));
    }

    #[test]
    fn ln_values() {
        let l4 = ln_enclosure(&point(4, 0), 40).unwrap();
        assert!(l4.width_within(40));
        assert!(contains_rational(&l4, "1.38629436111989061883446424"));
        let l1 = ln_enclosure(&point(1, 0), 40).unwrap();
        assert!(l1.contains(&Dyadic::zero()));
        let lhalf = ln_enclosure(&point(1, 1), 40).unwrap();
        assert!(contains_rational(&lhalf, "-0.69314718055994530941723212"));
        assert!(ln_enclosure(&DyadicInterval::zero(), 4).is_err());
        assert!(ln_enclosure(&point(-1, 0), 4).is_err());
    }

    #[test]
    fn constants() {
        assert!(contains_rational(&pi_enclosure(48), "3.14159265358979323846264338"));
        assert!(pi_enclosure(48).width_within(48));
        assert!(contains_rational(&ln2_enclosure(48), "0.69314718055994530941723212"));
        assert!(contains_rational(&sqrt2_enclosure(48), "1.41421356237309504880168872"));
        assert!(contains_rational(&e_enclosure(48), "2.71828182845904523536028747"));
        assert!(contains_rational(&inv_sqrt_2pi_enclosure(48), "0.39894228040143267793994606"));
    }

    #[test]
    fn sine_at_dyadic_multiples_of_pi() {
        // exact points at integers and half-integers
        assert_eq!(sin_pi(&Dyadic::zero(), 20), DyadicInterval::zero());
        assert_eq!(sin_pi(&Dyadic::from_int(1), 20), DyadicInterval::zero());
        let top = sin_pi(&Dyadic::from_pow2_ratio(1, 1), 20);
        assert!(top.is_point() && *top.lo() == Dyadic::one());
        let bottom = sin_pi(&Dyadic::from_pow2_ratio(3, 1), 20);
        assert!(bottom.is_point() && *bottom.lo() == -Dyadic::one());
        // sin(pi/4) = sqrt(2)/2
        let s = sin_pi(&Dyadic::from_pow2_ratio(1, 2), 40);
        assert!(contains_rational(&s, "0.70710678118654752440084436"));
        // sin(7 pi / 8) = sin(pi/8)
        let s78 = sin_pi(&Dyadic::from_pow2_ratio(7, 3), 40);
        assert!(contains_rational(&s78, "0.38268343236508977172845998"));
        // negative and beyond one period: sin(5 pi / 4) = -sqrt(2)/2
        let s54 = sin_pi(&Dyadic::from_pow2_ratio(5, 2), 40);
        assert!(contains_rational(&s54, "-0.70710678118654752440084436"));
        let sm = sin_pi(&Dyadic::from_pow2_ratio(-1, 2), 40);
        assert!(contains_rational(&sm, "-0.70710678118654752440084436"));
    }

    #[test]
    fn widths_shrink_along_the_ladder() {
        let x = point(3, 1); // 1.5
        for f in [
            (|v: &DyadicInterval, n: u32| sqrt_enclosure(v, n).unwrap()) as fn(&DyadicInterval, u32) -> DyadicInterval,
            |v, n| ln_enclosure(v, n).unwrap(),
            |v, n| exp_enclosure(v, n),
        ] {
            let mut prev: Option<Dyadic> = None;
            for n in [4u32, 8, 16, 32] {
                let w = f(&x, n).width();
                assert!(w <= Dyadic::pow2(-(n as i64)));
                if let Some(p) = prev {
                    assert!(w <= p, "width grew between ladder rungs");
                }
                prev = Some(w);
            }
        }
    }
}
