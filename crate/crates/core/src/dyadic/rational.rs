//! Exact rational helpers: parsing number strings from external interfaces
//! (weight tables, CDF tables, Dirac points) and bridging rationals to
//! dyadic enclosures.

use super::{Dyadic, DyadicError, DyadicInterval};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// Parse `"p/q"`, `"m*2^e"`, a decimal string like `"3.25"`, or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational, DyadicError> {
    let s = s.trim();
    let err = || DyadicError::Parse(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    if s.contains("*2^") {
        let d = Dyadic::parse(s)?;
        return Ok(dyadic_to_rational(&d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| err())?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let num = &int * &den + if negative { -frac } else { frac };
        return Ok(BigRational::new(num, den));
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

pub fn dyadic_to_rational(d: &Dyadic) -> BigRational {
    let e = d.exponent();
    if e >= 0 {
        BigRational::from_integer(d.mantissa() << e as u64)
    } else {
        BigRational::new(d.mantissa().clone(), BigInt::from(1) << (-e) as u64)
    }
}

/// Tightest enclosure of `r` with endpoints on the grid `2^-bits`.
/// A point interval exactly when `r` is dyadic on that grid.
pub fn rational_to_enclosure(r: &BigRational, bits: u32) -> DyadicInterval {
    let scaled_num = r.numer() << bits as u64;
    let lo = scaled_num.div_floor(r.denom());
    let hi = scaled_num.div_ceil(r.denom());
    DyadicInterval::raw(
        Dyadic::new(lo, -(bits as i64)),
        Dyadic::new(hi, -(bits as i64)),
    )
}

/// Exact comparison between a rational and a dyadic (cross-multiplied).
pub fn rational_cmp_dyadic(r: &BigRational, d: &Dyadic) -> Ordering {
    let e = d.exponent();
    // compare r.num / r.den with m * 2^e
    let (lhs, rhs) = if e >= 0 {
        (r.numer().clone(), (d.mantissa() << e as u64) * r.denom())
    } else {
        (r.numer() << (-e) as u64, d.mantissa() * r.denom())
    };
    debug_assert!(r.denom().is_positive());
    lhs.cmp(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn parses_fraction_decimal_dyadic_integer() {
        assert_eq!(parse_rational("1/3").unwrap(), BigRational::new(1.into(), 3.into()));
        assert_eq!(parse_rational("3.25").unwrap(), BigRational::new(13.into(), 4.into()));
        assert_eq!(parse_rational("-0.5").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("7*2^-2").unwrap(), BigRational::new(7.into(), 4.into()));
        assert_eq!(parse_rational("4").unwrap(), BigRational::from_integer(4.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn enclosure_brackets_thirds() {
        let third = BigRational::new(1.into(), 3.into());
        let enc = rational_to_enclosure(&third, 8);
        assert!(enc.lo() < enc.hi());
        assert_eq!(enc.width(), Dyadic::pow2(-8));
        assert_eq!(rational_cmp_dyadic(&third, enc.lo()), Ordering::Greater);
        assert_eq!(rational_cmp_dyadic(&third, enc.hi()), Ordering::Less);
    }

    #[test]
    fn enclosure_of_dyadic_is_exact() {
        let q = BigRational::new(3.into(), 8.into());
        let enc = rational_to_enclosure(&q, 8);
        assert!(enc.is_point());
        assert_eq!(*enc.lo(), Dyadic::from_pow2_ratio(3, 3));
    }

    #[test]
    fn cmp_dyadic() {
        let half = BigRational::new(BigInt::one(), 2.into());
        assert_eq!(rational_cmp_dyadic(&half, &Dyadic::from_pow2_ratio(1, 1)), Ordering::Equal);
        assert_eq!(rational_cmp_dyadic(&half, &Dyadic::from_pow2_ratio(3, 2)), Ordering::Less);
        assert_eq!(
            rational_cmp_dyadic(&BigRational::new((-1).into(), 3.into()), &Dyadic::zero()),
            Ordering::Less
        );
    }

    #[test]
    fn roundtrip_dyadic_rational() {
        let d = Dyadic::from_pow2_ratio(-13, 5);
        let r = dyadic_to_rational(&d);
        let enc = rational_to_enclosure(&r, 10);
        assert!(enc.is_point());
        assert_eq!(*enc.lo(), d);
    }
}
