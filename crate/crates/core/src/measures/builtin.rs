//! The closed-form distributions: uniform on (0,1), a point mass at a
//! rational, and the middle-thirds (Cantor) staircase.

use super::{check_unit_interior, MeasureError, SemiInverseCdf};
use crate::dyadic::rational::rational_to_enclosure;
use crate::dyadic::{Dyadic, DyadicInterval};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Uniform distribution on the unit interval; both inverses are the
/// identity.
pub struct Uniform;

impl SemiInverseCdf for Uniform {
    fn id(&self) -> &str {
        "uniform"
    }

    fn eval_lower(&self, t: &DyadicInterval, _n: u32) -> Result<DyadicInterval, MeasureError> {
        check_unit_interior(t)?;
        Ok(t.clone())
    }

    fn eval_upper(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        self.eval_lower(t, n)
    }

    fn support_hint(&self) -> Option<DyadicInterval> {
        Some(DyadicInterval::new(Dyadic::zero(), Dyadic::one()).unwrap())
    }
}

/// Point mass at a rational; both inverses are constant.
pub struct Dirac {
    point: BigRational,
    id: String,
}

impl Dirac {
    pub fn new(point: BigRational) -> Self {
        let id = format!("dirac:{point}");
        Dirac { point, id }
    }

    pub fn point(&self) -> &BigRational {
        &self.point
    }
}

impl SemiInverseCdf for Dirac {
    fn id(&self) -> &str {
        &self.id
    }

    fn eval_lower(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        check_unit_interior(t)?;
        Ok(rational_to_enclosure(&self.point, n + 1))
    }

    fn eval_upper(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        self.eval_lower(t, n)
    }

    fn support_hint(&self) -> Option<DyadicInterval> {
        Some(rational_to_enclosure(&self.point, 64))
    }
}

/// The middle-thirds staircase: the CDF of the uniform measure on the
/// standard Cantor set. Its inverses map a quantile's binary digits to
/// ternary digits, doubled. At a dyadic quantile the two inverses bracket a
/// removed middle-third gap: the lower one follows the expansion ending
/// `0111...`, the upper one the expansion ending `1000...`.
pub struct Cantor;

/// `inf { x : F(x) >= t }` for dyadic `t` in (0,1), exactly.
fn staircase_lower(t: &Dyadic) -> BigRational {
    let digits = binary_digits(t);
    let k = digits.len();
    // all digits but the last (which is 1 in canonical form), doubled,
    // read in base 3, then the tail 0111... contributes exactly 3^-k
    let mut num = BigInt::from(0u32);
    for &b in &digits[..k - 1] {
        num = num * 3 + 2 * u32::from(b);
    }
    num = num * 3 + 1u32;
    BigRational::new(num, BigInt::from(3u32).pow(k as u32))
}

/// `inf { x : F(x) > t }` for dyadic `t` in (0,1), exactly.
fn staircase_upper(t: &Dyadic) -> BigRational {
    let digits = binary_digits(t);
    let mut num = BigInt::from(0u32);
    for &b in &digits {
        num = num * 3 + 2 * u32::from(b);
    }
    BigRational::new(num, BigInt::from(3u32).pow(digits.len() as u32))
}

/// The (terminating) binary expansion of a dyadic in (0,1), most significant
/// first; the last digit is always 1.
fn binary_digits(t: &Dyadic) -> Vec<bool> {
    debug_assert!(t.is_positive() && *t < Dyadic::one());
    let k = (-t.exponent()) as usize;
    let m = t.mantissa();
    (0..k).map(|j| m.bit((k - 1 - j) as u64)).collect()
}

impl SemiInverseCdf for Cantor {
    fn id(&self) -> &str {
        "cantor"
    }

    fn eval_lower(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        check_unit_interior(t)?;
        let lo = rational_to_enclosure(&staircase_lower(t.lo()), n + 1);
        let hi = rational_to_enclosure(&staircase_lower(t.hi()), n + 1);
        Ok(lo.hull(&hi))
    }

    fn eval_upper(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        check_unit_interior(t)?;
        let lo = rational_to_enclosure(&staircase_upper(t.lo()), n + 1);
        let hi = rational_to_enclosure(&staircase_upper(t.hi()), n + 1);
        Ok(lo.hull(&hi))
    }

    fn support_hint(&self) -> Option<DyadicInterval> {
        Some(DyadicInterval::new(Dyadic::zero(), Dyadic::one()).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::rational::parse_rational;
    use crate::measures::test_support::assert_encloses;

    fn point(num: i64, pow: u32) -> DyadicInterval {
        DyadicInterval::point(Dyadic::from_pow2_ratio(num, pow))
    }

    #[test]
    fn uniform_is_identity() {
        let t = DyadicInterval::new(
            Dyadic::from_pow2_ratio(1, 2),
            Dyadic::from_pow2_ratio(3, 2),
        )
        .unwrap();
        assert_eq!(Uniform.eval_lower(&t, 10).unwrap(), t);
        assert!(Uniform.eval_lower(&DyadicInterval::point(Dyadic::zero()), 10).is_err());
        assert!(Uniform
            .eval_upper(&DyadicInterval::new(Dyadic::from_pow2_ratio(1, 1), Dyadic::one()).unwrap(), 10)
            .is_err());
    }

    #[test]
    fn dirac_is_constant() {
        let d = Dirac::new(parse_rational("-7/5").unwrap());
        assert_eq!(d.id(), "dirac:-7/5");
        for t in [point(1, 4), point(13, 4)] {
            let lo = d.eval_lower(&t, 30).unwrap();
            assert_encloses(&lo, "-7/5");
            assert!(lo.width_within(30));
            assert_eq!(lo, d.eval_upper(&t, 30).unwrap());
        }
    }

    #[test]
    fn staircase_gap_at_one_half() {
        let t = point(1, 1);
        let lo = Cantor.eval_lower(&t, 50).unwrap();
        let hi = Cantor.eval_upper(&t, 50).unwrap();
        assert_encloses(&lo, "1/3");
        assert_encloses(&hi, "2/3");
        assert!(lo.width_within(50));
        assert!(hi.width_within(50));
    }

    #[test]
    fn staircase_known_values() {
        // t = 1/4 = 0.01 binary: lower follows 0.00111... -> ternary
        // 0.00222... = 1/9; upper follows 0.01 -> ternary 0.02 = 2/9
        let t = point(1, 2);
        assert_encloses(&Cantor.eval_lower(&t, 60).unwrap(), "1/9");
        assert_encloses(&Cantor.eval_upper(&t, 60).unwrap(), "2/9");
        // t = 3/4 = 0.11 binary: lower 0.10111... -> 0.20222... = 7/9;
        // upper 0.11 -> 0.22 = 8/9
        let t = point(3, 2);
        assert_encloses(&Cantor.eval_lower(&t, 60).unwrap(), "7/9");
        assert_encloses(&Cantor.eval_upper(&t, 60).unwrap(), "8/9");
        // a narrow quantile interval still yields ordered inverses
        let t = DyadicInterval::new(
            Dyadic::from_pow2_ratio(341, 10),
            Dyadic::from_pow2_ratio(342, 10),
        )
        .unwrap();
        let lo = Cantor.eval_lower(&t, 40).unwrap();
        let hi = Cantor.eval_upper(&t, 40).unwrap();
        assert!(lo.lo() <= hi.hi());
    }

    #[test]
    fn staircase_inverses_are_monotone_on_a_grid() {
        let mut prev_lo: Option<DyadicInterval> = None;
        let mut prev_hi: Option<DyadicInterval> = None;
        for k in 1..64 {
            let t = point(k, 6);
            let lo = Cantor.eval_lower(&t, 40).unwrap();
            let hi = Cantor.eval_upper(&t, 40).unwrap();
            // lower inverse never exceeds upper inverse at the same point
            assert!(lo.lo() <= hi.hi());
            if let (Some(pl), Some(ph)) = (&prev_lo, &prev_hi) {
                assert!(pl.lo() <= lo.hi(), "lower inverse decreased at k={k}");
                assert!(ph.lo() <= hi.hi(), "upper inverse decreased at k={k}");
            }
            prev_lo = Some(lo);
            prev_hi = Some(hi);
        }
    }
}
