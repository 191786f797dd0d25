//! Distributions presented through one-sided inverses of their CDFs, and the
//! inverse-transform sampler that turns coin flips into certified real
//! enclosures.
//!
//! For a CDF `F`, the lower inverse is `F⁻(t) = inf { x : F(x) >= t }` and
//! the upper inverse is `F⁺(t) = inf { x : F(x) > t }`. They agree wherever
//! `F` is continuous and strictly increasing; they differ exactly across the
//! flat stretches of `F`, which is what lets a sampler detect that a drawn
//! quantile has landed in a gap of the support.

pub mod builtin;
pub mod gaussian;
pub mod registry;
pub mod table;

use crate::bitsource::{rho_b_enclosure, BitSourceError, BitStream, Word};
use crate::dyadic::{Dyadic, DyadicError, DyadicInterval};
use std::sync::Arc;
use thiserror::Error;

pub use builtin::{Cantor, Dirac, Uniform};
pub use gaussian::Gaussian;
pub use registry::DistributionRegistry;
pub use table::TableCdf;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Bits(#[from] BitSourceError),
    #[error(transparent)]
    Numeric(#[from] DyadicError),
    #[error("quantile argument {0} is not strictly inside (0,1)")]
    ArgumentOutOfRange(String),
    #[error("quantile {0} is within 2^-100 of 0 or 1; the inverse is not tabulated that far out")]
    ExtremeQuantile(String),
    #[error("no enclosure of width 2^-{target} within {max_bits} input bits")]
    PrecisionCapExhausted { target: u32, max_bits: u64 },
    #[error("inverse search failed to converge to width 2^-{0}")]
    InverseNonconvergence(u32),
    #[error("invalid distribution table: {0}")]
    InvalidTable(String),
    #[error("cannot read table: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown distribution {0:?}")]
    UnknownDistribution(String),
    #[error("invalid distribution spec {0:?}: {1}")]
    InvalidSpec(String, String),
}

/// A probability distribution on the reals, presented through certified
/// evaluation of the one-sided inverses of its CDF.
///
/// Both methods receive a closed dyadic enclosure of the quantile `t`
/// (required to lie strictly inside `(0,1)`) and must return a dyadic
/// interval containing every value the requested inverse takes on it, wider
/// than the exact image by at most `2^-n`.
pub trait SemiInverseCdf: Send + Sync {
    fn id(&self) -> &str;
    fn eval_lower(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError>;
    fn eval_upper(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError>;
    /// An interval the distribution never leaves, when it has a bounded one.
    fn support_hint(&self) -> Option<DyadicInterval> {
        None
    }
}

pub(crate) fn check_unit_interior(t: &DyadicInterval) -> Result<(), MeasureError> {
    if t.lo().is_positive() && *t.hi() < Dyadic::one() {
        Ok(())
    } else {
        Err(MeasureError::ArgumentOutOfRange(t.to_decimal_string()))
    }
}

/// A certified draw: an interval guaranteed to contain the sampled real.
#[derive(Debug, Clone)]
pub struct RealSample {
    pub value: DyadicInterval,
    /// The guaranteed width bound, as `2^-precision`.
    pub precision: u32,
    /// Coin flips consumed to produce this draw.
    pub bits_used: u64,
}

/// A draw that can be revisited. The coin flips backing it are kept, and
/// asking for a narrower enclosure extends them; successive enclosures are
/// intersected, so refinement only ever shrinks. A strict comparison made
/// against an earlier enclosure is therefore never contradicted by a later
/// one.
pub struct RefinableSample {
    dist: Arc<dyn SemiInverseCdf>,
    prefix: Word,
    cached: Option<DyadicInterval>,
    bits_used: u64,
}

impl RefinableSample {
    pub fn new(dist: Arc<dyn SemiInverseCdf>) -> Self {
        RefinableSample { dist, prefix: Word::empty(), cached: None, bits_used: 0 }
    }

    pub fn current(&self) -> Option<&DyadicInterval> {
        self.cached.as_ref()
    }

    pub fn bits_used(&self) -> u64 {
        self.bits_used
    }

    /// Narrow the enclosure to width at most `2^-n`, drawing further bits
    /// from `stream` as needed. `max_bits` caps the total flips backing this
    /// draw; distributions whose inverse jumps exactly at an attainable
    /// dyadic quantile can otherwise stall forever on adversarial input, and
    /// hitting the cap is reported rather than papered over.
    pub fn refine(
        &mut self,
        stream: &mut BitStream,
        n: u32,
        max_bits: u64,
    ) -> Result<DyadicInterval, MeasureError> {
        if let Some(c) = &self.cached {
            if c.width_within(n) {
                return Ok(c.clone());
            }
        }
        loop {
            let interior = {
                let t = rho_b_enclosure(&self.prefix);
                t.lo().is_positive() && *t.hi() < Dyadic::one()
            };
            if interior {
                let t = rho_b_enclosure(&self.prefix);
                let lo = self.dist.eval_lower(&t, n + 2)?;
                let hi = self.dist.eval_upper(&t, n + 2)?;
                let mut value = lo.hull(&hi);
                if let Some(c) = &self.cached {
                    value = c
                        .intersect(&value)
                        .expect("enclosures of one draw always intersect");
                }
                if let Some(s) = self.dist.support_hint() {
                    if let Some(v) = value.intersect(&s) {
                        value = v;
                    }
                }
                self.cached = Some(value.clone());
                if value.width_within(n) {
                    return Ok(value);
                }
                // estimate how many extra flips the remaining gap needs,
                // assuming roughly linear contraction
                let deficit = value
                    .width()
                    .ilog2()
                    .map(|k| (k + i64::from(n) + 1).clamp(1, 64) as u64)
                    .unwrap_or(1);
                for _ in 0..deficit {
                    if self.prefix.len() as u64 >= max_bits {
                        return Err(MeasureError::PrecisionCapExhausted { target: n, max_bits });
                    }
                    self.push_bit(stream)?;
                }
            } else {
                if self.prefix.len() as u64 >= max_bits {
                    return Err(MeasureError::PrecisionCapExhausted { target: n, max_bits });
                }
                self.push_bit(stream)?;
            }
        }
    }

    fn push_bit(&mut self, stream: &mut BitStream) -> Result<(), BitSourceError> {
        let b = stream.next_bit()?;
        self.prefix.push(b);
        self.bits_used += 1;
        Ok(())
    }
}

/// Inverse-transform sampling: draw coin flips, read them as a shrinking
/// dyadic enclosure of a uniform quantile, and push that through the
/// distribution's inverse pair until the image is narrower than `2^-n`.
pub fn sample_real(
    dist: &Arc<dyn SemiInverseCdf>,
    stream: &mut BitStream,
    n: u32,
    max_bits: u64,
) -> Result<RealSample, MeasureError> {
    let mut draw = RefinableSample::new(dist.clone());
    let value = draw.refine(stream, n, max_bits)?;
    Ok(RealSample { value, precision: n, bits_used: draw.bits_used() })
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::dyadic::rational::{parse_rational, rational_cmp_dyadic};
    use crate::dyadic::DyadicInterval;
    use std::cmp::Ordering;

    /// Assert that `iv` contains the exactly-parsed rational `value`.
    pub fn assert_encloses(iv: &DyadicInterval, value: &str) {
        let v = parse_rational(value).unwrap();
        assert!(
            rational_cmp_dyadic(&v, iv.lo()) != Ordering::Less
                && rational_cmp_dyadic(&v, iv.hi()) != Ordering::Greater,
            "{} does not enclose {value}",
            iv.to_decimal_string(),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::assert_encloses;
    use super::*;
    use crate::bitsource::BitStream;

    #[test]
    fn uniform_sampling_hits_requested_width() {
        let dist: Arc<dyn SemiInverseCdf> = Arc::new(Uniform);
        let mut stream = BitStream::from_seed(11);
        for n in [4u32, 8, 16, 32] {
            let s = sample_real(&dist, &mut stream, n, 4 * u64::from(n) + 64).unwrap();
            assert!(s.value.width_within(n));
            assert!(!s.value.lo().is_negative());
            assert!(*s.value.hi() <= Dyadic::one());
            assert!(s.bits_used <= u64::from(n) + 16, "bits {}", s.bits_used);
        }
    }

    #[test]
    fn dirac_sample_contains_the_atom() {
        let dist: Arc<dyn SemiInverseCdf> =
            Arc::new(Dirac::new(crate::dyadic::rational::parse_rational("1/3").unwrap()));
        let mut stream = BitStream::from_seed(3);
        let s = sample_real(&dist, &mut stream, 40, 224).unwrap();
        assert_encloses(&s.value, "1/3");
        assert!(s.value.width_within(40));
        // only the interior check plus slack is ever needed
        assert!(s.bits_used <= 16, "bits {}", s.bits_used);
    }

    #[test]
    fn refinement_is_nested() {
        let dist: Arc<dyn SemiInverseCdf> = Arc::new(Gaussian);
        let mut stream = BitStream::from_seed(17);
        let mut draw = RefinableSample::new(dist);
        let coarse = draw.refine(&mut stream, 4, 512).unwrap();
        let fine = draw.refine(&mut stream, 16, 512).unwrap();
        let finer = draw.refine(&mut stream, 24, 512).unwrap();
        assert!(coarse.contains_interval(&fine));
        assert!(fine.contains_interval(&finer));
        assert!(finer.width_within(24));
    }

    #[test]
    fn cap_exhaustion_is_reported() {
        // adversarial input 1000... encodes the quantile exactly 1/2, where
        // the middle-thirds staircase has a genuine gap to resolve
        let dist: Arc<dyn SemiInverseCdf> = Arc::new(Cantor);
        let mut ones_then_zeros = vec![true];
        ones_then_zeros.extend(std::iter::repeat(false).take(400));
        let mut stream = BitStream::from_bits(ones_then_zeros);
        let err = sample_real(&dist, &mut stream, 8, 300).unwrap_err();
        assert!(matches!(err, MeasureError::PrecisionCapExhausted { .. }), "{err}");
    }
}
