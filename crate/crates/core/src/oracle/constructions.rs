//! Reference constructions of Brownian motion on [0,1].
//!
//! Three classical constructions — the triangular (Faber–Schauder) series,
//! the sine series, and rescaled fair random walks — drawing their Gaussian
//! or coin-flip inputs from the same bit-stream API as the midpoint sampler
//! they cross-check, but through entirely separate evaluation code. The
//! first two return interval enclosures of truncated series; the walk is
//! exact dyadic arithmetic.

use super::OracleError;
use crate::bitsource::BitStream;
use crate::dyadic::transcendental::{
    div_enclosure, pi_enclosure, sin_pi, sqrt2_enclosure, sqrt_enclosure,
};
use crate::dyadic::{rational_to_enclosure, Dyadic, DyadicInterval};
use crate::measures::{sample_real, Gaussian, SemiInverseCdf};
use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::collections::HashMap;
use std::sync::Arc;

/// Triangular bump `j` at refinement level `n ≥ 1`: supported on
/// [(2j−2)·2^−n, 2j·2^−n] and rising linearly to 2^((n−1)/2)·2^−n at the
/// center. Within one level the supports of distinct bumps meet only at
/// endpoints, where every bump is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchauderBasis {
    level: u32,
    index: u64,
}

impl SchauderBasis {
    pub fn new(level: u32, index: u64) -> Result<Self, OracleError> {
        if level == 0 || level > 62 {
            return Err(OracleError::InvalidInput(format!(
                "basis level must be in 1..=62, got {level}"
            )));
        }
        let max = 1u64 << (level - 1);
        if index == 0 || index > max {
            return Err(OracleError::InvalidInput(format!(
                "basis index must be in 1..={max} at level {level}, got {index}"
            )));
        }
        Ok(SchauderBasis { level, index })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// The closed support [(2j−2)·2^−n, 2j·2^−n].
    pub fn support(&self) -> (Dyadic, Dyadic) {
        let e = -i64::from(self.level);
        (
            Dyadic::new(BigInt::from(2 * self.index - 2), e),
            Dyadic::new(BigInt::from(2 * self.index), e),
        )
    }

    /// The center (2j−1)·2^−n, where the bump attains 2^((n−1)/2)·2^−n.
    pub fn center(&self) -> Dyadic {
        Dyadic::new(BigInt::from(2 * self.index - 1), -i64::from(self.level))
    }

    /// Evaluate at a dyadic point. Outside the open support the value is
    /// exactly zero (no rounding), which is what makes truncated series
    /// evaluation on coarse grids independent of the truncation level.
    pub fn eval(&self, t: &Dyadic, p: u32) -> DyadicInterval {
        let (l, r) = self.support();
        if *t <= l || *t >= r {
            return DyadicInterval::zero();
        }
        let left = t - &l;
        let right = &r - t;
        let d = if left <= right { left } else { right };
        // the slope is 2^((n−1)/2): an exact power of two for odd n,
        // otherwise √2·2^(n/2−1)
        if self.level % 2 == 1 {
            DyadicInterval::point(d.mul_pow2((i64::from(self.level) - 1) / 2))
        } else {
            let s = sqrt2_enclosure(p);
            &s * &DyadicInterval::point(d.mul_pow2(i64::from(self.level) / 2 - 1))
        }
    }
}

/// Standard-normal coefficients drawn through the certified quantile, keyed
/// by slot so that a coefficient's value depends only on its position, never
/// on how many other coefficients a particular truncation needs.
struct CoeffPool {
    root: BitStream,
    gauss: Arc<dyn SemiInverseCdf>,
    prec: u32,
    cache: HashMap<u64, DyadicInterval>,
}

impl CoeffPool {
    fn new(stream: &mut BitStream, prec: u32) -> Result<Self, OracleError> {
        // substreams are keyed, not split: burn a fresh 64-bit key so that
        // repeated calls on the same parent stream decorrelate
        let mut key: u64 = 0;
        for _ in 0..64 {
            key = (key << 1) | u64::from(stream.next_bit()?);
        }
        Ok(CoeffPool {
            root: stream.substream(key),
            gauss: Arc::new(Gaussian),
            prec,
            cache: HashMap::new(),
        })
    }

    fn get(&mut self, slot: u64) -> Result<DyadicInterval, OracleError> {
        if let Some(v) = self.cache.get(&slot) {
            return Ok(v.clone());
        }
        let mut s = self.root.substream(slot);
        let v = sample_real(&self.gauss, &mut s, self.prec, 1 << 16)?.value;
        self.cache.insert(slot, v.clone());
        Ok(v)
    }
}

fn check_unit_times(ts: &[Dyadic]) -> Result<(), OracleError> {
    let zero = Dyadic::zero();
    let one = Dyadic::one();
    for t in ts {
        if *t < zero || *t > one {
            return Err(OracleError::InvalidInput(format!(
                "time {t} outside [0,1]"
            )));
        }
    }
    Ok(())
}

/// Integer value of a nonnegative integer dyadic, if it fits.
fn dyadic_to_u64(d: &Dyadic) -> Option<u64> {
    if d.exponent() < 0 || d.is_negative() {
        return None;
    }
    (d.mantissa().clone() << (d.exponent() as usize)).to_u64()
}

/// Truncated triangular series W^N(t) = R_0·t + Σ_{m=1}^{N} Σ_j R_{m,j}·φ_{m,j}(t)
/// with independent standard-normal coefficients.
///
/// On the grid of multiples of 2^−n every level above n vanishes
/// identically, so for N ≥ n the truncation is exact there: deepening N
/// re-evaluates to bit-identical enclosures. Coefficients are keyed by slot
/// (R_0 ↦ 0; level m bump j ↦ 2^(m−1)+j−1) and drawn only when some
/// requested time lies inside the bump's support.
pub fn levy_ciesielski(
    levels: u32,
    stream: &mut BitStream,
    ts: &[Dyadic],
    n: u32,
) -> Result<Vec<DyadicInterval>, OracleError> {
    check_unit_times(ts)?;
    if levels > 40 {
        return Err(OracleError::InvalidInput(format!(
            "series level {levels} too deep"
        )));
    }
    let mut pool = CoeffPool::new(stream, n + 8)?;
    let slope_p = n + 20;
    let mut out = Vec::with_capacity(ts.len());
    for t in ts {
        let r0 = pool.get(0)?;
        let mut acc = &r0 * &DyadicInterval::point(t.clone());
        for m in 1..=levels {
            // at even multiples of 2^−m every level-m bump vanishes
            let u = t.mul_pow2(i64::from(m) - 1);
            if u.exponent() >= 0 {
                continue;
            }
            let j = dyadic_to_u64(&u.floor()).expect("⌊t·2^(m−1)⌋ fits") + 1;
            let basis = SchauderBasis::new(m, j).expect("index derived from t ∈ [0,1]");
            let phi = basis.eval(t, slope_p);
            let slot = (1u64 << (m - 1)) + (j - 1);
            let r = pool.get(slot)?;
            acc = &acc + &(&r * &phi);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Truncated sine series W^N(t) = √2 Σ_{k=1}^{N} R_k·sin((k−1/2)πt)/((k−1/2)π)
/// with independent standard-normal coefficients R_k keyed by k.
pub fn karhunen_loeve(
    terms: u64,
    stream: &mut BitStream,
    ts: &[Dyadic],
    n: u32,
) -> Result<Vec<DyadicInterval>, OracleError> {
    check_unit_times(ts)?;
    if terms == 0 || terms > 1 << 20 {
        return Err(OracleError::InvalidInput(format!(
            "series length must be in 1..=2^20, got {terms}"
        )));
    }
    let mut pool = CoeffPool::new(stream, n + 8)?;
    let p = n + 16;
    let two_sqrt2 = sqrt2_enclosure(p).mul_pow2(1);
    let pi = pi_enclosure(p);
    let mut out = Vec::with_capacity(ts.len());
    for t in ts {
        if t.is_zero() {
            out.push(DyadicInterval::zero());
            continue;
        }
        let mut acc = DyadicInterval::zero();
        for k in 1..=terms {
            let r = pool.get(k)?;
            let odd = Dyadic::new(BigInt::from(2 * k - 1), 0);
            let arg = (t * &odd).mul_pow2(-1);
            let s = sin_pi(&arg, p);
            let denom = &pi * &DyadicInterval::point(odd);
            let factor = div_enclosure(&two_sqrt2, &denom, p).expect("(2k−1)π > 0");
            acc = &acc + &(&(&r * &s) * &factor);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Rescaled fair random walk W^N(t) = S_⌊Nt⌋/√N with independent ±1 steps
/// read directly from the stream (bit 1 ↦ +1).
///
/// Values are exact dyadics whenever √N is a power of two (N = 4, 16, 64,
/// …); any other scaling rounds the exact rational or irrational value to
/// 64 fractional bits, far below statistical resolution.
pub fn donsker(steps: u64, stream: &mut BitStream, ts: &[Dyadic]) -> Result<Vec<Dyadic>, OracleError> {
    check_unit_times(ts)?;
    if steps == 0 {
        return Err(OracleError::InvalidInput("need at least one step".to_string()));
    }
    let n_big = Dyadic::new(BigInt::from(steps), 0);
    let mut idx: Vec<(usize, u64)> = ts
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let k = dyadic_to_u64(&(t * &n_big).floor()).expect("⌊N·t⌋ ≤ N fits");
            (i, k)
        })
        .collect();
    idx.sort_by_key(|&(_, k)| k);
    let mut sums = vec![0i64; ts.len()];
    let mut s: i64 = 0;
    let mut walked: u64 = 0;
    for &(slot, k) in &idx {
        while walked < k {
            s += if stream.next_bit()? { 1 } else { -1 };
            walked += 1;
        }
        sums[slot] = s;
    }
    let root = steps.sqrt();
    let out = sums
        .iter()
        .map(|&sk| {
            if root * root == steps {
                // exact rational S/√N; exact dyadic when the reduced
                // denominator is a power of two
                let r = BigRational::new(BigInt::from(sk), BigInt::from(root));
                rational_to_enclosure(&r, 64).midpoint()
            } else {
                let num = DyadicInterval::point(Dyadic::from_int(sk));
                let den = sqrt_enclosure(&DyadicInterval::point(n_big.clone()), 80)
                    .expect("step count is positive");
                div_enclosure(&num, &den, 80)
                    .expect("√N > 0")
                    .midpoint()
            }
        })
        .collect();
    Ok(out)
}

/// A reference construction selectable by name: produces grid enclosures of
/// one path per call.
pub trait PathConstruction: Send + Sync {
    fn id(&self) -> &str;

    /// `order` is the construction's own size knob: truncation level for the
    /// triangular series, series length for the sine series, step count for
    /// the walk.
    fn sample(
        &self,
        order: u64,
        stream: &mut BitStream,
        ts: &[Dyadic],
        n: u32,
    ) -> Result<Vec<DyadicInterval>, OracleError>;
}

pub struct SchauderConstruction;

impl PathConstruction for SchauderConstruction {
    fn id(&self) -> &str {
        "schauder"
    }

    fn sample(
        &self,
        order: u64,
        stream: &mut BitStream,
        ts: &[Dyadic],
        n: u32,
    ) -> Result<Vec<DyadicInterval>, OracleError> {
        let levels = u32::try_from(order)
            .map_err(|_| OracleError::InvalidInput(format!("level {order} too deep")))?;
        levy_ciesielski(levels, stream, ts, n)
    }
}

pub struct SineSeriesConstruction;

impl PathConstruction for SineSeriesConstruction {
    fn id(&self) -> &str {
        "kl"
    }

    fn sample(
        &self,
        order: u64,
        stream: &mut BitStream,
        ts: &[Dyadic],
        n: u32,
    ) -> Result<Vec<DyadicInterval>, OracleError> {
        karhunen_loeve(order, stream, ts, n)
    }
}

pub struct RandomWalkConstruction;

impl PathConstruction for RandomWalkConstruction {
    fn id(&self) -> &str {
        "donsker"
    }

    fn sample(
        &self,
        order: u64,
        stream: &mut BitStream,
        ts: &[Dyadic],
        _n: u32,
    ) -> Result<Vec<DyadicInterval>, OracleError> {
        Ok(donsker(order, stream, ts)?
            .into_iter()
            .map(|d| DyadicInterval::point(d))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::test_support::assert_encloses;
    use rayon::prelude::*;

    fn grid(depth: usize) -> Vec<Dyadic> {
        (0..=(1usize << depth))
            .map(|k| Dyadic::new(BigInt::from(k), -(depth as i64)))
            .collect()
    }

    #[test]
    fn triangle_series_vanishes_at_zero_exactly() {
        let mut s = BitStream::from_seed(1);
        let vals = levy_ciesielski(6, &mut s, &[Dyadic::zero()], 20).unwrap();
        assert!(vals[0].is_point() && vals[0].lo().is_zero());
    }

    #[test]
    fn triangle_series_is_truncation_stable_on_coarse_grids() {
        let ts = grid(3);
        let mut s1 = BitStream::from_seed(42);
        let mut s2 = BitStream::from_seed(42);
        let a = levy_ciesielski(3, &mut s1, &ts, 20).unwrap();
        let b = levy_ciesielski(9, &mut s2, &ts, 20).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(format!("{x:?}"), format!("{y:?}"));
        }
    }

    #[test]
    fn bump_supports_touch_only_where_bumps_vanish() {
        for level in [3u32, 4] {
            let count = 1u64 << (level - 1);
            for j in 1..count {
                let a = SchauderBasis::new(level, j).unwrap();
                let b = SchauderBasis::new(level, j + 1).unwrap();
                let (_, ra) = a.support();
                let (lb, _) = b.support();
                assert_eq!(ra, lb);
                let va = a.eval(&ra, 30);
                let vb = b.eval(&lb, 30);
                assert!(va.is_point() && va.lo().is_zero());
                assert!(vb.is_point() && vb.lo().is_zero());
            }
        }
    }

    #[test]
    fn bump_peaks_match_the_closed_form() {
        // odd level: exact power of two, 2^((5−1)/2)·2^−5 = 1/8
        let odd = SchauderBasis::new(5, 3).unwrap();
        let v = odd.eval(&odd.center(), 40);
        assert!(v.is_point());
        assert_eq!(*v.lo(), Dyadic::from_pow2_ratio(1, 3));
        // even level: √2·2^−3 at level 2
        let even = SchauderBasis::new(2, 1).unwrap();
        let v = even.eval(&even.center(), 40);
        assert_encloses(&v, "0.353553390593273762200422181052");
    }

    #[test]
    fn walk_reproduces_the_documented_example() {
        let mut s = BitStream::from_bits(vec![true, true, false, true]);
        let vals = donsker(4, &mut s, &[Dyadic::zero(), Dyadic::one()]).unwrap();
        assert!(vals[0].is_zero());
        assert_eq!(vals[1], Dyadic::one());
    }

    #[test]
    fn sine_series_vanishes_at_zero_and_scales_at_one() {
        let mut s = BitStream::from_seed(5);
        let vals = karhunen_loeve(1, &mut s, &[Dyadic::zero(), Dyadic::one()], 20).unwrap();
        assert!(vals[0].is_point() && vals[0].lo().is_zero());
        // W^1(1) = (2√2/π)·R_1, so |W| ≤ 0.91·|R| and the enclosure is thin
        assert!(vals[1].width_within(16));
    }

    #[test]
    fn sine_series_unit_variance_factor() {
        // W^1(1) = (2√2/π)·R: sample variance over many runs ≈ 8/π²
        let runs = 10_000u64;
        let root = BitStream::from_seed(909);
        let xs: Vec<f64> = (0..runs)
            .into_par_iter()
            .map(|i| {
                let mut s = root.substream(i);
                let v = karhunen_loeve(1, &mut s, &[Dyadic::one()], 10).unwrap();
                v[0].midpoint_f64()
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / runs as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (runs - 1) as f64;
        let target = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
        // var estimator sd ≈ target·√(2/runs)
        let tol = 4.0 * target * (2.0 / runs as f64).sqrt();
        assert!((var - target).abs() < tol, "variance {var} vs {target}");
    }

    #[test]
    fn constructions_are_registered_under_their_ids() {
        assert_eq!(SchauderConstruction.id(), "schauder");
        assert_eq!(SineSeriesConstruction.id(), "kl");
        assert_eq!(RandomWalkConstruction.id(), "donsker");
        let mut s = BitStream::from_seed(3);
        let ts = [Dyadic::from_pow2_ratio(1, 1)];
        let v = RandomWalkConstruction.sample(16, &mut s, &ts, 10).unwrap();
        assert!(v[0].is_point());
    }

    #[test]
    fn times_outside_the_unit_interval_are_rejected() {
        let mut s = BitStream::from_seed(8);
        let bad = [Dyadic::from_int(2)];
        assert!(matches!(
            levy_ciesielski(2, &mut s, &bad, 10),
            Err(OracleError::InvalidInput(_))
        ));
        assert!(matches!(
            donsker(4, &mut s, &bad),
            Err(OracleError::InvalidInput(_))
        ));
    }
}
