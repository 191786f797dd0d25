//! The standard normal distribution.
//!
//! The CDF is evaluated in exact dyadic interval arithmetic: a Maclaurin
//! series with a certified alternating-tail bound for moderate arguments,
//! and an enveloped asymptotic expansion of the Mills ratio in the far
//! tails. The quantile function is then obtained by bisection driven only
//! by certified sign tests, seeded from a precomputed bracket table.

use super::{check_unit_interior, MeasureError, SemiInverseCdf};
use crate::dyadic::transcendental::{
    div_enclosure, div_up, exp_enclosure, inv_sqrt_2pi_enclosure,
};
use crate::dyadic::{Dyadic, DyadicInterval};
use once_cell::sync::Lazy;

pub struct Gaussian;

impl SemiInverseCdf for Gaussian {
    fn id(&self) -> &str {
        "gaussian"
    }

    fn eval_lower(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        check_unit_interior(t)?;
        let lo = quantile_enclosure(t.lo(), n + 1)?;
        let hi = quantile_enclosure(t.hi(), n + 1)?;
        Ok(lo.hull(&hi))
    }

    fn eval_upper(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        // the CDF is continuous and strictly increasing, so the one-sided
        // inverses coincide
        self.eval_lower(t, n)
    }
}

/// Enclosure of the standard normal CDF at a dyadic point, of width at most
/// `2^-n` (for `n` up to roughly 100; far-tail evaluations bottom out at the
/// accuracy floor of the asymptotic expansion).
pub fn cdf_enclosure(s: &Dyadic, n: u32) -> DyadicInterval {
    if s.is_zero() {
        return DyadicInterval::point(Dyadic::from_pow2_ratio(1, 1));
    }
    if s.is_negative() {
        let r = cdf_enclosure(&-s, n);
        return DyadicInterval::new(&Dyadic::one() - r.hi(), &Dyadic::one() - r.lo())
            .expect("reflection preserves order");
    }
    if *s >= Dyadic::from_int(16) {
        // the tail beyond 16 is under phi(16)/16 < 2^-189
        return DyadicInterval::new(&Dyadic::one() - &Dyadic::pow2(-184), Dyadic::one())
            .expect("ordered");
    }
    if *s >= Dyadic::from_int(9) {
        return far_cdf(s, n);
    }
    series_cdf(s, n)
}

/// Maclaurin evaluation for 0 < s < 9: the integral of the density expands
/// into an alternating series whose tail, once the term ratio falls below
/// one half, is bounded by the last included term.
fn series_cdf(s: &Dyadic, n: u32) -> DyadicInterval {
    // roundoff injected while the terms are still growing is amplified by
    // every later multiplication by s^2, by a factor of up to exp(s^2/2);
    // budget those bits up front
    let w = n + 24 + (s.to_f64().powi(2) * 0.7214).ceil() as u32;
    let wi = i64::from(w);
    let stop = Dyadic::pow2(-(i64::from(n) + 16));
    let s2 = DyadicInterval::point(s * s);
    // term ratio <= 1/2 from this k onward
    let ratio_safe_k = (s.to_f64().powi(2)).ceil() as u64 + 2;
    // u_k = s^(2k+1) / (k! 2^k), t_k = u_k / (2k+1)
    let mut u = DyadicInterval::point(s.clone());
    let mut sum = u.clone();
    let mut k: u64 = 1;
    loop {
        u = (&u * &s2).round_out(wi);
        u = div_enclosure(&u, &DyadicInterval::point(Dyadic::from_int(2 * k as i64)), w)
            .expect("nonzero divisor");
        let t = div_enclosure(&u, &DyadicInterval::point(Dyadic::from_int(2 * k as i64 + 1)), w)
            .expect("nonzero divisor");
        sum = if k % 2 == 1 { (&sum - &t).round_out(wi) } else { (&sum + &t).round_out(wi) };
        let t_mag = t.abs();
        if k >= ratio_safe_k && *t_mag.hi() <= stop {
            // geometric tail bound: everything beyond sums to at most |t_k|
            sum = sum.pad(i64::from(n) + 16);
            break;
        }
        k += 1;
        assert!(k < 10_000, "series failed to terminate");
    }
    let half = DyadicInterval::point(Dyadic::from_pow2_ratio(1, 1));
    &half + &(&inv_sqrt_2pi_enclosure(w) * &sum)
}

/// Far-tail evaluation for 9 <= s < 16 through the Mills ratio `R`, whose
/// alternating asymptotic partial sums envelope it: the remainder after any
/// partial sum is bounded by the first omitted term.
fn far_cdf(s: &Dyadic, n: u32) -> DyadicInterval {
    let sf = s.to_f64();
    let p = n + 24 + (sf * sf * 0.7214).ceil() as u32;
    let pi64 = i64::from(p);
    let one = DyadicInterval::point(Dyadic::one());
    let inv_s = div_enclosure(&one, &DyadicInterval::point(s.clone()), p).expect("s > 0");
    let inv_s2 = div_enclosure(&one, &DyadicInterval::point(s * s), p).expect("s > 0");
    // positive term magnitudes (2k-1)!! / s^(2k+1), signs applied on the fly
    let mut term = inv_s;
    let mut sum = term.clone();
    let mut k: u64 = 1;
    loop {
        let next = (&(&term * &inv_s2)
            * &DyadicInterval::point(Dyadic::from_int(2 * k as i64 - 1)))
            .round_out(pi64);
        let below_grid = *next.abs().hi() <= Dyadic::pow2(-pi64);
        let diverging = (2 * k + 1) as f64 >= sf * sf;
        if below_grid || diverging {
            let r = next.abs().hi().clone();
            sum = DyadicInterval::new(sum.lo() - &r, sum.hi() + &r).expect("ordered");
            break;
        }
        sum = if k % 2 == 1 { (&sum - &next).round_out(pi64) } else { (&sum + &next).round_out(pi64) };
        term = next;
        k += 1;
        assert!(k < 1_000, "asymptotic sum failed to terminate");
    }
    let density = density_enclosure(s, p);
    let tail = &density * &sum;
    DyadicInterval::new(&Dyadic::one() - tail.hi(), &Dyadic::one() - tail.lo())
        .expect("tail enclosure ordered")
}

/// Enclosure of the density `exp(-s^2/2)/sqrt(2 pi)` on a `2^-p` grid.
fn density_enclosure(s: &Dyadic, p: u32) -> DyadicInterval {
    let arg = -&(s * s).mul_pow2(-1);
    let e = exp_enclosure(&DyadicInterval::point(arg), p);
    &e * &inv_sqrt_2pi_enclosure(p)
}

/// A positive lower bound on the density at every point of magnitude at most
/// `s_max`.
fn density_lower_bound(s_max: &Dyadic, n: u32) -> Dyadic {
    let sf = s_max.to_f64();
    let mut p = n + 16 + (sf * sf * 0.7214).ceil() as u32;
    loop {
        let g = density_enclosure(s_max, p);
        if g.lo().is_positive() {
            return g.lo().clone();
        }
        p += 32;
    }
}

/// Bracket table: CDF enclosures on the grid s = k/16 over [-9, 9], with
/// sparser arms reaching to +-12. Entry precision keeps consecutive
/// enclosures disjoint, so a binary search on a quantile yields a certified
/// bracket.
static BRACKETS: Lazy<Vec<(Dyadic, DyadicInterval)>> = Lazy::new(|| {
    let mut ks: Vec<i64> = Vec::new();
    let mut k = -192;
    while k <= -152 {
        ks.push(k);
        k += 8;
    }
    ks.extend(-144..=144);
    let mut k = 152;
    while k <= 192 {
        ks.push(k);
        k += 8;
    }
    ks.into_iter()
        .map(|k| {
            let s = Dyadic::from_pow2_ratio(k, 4);
            let prec = if k.unsigned_abs() > 144 { 224 } else { 72 };
            let phi = cdf_enclosure(&s, prec);
            (s, phi)
        })
        .collect()
});

/// Exact dyadic value of a finite f64, truncated onto the `2^-grid` lattice.
fn dyadic_from_f64(v: f64, grid: i64) -> Option<Dyadic> {
    if !v.is_finite() {
        return None;
    }
    let (mant, exp, sign) = num_traits::Float::integer_decode(v);
    let m = i64::try_from(mant).ok()? * i64::from(sign);
    Some(Dyadic::new(num_bigint::BigInt::from(m), i64::from(exp)).round_down(grid))
}

/// Float estimates of the quantile at `t`, padded to both sides, in the
/// order a `pop()` consumer should test them (low side first).
fn probe_suggestions(t: &Dyadic, n: u32, grid: i64) -> Vec<Dyadic> {
    let tf = t.to_f64();
    if !(tf > 0.0 && tf < 1.0) {
        return Vec::new();
    }
    let Ok(normal) = statrs::distribution::Normal::new(0.0, 1.0) else {
        return Vec::new();
    };
    let q = statrs::distribution::ContinuousCDF::inverse_cdf(&normal, tf);
    // pad past both the float inversion error and the bracket target so the
    // pair straddles the true quantile with room to spare
    let eps = 2f64.powi(-i32::try_from(u32::min(n + 1, 26)).unwrap_or(26));
    let mut out: Vec<Dyadic> = [q + eps, q - eps]
        .into_iter()
        .filter_map(|v| dyadic_from_f64(v, grid))
        .collect();
    out.dedup();
    out
}

/// A certified bracket `(a, b)` with `F(a) < t < F(b)`, from the table.
fn bracket(t: &Dyadic) -> Result<(Dyadic, Dyadic), MeasureError> {
    let entries = &*BRACKETS;
    let first = &entries[0].1;
    let last = &entries[entries.len() - 1].1;
    if !(t > first.hi() && t < last.lo()) {
        return Err(MeasureError::ExtremeQuantile(t.to_decimal_string(8)));
    }
    // entries with a certified CDF below t form a prefix
    let i = entries.partition_point(|e| e.1.hi() < t);
    let ia = i - 1;
    let mut j = i;
    while entries[j].1.lo() <= t {
        j += 1;
    }
    Ok((entries[ia].0.clone(), entries[j].0.clone()))
}

// the one-sided inverses coincide for a strictly increasing CDF, so sampler
// refinement asks for the same quantile twice per round; a process-wide memo
// makes the repeat free
type QuantileKey = (num_bigint::BigInt, i64, u32);
static QUANTILE_MEMO: Lazy<std::sync::Mutex<std::collections::HashMap<QuantileKey, DyadicInterval>>> =
    Lazy::new(|| std::sync::Mutex::new(std::collections::HashMap::new()));
const QUANTILE_MEMO_CAP: usize = 1 << 18;

/// Enclosure of the quantile (inverse CDF) at a dyadic `t` in (0,1), of
/// width at most `2^-n`; quantiles past +-12 (that is, `t` within about
/// `2^-108` of 0 or 1) are reported as out of tabulated range.
pub fn quantile_enclosure(t: &Dyadic, n: u32) -> Result<DyadicInterval, MeasureError> {
    if !(t.is_positive() && *t < Dyadic::one()) {
        return Err(MeasureError::ArgumentOutOfRange(t.to_decimal_string(8)));
    }
    if *t == Dyadic::from_pow2_ratio(1, 1) {
        return Ok(DyadicInterval::point(Dyadic::zero()));
    }
    let key = (t.mantissa().clone(), t.exponent(), n);
    if let Some(v) = QUANTILE_MEMO.lock().expect("quantile memo lock").get(&key) {
        return Ok(v.clone());
    }
    let result = quantile_search(t, n)?;
    let mut memo = QUANTILE_MEMO.lock().expect("quantile memo lock");
    if memo.len() >= QUANTILE_MEMO_CAP {
        memo.clear();
    }
    memo.insert(key, result.clone());
    Ok(result)
}

fn quantile_search(t: &Dyadic, n: u32) -> Result<DyadicInterval, MeasureError> {
    let (mut a, mut b) = bracket(t)?;
    let s_max = if a.abs() >= b.abs() { a.abs() } else { b.abs() };
    let sf = s_max.to_f64();
    let p_hi = n + 14 + (sf * sf * 0.7214).ceil() as u32;
    let mut density_floor: Option<Dyadic> = None;
    let mut ladder = vec![28.min(p_hi), (n + 12).min(p_hi), p_hi];
    ladder.sort_unstable();
    ladder.dedup();
    let target = Dyadic::pow2(-i64::from(n));
    let mid_grid = i64::from(n) + 6;
    // float estimates straddling the quantile; each certified sign test
    // against one of them collapses the bracket to about the float error, so
    // the search typically finishes in a handful of CDF evaluations instead
    // of one per output bit. correctness never depends on their accuracy:
    // they only choose where to probe.
    let mut suggestions = probe_suggestions(t, n, mid_grid);
    for _ in 0..(4 * (n as usize + 64)) {
        if &b - &a <= target {
            return Ok(DyadicInterval::new(a, b).expect("bracket ordered"));
        }
        let m = loop {
            match suggestions.pop() {
                Some(s) if s > a && s < b => break s,
                Some(_) => continue,
                None => {
                    let exact_mid = (&a + &b).mul_pow2(-1);
                    let rounded = exact_mid.round_down(mid_grid);
                    break if rounded > a && rounded < b { rounded } else { exact_mid };
                }
            }
        };
        for &p in &ladder {
            let e = cdf_enclosure(&m, p);
            if e.hi() < t {
                a = m.clone();
                break;
            }
            if e.lo() > t {
                b = m.clone();
                break;
            }
            if p == p_hi {
                // undecidable at full precision: t sits inside the CDF
                // enclosure, so |F(m) - t| is at most its width; dividing by
                // the density floor turns that into a quantile enclosure
                let floor = density_floor
                    .get_or_insert_with(|| density_lower_bound(&s_max, n + 14));
                let delta = div_up(&e.width(), floor, n + 8);
                let j = DyadicInterval::new(&m - &delta, &m + &delta)
                    .expect("ordered")
                    .intersect(&DyadicInterval::new(a.clone(), b.clone()).expect("ordered"))
                    .expect("quantile lies in both");
                if j.width_within(n) {
                    return Ok(j);
                }
                a = j.lo().clone();
                b = j.hi().clone();
                break;
            }
        }
    }
    Err(MeasureError::InverseNonconvergence(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::rational::{parse_rational, rational_to_enclosure};
    use crate::measures::test_support::assert_encloses;

    #[test]
    fn cdf_known_values() {
        let at = |num: i64, pow: u32, n: u32| cdf_enclosure(&Dyadic::from_pow2_ratio(num, pow), n);
        let zero = cdf_enclosure(&Dyadic::zero(), 50);
        assert!(zero.is_point());
        assert_encloses(&zero, "1/2");

        let one = at(1, 0, 50);
        assert_encloses(&one, "0.841344746068542948585232545632");
        assert!(one.width_within(50));

        let minus_one = at(-1, 0, 50);
        assert_encloses(&minus_one, "0.158655253931457051414767454368");

        let half = at(1, 1, 50);
        assert_encloses(&half, "0.691462461274013103637704610608");
    }

    #[test]
    fn cdf_far_tail() {
        let s = Dyadic::from_pow2_ratio(19, 1); // 9.5
        let phi = cdf_enclosure(&s, 60);
        assert!(*phi.hi() < Dyadic::one());
        // the exact tail there is about 2^-69.65
        assert!(*phi.lo() > &Dyadic::one() - &Dyadic::pow2(-69));
        assert!(*phi.hi() < &Dyadic::one() - &Dyadic::pow2(-71));
        // regimes agree across the switchover: strictly ordered enclosures
        let below = cdf_enclosure(&Dyadic::from_pow2_ratio(8 * 1024 + 1013, 10), 80); // ~8.989
        let above = cdf_enclosure(&Dyadic::from_pow2_ratio(9 * 1024 + 10, 10), 80); // ~9.010
        assert!(below.hi() < above.lo());
        let extreme = cdf_enclosure(&Dyadic::from_int(20), 10);
        assert!(*extreme.hi() <= Dyadic::one());
        assert!(*extreme.lo() >= &Dyadic::one() - &Dyadic::pow2(-180));
    }

    #[test]
    fn quantile_known_values() {
        let mid = quantile_enclosure(&Dyadic::from_pow2_ratio(1, 1), 40).unwrap();
        assert!(mid.is_point() && mid.lo().is_zero());

        // t = 0.975 is not dyadic; verify through the interval interface
        let t = rational_to_enclosure(&parse_rational("39/40").unwrap(), 48);
        let q = Gaussian.eval_lower(&t, 34).unwrap();
        assert_encloses(&q, "1.95996398454005423552459443052");
        assert!(q.width_within(30));

        let q1 = quantile_enclosure(&Dyadic::from_pow2_ratio(841344746, 30).round_down(30), 20);
        // 841344746/2^30 ~ 0.7835; just exercise an arbitrary interior point
        assert!(q1.unwrap().width_within(20));
    }

    #[test]
    fn quantile_is_monotone_on_a_grid() {
        let mut prev: Option<DyadicInterval> = None;
        for k in 1..32 {
            let q = quantile_enclosure(&Dyadic::from_pow2_ratio(k, 5), 20).unwrap();
            assert!(q.width_within(20));
            if let Some(p) = &prev {
                assert!(p.lo() <= q.hi(), "quantile decreased at k={k}");
            }
            prev = Some(q);
        }
    }

    #[test]
    fn quantile_round_trips_through_cdf() {
        let t = Dyadic::from_pow2_ratio(3, 3);
        let q = quantile_enclosure(&t, 40).unwrap();
        let back = cdf_enclosure(&q.midpoint(), 50);
        let err_hi = back.hi() - &t;
        let err_lo = &t - back.lo();
        assert!(err_hi <= Dyadic::pow2(-36) && err_lo <= Dyadic::pow2(-36));
    }

    #[test]
    fn extreme_quantiles_are_rejected() {
        let tiny = Dyadic::pow2(-120);
        assert!(matches!(
            quantile_enclosure(&tiny, 10),
            Err(MeasureError::ExtremeQuantile(_))
        ));
        let huge = &Dyadic::one() - &Dyadic::pow2(-120);
        assert!(matches!(
            quantile_enclosure(&huge, 10),
            Err(MeasureError::ExtremeQuantile(_))
        ));
        assert!(quantile_enclosure(&Dyadic::zero(), 10).is_err());
    }

    #[test]
    fn bracket_table_is_ordered() {
        let entries = &*BRACKETS;
        for pair in entries.windows(2) {
            assert!(pair[0].0 < pair[1].0);
            assert!(pair[0].1.hi() < pair[1].1.lo(), "enclosures overlap near {}", pair[1].0);
        }
    }
}
