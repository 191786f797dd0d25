//! Brownian-motion grid paths with verifiable continuity certificates.
//!
//! Paths are built level by level on the dyadic grid: the endpoint value
//! first, then each midpoint from the conditional law given its two
//! neighbors (mean = their average, standard deviation 2^−(l+1)/2 at level
//! l). Every candidate value is accepted only once |W(s)−W(t)| < ω(|s−t|, C)
//! is certified against every previously accepted value, and rejected
//! values are redrawn individually. The certificate shipped with a path
//! (family, C, refinement table) is therefore sound by construction, and
//! `certificate_violations` can re-verify it from the stored enclosures
//! alone.
//!
//! The reverse direction recovers the least parameter C for which the
//! modulus dominates a given grid path, by bisecting on the sign of
//! Ψ(C) = min over grid pairs of ω(|s−t|, C) − |W(s)−W(t)|.

pub mod modulus;

pub use modulus::{binary_moc, moc_table, LevyModulus, ModulusFamily, ModulusRegistry};

use crate::bitsource::{BitSourceError, BitStream};
use crate::dyadic::transcendental::sqrt2_enclosure;
use crate::dyadic::{compare_strict, Dyadic, DyadicInterval, StrictCmp};
use crate::measures::{Gaussian, MeasureError, RefinableSample, SemiInverseCdf};
use num_bigint::BigInt;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WienerError {
    #[error(transparent)]
    Bits(#[from] BitSourceError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("no refinement level reaches the 2^-{n} target within {cap} steps")]
    MocSearchCap { n: u32, cap: u32 },
    #[error("modulus family {0:?} is not registered (available: {1})")]
    UnknownFamily(String, String),
    #[error("parameter search failed: {0}")]
    ParameterSearch(String),
    #[error("invalid grid values: {0}")]
    InvalidValues(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// The claim shipped with a path: every grid pair satisfies
/// |W(s)−W(t)| ≤ ω(|s−t|, c) for the named family, and gaps of at most
/// 2^−moc[k] keep increments within 2^−k.
#[derive(Debug, Clone)]
pub struct PathCertificate {
    pub family: String,
    pub c: DyadicInterval,
    pub moc: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathDiagnostics {
    /// Candidates discarded because a pair bound was certifiably violated.
    pub rejections: u64,
    /// Candidates discarded because a comparison stayed undecided at the
    /// precision cap (the measure-zero boundary case).
    pub cap_redraws: u64,
    /// Coin flips consumed, including all node substreams.
    pub bits_used: u64,
}

/// Grid values of one accepted path: `values[k]` encloses W(k/2^depth),
/// `values[0]` is exactly zero.
#[derive(Debug, Clone)]
pub struct WienerPath {
    pub depth: usize,
    pub values: Vec<DyadicInterval>,
    pub cert: PathCertificate,
    pub diagnostics: PathDiagnostics,
}

impl WienerPath {
    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    /// The k-th grid time, k/2^depth.
    pub fn time(&self, k: usize) -> Dyadic {
        Dyadic::new(BigInt::from(k as u64), -(self.depth as i64))
    }
}

/// Targets 0..=16 are tabulated in each certificate.
const MOC_TABLE_TARGET: u32 = 16;
/// Per-node budget of coin flips; orders of magnitude above any observed use.
const DRAW_BIT_CAP: u64 = 1 << 20;
/// Redraws allowed for one grid node before its prefix is declared wedged.
const NODE_ATTEMPT_CAP: u64 = 500;
/// Failsafe on whole-path rebuilds; in practice roughly one path per
/// thousand needs one rebuild and a single rebuild almost always clears.
const PATH_RESTART_CAP: u64 = 1000;

pub fn sample_path(
    fam: &dyn ModulusFamily,
    c: &DyadicInterval,
    stream: &mut BitStream,
    depth: usize,
    n: u32,
) -> Result<WienerPath, WienerError> {
    sample_path_with_cap(fam, c, stream, depth, n, 192)
}

/// As `sample_path`, with an explicit precision cap for the accept/reject
/// comparisons.
pub fn sample_path_with_cap(
    fam: &dyn ModulusFamily,
    c: &DyadicInterval,
    stream: &mut BitStream,
    depth: usize,
    n: u32,
    cap: u32,
) -> Result<WienerPath, WienerError> {
    if c.lo() < &Dyadic::one() {
        return Err(WienerError::InvalidParameter(format!(
            "modulus parameter must be at least 1, got {}",
            c.to_decimal_string()
        )));
    }
    let (values, diagnostics) = generate(Some((fam, c)), stream, depth, n, cap)?;
    let moc = cached_moc_table(fam, c, MOC_TABLE_TARGET)?;
    Ok(WienerPath {
        depth,
        values,
        cert: PathCertificate { family: fam.family_id().to_string(), c: c.clone(), moc },
        diagnostics,
    })
}

/// The same bridge construction with the accept/reject filter switched off;
/// used to test the conditional law itself.
pub fn sample_path_unfiltered(
    stream: &mut BitStream,
    depth: usize,
    n: u32,
) -> Result<(Vec<DyadicInterval>, PathDiagnostics), WienerError> {
    generate(None, stream, depth, n, 0)
}

/// Draw the modulus parameter from a distribution supported in [1,∞). The
/// returned enclosure is clamped below at 1; a draw certifiably under 1
/// reports the distribution as invalid.
pub fn sample_c(
    cdist: &Arc<dyn SemiInverseCdf>,
    stream: &mut BitStream,
    n: u32,
) -> Result<DyadicInterval, WienerError> {
    let s = crate::measures::sample_real(cdist, stream, n, 1 << 16)?;
    let v = s.value;
    let one = Dyadic::one();
    if *v.hi() < one {
        return Err(WienerError::InvalidParameter(format!(
            "parameter distribution produced {}, below the floor 1",
            v.to_decimal_string()
        )));
    }
    let lo = if *v.lo() < one { one } else { v.lo().clone() };
    Ok(DyadicInterval::new(lo, v.hi().clone()).expect("clamped draw is ordered"))
}

/// Re-check a path against its certificate: pairs whose increment enclosure
/// certifiably exceeds ω(gap, C) at precision `p`. Empty means the
/// certificate stands.
pub fn certificate_violations(
    path: &WienerPath,
    fam: &dyn ModulusFamily,
    p: u32,
) -> Vec<(usize, usize)> {
    let len = path.values.len();
    let mut violations = Vec::new();
    for gap in 1..len {
        let h = DyadicInterval::point(Dyadic::new(
            BigInt::from(gap as u64),
            -(path.depth as i64),
        ));
        let w = fam.omega(&h, &path.cert.c, p);
        for i in 0..len - gap {
            let d = (&path.values[i + gap] - &path.values[i]).abs();
            if compare_strict(&d, &w) == StrictCmp::Gt {
                violations.push((i, i + gap));
            }
        }
    }
    violations
}

/// Largest increment magnitudes per grid gap, the sufficient statistic for
/// Ψ evaluations.
#[derive(Debug, Clone)]
pub struct GapStatistics {
    depth: usize,
    dmax: Vec<DyadicInterval>,
}

impl GapStatistics {
    pub fn depth(&self) -> usize {
        self.depth
    }
}

pub fn gap_statistics(values: &[DyadicInterval]) -> Result<GapStatistics, WienerError> {
    let len = values.len();
    if len < 2 || !(len - 1).is_power_of_two() {
        return Err(WienerError::InvalidValues(format!(
            "need 2^depth + 1 grid values, got {len}"
        )));
    }
    let depth = (len - 1).trailing_zeros() as usize;
    let mut dmax = Vec::with_capacity(len - 1);
    for gap in 1..len {
        let mut lo = Dyadic::zero();
        let mut hi = Dyadic::zero();
        for i in 0..len - gap {
            let d = (&values[i + gap] - &values[i]).abs();
            if d.lo() > &lo {
                lo = d.lo().clone();
            }
            if d.hi() > &hi {
                hi = d.hi().clone();
            }
        }
        dmax.push(DyadicInterval::new(lo, hi).expect("componentwise maxima stay ordered"));
    }
    Ok(GapStatistics { depth, dmax })
}

/// Enclosure of Ψ(C) = min over grid pairs of ω(|s−t|, C) − |W(s)−W(t)|.
/// Nonnegative Ψ means the modulus with parameter C dominates the path.
pub fn psi(
    gaps: &GapStatistics,
    fam: &dyn ModulusFamily,
    c: &DyadicInterval,
    p: u32,
) -> DyadicInterval {
    let mut lo: Option<Dyadic> = None;
    let mut hi: Option<Dyadic> = None;
    for (idx, d) in gaps.dmax.iter().enumerate() {
        let h = DyadicInterval::point(Dyadic::new(
            BigInt::from(idx as u64 + 1),
            -(gaps.depth as i64),
        ));
        let w = fam.omega(&h, c, p);
        let term_lo = w.lo() - d.hi();
        let term_hi = w.hi() - d.lo();
        if lo.as_ref().map_or(true, |v| term_lo < *v) {
            lo = Some(term_lo);
        }
        if hi.as_ref().map_or(true, |v| term_hi < *v) {
            hi = Some(term_hi);
        }
    }
    DyadicInterval::new(lo.expect("at least one gap"), hi.expect("at least one gap"))
        .expect("componentwise minima stay ordered")
}

/// The recovered parameter: an enclosure of the least C ≥ 1 with Ψ(C) ≥ 0
/// on the grid. Restricting to grid pairs only under-approximates the
/// parameter of the underlying function.
#[derive(Debug, Clone)]
pub struct CParameter {
    pub c: DyadicInterval,
    /// The modulus dominates the path already at the smallest admissible
    /// parameter, so the unconstrained least C would lie below 1.
    pub below_floor: bool,
}

pub fn compute_c(
    values: &[DyadicInterval],
    fam: &dyn ModulusFamily,
    n: u32,
) -> Result<CParameter, WienerError> {
    let gaps = gap_statistics(values)?;
    let p = n + 16;
    let one = Dyadic::one();
    let at_floor = psi(&gaps, fam, &DyadicInterval::point(one.clone()), p);
    if at_floor.lo().is_positive() {
        return Ok(CParameter { c: DyadicInterval::point(one), below_floor: true });
    }

    let mut hi = Dyadic::from_int(2);
    let mut doublings = 0;
    loop {
        let v = psi(&gaps, fam, &DyadicInterval::point(hi.clone()), p);
        if v.lo().is_positive() {
            break;
        }
        hi = hi.mul_pow2(1);
        doublings += 1;
        if doublings > 40 {
            return Err(WienerError::ParameterSearch(
                "no parameter up to 2^41 dominates the grid increments".to_string(),
            ));
        }
    }

    let mut lo = one;
    let width_target = Dyadic::pow2(-i64::from(n));
    for _ in 0..(2 * n as usize + 96) {
        if &hi - &lo <= width_target {
            break;
        }
        let mid = (&lo + &hi).mul_pow2(-1);
        let mut decided = false;
        for extra in [0u32, 24] {
            let v = psi(&gaps, fam, &DyadicInterval::point(mid.clone()), p + extra);
            if v.lo().is_positive() {
                hi = mid.clone();
                decided = true;
                break;
            }
            if v.hi().is_negative() {
                lo = mid.clone();
                decided = true;
                break;
            }
        }
        if !decided {
            // the crossing is pinched between the input enclosure widths;
            // the bracket is still a sound answer
            break;
        }
    }
    Ok(CParameter {
        c: DyadicInterval::new(lo, hi).expect("bisection keeps the bracket ordered"),
        below_floor: false,
    })
}

// --- path construction engine ---

struct Node {
    draw: RefinableSample,
    stream: BitStream,
    level: u32,
    parents: Option<(usize, usize)>,
    target: u32,
}

enum Outcome {
    Accept,
    Reject,
    CapRedraw,
}

struct Builder<'a> {
    check: Option<(&'a dyn ModulusFamily, &'a DyadicInterval)>,
    depth: usize,
    gauss: Arc<dyn SemiInverseCdf>,
    nodes: Vec<Option<Node>>,
    memo: Vec<Option<DyadicInterval>>,
    omega_cache: Vec<Option<(u32, DyadicInterval)>>,
    accepted: Vec<usize>,
    diagnostics: PathDiagnostics,
}

fn generate(
    check: Option<(&dyn ModulusFamily, &DyadicInterval)>,
    stream: &mut BitStream,
    depth: usize,
    n: u32,
    cap: u32,
) -> Result<(Vec<DyadicInterval>, PathDiagnostics), WienerError> {
    if depth > 20 {
        return Err(WienerError::InvalidValues(format!(
            "grid depth {depth} would need 2^{depth} nodes"
        )));
    }
    let size = (1usize << depth) + 1;
    let total_before = stream.total_consumed();
    // substreams are keyed, not split, so repeated calls on the same parent
    // stream must be decorrelated explicitly: burn 64 bits into a path key
    // and hang all per-node substreams off it
    let mut key: u64 = 0;
    for _ in 0..64 {
        key = (key << 1) | u64::from(stream.next_bit()?);
    }
    let root = stream.substream(key);
    let n0 = n.clamp(4, 12);
    let mut carried = PathDiagnostics::default();
    // Values are redrawn individually, so an accepted prefix can
    // occasionally paint a later node into an empty feasible window: for
    // c < e the linear continuation of the modulus starts above its sqrt
    // branch, breaking subadditivity, so a pair (s,t) can be accepted at
    // separation |W(s)−W(t)| > ω(|s−u|,c) + ω(|u−t|,c) for a grid point u
    // between them — after which no value at u can comply with both sides.
    // A node whose window is nonempty accepts a fresh bridge draw with
    // probability well above 1/20, so exhausting the per-node budget
    // certifies a wedge (up to ~2^-150) and the whole prefix is discarded
    // and rebuilt from fresh substreams.
    for restart in 0..PATH_RESTART_CAP {
        let path_root = root.substream(restart);
        let mut b = Builder {
            check,
            depth,
            gauss: Arc::new(Gaussian),
            nodes: (0..size).map(|_| None).collect(),
            memo: vec![None; size],
            omega_cache: vec![None; size],
            accepted: vec![0],
            diagnostics: carried,
        };
        let mut wedged = b.place_and_accept(size - 1, 0, None, &path_root, n0, cap)?;
        'levels: for l in 1..=depth as u32 {
            if wedged {
                break;
            }
            let s = 1usize << (depth - l as usize);
            let mut k = s;
            while k < size {
                if b.place_and_accept(k, l, Some((k - s, k + s)), &path_root, n0, cap)? {
                    wedged = true;
                    break 'levels;
                }
                k += 2 * s;
            }
        }
        if wedged {
            carried = b.diagnostics;
            continue;
        }
        let accepted = b.accepted.clone();
        for &k in &accepted {
            b.refine_node(k, n)?;
        }
        let values = (0..size).map(|k| b.value(k)).collect();
        let mut diagnostics = b.diagnostics;
        diagnostics.bits_used = stream.total_consumed() - total_before;
        return Ok((values, diagnostics));
    }
    Err(WienerError::ParameterSearch(format!(
        "path construction restarted {PATH_RESTART_CAP} times without completing"
    )))
}

impl Builder<'_> {
    /// Draw and certify the node at grid index k. `Ok(true)` means the node
    /// exhausted its redraw budget against the accepted prefix (a wedge)
    /// and the caller should rebuild the whole path.
    fn place_and_accept(
        &mut self,
        k: usize,
        level: u32,
        parents: Option<(usize, usize)>,
        root: &BitStream,
        n0: u32,
        cap: u32,
    ) -> Result<bool, WienerError> {
        let node_base = root.substream(k as u64);
        let mut attempt: u64 = 0;
        while attempt <= NODE_ATTEMPT_CAP {
            let mut stream = node_base.substream(attempt);
            let mut draw = RefinableSample::new(self.gauss.clone());
            match draw.refine(&mut stream, n0, DRAW_BIT_CAP) {
                Ok(_) => {}
                Err(MeasureError::ExtremeQuantile(_))
                | Err(MeasureError::PrecisionCapExhausted { .. }) => {
                    self.diagnostics.cap_redraws += 1;
                    attempt += 1;
                    continue;
                }
                Err(e) => return Err(e.into()),
            }
            self.nodes[k] = Some(Node { draw, stream, level, parents, target: n0 });
            self.memo[k] = None;
            match self.certify(k, cap)? {
                Outcome::Accept => {
                    self.accepted.push(k);
                    return Ok(false);
                }
                Outcome::Reject => self.diagnostics.rejections += 1,
                Outcome::CapRedraw => self.diagnostics.cap_redraws += 1,
            }
            self.nodes[k] = None;
            self.memo[k] = None;
            attempt += 1;
        }
        Ok(true)
    }

    /// Certify |W(k)−W(i)| < ω(|k−i|, C) against every accepted i, refining
    /// the two endpoint enclosures and the modulus in lockstep while the
    /// comparison is undecided.
    fn certify(&mut self, k: usize, cap: u32) -> Result<Outcome, WienerError> {
        if self.check.is_none() {
            return Ok(Outcome::Accept);
        }
        let others = self.accepted.clone();
        for i in others {
            let gap = k.abs_diff(i);
            let mut rung: u32 = 10;
            let mut last_w_width: Option<Dyadic> = None;
            loop {
                let vk = self.value(k);
                let vi = self.value(i);
                let d = (&vk - &vi).abs();
                let w = self.omega_at(gap, rung + 4);
                match compare_strict(&d, &w) {
                    StrictCmp::Lt => break,
                    StrictCmp::Gt => return Ok(Outcome::Reject),
                    StrictCmp::Overlap => {
                        // when the parameter is an interval, ω's width has an
                        // irreducible floor; once the increment enclosure is
                        // far narrower than ω and ω has stopped shrinking,
                        // more precision cannot decide the comparison
                        let ww = w.width();
                        if d.width().mul_pow2(3) <= ww {
                            if let Some(prev) = &last_w_width {
                                if ww.mul_pow2(4) >= &prev.mul_pow2(4) - prev {
                                    return Ok(Outcome::CapRedraw);
                                }
                            }
                        }
                        last_w_width = Some(ww);
                        if rung >= cap {
                            return Ok(Outcome::CapRedraw);
                        }
                        rung = (rung * 2).min(cap);
                        self.refine_node(k, rung)?;
                        self.refine_node(i, rung)?;
                    }
                }
            }
        }
        Ok(Outcome::Accept)
    }

    fn omega_at(&mut self, gap: usize, p: u32) -> DyadicInterval {
        if let Some((q, v)) = &self.omega_cache[gap] {
            if *q >= p {
                return v.clone();
            }
        }
        let (fam, c) = self.check.expect("omega only queried in filtered mode");
        let h = DyadicInterval::point(Dyadic::new(
            BigInt::from(gap as u64),
            -(self.depth as i64),
        ));
        let mut v = fam.omega(&h, c, p);
        if let Some((_, old)) = &self.omega_cache[gap] {
            if let Some(tighter) = v.intersect(old) {
                v = tighter;
            }
        }
        self.omega_cache[gap] = Some((p, v.clone()));
        v
    }

    /// Current enclosure of W at grid index k, assembled from the stored
    /// conditional draws: anchored at W(0) = 0, W(1) = its own draw, and
    /// each midpoint = parents' average + σ_level · draw.
    fn value(&mut self, k: usize) -> DyadicInterval {
        if k == 0 {
            return DyadicInterval::zero();
        }
        if let Some(v) = &self.memo[k] {
            return v.clone();
        }
        let (g, level, parents, target) = {
            let node = self.nodes[k].as_ref().expect("value of an instantiated node");
            (
                node.draw.current().expect("draw refined before use").clone(),
                node.level,
                node.parents,
                node.target,
            )
        };
        let v = match parents {
            None => g,
            Some((a, b)) => {
                let va = self.value(a);
                let vb = self.value(b);
                let mid = (&va + &vb).mul_pow2(-1);
                &mid + &scale_by_sigma(&g, level, target + 10)
            }
        };
        self.memo[k] = Some(v.clone());
        v
    }

    /// Narrow the enclosure at k to width ≤ 2^-t by refining the node's own
    /// draw and, recursively, the nodes its formula depends on.
    fn refine_node(&mut self, k: usize, t: u32) -> Result<(), WienerError> {
        if k == 0 {
            return Ok(());
        }
        if self.value(k).width_within(t) {
            return Ok(());
        }
        let parents = self.nodes[k].as_ref().expect("refining an instantiated node").parents;
        for extra in [2u32, 6] {
            if let Some((a, b)) = parents {
                self.refine_node(a, t + extra)?;
                self.refine_node(b, t + extra)?;
            }
            {
                let node = self.nodes[k].as_mut().expect("refining an instantiated node");
                node.target = node.target.max(t + extra);
                let target = node.target;
                node.draw.refine(&mut node.stream, target, DRAW_BIT_CAP)?;
            }
            self.memo.iter_mut().for_each(|m| *m = None);
            if self.value(k).width_within(t) {
                return Ok(());
            }
        }
        Err(WienerError::ParameterSearch(format!(
            "enclosure at grid index {k} failed to narrow to 2^-{t}"
        )))
    }
}

fn scale_by_sigma(g: &DyadicInterval, level: u32, p: u32) -> DyadicInterval {
    let e = i64::from(level) + 1;
    if e % 2 == 0 {
        // σ = 2^(−e/2) exactly
        g.mul_pow2(-e / 2)
    } else {
        // σ = √2 · 2^(−(e+1)/2)
        let mag = g.abs().hi().ilog2().unwrap_or(0).max(0) as u32;
        let s = sqrt2_enclosure(p + mag + 4).mul_pow2(-(e + 1) / 2);
        &s * g
    }
}

static MOC_CACHE: Lazy<Mutex<HashMap<(String, String, String, u32), Vec<u32>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn cached_moc_table(
    fam: &dyn ModulusFamily,
    c: &DyadicInterval,
    n_max: u32,
) -> Result<Vec<u32>, WienerError> {
    // the table is built from a slight outward coarsening of the parameter:
    // the modulus grows with c, so a table certified for a superset interval
    // stays valid for the draw itself, and parameter draws that differ only
    // past 2^-6 share one cache entry
    let c = &c.round_out(6);
    let key = (
        fam.family_id().to_string(),
        c.lo().to_string(),
        c.hi().to_string(),
        n_max,
    );
    if let Some(t) = MOC_CACHE.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let t = moc_table(fam, c, n_max)?;
    MOC_CACHE.lock().unwrap().insert(key, t.clone());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn dirac2() -> DyadicInterval {
        DyadicInterval::point(Dyadic::from_int(2))
    }

    fn render(values: &[DyadicInterval]) -> Vec<String> {
        values.iter().map(|v| format!("{v:?}")).collect()
    }

    #[test]
    fn accepted_path_certificate_is_sound() {
        let fam = LevyModulus;
        let c = dirac2();
        let mut s = BitStream::from_seed(31);
        let path = sample_path(&fam, &c, &mut s, 3, 16).unwrap();
        assert_eq!(path.values.len(), 9);
        assert!(path.values[0].is_point() && path.values[0].lo().is_zero());
        for v in &path.values {
            assert!(v.width_within(16), "{v}");
        }
        assert!(certificate_violations(&path, &fam, 24).is_empty());
        assert_eq!(path.cert.family, "levy");
        assert_eq!(path.cert.moc.len(), 17);
        for w in path.cert.moc.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(path.diagnostics.bits_used > 0);
    }

    #[test]
    fn refinement_table_bounds_small_gaps() {
        let fam = LevyModulus;
        let c = dirac2();
        let mut s = BitStream::from_seed(77);
        let path = sample_path(&fam, &c, &mut s, 5, 20).unwrap();
        // for each target n, pairs within 2^-moc(n) must not certifiably
        // exceed 2^-n
        for (n, &m) in path.cert.moc.iter().enumerate().take(9) {
            if m as usize > path.depth {
                // table promises only gaps ≤ 2^-m; none exist on this grid
                continue;
            }
            let bound = DyadicInterval::point(Dyadic::pow2(-(n as i64)));
            let max_gap = 1usize << (path.depth - m as usize);
            for gap in 1..=max_gap {
                for i in 0..path.values.len() - gap {
                    let d = (&path.values[i + gap] - &path.values[i]).abs();
                    assert_ne!(
                        compare_strict(&d, &bound),
                        StrictCmp::Gt,
                        "gap {gap} at target {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn paths_are_reproducible() {
        let fam = LevyModulus;
        let c = dirac2();
        let mut s1 = BitStream::from_seed(9001);
        let mut s2 = BitStream::from_seed(9001);
        let a = sample_path(&fam, &c, &mut s1, 4, 16).unwrap();
        let b = sample_path(&fam, &c, &mut s2, 4, 16).unwrap();
        assert_eq!(render(&a.values), render(&b.values));
        assert_eq!(a.diagnostics, b.diagnostics);
        let mut s3 = BitStream::from_seed(9002);
        let other = sample_path(&fam, &c, &mut s3, 4, 16).unwrap();
        assert_ne!(render(&a.values), render(&other.values));
    }

    #[test]
    fn unfiltered_bridge_midpoint_is_centered() {
        // W(1/2) − (W(0)+W(1))/2 has mean 0 and σ = 1/2; a crude 4σ/√N
        // band on the sample mean catches sign or scaling mistakes
        let runs = 2000;
        let mut sum = 0.0f64;
        let mut sumsq = 0.0f64;
        let mut s = BitStream::from_seed(515);
        for _ in 0..runs {
            let (vals, _) = sample_path_unfiltered(&mut s, 1, 14).unwrap();
            let bridge = &vals[1] - &(&vals[0] + &vals[2]).mul_pow2(-1);
            let x = bridge.midpoint_f64();
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / runs as f64;
        let var = sumsq / runs as f64 - mean * mean;
        assert!(mean.abs() < 4.0 * 0.5 / (runs as f64).sqrt(), "mean {mean}");
        assert!((var - 0.25).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn depth_zero_acceptance_rate_matches_the_gaussian_tail() {
        let fam = LevyModulus;
        let one = DyadicInterval::point(Dyadic::one());
        let runs = 4000u64;
        let mut rejections = 0u64;
        let mut s = BitStream::from_seed(246);
        for _ in 0..runs {
            let path = sample_path(&fam, &one, &mut s, 0, 10).unwrap();
            rejections += path.diagnostics.rejections;
        }
        // acceptance requires |W(1)| < ω(1,1) = √2: P = 2Φ(√2)−1
        let p_accept = 0.842700792949715;
        let total = runs + rejections;
        let rate = runs as f64 / total as f64;
        let sigma = (p_accept * (1.0 - p_accept) / total as f64).sqrt();
        assert!((rate - p_accept).abs() < 4.0 * sigma, "rate {rate} vs {p_accept}");
    }

    #[test]
    fn parameter_floor_on_the_zero_path() {
        let zeros: Vec<DyadicInterval> = (0..9).map(|_| DyadicInterval::zero()).collect();
        let got = compute_c(&zeros, &LevyModulus, 10).unwrap();
        assert!(got.below_floor);
        assert!(got.c.is_point() && *got.c.lo() == Dyadic::one());
    }

    #[test]
    fn steep_line_bisection_matches_a_grid_scan() {
        // W(t) = 3t on the depth-4 grid
        let values: Vec<DyadicInterval> = (0..=16)
            .map(|k| DyadicInterval::point(Dyadic::new(BigInt::from(3 * k as u64), -4)))
            .collect();
        let fam = LevyModulus;
        let got = compute_c(&values, &fam, 8).unwrap();
        assert!(!got.below_floor);
        let gaps = gap_statistics(&values).unwrap();
        // independent scan with step 2^-10, taking the first parameter whose
        // Ψ is certifiably nonnegative
        let scan: BigRational;
        let mut j: i64 = 1 << 10;
        loop {
            let c = DyadicInterval::point(Dyadic::new(BigInt::from(j), -10));
            let v = psi(&gaps, &fam, &c, 24);
            if v.lo().is_positive() {
                scan = BigRational::new(j.into(), (1i64 << 10).into());
                break;
            }
            j += 1;
            assert!(j < 1 << 16, "scan ran away");
        }
        let scan = scan.to_f64().unwrap();
        let lo = got.c.lo().to_f64();
        let hi = got.c.hi().to_f64();
        assert!(
            scan >= lo - 1.0 / 1024.0 && scan <= hi + 1.0 / 1024.0,
            "scan {scan} outside bisection bracket [{lo}, {hi}]"
        );
        assert!(hi - lo <= 1.0 / 128.0, "bracket too wide: [{lo}, {hi}]");
    }

    #[test]
    fn recovered_parameter_stays_below_the_generator() {
        let fam = LevyModulus;
        let c = dirac2();
        for seed in 0..5 {
            let mut s = BitStream::from_seed(600 + seed);
            let path = sample_path(&fam, &c, &mut s, 4, 20).unwrap();
            let got = compute_c(&path.values, &fam, 10).unwrap();
            assert!(
                *got.c.lo() <= Dyadic::from_int(2),
                "seed {seed}: recovered {:?}",
                got.c
            );
        }
    }

    #[test]
    fn doubling_a_path_never_lowers_the_recovered_parameter() {
        let fam = LevyModulus;
        let mut s = BitStream::from_seed(88);
        let (values, _) = sample_path_unfiltered(&mut s, 4, 20).unwrap();
        let base = compute_c(&values, &fam, 10).unwrap();
        let doubled: Vec<DyadicInterval> = values.iter().map(|v| v.mul_pow2(1)).collect();
        let scaled = compute_c(&doubled, &fam, 10).unwrap();
        assert!(
            scaled.c.lo() >= base.c.lo(),
            "doubled {:?} below base {:?}",
            scaled.c,
            base.c
        );
    }

    #[test]
    fn parameter_draws_respect_the_floor() {
        let reg = crate::measures::DistributionRegistry::with_defaults();
        let dist = reg.build("dirac:2").unwrap();
        let mut s = BitStream::from_seed(4);
        let c = sample_c(&dist, &mut s, 12).unwrap();
        assert!(c.contains(&Dyadic::from_int(2)));
        assert!(c.lo() >= &Dyadic::one());
    }

    #[test]
    fn gap_statistics_rejects_bad_grids() {
        let vals: Vec<DyadicInterval> = (0..6).map(|_| DyadicInterval::zero()).collect();
        assert!(matches!(
            gap_statistics(&vals),
            Err(WienerError::InvalidValues(_))
        ));
    }
}

