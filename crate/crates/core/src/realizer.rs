//! Pushing the fair-coin measure forward onto an arbitrary cylinder-weighted
//! measure on Cantor space.
//!
//! A target measure assigns each finite word `w` the mass of its cylinder
//! (all infinite continuations of `w`). Laying those masses out in
//! lexicographic order tiles (0,1) with disjoint open intervals `I_w`, one
//! per word of a given length, nested across lengths. The realizer reads
//! fair bits as a shrinking enclosure of a uniform point in (0,1) and emits
//! output bit `b` as soon as the enclosure is strictly inside `I_{w·b}`.
//!
//! Inputs whose value lands exactly on a partition endpoint can never be
//! certified into either side; they form the countable exceptional set on
//! which the realizer is deliberately partial, surfaced as a stall error
//! with the offending endpoint.

use crate::bitsource::{BitSourceError, BitStream, Word};
use crate::dyadic::rational::rational_to_enclosure;
use crate::dyadic::{compare_strict, Dyadic, DyadicInterval, Ladder, StrictCmp};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RealizerError {
    #[error(transparent)]
    Bits(#[from] BitSourceError),
    #[error("invalid cylinder weights: {0}")]
    InvalidWeights(String),
    #[error("weights undefined for cylinder {word:?} (table depth {depth})")]
    WeightUndefined { word: String, depth: usize },
    #[error(
        "stalled after {bits} input bits with output {emitted:?}: the input enclosure \
         straddles the partition endpoint {endpoint} (budget {cap} bits per output bit)"
    )]
    Stall { input_prefix: Word, endpoint: String, emitted: String, bits: u64, cap: u32 },
}

/// A Borel measure on Cantor space, presented through the masses of its
/// cylinders.
pub trait CylinderWeights: Send + Sync {
    /// Enclosure of the cylinder mass of `w`, of width at most `2^-n`.
    fn weight(&self, w: &Word, n: u32) -> Result<DyadicInterval, RealizerError>;

    /// The exact cylinder mass, where available. Implementations must be
    /// consistent: if the empty word has an exact mass, every word it
    /// supports does.
    fn exact_weight(&self, w: &Word) -> Option<BigRational> {
        let _ = w;
        None
    }
}

/// The depth-`n` tiling of (0,1): one open interval per length-`n` word, in
/// lexicographic order, with lengths equal to the cylinder masses.
#[derive(Debug, Clone)]
pub struct IntervalPartition {
    depth: usize,
    cells: Vec<PartitionCell>,
}

#[derive(Debug, Clone)]
pub struct PartitionCell {
    pub word: Word,
    pub lo: BigRational,
    pub hi: BigRational,
}

impl IntervalPartition {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn cells(&self) -> &[PartitionCell] {
        &self.cells
    }

    pub fn cell(&self, w: &Word) -> Option<&PartitionCell> {
        if w.len() != self.depth {
            return None;
        }
        self.cells.get(w.index_in_level() as usize)
    }
}

/// Lay out the depth-`n` cylinder masses as prefix sums.
pub fn interval_partition(
    g: &dyn CylinderWeights,
    n: usize,
) -> Result<IntervalPartition, RealizerError> {
    if n > 26 {
        return Err(RealizerError::InvalidWeights(format!(
            "partition of depth {n} would have 2^{n} cells"
        )));
    }
    let mut cells = Vec::with_capacity(1usize << n);
    let mut acc = BigRational::zero();
    for idx in 0..(1u64 << n) {
        let word = word_from_index(idx, n);
        let w = g
            .exact_weight(&word)
            .ok_or_else(|| RealizerError::WeightUndefined { word: word.to_string(), depth: n })?;
        if w.is_negative() {
            return Err(RealizerError::InvalidWeights(format!(
                "cylinder {word:?} has negative weight {w}"
            )));
        }
        let lo = acc.clone();
        acc += &w;
        cells.push(PartitionCell { word, lo, hi: acc.clone() });
    }
    if !acc.is_one() {
        return Err(RealizerError::InvalidWeights(format!(
            "depth-{n} weights sum to {acc}, not 1"
        )));
    }
    Ok(IntervalPartition { depth: n, cells })
}

fn word_from_index(idx: u64, len: usize) -> Word {
    Word::from_bits((0..len).map(|j| (idx >> (len - 1 - j)) & 1 == 1))
}

/// Emit `m` output bits distributed according to `g`, consuming input bits
/// on demand. Each output bit gets an input budget of `ladder.cap` bits
/// (checked at the ladder's rungs); exceeding it raises a stall with the
/// endpoint the input is pinned against.
pub fn push_bits(
    g: &dyn CylinderWeights,
    stream: &mut BitStream,
    m: usize,
    ladder: &Ladder,
) -> Result<Word, RealizerError> {
    if g.exact_weight(&Word::empty()).is_some() {
        push_bits_exact(g, stream, m, ladder)
    } else {
        push_bits_enclosed(g, stream, m, ladder)
    }
}

/// Exact-rational input enclosure: value in [num/2^len, (num+1)/2^len].
struct InputPrefix {
    word: Word,
    num: BigInt,
}

impl InputPrefix {
    fn new() -> Self {
        InputPrefix { word: Word::empty(), num: BigInt::zero() }
    }

    fn push(&mut self, stream: &mut BitStream) -> Result<(), BitSourceError> {
        let b = stream.next_bit()?;
        self.word.push(b);
        self.num = (&self.num << 1) + u32::from(b);
        Ok(())
    }

    fn bounds(&self) -> (BigRational, BigRational) {
        let den = BigInt::one() << self.word.len();
        (
            BigRational::new(self.num.clone(), den.clone()),
            BigRational::new(&self.num + 1u32, den),
        )
    }

    fn bounds_dyadic(&self) -> DyadicInterval {
        crate::bitsource::rho_b_enclosure(&self.word)
    }
}

fn push_bits_exact(
    g: &dyn CylinderWeights,
    stream: &mut BitStream,
    m: usize,
    ladder: &Ladder,
) -> Result<Word, RealizerError> {
    let mut out = Word::empty();
    let mut cell_lo = BigRational::zero();
    let mut cell_hi = BigRational::one();
    let mut input = InputPrefix::new();
    for _ in 0..m {
        let left = out.child(false);
        let w0 = g.exact_weight(&left).ok_or_else(|| RealizerError::WeightUndefined {
            word: left.to_string(),
            depth: out.len() + 1,
        })?;
        if w0.is_negative() {
            return Err(RealizerError::InvalidWeights(format!(
                "cylinder {left:?} has negative weight {w0}"
            )));
        }
        let split = &cell_lo + &w0;
        if split > cell_hi {
            return Err(RealizerError::InvalidWeights(format!(
                "cylinder {left:?} is heavier than its parent"
            )));
        }
        let start_len = input.word.len();
        let mut emitted = false;
        for rung in ladder.steps() {
            while input.word.len() - start_len < rung as usize {
                input.push(stream)?;
            }
            let (a, c) = input.bounds();
            if a > cell_lo && c < split {
                out.push(false);
                cell_hi = split.clone();
                emitted = true;
                break;
            }
            if a > split && c < cell_hi {
                out.push(true);
                cell_lo = split.clone();
                emitted = true;
                break;
            }
        }
        if !emitted {
            let (a, c) = input.bounds();
            let endpoint = [&split, &cell_lo, &cell_hi]
                .into_iter()
                .find(|e| **e >= a && **e <= c)
                .map(|e| e.to_string())
                .unwrap_or_else(|| split.to_string());
            return Err(RealizerError::Stall {
                bits: input.word.len() as u64,
                input_prefix: input.word,
                endpoint,
                emitted: out.to_string(),
                cap: ladder.cap,
            });
        }
    }
    Ok(out)
}

fn push_bits_enclosed(
    g: &dyn CylinderWeights,
    stream: &mut BitStream,
    m: usize,
    ladder: &Ladder,
) -> Result<Word, RealizerError> {
    let mut out = Word::empty();
    let mut input = InputPrefix::new();
    for _ in 0..m {
        let start_len = input.word.len();
        let mut emitted = false;
        let mut last_cells: Option<(DyadicInterval, DyadicInterval, DyadicInterval)> = None;
        for rung in ladder.steps() {
            while input.word.len() - start_len < rung as usize {
                input.push(stream)?;
            }
            // enclosure error accumulates once per level of the output path
            let p = rung + out.len() as u32 + 4;
            let (lo, hi) = cell_enclosure(g, &out, p)?;
            let split = &lo + &g.weight(&out.child(false), p)?;
            let r = input.bounds_dyadic();
            if compare_strict(&lo, &r) == StrictCmp::Lt && compare_strict(&r, &split) == StrictCmp::Lt
            {
                out.push(false);
                emitted = true;
                break;
            }
            if compare_strict(&split, &r) == StrictCmp::Lt
                && compare_strict(&r, &hi) == StrictCmp::Lt
            {
                out.push(true);
                emitted = true;
                break;
            }
            last_cells = Some((lo, split, hi));
        }
        if !emitted {
            let r = input.bounds_dyadic();
            let endpoint = last_cells
                .map(|(lo, split, hi)| {
                    [split, lo, hi]
                        .into_iter()
                        .find(|e| compare_strict(e, &r) == StrictCmp::Overlap)
                        .map(|e| e.to_decimal_string())
                        .unwrap_or_else(|| "unknown".to_string())
                })
                .unwrap_or_else(|| "unknown".to_string());
            return Err(RealizerError::Stall {
                bits: input.word.len() as u64,
                input_prefix: input.word,
                endpoint,
                emitted: out.to_string(),
                cap: ladder.cap,
            });
        }
    }
    Ok(out)
}

/// Enclosures of the endpoints of `I_out` at precision `p`, rebuilt by
/// descending the output path: entering a right child shifts the lower
/// endpoint up by the left sibling's mass.
fn cell_enclosure(
    g: &dyn CylinderWeights,
    out: &Word,
    p: u32,
) -> Result<(DyadicInterval, DyadicInterval), RealizerError> {
    let mut lo = DyadicInterval::point(Dyadic::zero());
    let mut prefix = Word::empty();
    for b in out.iter() {
        if b {
            lo = &lo + &g.weight(&prefix.child(false), p)?;
        }
        prefix.push(b);
    }
    let hi = &lo + &g.weight(out, p)?;
    Ok((lo, hi))
}

/// Cylinder masses as an explicit table: exact rational leaf weights at a
/// fixed depth, with interior masses derived by summation.
#[derive(Debug, Clone)]
pub struct WeightTable {
    // levels[k][i] = mass of the length-k word with lexicographic index i
    levels: Vec<Vec<BigRational>>,
}

impl WeightTable {
    /// Build from the weights of all length-d words in lexicographic order.
    pub fn from_leaves(leaves: Vec<BigRational>) -> Result<Self, RealizerError> {
        if leaves.len() < 2 || !leaves.len().is_power_of_two() {
            return Err(RealizerError::InvalidWeights(format!(
                "need a power-of-two leaf count of at least 2, got {}",
                leaves.len()
            )));
        }
        let depth = leaves.len().trailing_zeros() as usize;
        for (i, w) in leaves.iter().enumerate() {
            if w.is_negative() {
                return Err(RealizerError::InvalidWeights(format!(
                    "cylinder {:?} has negative weight {w}",
                    word_from_index(i as u64, depth).to_string()
                )));
            }
        }
        let mut levels = vec![leaves];
        while levels.last().unwrap().len() > 1 {
            let prev = levels.last().unwrap();
            let next: Vec<BigRational> =
                prev.chunks(2).map(|pair| &pair[0] + &pair[1]).collect();
            levels.push(next);
        }
        levels.reverse();
        if !levels[0][0].is_one() {
            return Err(RealizerError::InvalidWeights(format!(
                "the root cylinder \"\" (whole space) has mass {}, not 1",
                levels[0][0]
            )));
        }
        Ok(WeightTable { levels })
    }

    /// Parse the JSON map form, e.g. `{"0":"1/3","1":"2/3"}`. Keys are
    /// bit-strings; every word at the deepest mentioned length must be
    /// present, and any shallower entries must agree with the sums of their
    /// children.
    pub fn from_json_str(text: &str) -> Result<Self, RealizerError> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text)
            .map_err(|e| RealizerError::InvalidWeights(format!("bad JSON: {e}")))?;
        let mut entries: BTreeMap<Word, BigRational> = BTreeMap::new();
        let mut depth = 0usize;
        for (k, v) in &raw {
            let w = Word::parse(k)
                .map_err(|_| RealizerError::InvalidWeights(format!("bad cylinder key {k:?}")))?;
            let q = crate::dyadic::rational::parse_rational(v).map_err(|e| {
                RealizerError::InvalidWeights(format!("cylinder {k:?}: bad weight {v:?} ({e})"))
            })?;
            depth = depth.max(w.len());
            entries.insert(w, q);
        }
        if depth == 0 {
            return Err(RealizerError::InvalidWeights(
                "no cylinder weights given".to_string(),
            ));
        }
        let mut leaves = Vec::with_capacity(1 << depth);
        for idx in 0..(1u64 << depth) {
            let w = word_from_index(idx, depth);
            match entries.get(&w) {
                Some(q) => leaves.push(q.clone()),
                None => {
                    return Err(RealizerError::InvalidWeights(format!(
                        "missing weight for cylinder {:?}",
                        w.to_string()
                    )))
                }
            }
        }
        let table = Self::from_leaves(leaves)?;
        // shallower entries, if present, must match the derived sums
        for (w, q) in &entries {
            if w.len() < depth {
                let derived = table.exact_weight(w).unwrap();
                if derived != *q {
                    return Err(RealizerError::InvalidWeights(format!(
                        "cylinder {:?}: given weight {q} but its children sum to {derived}",
                        w.to_string()
                    )));
                }
            }
        }
        Ok(table)
    }

    pub fn from_json_path(path: impl AsRef<std::path::Path>) -> Result<Self, RealizerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RealizerError::InvalidWeights(format!("cannot read weights: {e}")))?;
        Self::from_json_str(&text)
    }

    /// The fair table: every depth-d cylinder has mass 2^-d.
    pub fn fair(depth: usize) -> Self {
        let leaf = BigRational::new(BigInt::one(), BigInt::one() << depth);
        Self::from_leaves(vec![leaf; 1 << depth]).expect("fair weights are consistent")
    }

    /// A random table: each node's mass splits between its children at a
    /// uniform dyadic fraction with `denom_bits` bits.
    pub fn random(
        depth: usize,
        denom_bits: u32,
        stream: &mut BitStream,
    ) -> Result<Self, RealizerError> {
        let mut level = vec![BigRational::one()];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(level.len() * 2);
            for w in &level {
                let mut num = BigInt::zero();
                for _ in 0..denom_bits {
                    num = (&num << 1) + u32::from(stream.next_bit()?);
                }
                let f = BigRational::new(num, BigInt::one() << denom_bits);
                let left = w * &f;
                let right = w - &left;
                next.push(left);
                next.push(right);
            }
            level = next;
        }
        Self::from_leaves(level)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn leaf_weights(&self) -> &[BigRational] {
        self.levels.last().unwrap()
    }
}

impl CylinderWeights for WeightTable {
    fn weight(&self, w: &Word, n: u32) -> Result<DyadicInterval, RealizerError> {
        match self.exact_weight(w) {
            Some(q) => Ok(rational_to_enclosure(&q, n)),
            None => Err(RealizerError::WeightUndefined {
                word: w.to_string(),
                depth: self.depth(),
            }),
        }
    }

    fn exact_weight(&self, w: &Word) -> Option<BigRational> {
        self.levels.get(w.len()).map(|lvl| lvl[w.index_in_level() as usize].clone())
    }
}

/// The Bernoulli product measure: bit j is 1 with probability `p`,
/// independently. Defined at every depth, so it exercises the realizer's
/// lazy evaluation of weights along the output path.
#[derive(Debug, Clone)]
pub struct ProductWeights {
    p: BigRational,
    q: BigRational,
}

impl ProductWeights {
    pub fn new(p: BigRational) -> Result<Self, RealizerError> {
        if p <= BigRational::zero() || p >= BigRational::one() {
            return Err(RealizerError::InvalidWeights(format!(
                "Bernoulli parameter must be in (0,1), got {p}"
            )));
        }
        let q = &BigRational::one() - &p;
        Ok(ProductWeights { p, q })
    }
}

impl CylinderWeights for ProductWeights {
    fn weight(&self, w: &Word, n: u32) -> Result<DyadicInterval, RealizerError> {
        Ok(rational_to_enclosure(&self.exact_weight(w).unwrap(), n))
    }

    fn exact_weight(&self, w: &Word) -> Option<BigRational> {
        let mut acc = BigRational::one();
        for b in w.iter() {
            acc *= if b { &self.p } else { &self.q };
        }
        Some(acc)
    }
}
