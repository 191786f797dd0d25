//! Fair-coin bit streams and finite bit words.
//!
//! The seeded generator is counter-based (a splitmix-style mix of (seed,
//! block index)), so bit `i` is addressable without replaying bits `0..i-1`
//! and substreams are derived by re-keying in a separate key domain rather
//! than by splitting state. Reproducibility: a seed determines the entire
//! stream, byte for byte, across runs and platforms.

use crate::dyadic::{Dyadic, DyadicInterval};
use num_bigint::BigInt;
use rand::RngCore;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BitSourceError {
    #[error("entropy source failed: {0}")]
    Entropy(String),
    #[error("fixed bit source exhausted after {0} bits")]
    Exhausted(u64),
    #[error("cannot parse {0:?} as a bit word")]
    ParseWord(String),
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SUBSTREAM_SALT: u64 = 0xD6E8_FEB8_6659_FD93;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn block(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

/// Bit `index` of the seeded stream, computed directly from the counter.
pub fn seeded_bit(seed: u64, index: u64) -> bool {
    (block(seed, index / 64) >> (index % 64)) & 1 == 1
}

/// Seed of substream `k` of `seed`; keyed in a domain distinct from block
/// generation so parent and child bits never coincide by construction.
fn child_seed(seed: u64, k: u64) -> u64 {
    mix((seed ^ SUBSTREAM_SALT).wrapping_add(GOLDEN.wrapping_mul(k.wrapping_add(1))))
}

#[derive(Clone)]
enum Source {
    Seeded { seed: u64, next_block: u64, buf: u64, buf_left: u8 },
    Entropy { buf: u64, buf_left: u8 },
    Fixed { bits: Arc<Vec<bool>>, pos: usize, cycle: bool },
}

/// An endless (or, for fixed test inputs, finite) stream of fair coin flips.
#[derive(Clone)]
pub struct BitStream {
    source: Source,
    consumed: u64,
    total: Arc<AtomicU64>,
}

impl BitStream {
    pub fn from_seed(seed: u64) -> Self {
        BitStream {
            source: Source::Seeded { seed, next_block: 0, buf: 0, buf_left: 0 },
            consumed: 0,
            total: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Nondeterministic stream backed by the operating system's entropy.
    pub fn from_entropy() -> Self {
        BitStream {
            source: Source::Entropy { buf: 0, buf_left: 0 },
            consumed: 0,
            total: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Finite stream that yields exactly `bits` and then errors; used to feed
    /// previously produced output back in as input.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitStream {
            source: Source::Fixed { bits: Arc::new(bits), pos: 0, cycle: false },
            consumed: 0,
            total: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Endless repetition of `pattern`; the adversarial-input constructor
    /// (e.g. `0101...` landing exactly on an interval endpoint).
    pub fn cycling(pattern: Vec<bool>) -> Self {
        assert!(!pattern.is_empty(), "cycling pattern must be nonempty");
        BitStream {
            source: Source::Fixed { bits: Arc::new(pattern), pos: 0, cycle: true },
            consumed: 0,
            total: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Substream `k`: independent of the parent (separate key domain) and of
    /// every other substream index. Entropy streams hand out fresh entropy;
    /// fixed streams are shared as-is (test plumbing).
    pub fn substream(&self, k: u64) -> BitStream {
        let source = match &self.source {
            Source::Seeded { seed, .. } => Source::Seeded {
                seed: child_seed(*seed, k),
                next_block: 0,
                buf: 0,
                buf_left: 0,
            },
            Source::Entropy { .. } => Source::Entropy { buf: 0, buf_left: 0 },
            Source::Fixed { bits, pos, cycle } => {
                Source::Fixed { bits: bits.clone(), pos: *pos, cycle: *cycle }
            }
        };
        BitStream { source, consumed: 0, total: self.total.clone() }
    }

    pub fn next_bit(&mut self) -> Result<bool, BitSourceError> {
        let bit = match &mut self.source {
            Source::Seeded { seed, next_block, buf, buf_left } => {
                if *buf_left == 0 {
                    *buf = block(*seed, *next_block);
                    *next_block += 1;
                    *buf_left = 64;
                }
                let b = *buf & 1 == 1;
                *buf >>= 1;
                *buf_left -= 1;
                b
            }
            Source::Entropy { buf, buf_left } => {
                if *buf_left == 0 {
                    let mut bytes = [0u8; 8];
                    rand::rngs::OsRng
                        .try_fill_bytes(&mut bytes)
                        .map_err(|e| BitSourceError::Entropy(e.to_string()))?;
                    *buf = u64::from_le_bytes(bytes);
                    *buf_left = 64;
                }
                let b = *buf & 1 == 1;
                *buf >>= 1;
                *buf_left -= 1;
                b
            }
            Source::Fixed { bits, pos, cycle } => {
                if *pos >= bits.len() {
                    if *cycle {
                        *pos = 0;
                    } else {
                        return Err(BitSourceError::Exhausted(self.consumed));
                    }
                }
                let b = bits[*pos];
                *pos += 1;
                b
            }
        };
        self.consumed += 1;
        self.total.fetch_add(1, Ordering::Relaxed);
        Ok(bit)
    }

    pub fn next_word(&mut self, len: usize) -> Result<Word, BitSourceError> {
        let mut w = Word::empty();
        for _ in 0..len {
            w.push(self.next_bit()?);
        }
        Ok(w)
    }

    /// The same stream with bit accounting detached from its family:
    /// `total_consumed` starts at zero and counts only this stream and
    /// substreams derived after the split. Needed when sibling streams run
    /// on worker threads and each wants its own budget.
    pub fn detached(&self) -> BitStream {
        BitStream {
            source: self.source.clone(),
            consumed: self.consumed,
            total: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Bits consumed from this stream (excluding substreams).
    pub fn consumed_count(&self) -> u64 {
        self.consumed
    }

    /// Bits consumed by this stream and every substream derived from it.
    pub fn total_consumed(&self) -> u64 {
        self.total.load(Ordering::Relaxed)
    }
}

/// A finite word of coin flips, most significant (first-drawn) bit first.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    bits: Vec<bool>,
}

impl Word {
    pub fn empty() -> Self {
        Word { bits: Vec::new() }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        Word { bits: bits.into_iter().collect() }
    }

    pub fn parse(s: &str) -> Result<Self, BitSourceError> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(BitSourceError::ParseWord(s.to_string())),
            }
        }
        Ok(Word { bits })
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// The word extended by one bit (tree-child in the cylinder ordering).
    pub fn child(&self, bit: bool) -> Word {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// The word read as a binary integer (`0b...`), i.e. its rank among
    /// same-length words in lexicographic order.
    pub fn index_in_level(&self) -> u64 {
        assert!(self.bits.len() <= 63, "word too long for a u64 rank");
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// The set of infinite continuations of `w` under the binary-expansion map:
/// `[sum_j w_j 2^(-j-1), same + 2^-|w|]`, exactly.
pub fn rho_b_enclosure(w: &Word) -> DyadicInterval {
    let mut m = BigInt::from(0u32);
    for b in w.iter() {
        m = (m << 1) + u32::from(b);
    }
    let len = w.len() as i64;
    let lo = Dyadic::new(m.clone(), -len);
    let hi = Dyadic::new(m + 1u32, -len);
    DyadicInterval::new(lo, hi).expect("prefix enclosure is ordered")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_stream_is_reproducible_and_addressable() {
        let mut a = BitStream::from_seed(42);
        let mut b = BitStream::from_seed(42);
        let bits_a: Vec<bool> = (0..256).map(|_| a.next_bit().unwrap()).collect();
        let bits_b: Vec<bool> = (0..256).map(|_| b.next_bit().unwrap()).collect();
        assert_eq!(bits_a, bits_b);
        for (i, &bit) in bits_a.iter().enumerate() {
            assert_eq!(seeded_bit(42, i as u64), bit);
        }
        let mut c = BitStream::from_seed(43);
        let bits_c: Vec<bool> = (0..256).map(|_| c.next_bit().unwrap()).collect();
        assert_ne!(bits_a, bits_c);
        assert_eq!(a.consumed_count(), 256);
    }

    #[test]
    fn substreams_differ_from_parent_and_each_other() {
        let root = BitStream::from_seed(7);
        let mut s0 = root.substream(0);
        let mut s1 = root.substream(1);
        let mut parent = BitStream::from_seed(7);
        let a: Vec<bool> = (0..128).map(|_| s0.next_bit().unwrap()).collect();
        let b: Vec<bool> = (0..128).map(|_| s1.next_bit().unwrap()).collect();
        let p: Vec<bool> = (0..128).map(|_| parent.next_bit().unwrap()).collect();
        assert_ne!(a, b);
        assert_ne!(a, p);
        assert_ne!(b, p);
        // nested derivation is reproducible
        let x: Vec<bool> = {
            let mut s = BitStream::from_seed(7).substream(1).substream(3);
            (0..64).map(|_| s.next_bit().unwrap()).collect()
        };
        let y: Vec<bool> = {
            let mut s = BitStream::from_seed(7).substream(1).substream(3);
            (0..64).map(|_| s.next_bit().unwrap()).collect()
        };
        assert_eq!(x, y);
    }

    #[test]
    fn shared_total_counts_substream_bits() {
        let mut root = BitStream::from_seed(1);
        let mut child = root.substream(9);
        for _ in 0..10 {
            root.next_bit().unwrap();
        }
        for _ in 0..5 {
            child.next_bit().unwrap();
        }
        assert_eq!(root.consumed_count(), 10);
        assert_eq!(child.consumed_count(), 5);
        assert_eq!(root.total_consumed(), 15);
    }

    #[test]
    fn fixed_sources() {
        let mut s = BitStream::from_bits(vec![true, false, true]);
        assert!(s.next_bit().unwrap());
        assert!(!s.next_bit().unwrap());
        assert!(s.next_bit().unwrap());
        assert!(matches!(s.next_bit(), Err(BitSourceError::Exhausted(3))));

        let mut c = BitStream::cycling(vec![false, true]);
        let pattern: Vec<bool> = (0..6).map(|_| c.next_bit().unwrap()).collect();
        assert_eq!(pattern, vec![false, true, false, true, false, true]);
    }

    #[test]
    fn empirical_mean_near_half() {
        let mut s = BitStream::from_seed(2024);
        let n = 100_000;
        let ones: u64 = (0..n).map(|_| s.next_bit().unwrap() as u64).sum();
        let mean = ones as f64 / n as f64;
        // 4 sigma for a fair coin over 1e5 draws
        assert!((mean - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn chi_square_on_3bit_blocks() {
        let mut s = BitStream::from_seed(99);
        let blocks = 33_333;
        let mut counts = [0u64; 8];
        for _ in 0..blocks {
            let mut v = 0usize;
            for _ in 0..3 {
                v = (v << 1) | s.next_bit().unwrap() as usize;
            }
            counts[v] += 1;
        }
        let expected = blocks as f64 / 8.0;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square critical value, 7 degrees of freedom, significance 0.001
        assert!(stat < 24.322, "chi-square statistic {stat}");
    }

    #[test]
    fn word_basics() {
        let w = Word::parse("0101").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "0101");
        assert_eq!(w.index_in_level(), 5);
        assert!(Word::parse("01x").is_err());
        assert!(Word::empty() < w); // prefix sorts first
        assert!(Word::parse("0011").unwrap() < w);
        assert_eq!(w.child(true).to_string(), "01011");
    }

    #[test]
    fn prefix_enclosures() {
        assert_eq!(rho_b_enclosure(&Word::empty()), DyadicInterval::new(Dyadic::zero(), Dyadic::one()).unwrap());
        let one = rho_b_enclosure(&Word::parse("1").unwrap());
        assert_eq!(*one.lo(), Dyadic::from_pow2_ratio(1, 1));
        assert_eq!(*one.hi(), Dyadic::one());
        let w = rho_b_enclosure(&Word::parse("0101").unwrap());
        assert_eq!(*w.lo(), Dyadic::from_pow2_ratio(5, 4));
        assert_eq!(*w.hi(), Dyadic::from_pow2_ratio(6, 4));
    }

    #[test]
    fn prefix_enclosures_subdivide() {
        let mut s = BitStream::from_seed(5);
        for _ in 0..50 {
            let w = s.next_word(6).unwrap();
            let parent = rho_b_enclosure(&w);
            let left = rho_b_enclosure(&w.child(false));
            let right = rho_b_enclosure(&w.child(true));
            assert_eq!(left.hull(&right), parent);
            assert_eq!(left.hi(), right.lo());
            assert_eq!(left.width(), right.width());
        }
    }
}
