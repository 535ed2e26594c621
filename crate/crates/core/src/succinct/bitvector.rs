use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORDS_PER_SUPER: usize = 8;
const SUPER_BITS: usize = WORDS_PER_SUPER * 64;

/// Plain bitvector with a two-level rank directory: one u64 cumulative count
/// per 512-bit superblock and a u16 in-superblock offset per word.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
    supers: Vec<u64>,
    blocks: Vec<u16>,
    ones: usize,
}

impl BitVector {
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        let mut cur = 0u64;
        for b in bits {
            if b {
                cur |= 1 << (len % 64);
            }
            len += 1;
            if len % 64 == 0 {
                words.push(cur);
                cur = 0;
            }
        }
        if len % 64 != 0 {
            words.push(cur);
        }
        Self::from_words(words, len)
    }

    /// Length `len` with 1s exactly at the given 0-based positions.
    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for p in ones {
            debug_assert!(p < len);
            words[p / 64] |= 1 << (p % 64);
        }
        Self::from_words(words, len)
    }

    fn from_words(words: Vec<u64>, len: usize) -> Self {
        let n_super = words.len().div_ceil(WORDS_PER_SUPER);
        let mut supers = Vec::with_capacity(n_super);
        let mut blocks = vec![0u16; words.len()];
        let mut total = 0u64;
        for (w, &word) in words.iter().enumerate() {
            if w % WORDS_PER_SUPER == 0 {
                supers.push(total);
            }
            blocks[w] = (total - supers[w / WORDS_PER_SUPER]) as u16;
            total += word.count_ones() as u64;
        }
        BitVector {
            len,
            words,
            supers,
            blocks,
            ones: total as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count(&self, c: bool) -> usize {
        if c {
            self.ones
        } else {
            self.len - self.ones
        }
    }

    /// Bit at 0-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of 1s among the first `i` bits (no bounds check).
    #[inline]
    pub fn rank1_u(&self, i: usize) -> usize {
        let w = i / 64;
        let mut r = if w < self.words.len() {
            self.supers[w / WORDS_PER_SUPER] + self.blocks[w] as u64
        } else {
            return self.ones;
        };
        if i % 64 != 0 {
            r += (self.words[w] & ((1u64 << (i % 64)) - 1)).count_ones() as u64;
        }
        r as usize
    }

    /// Occurrences of bit `c` among the first `i` bits (prefix length, 0..=m).
    pub fn rank(&self, c: bool, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::OutOfRange(i, self.len));
        }
        let r1 = self.rank1_u(i);
        Ok(if c { r1 } else { i - r1 })
    }

    /// 1-based position of the `j`-th occurrence of bit `c` (`j >= 1`).
    pub fn select(&self, c: bool, j: usize) -> Result<usize> {
        let total = self.count(c);
        if j == 0 || j > total {
            return Err(Error::SelectOutOfRange(j, total));
        }
        // binary search over superblocks, then scan words
        let rank_at = |s: usize| {
            let r1 = self.supers[s] as usize;
            if c {
                r1
            } else {
                s * SUPER_BITS - r1
            }
        };
        let (mut lo, mut hi) = (0usize, self.supers.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if rank_at(mid) < j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = j - rank_at(lo);
        for w in lo * WORDS_PER_SUPER..self.words.len() {
            let word = if c { self.words[w] } else { !self.words[w] };
            let cnt = word.count_ones() as usize;
            if cnt >= remaining {
                let mut word = word;
                for _ in 1..remaining {
                    word &= word - 1;
                }
                return Ok(w * 64 + word.trailing_zeros() as usize + 1);
            }
            remaining -= cnt;
        }
        unreachable!("select: directory and words disagree")
    }

    /// Measured size of the bit data plus rank directory, in bits.
    pub fn size_bits(&self) -> usize {
        self.words.len() * 64 + self.supers.len() * 64 + self.blocks.len() * 16
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        BitVector::from_bits(s.bytes().map(|b| b == b'1'))
    }

    #[test]
    fn rank_examples() {
        let b = bv("10110");
        assert_eq!(b.rank(true, 4).unwrap(), 3);
        assert_eq!(b.rank(false, 0).unwrap(), 0);
        assert_eq!(b.rank(false, 5).unwrap(), 2);
    }

    #[test]
    fn select_examples() {
        let b = bv("10110");
        assert_eq!(b.select(true, 2).unwrap(), 3);
        assert_eq!(b.select(false, 1).unwrap(), 2);
        assert!(b.select(true, 4).is_err());
    }

    #[test]
    fn rank_out_of_range() {
        assert!(bv("10110").rank(true, 6).is_err());
    }

    #[test]
    fn space_budget() {
        let m = 1usize << 16;
        let b = BitVector::from_bits((0..m).map(|i| i % 3 == 0));
        assert!(b.size_bits() as f64 <= 1.5 * m as f64);
    }

    proptest! {
        #[test]
        fn inverse_laws(bits in proptest::collection::vec(any::<bool>(), 0..2000)) {
            let b = BitVector::from_bits(bits.iter().copied());
            let mut counts = [0usize; 2];
            for (i, &bit) in bits.iter().enumerate() {
                counts[bit as usize] += 1;
                let c = bit;
                prop_assert_eq!(b.rank(c, i + 1).unwrap(), counts[c as usize]);
                prop_assert_eq!(b.select(c, counts[c as usize]).unwrap(), i + 1);
            }
            for c in [false, true] {
                for j in 1..=counts[c as usize] {
                    let p = b.select(c, j).unwrap();
                    prop_assert_eq!(b.rank(c, p).unwrap(), j);
                    prop_assert_eq!(b.get(p - 1), c);
                }
            }
        }
    }

    #[test]
    fn big_vector_rank_select() {
        let m = 100_000;
        let b = BitVector::from_bits((0..m).map(|i| (i * 2654435761usize) % 7 < 3));
        let mut ones = 0;
        for i in 0..m {
            if b.get(i) {
                ones += 1;
                assert_eq!(b.select(true, ones).unwrap(), i + 1);
            }
            assert_eq!(b.rank(true, i + 1).unwrap(), ones);
        }
    }
}
