//! Suffix array, BWT backward search, sampled locate, and the document array
//! over the concatenation T1$T2$...TD$.

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SEPARATOR};
use crate::error::{Error, Result};
use crate::succinct::{BitVector, IntVec, Shape, WaveletTree};

/// Suffix array by prefix doubling, 0-based positions.
pub fn suffix_array(text: &[u8]) -> Vec<u32> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u32> = text.iter().map(|&b| b as u32).collect();
    let mut tmp = vec![0u32; n];
    let mut k = 1usize;
    loop {
        let key = |i: u32| {
            let i = i as usize;
            (rank[i], if i + k < n { rank[i + k] + 1 } else { 0 })
        };
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0] as usize] = 0;
        for w in 1..n {
            tmp[sa[w] as usize] =
                tmp[sa[w - 1] as usize] + (key(sa[w]) != key(sa[w - 1])) as u32;
        }
        rank.copy_from_slice(&tmp);
        if rank[sa[n - 1] as usize] as usize == n - 1 {
            return sa;
        }
        k *= 2;
    }
}

/// BWT index over the concatenation: backward-search count plus sampled locate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuffixIndex {
    pub n_prime: usize,
    pub sigma: u8,
    pub sample_rate: usize,
    /// c_table[c] = number of symbols in concat strictly smaller than c.
    c_table: Vec<usize>,
    /// rank over the BWT, balanced wavelet tree over [0..sigma].
    occ: WaveletTree,
    bwt: Vec<u8>,
    /// rows whose suffix-array value is sampled.
    marks: BitVector,
    /// 1-based SA values at marked rows, in row order.
    samples: IntVec,
    /// LF targets for rows whose BWT symbol is the separator, in row order.
    /// The plain C[c] + rank_c formula misorders these rows: all separators
    /// compare equal, so the rank of a separator in the BWT does not track the
    /// rank of the predecessor suffix. One entry per separator occurrence.
    sep_lf: IntVec,
}

impl SuffixIndex {
    /// Default sample rate: max(1, ceil(log2 n')).
    pub fn default_sample_rate(n_prime: usize) -> usize {
        if n_prime <= 2 {
            1
        } else {
            (n_prime - 1).ilog2() as usize + 1
        }
    }

    pub fn build(corpus: &Corpus, sample_rate: usize) -> Self {
        let sa = suffix_array(&corpus.concat);
        Self::from_sa(corpus, &sa, sample_rate)
    }

    pub fn from_sa(corpus: &Corpus, sa: &[u32], sample_rate: usize) -> Self {
        let text = &corpus.concat;
        let n = text.len();
        let s = sample_rate.max(1);
        let bwt: Vec<u8> = sa
            .iter()
            .map(|&i| {
                if i == 0 {
                    text[n - 1]
                } else {
                    text[i as usize - 1]
                }
            })
            .collect();
        let mut c_table = vec![0usize; corpus.sigma as usize + 2];
        for &b in text {
            c_table[b as usize + 1] += 1;
        }
        for c in 1..c_table.len() {
            c_table[c] += c_table[c - 1];
        }
        let symbols: Vec<u64> = (0..=corpus.sigma as u64).collect();
        let shape = Shape::balanced(&symbols);
        let seq: Vec<u64> = bwt.iter().map(|&b| b as u64).collect();
        let occ = WaveletTree::build(&seq, &shape).expect("bwt symbols covered by shape");
        let marked_rows: Vec<usize> = (0..n).filter(|&row| sa[row] as usize % s == 0).collect();
        let samples = IntVec::from_slice(
            &marked_rows
                .iter()
                .map(|&row| sa[row] as u64 + 1)
                .collect::<Vec<_>>(),
        );
        let marks = BitVector::from_ones(n, marked_rows);
        let mut isa = vec![0u32; n];
        for (row, &pos) in sa.iter().enumerate() {
            isa[pos as usize] = row as u32;
        }
        let sep_lf = IntVec::from_slice(
            &(0..n)
                .filter(|&row| bwt[row] == SEPARATOR)
                .map(|row| isa[(sa[row] as usize + n - 1) % n] as u64)
                .collect::<Vec<_>>(),
        );
        SuffixIndex {
            n_prime: n,
            sigma: corpus.sigma,
            sample_rate: s,
            c_table,
            occ,
            bwt,
            marks,
            samples,
            sep_lf,
        }
    }

    pub fn bwt(&self) -> &[u8] {
        &self.bwt
    }

    /// LF step: row of the suffix one position earlier in the text (0-based
    /// rows); the row of suffix 0 wraps to the row of the final separator.
    pub fn lf(&self, row: usize) -> usize {
        let c = self.bwt[row];
        if c == SEPARATOR {
            let k = self.occ.rank(SEPARATOR as u64, row).unwrap();
            self.sep_lf.get(k) as usize
        } else {
            self.c_table[c as usize] + self.occ.rank(c as u64, row).unwrap()
        }
    }

    /// Maximal 1-based inclusive interval of SA rows whose suffixes are
    /// prefixed by `p`, or None when the pattern does not occur.
    pub fn count(&self, p: &[u8]) -> Result<Option<(usize, usize)>> {
        if p.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if let Some(&b) = p.iter().find(|&&b| b == SEPARATOR || b > self.sigma) {
            return Err(Error::InvalidPatternByte(b));
        }
        let (mut l, mut r) = (0usize, self.n_prime); // 0-based half-open rows
        for &c in p.iter().rev() {
            let base = self.c_table[c as usize];
            l = base + self.occ.rank(c as u64, l).unwrap();
            r = base + self.occ.rank(c as u64, r).unwrap();
            if l >= r {
                return Ok(None);
            }
        }
        Ok(Some((l + 1, r)))
    }

    /// SA value (1-based text position) of row `i` (1-based), via LF stepping
    /// from the nearest sampled row. Also returns the number of LF steps.
    pub fn locate(&self, i: usize) -> Result<(usize, u32)> {
        if i == 0 || i > self.n_prime {
            return Err(Error::OutOfRange(i, self.n_prime));
        }
        let mut row = i - 1;
        let mut steps = 0u32;
        while !self.marks.get(row) {
            row = self.lf(row);
            steps += 1;
        }
        let sampled = self.samples.get(self.marks.rank1_u(row)) as usize;
        Ok((sampled + steps as usize, steps))
    }

    pub fn size_bits(&self) -> usize {
        self.occ.bitvector_bits()
            + self.marks.size_bits()
            + self.samples.size_bits()
            + self.sep_lf.size_bits()
            + self.c_table.len() * 64
            + self.bwt.len() * 8
    }
}

/// Suffix-rank -> owning document id (0 for separator suffixes).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DocumentArray {
    /// Packed document ids, present in stored mode only.
    stored: Option<IntVec>,
    /// 1s at separator positions of the concatenation.
    pub sep_bitmap: BitVector,
    pub num_docs: u32,
}

impl DocumentArray {
    pub fn build(corpus: &Corpus, sa: &[u32], stored: bool) -> Self {
        let sep_bitmap = BitVector::from_ones(
            corpus.concat.len(),
            corpus
                .concat
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == SEPARATOR)
                .map(|(i, _)| i),
        );
        let stored = stored.then(|| {
            IntVec::from_slice(
                &sa.iter()
                    .map(|&pos| {
                        if corpus.concat[pos as usize] == SEPARATOR {
                            0u64
                        } else {
                            sep_bitmap.rank1_u(pos as usize) as u64 + 1
                        }
                    })
                    .collect::<Vec<_>>(),
            )
        });
        DocumentArray {
            stored,
            sep_bitmap,
            num_docs: corpus.num_docs() as u32,
        }
    }

    pub fn is_stored(&self) -> bool {
        self.stored.is_some()
    }

    /// Drop the stored array, keeping only the separator bitmap (compact mode).
    pub fn into_compact(mut self) -> Self {
        self.stored = None;
        self
    }

    /// Document id at SA row `i` (1-based); 0 for separator suffixes.
    /// In compact mode this costs one `locate` (LF steps are accumulated into
    /// `lf_steps`) plus a rank on the separator bitmap.
    pub fn doc_at(&self, idx: &SuffixIndex, i: usize, lf_steps: &mut u64) -> Result<u32> {
        if i == 0 || i > self.sep_bitmap.len() {
            return Err(Error::OutOfRange(i, self.sep_bitmap.len()));
        }
        match &self.stored {
            Some(a) => Ok(a.get(i - 1) as u32),
            None => {
                if i <= self.num_docs as usize {
                    return Ok(0);
                }
                let (pos, steps) = idx.locate(i)?;
                *lf_steps += steps as u64;
                Ok(self.sep_bitmap.rank1_u(pos) as u32 + 1)
            }
        }
    }

    pub fn size_bits(&self) -> usize {
        self.stored.as_ref().map_or(0, IntVec::size_bits) + self.sep_bitmap.size_bits()
    }

    /// Bits of the stored id array alone (the n' * ceil(log2(D+1)) target).
    pub fn stored_bits(&self) -> usize {
        self.stored.as_ref().map_or(0, IntVec::size_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::{Rng, SeedableRng};

    fn corpus(strs: &[&str]) -> Corpus {
        Corpus::new(strs.iter().map(|s| s.bytes().collect()).collect(), None).unwrap()
    }

    #[test]
    fn two_suffix_example() {
        let c = corpus(&["a"]);
        let sa = suffix_array(&c.concat);
        assert_eq!(sa, vec![1, 0]); // "$" < "a$"
    }

    #[test]
    fn sa_matches_naive_sort() {
        let c = corpus(&["ab", "ba", "aa", "bb"]);
        let naive = oracle::oracle_suffix_array(&c.concat);
        assert_eq!(suffix_array(&c.concat), naive);
    }

    #[test]
    fn count_examples() {
        let c = corpus(&["ab", "ba", "aa", "bb"]);
        let idx = SuffixIndex::build(&c, 4);
        let (l, r) = idx.count(b"a").unwrap().unwrap();
        assert_eq!(r - l + 1, 4); // 'a' occurs 1+1+2+0 times
        assert!(idx.count(b"zz").is_err()); // 'z' > sigma
        assert_eq!(idx.count(b"bab").unwrap(), None);
        let (l, r) = idx.count(b"ba").unwrap().unwrap();
        assert_eq!(r - l + 1, 1);
        assert!(idx.count(b"").is_err());
        assert!(idx.count(&[0u8]).is_err());
    }

    #[test]
    fn locate_all_sample_rates() {
        let c = corpus(&["ab", "ba", "aa", "bb"]);
        let naive = oracle::oracle_suffix_array(&c.concat);
        for s in [1usize, 4, 32] {
            let idx = SuffixIndex::build(&c, s);
            for i in 1..=c.n_prime {
                let (pos, steps) = idx.locate(i).unwrap();
                assert_eq!(pos, naive[i - 1] as usize + 1);
                assert!((steps as usize) < s.max(1));
            }
            assert!(idx.locate(c.n_prime + 1).is_err());
        }
    }

    #[test]
    fn lf_is_a_full_cycle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let nd = rng.gen_range(1..=6);
            let c = crate::gen::random_corpus(&mut rng, nd, 30, 4);
            let idx = SuffixIndex::build(&c, 4);
            let mut seen = vec![false; c.n_prime];
            let mut row = rng.gen_range(0..c.n_prime);
            for _ in 0..c.n_prime {
                assert!(!seen[row]);
                seen[row] = true;
                row = idx.lf(row);
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn doc_array_modes_agree() {
        let c = corpus(&["ab", "ba", "aa", "bb"]);
        let sa = suffix_array(&c.concat);
        let idx = SuffixIndex::build(&c, 4);
        let stored = DocumentArray::build(&c, &sa, true);
        let compact = DocumentArray::build(&c, &sa, false);
        let mut lf = 0u64;
        for i in 1..=c.n_prime {
            assert_eq!(
                stored.doc_at(&idx, i, &mut lf).unwrap(),
                compact.doc_at(&idx, i, &mut lf).unwrap()
            );
        }
        // zeros occupy exactly the first D rows
        for i in 1..=c.n_prime {
            let d = stored.doc_at(&idx, i, &mut lf).unwrap();
            assert_eq!(d == 0, i <= c.num_docs());
        }
    }

    #[test]
    fn count_equals_naive_occurrences_fuzz() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let sigma = *[2u8, 4, 26].iter().nth(rng.gen_range(0..3)).unwrap();
            let nd = rng.gen_range(1..=8);
            let c = crate::gen::random_corpus(&mut rng, nd, 40, sigma);
            let idx = SuffixIndex::build(&c, 4);
            for _ in 0..30 {
                let p = crate::gen::random_pattern(&mut rng, &c, 6);
                let expected = oracle::oracle_count(&c, &p);
                let got = idx.count(&p).unwrap().map_or(0, |(l, r)| r - l + 1);
                assert_eq!(got, expected);
            }
        }
    }
}
