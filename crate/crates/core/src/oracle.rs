//! Brute-force reference implementation. Shares only the corpus types with
//! the engines; used by `ct verify` and the acceptance fuzzing.

use crate::corpus::{CategoryTree, Corpus, QueryResult};
use crate::error::{Error, Result};

pub struct OracleIndex<'a> {
    corpus: &'a Corpus,
    height: u32,
    /// anc[j][i-1] = level-i ancestor of document j+1's leaf, by parent walking.
    anc: Vec<Vec<u32>>,
}

impl<'a> OracleIndex<'a> {
    pub fn build(corpus: &'a Corpus, tree: &CategoryTree) -> Self {
        let anc = tree
            .leaves
            .iter()
            .map(|&leaf| {
                let mut chain = vec![leaf];
                let mut v = leaf;
                while let Some(p) = tree.parent(v) {
                    chain.push(p);
                    v = p;
                }
                chain.reverse();
                chain
            })
            .collect();
        OracleIndex {
            corpus,
            height: tree.height,
            anc,
        }
    }

    /// All level-`level` categories with at least one document containing `p`.
    pub fn query(&self, p: &[u8], level: u32) -> Result<QueryResult> {
        self.corpus.validate_pattern(p)?;
        if level < 1 || level > self.height {
            return Err(Error::LevelOutOfRange(level, self.height));
        }
        let mut nodes: Vec<u32> = self
            .anc
            .iter()
            .enumerate()
            .filter(|(j, _)| contains(self.corpus.document(*j as u32 + 1), p))
            .map(|(_, chain)| chain[level as usize - 1])
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        Ok(QueryResult { level, nodes })
    }
}

fn contains(doc: &[u8], p: &[u8]) -> bool {
    doc.len() >= p.len() && doc.windows(p.len()).any(|w| w == p)
}

/// Total occurrences of `p` across all documents, overlapping allowed.
pub fn oracle_count(corpus: &Corpus, p: &[u8]) -> usize {
    corpus
        .documents()
        .iter()
        .map(|doc| {
            if doc.len() < p.len() {
                0
            } else {
                doc.windows(p.len()).filter(|w| *w == p).count()
            }
        })
        .sum()
}

/// Naive comparison-sort suffix array, 0-based positions.
pub fn oracle_suffix_array(text: &[u8]) -> Vec<u32> {
    let mut sa: Vec<u32> = (0..text.len() as u32).collect();
    sa.sort_by(|&a, &b| text[a as usize..].cmp(&text[b as usize..]));
    sa
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn overlapping_count() {
        let c = Corpus::new(vec![b"aaa".to_vec()], None).unwrap();
        assert_eq!(oracle_count(&c, b"aa"), 2);
    }

    #[test]
    fn naive_sa_example() {
        assert_eq!(oracle_suffix_array(&[b'a', 0]), vec![1, 0]);
    }

    #[test]
    fn query_running_example() {
        let c = Corpus::new(
            ["ab", "ba", "aa", "bb"].iter().map(|s| s.bytes().collect()).collect(),
            None,
        )
        .unwrap();
        let t = CategoryTree::new(
            vec![None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)],
            vec![3, 4, 5, 6],
            4,
        )
        .unwrap();
        let o = OracleIndex::build(&c, &t);
        // 'a' occurs in docs 1,2,3 whose level-2 ancestors are u=1,u=1,v=2
        assert_eq!(o.query(b"a", 2).unwrap().nodes, vec![1, 2]);
        assert_eq!(o.query(b"bab", 1).unwrap().nodes, Vec::<u32>::new());
        assert!(o.query(b"c", 1).is_err()); // byte outside the alphabet
        // leaf level returns the matching documents' leaves
        assert_eq!(o.query(b"a", 3).unwrap().nodes, vec![3, 4, 5]);
        assert!(o.query(b"a", 4).is_err());
    }

    #[test]
    fn sa_oracles_agree_with_doubling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let nd = rng.gen_range(1..=4);
            let c = crate::gen::random_corpus(&mut rng, nd, 25, 3);
            assert_eq!(
                crate::text::suffix_array(&c.concat),
                oracle_suffix_array(&c.concat)
            );
        }
    }
}
