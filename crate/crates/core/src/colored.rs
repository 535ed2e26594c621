//! Colored range reporting engine: one previous-occurrence reporter per tree
//! level over the virtual arrays A_i[j] = LAQ(leafselect(A[j]), i), with an
//! optional block-sparsified mode (factor alpha) that indexes only per-block
//! minima and recomputes candidates from document-array accesses.

use serde::{Deserialize, Serialize};

use crate::corpus::{CategoryTree, QueryResult};
use crate::error::{Error, Result};
use crate::index::QueryScratch;
use crate::succinct::Rmq;
use crate::text::{DocumentArray, SuffixIndex};
use crate::topo::LevelAncestorIndex;

/// prev[j] = largest j' < j with colors[j'] = colors[j], else 0 (1-based).
pub(crate) fn prev_array(colors: &[u64]) -> Vec<u64> {
    let mut last = std::collections::HashMap::new();
    colors
        .iter()
        .enumerate()
        .map(|(j, &c)| last.insert(c, j as u64 + 1).unwrap_or(0))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum LevelReporter {
    /// alpha = 1: RMQ over the full prev array (retained).
    Exact { rmq: Rmq },
    /// alpha > 1: RMQ over per-block minima of prev only.
    Sparse { rmq: Rmq },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColoredEngine {
    pub alpha: usize,
    n_prime: usize,
    reporters: Vec<LevelReporter>,
    /// Dense per-level rank of every node, addressing the scratch bitvector.
    level_rank: Vec<u32>,
}

impl ColoredEngine {
    /// Build the h per-level reporters from the materialized document array
    /// `a` (0 = separator sentinel).
    pub fn build(
        a: &[u32],
        tree: &CategoryTree,
        laq: &LevelAncestorIndex,
        alpha: usize,
    ) -> Result<Self> {
        if alpha < 1 {
            return Err(Error::InvalidAlpha);
        }
        let n_prime = a.len();
        let mut reporters = Vec::with_capacity(tree.height as usize);
        for level in 1..=tree.height {
            let colors: Vec<u64> = a
                .iter()
                .map(|&doc| {
                    if doc == 0 {
                        u64::MAX // sentinel, never reported
                    } else {
                        laq.laq(laq.leafselect(doc).unwrap(), level).unwrap() as u64
                    }
                })
                .collect();
            let prev = prev_array(&colors);
            reporters.push(if alpha == 1 {
                LevelReporter::Exact { rmq: Rmq::new(prev) }
            } else {
                let bmin: Vec<u64> = prev
                    .chunks(alpha)
                    .map(|b| b.iter().copied().min().unwrap())
                    .collect();
                LevelReporter::Sparse { rmq: Rmq::new(bmin) }
            });
        }
        Ok(ColoredEngine {
            alpha,
            n_prime,
            reporters,
            level_rank: tree.level_local_ranks(),
        })
    }

    pub fn query(
        &self,
        text: &SuffixIndex,
        docs: &DocumentArray,
        laq: &LevelAncestorIndex,
        p: &[u8],
        level: u32,
        scratch: &mut QueryScratch,
    ) -> Result<QueryResult> {
        if level < 1 || level > self.reporters.len() as u32 {
            return Err(Error::LevelOutOfRange(level, self.reporters.len() as u32));
        }
        scratch.stats = crate::index::QueryStats::default();
        let mut nodes = Vec::new();
        if let Some((l, r)) = text.count(p)? {
            self.report_distinct(text, docs, laq, level, l, r, scratch, &mut nodes)?;
        }
        nodes.sort_unstable();
        scratch.reset();
        Ok(QueryResult { level, nodes })
    }

    /// Distinct non-sentinel colors of A_level[l..r], 1-based inclusive.
    #[allow(clippy::too_many_arguments)]
    pub fn report_distinct(
        &self,
        text: &SuffixIndex,
        docs: &DocumentArray,
        laq: &LevelAncestorIndex,
        level: u32,
        l: usize,
        r: usize,
        scratch: &mut QueryScratch,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        if l < 1 || r > self.n_prime || l > r {
            return Err(Error::InvalidRange(l, r));
        }
        let ctx = AccessCtx {
            text,
            docs,
            laq,
            level,
        };
        match &self.reporters[level as usize - 1] {
            LevelReporter::Exact { rmq } => {
                self.exact_rec(rmq, &ctx, l, r, l, scratch, out)?;
            }
            LevelReporter::Sparse { rmq } => {
                self.sparse_report(rmq, &ctx, l, r, scratch, out)?;
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn exact_rec(
        &self,
        rmq: &Rmq,
        ctx: &AccessCtx,
        l: usize,
        r: usize,
        low: usize,
        scratch: &mut QueryScratch,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        if l > r {
            return Ok(());
        }
        let m = rmq.query(l, r)?;
        scratch.stats.rmq_calls += 1;
        if rmq.value(m) >= low as u64 {
            return Ok(());
        }
        if let Some(node) = ctx.access(m, scratch)? {
            if scratch.mark(self.level_rank[node as usize] as usize) {
                out.push(node);
            }
        }
        self.exact_rec(rmq, ctx, l, m - 1, low, scratch, out)?;
        self.exact_rec(rmq, ctx, m + 1, r, low, scratch, out)
    }

    fn sparse_report(
        &self,
        rmq: &Rmq,
        ctx: &AccessCtx,
        l: usize,
        r: usize,
        scratch: &mut QueryScratch,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        let alpha = self.alpha;
        // blocks fully inside [l..r] (0-based block ids)
        let kfs = (l - 1).div_ceil(alpha);
        let kfe = if r == self.n_prime {
            (self.n_prime.div_ceil(alpha)).wrapping_sub(1)
        } else {
            (r / alpha).wrapping_sub(1)
        };
        let scan = |from: usize, to: usize, scratch: &mut QueryScratch, out: &mut Vec<u32>| -> Result<()> {
            for j in from..=to.min(self.n_prime) {
                if let Some(node) = ctx.access(j, scratch)? {
                    if scratch.mark(self.level_rank[node as usize] as usize) {
                        out.push(node);
                    }
                }
            }
            Ok(())
        };
        if kfe == usize::MAX || kfs > kfe {
            return scan(l, r, scratch, out);
        }
        // head and tail partial blocks
        if l <= kfs * alpha {
            scan(l, kfs * alpha, scratch, out)?;
        }
        if (kfe + 1) * alpha < r {
            scan((kfe + 1) * alpha + 1, r, scratch, out)?;
        }
        self.sparse_rec(rmq, ctx, kfs, kfe, l, scratch, out)
    }

    #[allow(clippy::too_many_arguments)]
    fn sparse_rec(
        &self,
        rmq: &Rmq,
        ctx: &AccessCtx,
        a: usize,
        b: usize,
        low: usize,
        scratch: &mut QueryScratch,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        if a > b || b == usize::MAX {
            return Ok(());
        }
        let m = rmq.query(a + 1, b + 1)? - 1;
        scratch.stats.rmq_calls += 1;
        if rmq.value(m + 1) >= low as u64 {
            return Ok(());
        }
        for j in m * self.alpha + 1..=((m + 1) * self.alpha).min(self.n_prime) {
            if let Some(node) = ctx.access(j, scratch)? {
                if scratch.mark(self.level_rank[node as usize] as usize) {
                    out.push(node);
                }
            }
        }
        self.sparse_rec(rmq, ctx, a, m.wrapping_sub(1), low, scratch, out)?;
        self.sparse_rec(rmq, ctx, m + 1, b, low, scratch, out)
    }

    /// Measured reporter bits per level.
    pub fn reporter_bits(&self) -> Vec<usize> {
        self.reporters
            .iter()
            .map(|r| match r {
                LevelReporter::Exact { rmq } | LevelReporter::Sparse { rmq } => rmq.size_bits(),
            })
            .collect()
    }

    /// Indexed cells per sparsified reporter (block-minima count), None in exact mode.
    pub fn indexed_cells(&self) -> Option<usize> {
        self.reporters.first().and_then(|r| match r {
            LevelReporter::Sparse { rmq } => Some(rmq.len()),
            LevelReporter::Exact { .. } => None,
        })
    }
}

struct AccessCtx<'a> {
    text: &'a SuffixIndex,
    docs: &'a DocumentArray,
    laq: &'a LevelAncestorIndex,
    level: u32,
}

impl AccessCtx<'_> {
    /// A_level[j], None at separator sentinels. Counts one A_i access.
    fn access(&self, j: usize, scratch: &mut QueryScratch) -> Result<Option<u32>> {
        scratch.stats.ai_accesses += 1;
        let doc = self
            .docs
            .doc_at(self.text, j, &mut scratch.stats.lf_steps)?;
        if doc == 0 {
            return Ok(None);
        }
        Ok(Some(self.laq.laq(self.laq.leafselect(doc)?, self.level)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::text::{suffix_array, DocumentArray};
    use crate::topo::LevelAncestorIndex;

    #[test]
    fn prev_example() {
        assert_eq!(prev_array(&[1, 2, 1, 3]), vec![0, 0, 1, 0]);
    }

    fn running() -> (Corpus, CategoryTree) {
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
        (c, t)
    }

    fn build_all(
        c: &Corpus,
        t: &CategoryTree,
        alpha: usize,
        stored: bool,
    ) -> (SuffixIndex, DocumentArray, LevelAncestorIndex, ColoredEngine) {
        let sa = suffix_array(&c.concat);
        let idx = SuffixIndex::build(c, 4);
        let da = DocumentArray::build(c, &sa, true);
        let laq = LevelAncestorIndex::build(t);
        let mut lf = 0u64;
        let a: Vec<u32> = (1..=c.n_prime)
            .map(|i| da.doc_at(&idx, i, &mut lf).unwrap())
            .collect();
        let eng = ColoredEngine::build(&a, t, &laq, alpha).unwrap();
        let da = if stored { da } else { da.into_compact() };
        (idx, da, laq, eng)
    }

    #[test]
    fn query_running_examples() {
        let (c, t) = running();
        for (alpha, stored) in [(1, true), (4, true), (2, false), (12, true)] {
            let (idx, da, laq, eng) = build_all(&c, &t, alpha, stored);
            let mut scratch = QueryScratch::new(c.num_docs());
            let q = |p: &[u8], lvl, s: &mut QueryScratch| {
                eng.query(&idx, &da, &laq, p, lvl, s).unwrap().nodes
            };
            assert_eq!(q(b"a", 2, &mut scratch), vec![1, 2]); // {u, v}
            assert_eq!(q(b"bb", 2, &mut scratch), vec![2]); // {v}
            assert_eq!(q(b"a", 1, &mut scratch), vec![0]); // {root}
            assert_eq!(q(b"ab", 3, &mut scratch), vec![3]);
            assert!(q(b"b", 2, &mut scratch) == vec![1, 2]);
            assert!(scratch.is_all_zero());
        }
    }

    #[test]
    fn absent_pattern_and_bad_level() {
        let (c, t) = running();
        let (idx, da, laq, eng) = build_all(&c, &t, 1, true);
        let mut scratch = QueryScratch::new(c.num_docs());
        let r = eng.query(&idx, &da, &laq, b"abab", 2, &mut scratch).unwrap();
        assert!(r.nodes.is_empty());
        assert!(matches!(
            eng.query(&idx, &da, &laq, b"a", 99, &mut scratch),
            Err(Error::LevelOutOfRange(..))
        ));
        assert!(matches!(
            eng.query(&idx, &da, &laq, b"a", 0, &mut scratch),
            Err(Error::LevelOutOfRange(..))
        ));
    }

    #[test]
    fn alpha_zero_rejected() {
        let (c, t) = running();
        let sa = suffix_array(&c.concat);
        let idx = SuffixIndex::build(&c, 4);
        let da = DocumentArray::build(&c, &sa, true);
        let laq = LevelAncestorIndex::build(&t);
        let mut lf = 0u64;
        let a: Vec<u32> = (1..=c.n_prime)
            .map(|i| da.doc_at(&idx, i, &mut lf).unwrap())
            .collect();
        assert!(matches!(
            ColoredEngine::build(&a, &t, &laq, 0),
            Err(Error::InvalidAlpha)
        ));
    }

    #[test]
    fn exact_work_bound() {
        let (c, t) = running();
        let (idx, da, laq, eng) = build_all(&c, &t, 1, true);
        let mut scratch = QueryScratch::new(c.num_docs());
        for p in [&b"a"[..], b"b", b"ab", b"bb", b"aa"] {
            for lvl in 1..=3 {
                let r = eng.query(&idx, &da, &laq, p, lvl, &mut scratch).unwrap();
                let t_out = r.t() as u64;
                assert!(scratch.stats.rmq_calls <= 2 * t_out + 1);
                assert!(scratch.stats.ai_accesses <= 2 * t_out + 1);
            }
        }
    }
}
