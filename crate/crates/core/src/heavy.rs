//! Heavy-path engine: the contracted category tree is decomposed into heavy
//! paths; each path stores a balanced wavelet tree over its light children
//! (ordered by increasing depth, plus one symbol for the path's own leaf
//! document) and a bitvector marking path-node depths. A query walks paths
//! top-down, restricting each range-distinct traversal to the alphabet
//! subrange of light children hanging strictly above the queried level.

use serde::{Deserialize, Serialize};

use crate::corpus::{CategoryTree, QueryResult};
use crate::error::{Error, Result};
use crate::index::QueryStats;
use crate::shaped::contract;
use crate::succinct::{BitVector, Shape, WaveletTree};
use crate::text::SuffixIndex;
use crate::topo::{HeavyPathDecomposition, LevelAncestorIndex};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PathIndex {
    /// Sequence over [1..=light_count+1] of the document-array entries under
    /// this path's head; symbol k <= light_count is the k-th light child,
    /// symbol light_count+1 the path's own leaf document.
    wt: WaveletTree,
    /// 1s at the path-node depths (original levels), over [1..h].
    depth_bits: BitVector,
    /// light_prefix[k] = light children hanging off the first k path nodes.
    light_prefix: Vec<u32>,
    /// Per light child: original (lowest) node, its depth, and its own path.
    light_orig: Vec<u32>,
    light_delta: Vec<u32>,
    light_path: Vec<u32>,
    /// Original node and depth of the path head, and the original node of the
    /// path's terminal leaf.
    head_orig: u32,
    head_delta: u32,
    leaf_orig: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeavyPathIndex {
    paths: Vec<PathIndex>,
    root_path: u32,
    num_docs: u32,
    height: u32,
}

impl HeavyPathIndex {
    /// `a` is the materialized document array (0 = separator sentinel).
    pub fn build(a: &[u32], tree: &CategoryTree) -> Result<Self> {
        let c = contract(tree);
        let hpd = HeavyPathDecomposition::from_children(&c.children, &c.delta, c.root, tree.height);
        // symbol of every contracted node within its parent path
        let mut symbol_of = vec![0u32; c.children.len()];
        for path in &hpd.paths {
            for (k, &lc) in path.light.iter().enumerate() {
                symbol_of[lc as usize] = k as u32 + 1;
            }
        }
        // per document: (path, symbol) pairs from its leaf's path up to the root
        let num_docs = tree.leaves.len();
        let mut chains: Vec<Vec<(u32, u32)>> = Vec::with_capacity(num_docs + 1);
        chains.push(Vec::new()); // doc 0 unused
        for doc in 1..=num_docs as u32 {
            let leaf = c.doc_leaf[doc as usize];
            let mut chain = Vec::new();
            let mut pid = hpd.path_of[leaf as usize];
            chain.push((pid, hpd.paths[pid as usize].light_count() as u32 + 1));
            loop {
                let head = hpd.paths[pid as usize].head;
                if head == c.root {
                    break;
                }
                let parent = c.parent[head as usize];
                pid = hpd.path_of[parent as usize];
                chain.push((pid, symbol_of[head as usize]));
            }
            chains.push(chain);
        }
        let mut seqs: Vec<Vec<u64>> = vec![Vec::new(); hpd.paths.len()];
        for &doc in a.iter().filter(|&&d| d != 0) {
            for &(pid, sym) in &chains[doc as usize] {
                seqs[pid as usize].push(sym as u64);
            }
        }
        let paths: Result<Vec<PathIndex>> = hpd
            .paths
            .iter()
            .zip(seqs)
            .map(|(p, seq)| {
                let symbols: Vec<u64> = (1..=p.light_count() as u64 + 1).collect();
                let wt = WaveletTree::build(&seq, &Shape::balanced(&symbols))?;
                Ok(PathIndex {
                    wt,
                    depth_bits: p.depth_bits.clone(),
                    light_prefix: p.light_prefix.clone(),
                    light_orig: p.light.iter().map(|&lc| c.orig[lc as usize]).collect(),
                    light_delta: p.light.iter().map(|&lc| c.delta[lc as usize]).collect(),
                    light_path: p.light.iter().map(|&lc| hpd.path_of[lc as usize]).collect(),
                    head_orig: c.orig[p.head as usize],
                    head_delta: c.delta[p.head as usize],
                    leaf_orig: c.orig[p.leaf as usize],
                })
            })
            .collect();
        Ok(HeavyPathIndex {
            paths: paths?,
            root_path: hpd.path_of[c.root as usize],
            num_docs: num_docs as u32,
            height: tree.height,
        })
    }

    pub fn query(
        &self,
        text: &SuffixIndex,
        laq: &LevelAncestorIndex,
        p: &[u8],
        level: u32,
        stats: &mut QueryStats,
    ) -> Result<QueryResult> {
        *stats = QueryStats::default();
        if level < 1 || level > self.height {
            return Err(Error::LevelOutOfRange(level, self.height));
        }
        let mut nodes = Vec::new();
        if let Some((l, r)) = text.count(p)? {
            let d = self.num_docs as usize;
            debug_assert!(l > d);
            self.process_path(laq, self.root_path, l - d, r - d, level, stats, &mut nodes)?;
        }
        nodes.sort_unstable();
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]), "duplicate report");
        Ok(QueryResult { level, nodes })
    }

    #[allow(clippy::too_many_arguments)]
    fn process_path(
        &self,
        laq: &LevelAncestorIndex,
        pid: u32,
        l: usize,
        r: usize,
        level: u32,
        stats: &mut QueryStats,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        let path = &self.paths[pid as usize];
        if path.head_delta >= level {
            out.push(laq.laq(path.head_orig, level)?);
            return Ok(());
        }
        // alphabet subrange [1..r_sym]: light children hanging off path nodes
        // strictly above the queried level
        let node_cnt = path.depth_bits.rank1_u(level as usize - 1);
        let r_sym = path.light_prefix[node_cnt] as u64;
        let mut descend = Vec::new();
        let covered = path.wt.distinct_leq(l, r, r_sym, &mut stats.wt_visits, &mut |sym, ls, rs| {
            let k = sym as usize - 1;
            descend.push((k, ls, rs));
        })?;
        for (k, ls, rs) in descend {
            if path.light_delta[k] >= level {
                out.push(laq.laq(path.light_orig[k], level)?);
            } else {
                self.process_path(laq, path.light_path[k], ls, rs, level, stats, out)?;
            }
        }
        // anything deeper than the subrange sits below the path node at
        // the queried level
        if covered < r - l + 1 {
            out.push(laq.laq(path.leaf_orig, level)?);
        }
        Ok(())
    }

    pub fn bitvector_bits(&self) -> usize {
        self.paths
            .iter()
            .map(|p| p.wt.bitvector_bits() + p.depth_bits.size_bits())
            .sum()
    }

    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    /// Total stored sequence length over all paths.
    pub fn total_sequence_len(&self) -> usize {
        self.paths.iter().map(|p| p.wt.len()).sum()
    }
}
