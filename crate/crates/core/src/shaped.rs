//! Wavelet tree shaped by the category tree (unary chains contracted), with
//! stored branching depths. A query refines the suffix interval top-down and
//! stops at the first node whose depth reaches the queried level, reporting
//! that node's level ancestor in the original tree.

use serde::{Deserialize, Serialize};

use crate::corpus::{CategoryTree, QueryResult};
use crate::error::{Error, Result};
use crate::index::QueryStats;
use crate::succinct::{wavelet::NodeId, Shape, WaveletTree};
use crate::text::SuffixIndex;
use crate::topo::LevelAncestorIndex;

/// Category tree with unary chains contracted away: branching nodes and
/// leaves only. Each contracted node keeps the deepest (lowest) original node
/// of its chain; its depth is that node's original level.
#[derive(Debug, Clone)]
pub(crate) struct Contracted {
    pub children: Vec<Vec<u32>>,
    /// Contracted parent, `u32::MAX` at the root.
    pub parent: Vec<u32>,
    /// Lowest original node of each contracted node's unary chain.
    pub orig: Vec<u32>,
    /// Original level of `orig` (the stored depth delta).
    pub delta: Vec<u32>,
    /// Document id for contracted leaves, 0 for internal nodes.
    pub doc: Vec<u32>,
    /// doc (1-based) -> contracted leaf id.
    pub doc_leaf: Vec<u32>,
    pub root: u32,
}

pub(crate) fn contract(tree: &CategoryTree) -> Contracted {
    let doc_of_leaf = {
        let mut m = vec![0u32; tree.node_count()];
        for (j, &leaf) in tree.leaves.iter().enumerate() {
            m[leaf as usize] = j as u32 + 1;
        }
        m
    };
    let mut c = Contracted {
        children: Vec::new(),
        parent: Vec::new(),
        orig: Vec::new(),
        delta: Vec::new(),
        doc: Vec::new(),
        doc_leaf: vec![0u32; tree.leaves.len() + 1],
        root: 0,
    };
    // (original top of chain, contracted parent slot)
    let mut stack = vec![(tree.root, u32::MAX)];
    while let Some((top, parent)) = stack.pop() {
        let mut low = top;
        while tree.children(low).len() == 1 {
            low = tree.children(low)[0];
        }
        let id = c.children.len() as u32;
        c.children.push(Vec::new());
        c.parent.push(parent);
        c.orig.push(low);
        c.delta.push(tree.level[low as usize]);
        let doc = doc_of_leaf[low as usize];
        c.doc.push(doc);
        if doc != 0 {
            c.doc_leaf[doc as usize] = id;
        }
        if parent != u32::MAX {
            c.children[parent as usize].push(id);
        }
        for &ch in tree.children(low).iter().rev() {
            stack.push((ch, id));
        }
    }
    c
}

fn shape_of(c: &Contracted, v: u32) -> Shape {
    if c.doc[v as usize] != 0 {
        Shape::Leaf {
            symbol: c.doc[v as usize] as u64,
            tag: Some(c.orig[v as usize]),
        }
    } else {
        Shape::Node {
            tag: Some(c.orig[v as usize]),
            children: c.children[v as usize].iter().map(|&ch| shape_of(c, ch)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapedWaveletIndex {
    wt: WaveletTree,
    num_docs: u32,
    /// Max internal contracted nodes on any root-leaf shape path.
    pub branching_depth: u32,
    /// Max child count of any contracted node.
    pub max_arity: u32,
}

impl ShapedWaveletIndex {
    /// `a` is the materialized document array (0 = separator sentinel).
    /// Sentinels occupy the first D ranks and are excluded from the sequence.
    pub fn build(a: &[u32], tree: &CategoryTree) -> Result<Self> {
        let c = contract(tree);
        let shape = shape_of(&c, c.root);
        let seq: Vec<u64> = a.iter().filter(|&&d| d != 0).map(|&d| d as u64).collect();
        let wt = WaveletTree::build(&seq, &shape)?;
        let mut branching_depth = 0u32;
        let mut max_arity = 0u32;
        let mut stack = vec![(c.root, 0u32)];
        while let Some((v, depth)) = stack.pop() {
            if c.doc[v as usize] != 0 {
                branching_depth = branching_depth.max(depth);
            } else {
                max_arity = max_arity.max(c.children[v as usize].len() as u32);
                for &ch in &c.children[v as usize] {
                    stack.push((ch, depth + 1));
                }
            }
        }
        Ok(ShapedWaveletIndex {
            wt,
            num_docs: tree.leaves.len() as u32,
            branching_depth,
            max_arity: max_arity.max(1),
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
        if level < 1 || level > laq.height {
            return Err(Error::LevelOutOfRange(level, laq.height));
        }
        let mut nodes = Vec::new();
        if let Some((l, r)) = text.count(p)? {
            // separator suffixes occupy ranks 1..D; shift into the
            // sentinel-free sequence
            let d = self.num_docs as usize;
            debug_assert!(l > d);
            self.walk(laq, self.wt.root(), l - d - 1, r - d, level, stats, &mut nodes)?;
        }
        nodes.sort_unstable();
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]), "duplicate report");
        Ok(QueryResult { level, nodes })
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        laq: &LevelAncestorIndex,
        v: NodeId,
        l: usize,
        r: usize,
        level: u32,
        stats: &mut QueryStats,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        if l >= r {
            return Ok(());
        }
        stats.wt_visits += 1;
        if let Some(orig) = self.wt.tag(v) {
            if laq.level(orig) >= level {
                out.push(laq.laq(orig, level)?);
                return Ok(());
            }
        }
        debug_assert!(!self.wt.is_leaf(v), "untagged leaf in shaped tree");
        let (left, right) = self.wt.children(v);
        let ((ll, lr), (rl, rr)) = self.wt.refine(v, l, r);
        self.walk(laq, left, ll, lr, level, stats, out)?;
        self.walk(laq, right, rl, rr, level, stats, out)
    }

    pub fn bitvector_bits(&self) -> usize {
        self.wt.bitvector_bits()
    }

    pub fn pointer_bits(&self) -> usize {
        self.wt.pointer_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::text::{suffix_array, DocumentArray};

    fn doc_array(c: &Corpus) -> (SuffixIndex, Vec<u32>) {
        let sa = suffix_array(&c.concat);
        let idx = SuffixIndex::build(c, 4);
        let da = DocumentArray::build(c, &sa, true);
        let mut lf = 0u64;
        let a = (1..=c.n_prime).map(|i| da.doc_at(&idx, i, &mut lf).unwrap()).collect();
        (idx, a)
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

    #[test]
    fn contraction_no_unary() {
        let (_, t) = running();
        let c = contract(&t);
        // already branching: shape unchanged, deltas 1,2,2 + leaves at 3
        assert_eq!(c.delta[c.root as usize], 1);
        assert_eq!(c.children[c.root as usize].len(), 2);
    }

    #[test]
    fn contraction_keeps_lowest_depth() {
        // chain r -> x -> {l1, l2}: root contracts to x with delta 2
        let t = CategoryTree::new(vec![None, Some(0), Some(1), Some(1)], vec![2, 3], 2).unwrap();
        let c = contract(&t);
        assert_eq!(c.orig[c.root as usize], 1);
        assert_eq!(c.delta[c.root as usize], 2);
    }

    #[test]
    fn query_running_examples() {
        let (c, t) = running();
        let (idx, a) = doc_array(&c);
        let laq = LevelAncestorIndex::build(&t);
        let sw = ShapedWaveletIndex::build(&a, &t).unwrap();
        let mut stats = QueryStats::default();
        assert_eq!(sw.query(&idx, &laq, b"a", 2, &mut stats).unwrap().nodes, vec![1, 2]);
        assert_eq!(
            sw.query(&idx, &laq, b"a", 3, &mut stats).unwrap().nodes,
            vec![3, 4, 5] // leaves of docs 1,2,3
        );
        assert_eq!(sw.query(&idx, &laq, b"a", 1, &mut stats).unwrap().nodes, vec![0]);
        assert!(sw.query(&idx, &laq, b"abab", 2, &mut stats).unwrap().nodes.is_empty());
        assert!(sw.query(&idx, &laq, b"a", 9, &mut stats).is_err());
    }

    #[test]
    fn single_document() {
        let c = Corpus::new(vec![b"abba".to_vec()], None).unwrap();
        let t = CategoryTree::new(vec![None, Some(0), Some(1)], vec![2], 1).unwrap();
        let (idx, a) = doc_array(&c);
        let laq = LevelAncestorIndex::build(&t);
        let sw = ShapedWaveletIndex::build(&a, &t).unwrap();
        let mut stats = QueryStats::default();
        for level in 1..=3 {
            let r = sw.query(&idx, &laq, b"bb", level, &mut stats).unwrap();
            assert_eq!(r.nodes, vec![level - 1]); // chain node at that level
        }
        assert!(sw.query(&idx, &laq, b"bab", 2, &mut stats).unwrap().nodes.is_empty());
    }
}
