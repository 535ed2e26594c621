use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::succinct::BitVector;

/// Shape of a wavelet tree: leaves carry one symbol each, internal nodes any
/// number of children. A `d`-ary node is stored via local binarization as
/// `ceil(log2 d)` bitvector levels; `tag` survives on the top node of the
/// local mini-tree and is `None` on binarization intermediates.
#[derive(Debug, Clone)]
pub enum Shape {
    Leaf { symbol: u64, tag: Option<u32> },
    Node { tag: Option<u32>, children: Vec<Shape> },
}

impl Shape {
    /// Balanced binary shape over a sorted symbol list, untagged.
    pub fn balanced(symbols: &[u64]) -> Shape {
        match symbols {
            [s] => Shape::Leaf {
                symbol: *s,
                tag: None,
            },
            _ => {
                let mid = symbols.len().div_ceil(2);
                Shape::Node {
                    tag: None,
                    children: vec![Shape::balanced(&symbols[..mid]), Shape::balanced(&symbols[mid..])],
                }
            }
        }
    }
}

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WtNode {
    parent: u32,
    is_right: bool,
    left: u32,
    right: u32,
    bits: Option<BitVector>,
    symbol: u64,
    min_sym: u64,
    max_sym: u64,
    tag: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeId(pub u32);

/// Wavelet tree over an integer sequence with an arbitrary leaf-partition
/// shape. Supports access/rank/select plus the interval refinement and
/// range-distinct traversals used by the query engines.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveletTree {
    nodes: Vec<WtNode>,
    root: u32,
    leaf_of: BTreeMap<u64, u32>,
    len: usize,
}

impl WaveletTree {
    pub fn build(seq: &[u64], shape: &Shape) -> Result<Self> {
        let mut wt = WaveletTree {
            nodes: Vec::new(),
            root: 0,
            leaf_of: BTreeMap::new(),
            len: seq.len(),
        };
        wt.root = wt.add_shape(shape, NONE, false);
        // bit path of every symbol, root to leaf
        let mut paths: BTreeMap<u64, Vec<bool>> = BTreeMap::new();
        for (&sym, &leaf) in &wt.leaf_of {
            let mut path = Vec::new();
            let mut v = leaf;
            while wt.nodes[v as usize].parent != NONE {
                path.push(wt.nodes[v as usize].is_right);
                v = wt.nodes[v as usize].parent;
            }
            path.reverse();
            paths.insert(sym, path);
        }
        for &s in seq {
            if !paths.contains_key(&s) {
                return Err(Error::UnknownSymbol(s));
            }
        }
        wt.fill(wt.root, seq.to_vec(), 0, &paths);
        Ok(wt)
    }

    fn add_shape(&mut self, shape: &Shape, parent: u32, is_right: bool) -> u32 {
        match shape {
            Shape::Leaf { symbol, tag } => {
                let id = self.push_node(parent, is_right, *symbol, *tag);
                debug_assert!(!self.leaf_of.contains_key(symbol), "duplicate leaf symbol");
                self.leaf_of.insert(*symbol, id);
                id
            }
            Shape::Node { tag, children } => self.binarize(children, *tag, parent, is_right),
        }
    }

    fn binarize(&mut self, children: &[Shape], tag: Option<u32>, parent: u32, is_right: bool) -> u32 {
        if children.len() == 1 {
            // degenerate unary split: nothing to encode at this node
            return self.add_shape(&children[0], parent, is_right);
        }
        let id = self.push_node(parent, is_right, 0, tag);
        let mid = children.len().div_ceil(2);
        let (l, r) = children.split_at(mid);
        let left = if l.len() == 1 {
            self.add_shape(&l[0], id, false)
        } else {
            self.binarize(l, None, id, false)
        };
        let right = if r.len() == 1 {
            self.add_shape(&r[0], id, true)
        } else {
            self.binarize(r, None, id, true)
        };
        let (lmin, lmax) = (self.nodes[left as usize].min_sym, self.nodes[left as usize].max_sym);
        let (rmin, rmax) = (self.nodes[right as usize].min_sym, self.nodes[right as usize].max_sym);
        let node = &mut self.nodes[id as usize];
        node.left = left;
        node.right = right;
        node.min_sym = lmin.min(rmin);
        node.max_sym = lmax.max(rmax);
        id
    }

    fn push_node(&mut self, parent: u32, is_right: bool, symbol: u64, tag: Option<u32>) -> u32 {
        self.nodes.push(WtNode {
            parent,
            is_right,
            left: NONE,
            right: NONE,
            bits: None,
            symbol,
            min_sym: symbol,
            max_sym: symbol,
            tag,
        });
        self.nodes.len() as u32 - 1
    }

    fn fill(&mut self, node: u32, seq: Vec<u64>, depth: usize, paths: &BTreeMap<u64, Vec<bool>>) {
        let n = &self.nodes[node as usize];
        if n.left == NONE {
            return;
        }
        let (left, right) = (n.left, n.right);
        let bits: Vec<bool> = seq.iter().map(|s| paths[s][depth]).collect();
        let (mut ls, mut rs) = (Vec::new(), Vec::new());
        for (s, b) in seq.into_iter().zip(bits.iter()) {
            if *b { rs.push(s) } else { ls.push(s) }
        }
        self.nodes[node as usize].bits = Some(BitVector::from_bits(bits));
        self.fill(left, ls, depth + 1, paths);
        self.fill(right, rs, depth + 1, paths);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at 1-based position `i`.
    pub fn access(&self, i: usize) -> Result<u64> {
        if i == 0 || i > self.len {
            return Err(Error::OutOfRange(i, self.len));
        }
        let mut pos = i - 1;
        let mut v = self.root;
        loop {
            let n = &self.nodes[v as usize];
            match &n.bits {
                None => return Ok(n.symbol),
                Some(b) => {
                    let bit = b.get(pos);
                    let r1 = b.rank1_u(pos);
                    pos = if bit { r1 } else { pos - r1 };
                    v = if bit { n.right } else { n.left };
                }
            }
        }
    }

    /// Occurrences of `c` in the first `i` positions (prefix length, 0..=m).
    pub fn rank(&self, c: u64, i: usize) -> Result<usize> {
        if self.len == 0 {
            return Err(Error::EmptySequence);
        }
        if i > self.len {
            return Err(Error::OutOfRange(i, self.len));
        }
        let leaf = *self.leaf_of.get(&c).ok_or(Error::UnknownSymbol(c))?;
        let path = self.path_to(leaf);
        let mut cnt = i;
        let mut v = self.root;
        for bit in path {
            let n = &self.nodes[v as usize];
            let b = n.bits.as_ref().unwrap();
            let r1 = b.rank1_u(cnt);
            cnt = if bit { r1 } else { cnt - r1 };
            v = if bit { n.right } else { n.left };
        }
        Ok(cnt)
    }

    /// 1-based position of the `j`-th occurrence of `c`.
    pub fn select(&self, c: u64, j: usize) -> Result<usize> {
        if self.len == 0 {
            return Err(Error::EmptySequence);
        }
        let leaf = *self.leaf_of.get(&c).ok_or(Error::UnknownSymbol(c))?;
        let total = self.rank(c, self.len)?;
        if j == 0 || j > total {
            return Err(Error::SelectOutOfRange(j, total));
        }
        let mut pos = j;
        let mut v = leaf;
        while self.nodes[v as usize].parent != NONE {
            let n = &self.nodes[v as usize];
            let p = &self.nodes[n.parent as usize];
            pos = p.bits.as_ref().unwrap().select(n.is_right, pos)?;
            v = n.parent;
        }
        Ok(pos)
    }

    fn path_to(&self, leaf: u32) -> Vec<bool> {
        let mut path = Vec::new();
        let mut v = leaf;
        while self.nodes[v as usize].parent != NONE {
            path.push(self.nodes[v as usize].is_right);
            v = self.nodes[v as usize].parent;
        }
        path.reverse();
        path
    }

    // --- structural accessors for the engines -------------------------------

    pub fn root(&self) -> NodeId {
        NodeId(self.root)
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v.0 as usize].left == NONE
    }

    pub fn leaf_symbol(&self, v: NodeId) -> u64 {
        debug_assert!(self.is_leaf(v));
        self.nodes[v.0 as usize].symbol
    }

    pub fn tag(&self, v: NodeId) -> Option<u32> {
        self.nodes[v.0 as usize].tag
    }

    pub fn children(&self, v: NodeId) -> (NodeId, NodeId) {
        let n = &self.nodes[v.0 as usize];
        debug_assert!(n.left != NONE);
        (NodeId(n.left), NodeId(n.right))
    }

    pub fn symbol_range(&self, v: NodeId) -> (u64, u64) {
        let n = &self.nodes[v.0 as usize];
        (n.min_sym, n.max_sym)
    }

    /// Refine a 0-based half-open interval into the two child intervals.
    pub fn refine(&self, v: NodeId, l: usize, r: usize) -> ((usize, usize), (usize, usize)) {
        let b = self.nodes[v.0 as usize].bits.as_ref().unwrap();
        let (l1, r1) = (b.rank1_u(l), b.rank1_u(r));
        ((l - l1, r - r1), (l1, r1))
    }

    /// Report each distinct symbol `<= max_sym` in the 1-based inclusive range
    /// `[l..r]`, with its 1-based subinterval in the leaf subsequence.
    /// Returns the number of elements in range with symbol `<= max_sym`.
    /// Every visited wavelet node increments `visits`.
    pub fn distinct_leq(
        &self,
        l: usize,
        r: usize,
        max_sym: u64,
        visits: &mut u64,
        f: &mut impl FnMut(u64, usize, usize),
    ) -> Result<usize> {
        if l < 1 || r > self.len || l > r {
            return Err(Error::InvalidRange(l, r));
        }
        Ok(self.distinct_rec(NodeId(self.root), l - 1, r, max_sym, visits, f))
    }

    fn distinct_rec(
        &self,
        v: NodeId,
        l: usize,
        r: usize,
        max_sym: u64,
        visits: &mut u64,
        f: &mut impl FnMut(u64, usize, usize),
    ) -> usize {
        if l >= r {
            return 0;
        }
        *visits += 1;
        let n = &self.nodes[v.0 as usize];
        if n.min_sym > max_sym {
            return 0;
        }
        if n.left == NONE {
            f(n.symbol, l + 1, r);
            return r - l;
        }
        let ((ll, lr), (rl, rr)) = self.refine(v, l, r);
        self.distinct_rec(NodeId(n.left), ll, lr, max_sym, visits, f)
            + self.distinct_rec(NodeId(n.right), rl, rr, max_sym, visits, f)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Total measured bits of all per-node bitvectors.
    pub fn bitvector_bits(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| n.bits.as_ref())
            .map(BitVector::size_bits)
            .sum()
    }

    /// Measured bits of the explicit node table (pointers, tags, symbols).
    pub fn pointer_bits(&self) -> usize {
        self.nodes.len() * (std::mem::size_of::<WtNode>() * 8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn balanced_over(lo: u64, hi: u64) -> Shape {
        let syms: Vec<u64> = (lo..=hi).collect();
        Shape::balanced(&syms)
    }

    #[test]
    fn build_root_partition() {
        // seq [1,2,1,3] over balanced {1,2}|{3}: root bitvector 0010
        let wt = WaveletTree::build(&[1, 2, 1, 3], &balanced_over(1, 3)).unwrap();
        let root = wt.root();
        let ((_, lr), (rl, rr)) = wt.refine(root, 0, 4);
        assert_eq!(lr, 3); // three symbols go left
        assert_eq!((rl, rr), (0, 1)); // the single 3 maps to the right child's only slot
    }

    #[test]
    fn rank_select_access_examples() {
        let wt = WaveletTree::build(&[1, 2, 1, 3], &balanced_over(1, 3)).unwrap();
        assert_eq!(wt.rank(1, 4).unwrap(), 2);
        assert_eq!(wt.select(3, 1).unwrap(), 4);
        assert_eq!(wt.access(2).unwrap(), 2);
    }

    #[test]
    fn empty_sequence_errors() {
        let wt = WaveletTree::build(&[], &balanced_over(1, 3)).unwrap();
        assert!(wt.access(1).is_err());
        assert!(wt.rank(1, 0).is_err());
        assert!(wt.select(1, 1).is_err());
    }

    #[test]
    fn constant_sequence() {
        let shape = Shape::Leaf { symbol: 2, tag: None };
        let wt = WaveletTree::build(&[2, 2, 2], &shape).unwrap();
        for i in 1..=3 {
            assert_eq!(wt.access(i).unwrap(), 2);
        }
        assert_eq!(wt.rank(2, 3).unwrap(), 3);
    }

    #[test]
    fn symbol_outside_shape() {
        let err = WaveletTree::build(&[1, 9], &balanced_over(1, 3));
        assert!(matches!(err, Err(Error::UnknownSymbol(9))));
    }

    #[test]
    fn multiary_shape() {
        // one 5-ary node: local binarization, ceil(log2 5) = 3 levels deep at most
        let shape = Shape::Node {
            tag: Some(42),
            children: (1..=5)
                .map(|s| Shape::Leaf { symbol: s, tag: None })
                .collect(),
        };
        let seq = [3, 1, 5, 5, 2, 4, 1];
        let wt = WaveletTree::build(&seq, &shape).unwrap();
        assert_eq!(wt.tag(wt.root()), Some(42));
        for (i, &s) in seq.iter().enumerate() {
            assert_eq!(wt.access(i + 1).unwrap(), s);
        }
    }

    #[test]
    fn distinct_leq_reports_counts() {
        let seq = [2, 1, 2, 3, 1, 4];
        let wt = WaveletTree::build(&seq, &balanced_over(1, 4)).unwrap();
        let mut got = Vec::new();
        let mut visits = 0;
        let cnt = wt
            .distinct_leq(2, 5, 3, &mut visits, &mut |s, l, r| got.push((s, r - l + 1)))
            .unwrap();
        got.sort_unstable();
        assert_eq!(got, vec![(1, 2), (2, 1), (3, 1)]);
        assert_eq!(cnt, 4);
        assert!(visits > 0);
    }

    proptest! {
        #[test]
        fn reconstructs_and_counts(
            seq in proptest::collection::vec(1u64..=6, 0..200),
            split in 1usize..5,
        ) {
            // shape: random-ish arity split of {1..6}
            let syms: Vec<u64> = (1..=6).collect();
            let (a, b) = syms.split_at(split.min(5));
            let shape = Shape::Node {
                tag: None,
                children: vec![Shape::balanced(a), Shape::balanced(b)],
            };
            let wt = WaveletTree::build(&seq, &shape).unwrap();
            let mut counts = std::collections::HashMap::new();
            for (i, &s) in seq.iter().enumerate() {
                prop_assert_eq!(wt.access(i + 1).unwrap(), s);
                *counts.entry(s).or_insert(0usize) += 1;
                prop_assert_eq!(wt.rank(s, i + 1).unwrap(), counts[&s]);
                prop_assert_eq!(wt.select(s, counts[&s]).unwrap(), i + 1);
            }
        }
    }
}
