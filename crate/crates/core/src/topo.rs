//! Navigation over the category tree: level ancestor queries, leaf selection,
//! and heavy path decomposition.

use serde::{Deserialize, Serialize};

use crate::corpus::CategoryTree;
use crate::error::{Error, Result};
use crate::succinct::BitVector;

const NONE: u32 = u32::MAX;

/// Level ancestor + leafselect via binary lifting (O(Δ log h) words).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelAncestorIndex {
    /// up[k][v] = 2^k-th ancestor of v (NONE above the root).
    up: Vec<Vec<u32>>,
    level: Vec<u32>,
    leaves: Vec<u32>,
    pub height: u32,
}

impl LevelAncestorIndex {
    pub fn build(tree: &CategoryTree) -> Self {
        let n = tree.node_count();
        let mut up0 = vec![NONE; n];
        for v in 0..n as u32 {
            if let Some(p) = tree.parent(v) {
                up0[v as usize] = p;
            }
        }
        let levels = if tree.height <= 1 { 1 } else { tree.height.ilog2() as usize + 1 };
        let mut up = vec![up0];
        for k in 1..levels {
            let prev = &up[k - 1];
            let row: Vec<u32> = (0..n)
                .map(|v| {
                    let mid = prev[v];
                    if mid == NONE { NONE } else { prev[mid as usize] }
                })
                .collect();
            up.push(row);
        }
        LevelAncestorIndex {
            up,
            level: tree.level.clone(),
            leaves: tree.leaves.clone(),
            height: tree.height,
        }
    }

    pub fn level(&self, v: u32) -> u32 {
        self.level[v as usize]
    }

    /// Ancestor of `node` at `level` (1 <= level <= level(node)).
    pub fn laq(&self, node: u32, level: u32) -> Result<u32> {
        let lv = self.level[node as usize];
        if level < 1 || level > lv {
            return Err(Error::LevelOutOfRange(level, lv));
        }
        let mut v = node;
        let mut steps = lv - level;
        let mut k = 0;
        while steps > 0 {
            if steps & 1 == 1 {
                v = self.up[k][v as usize];
            }
            steps >>= 1;
            k += 1;
        }
        Ok(v)
    }

    /// Leaf of document `j` (1-based).
    pub fn leafselect(&self, j: u32) -> Result<u32> {
        if j == 0 || j as usize > self.leaves.len() {
            return Err(Error::OutOfRange(j as usize, self.leaves.len()));
        }
        Ok(self.leaves[j as usize - 1])
    }

    pub fn size_bits(&self) -> usize {
        self.up.iter().map(|r| r.len() * 32).sum::<usize>()
            + self.level.len() * 32
            + self.leaves.len() * 32
    }
}

/// One path of a heavy path decomposition. Paths run from their head down
/// heavy edges to a leaf; light children are ordered by increasing depth of
/// their parent path node (ties by node id).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeavyPath {
    pub head: u32,
    /// Path nodes by increasing depth; the last one is a leaf.
    pub nodes: Vec<u32>,
    pub depths: Vec<u32>,
    pub leaf: u32,
    pub light: Vec<u32>,
    /// light_prefix[k] = number of light children hanging off the first k path nodes.
    pub light_prefix: Vec<u32>,
    /// Bitvector over [1..height] with 1s at the path node depths.
    pub depth_bits: BitVector,
}

impl HeavyPath {
    pub fn light_count(&self) -> usize {
        self.light.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeavyPathDecomposition {
    /// Leaf count of each subtree.
    pub weight: Vec<u32>,
    /// Heavy child per node; `u32::MAX` for leaves.
    pub heavy_child: Vec<u32>,
    pub path_of: Vec<u32>,
    pub paths: Vec<HeavyPath>,
}

impl HeavyPathDecomposition {
    /// Decompose an arbitrary rooted tree given its child lists and node depths.
    pub fn from_children(children: &[Vec<u32>], depth: &[u32], root: u32, height: u32) -> Self {
        let n = children.len();
        // order nodes root-first, then accumulate weights bottom-up
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend_from_slice(&children[v as usize]);
        }
        let mut weight = vec![0u32; n];
        for &v in order.iter().rev() {
            if children[v as usize].is_empty() {
                weight[v as usize] = 1;
            } else {
                weight[v as usize] = children[v as usize].iter().map(|&c| weight[c as usize]).sum();
            }
        }
        let mut heavy_child = vec![NONE; n];
        for v in 0..n {
            // tie broken by lowest id: child lists are ascending, keep strict '>'
            let mut best = NONE;
            for &c in &children[v] {
                if best == NONE || weight[c as usize] > weight[best as usize] {
                    best = c;
                }
            }
            heavy_child[v] = best;
        }
        let mut path_of = vec![0u32; n];
        let mut paths = Vec::new();
        let mut heads = vec![root];
        while let Some(head) = heads.pop() {
            let id = paths.len() as u32;
            let mut nodes = Vec::new();
            let mut light = Vec::new();
            let mut light_prefix = vec![0u32];
            let mut v = head;
            loop {
                path_of[v as usize] = id;
                nodes.push(v);
                let h = heavy_child[v as usize];
                for &c in &children[v as usize] {
                    if c != h {
                        light.push(c);
                        heads.push(c);
                    }
                }
                light_prefix.push(light.len() as u32);
                if h == NONE {
                    break;
                }
                v = h;
            }
            let depths: Vec<u32> = nodes.iter().map(|&v| depth[v as usize]).collect();
            let depth_bits =
                BitVector::from_ones(height as usize, depths.iter().map(|&d| d as usize - 1));
            paths.push(HeavyPath {
                head,
                leaf: *nodes.last().unwrap(),
                nodes,
                depths,
                light,
                light_prefix,
                depth_bits,
            });
        }
        HeavyPathDecomposition {
            weight,
            heavy_child,
            path_of,
            paths,
        }
    }
}

/// Heavy path decomposition of a category tree (weights = subtree leaf counts).
pub fn decompose_heavy(tree: &CategoryTree) -> HeavyPathDecomposition {
    let children: Vec<Vec<u32>> = (0..tree.node_count() as u32)
        .map(|v| tree.children(v).to_vec())
        .collect();
    HeavyPathDecomposition::from_children(&children, &tree.level, tree.root, tree.height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn seven_node_tree() -> CategoryTree {
        CategoryTree::new(
            vec![None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)],
            vec![3, 4, 5, 6],
            4,
        )
        .unwrap()
    }

    #[test]
    fn laq_examples() {
        let t = seven_node_tree();
        let idx = LevelAncestorIndex::build(&t);
        // l3 = node 5, v = node 2
        assert_eq!(idx.laq(5, 1).unwrap(), 0);
        assert_eq!(idx.laq(5, 2).unwrap(), 2);
        assert_eq!(idx.laq(5, 3).unwrap(), 5);
        assert!(idx.laq(5, 4).is_err());
        assert!(idx.laq(0, 2).is_err());
    }

    #[test]
    fn leafselect_examples() {
        let t = seven_node_tree();
        let idx = LevelAncestorIndex::build(&t);
        assert_eq!(idx.leafselect(1).unwrap(), 3);
        assert_eq!(idx.leafselect(2).unwrap(), 4);
        assert!(idx.leafselect(5).is_err());
        assert!(idx.leafselect(0).is_err());
    }

    #[test]
    fn decompose_example() {
        let t = seven_node_tree();
        let d = decompose_heavy(&t);
        // tie at the root resolves to the lowest id child u=1
        assert_eq!(d.heavy_child[0], 1);
        let mut path_sets: Vec<Vec<u32>> = d.paths.iter().map(|p| p.nodes.clone()).collect();
        path_sets.sort();
        assert_eq!(path_sets, vec![vec![0, 1, 3], vec![2, 5], vec![4], vec![6]]);
        let total: usize = d.paths.iter().map(|p| p.nodes.len()).sum();
        assert_eq!(total, t.node_count());
    }

    #[test]
    fn unary_chain_single_path() {
        let t = CategoryTree::new(vec![None, Some(0), Some(1)], vec![2], 1).unwrap();
        let d = decompose_heavy(&t);
        assert_eq!(d.paths.len(), 1);
        assert_eq!(d.paths[0].nodes, vec![0, 1, 2]);
        assert_eq!(d.paths[0].light_count(), 0);
    }

    fn light_edges_to_leaf(d: &HeavyPathDecomposition, t: &CategoryTree, leaf: u32) -> usize {
        let mut v = leaf;
        let mut light = 0;
        while let Some(p) = t.parent(v) {
            if d.heavy_child[p as usize] != v {
                light += 1;
            }
            v = p;
        }
        light
    }

    #[test]
    fn caterpillar_light_bound() {
        // root chain with one leaf hanging per node, 8 leaves; every root-to-leaf
        // path crosses at most 3 = log2(8) light edges
        let mut parents = vec![None];
        let mut leaves = Vec::new();
        let mut spine = 0u32;
        for _ in 0..7 {
            let next = parents.len() as u32;
            parents.push(Some(spine));
            spine = next;
        }
        // depth of spine end = 8; hang leaves so all end at level 9
        let spine_nodes: Vec<u32> = (0..8).collect();
        for &s in &spine_nodes {
            let mut v = s;
            // pad each leaf with a unary chain down to level 9
            for _ in (s + 1)..8 {
                let next = parents.len() as u32;
                parents.push(Some(v));
                v = next;
            }
            let leaf = parents.len() as u32;
            parents.push(Some(v));
            leaves.push(leaf);
        }
        let t = CategoryTree::new(parents, leaves.clone(), 8).unwrap();
        let d = decompose_heavy(&t);
        for &leaf in &leaves {
            assert!(light_edges_to_leaf(&d, &t, leaf) <= 3);
        }
    }

    #[test]
    fn laq_matches_parent_walk_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (nd, ht) = (rng.gen_range(1..=40), rng.gen_range(2..=12));
            let t = crate::gen::random_tree(&mut rng, nd, ht, 0.4);
            let idx = LevelAncestorIndex::build(&t);
            for _ in 0..500 {
                let v = rng.gen_range(0..t.node_count()) as u32;
                let lv = t.level[v as usize];
                let target = rng.gen_range(1..=lv);
                let mut w = v;
                for _ in target..lv {
                    w = t.parent(w).unwrap();
                }
                assert_eq!(idx.laq(v, target).unwrap(), w);
            }
        }
    }

    #[test]
    fn light_bound_and_weights_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let d_docs = rng.gen_range(1..=256);
            let ht = rng.gen_range(2..=16);
            let t = crate::gen::random_tree(&mut rng, d_docs, ht, 0.5);
            let d = decompose_heavy(&t);
            let bound = (d_docs as f64).log2().floor() as usize;
            for &leaf in &t.leaves {
                assert!(light_edges_to_leaf(&d, &t, leaf) <= bound.max(0));
            }
            let total: usize = d.paths.iter().map(|p| p.nodes.len()).sum();
            assert_eq!(total, t.node_count());
            for v in 0..t.node_count() as u32 {
                if let Some(p) = t.parent(v) {
                    assert!(d.weight[p as usize] >= d.weight[v as usize]);
                }
            }
        }
    }
}
