//! Synthetic corpus and category-tree generators, shared by the CLI
//! (`ct gen`, `ct verify`, `ct bench`) and the test suites.

use rand::Rng;

use crate::corpus::{CategoryTree, Corpus};

/// Random corpus: `docs` documents with lengths in `[1..=max_len]` over `[1..=sigma]`.
pub fn random_corpus(rng: &mut impl Rng, docs: usize, max_len: usize, sigma: u8) -> Corpus {
    let documents: Vec<Vec<u8>> = (0..docs)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            (0..len).map(|_| rng.gen_range(1..=sigma)).collect()
        })
        .collect();
    Corpus::new(documents, Some(sigma)).expect("generated corpus is valid")
}

/// Random category tree with `d` leaves, all at level `height`.
/// `unary_density` is the probability that an internal node keeps a single
/// child where a branch would otherwise be possible.
pub fn random_tree(rng: &mut impl Rng, d: usize, height: u32, unary_density: f64) -> CategoryTree {
    let height = if d > 1 { height.max(2) } else { height.max(1) };
    let mut parents: Vec<Option<u32>> = vec![None];
    let mut leaves = Vec::with_capacity(d);
    // (node, level, leaves to place under it)
    let mut stack = vec![(0u32, 1u32, d)];
    while let Some((node, level, nl)) = stack.pop() {
        if level == height {
            debug_assert_eq!(nl, 1);
            leaves.push(node);
            continue;
        }
        let k = if level + 1 == height {
            nl
        } else if nl == 1 {
            1
        } else if rng.gen_bool(unary_density) {
            1
        } else {
            rng.gen_range(2..=nl.min(4))
        };
        let parts = partition(rng, nl, k);
        // push in reverse so leaves come out in left-to-right order
        let first_child = parents.len() as u32;
        for _ in 0..k {
            parents.push(Some(node));
        }
        for (i, part) in parts.into_iter().enumerate().rev() {
            stack.push((first_child + i as u32, level + 1, part));
        }
    }
    CategoryTree::new(parents, leaves, d).expect("generated tree is valid")
}

/// Split `n` into `k` positive parts, uniformly over cut positions.
fn partition(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k >= 1 && k <= n);
    let mut cuts: Vec<usize> = (1..n).collect();
    // partial Fisher-Yates for k-1 cut points
    for i in 0..k - 1 {
        let j = rng.gen_range(i..cuts.len());
        cuts.swap(i, j);
    }
    let mut cuts: Vec<usize> = cuts[..k - 1].to_vec();
    cuts.sort_unstable();
    cuts.push(n);
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts
}

/// Insert `extra` unary nodes directly above every leaf, raising the height by
/// `extra` without changing the branching structure.
pub fn stretch_leaf_chains(tree: &CategoryTree, extra: u32) -> CategoryTree {
    let n = tree.node_count();
    let mut parents: Vec<Option<u32>> = (0..n as u32).map(|v| tree.parent(v)).collect();
    let mut leaves = Vec::with_capacity(tree.leaves.len());
    for &leaf in &tree.leaves {
        let mut anchor = parents[leaf as usize].take();
        for _ in 0..extra {
            let chain = parents.len() as u32;
            parents.push(anchor);
            anchor = Some(chain);
        }
        parents[leaf as usize] = anchor;
        leaves.push(leaf);
    }
    CategoryTree::new(parents, leaves, tree.leaves.len()).expect("stretched tree is valid")
}

/// Random query pattern: usually a substring of some document, otherwise a
/// random string (often absent from the corpus).
pub fn random_pattern(rng: &mut impl Rng, corpus: &Corpus, max_len: usize) -> Vec<u8> {
    if rng.gen_bool(0.75) {
        let doc = corpus.document(rng.gen_range(1..=corpus.num_docs() as u32));
        let len = rng.gen_range(1..=doc.len().min(max_len));
        let start = rng.gen_range(0..=doc.len() - len);
        doc[start..start + len].to_vec()
    } else {
        let len = rng.gen_range(1..=max_len);
        (0..len).map(|_| rng.gen_range(1..=corpus.sigma)).collect()
    }
}
