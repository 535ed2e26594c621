//! Document collection and category tree: parsing, validation, and the
//! identifier spaces used by every other module.
//!
//! Documents are byte strings over `[1..sigma]`; symbol 0 is the separator and
//! is lexicographically smallest. Document ids are 1-based in manifest order.
//! Category node ids are dense 0-based integers; the root has level 1 and the
//! `D` leaves all sit at level `h`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SEPARATOR: u8 = 0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corpus {
    documents: Vec<Vec<u8>>,
    pub sigma: u8,
    /// T1 $ T2 $ ... TD $ with $ = 0, one separator after every document.
    pub concat: Vec<u8>,
    /// Total document length, separators excluded.
    pub n: usize,
    /// Length of `concat`: n + D.
    pub n_prime: usize,
}

impl Corpus {
    pub fn new(documents: Vec<Vec<u8>>, sigma: Option<u8>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut max_byte = 0u8;
        for (i, doc) in documents.iter().enumerate() {
            if doc.is_empty() {
                return Err(Error::EmptyDocument(i as u32 + 1));
            }
            for &b in doc {
                max_byte = max_byte.max(b);
            }
        }
        let sigma = sigma.unwrap_or(max_byte);
        for (i, doc) in documents.iter().enumerate() {
            if let Some(&b) = doc.iter().find(|&&b| b == SEPARATOR || b > sigma) {
                return Err(Error::InvalidByte {
                    doc: i as u32 + 1,
                    byte: b,
                    sigma,
                });
            }
        }
        let n: usize = documents.iter().map(Vec::len).sum();
        let n_prime = n + documents.len();
        let mut concat = Vec::with_capacity(n_prime);
        for doc in &documents {
            concat.extend_from_slice(doc);
            concat.push(SEPARATOR);
        }
        Ok(Corpus {
            documents,
            sigma,
            concat,
            n,
            n_prime,
        })
    }

    pub fn num_docs(&self) -> usize {
        self.documents.len()
    }

    /// Document bytes, `id` 1-based.
    pub fn document(&self, id: u32) -> &[u8] {
        &self.documents[id as usize - 1]
    }

    pub fn documents(&self) -> &[Vec<u8>] {
        &self.documents
    }

    pub fn validate_pattern(&self, p: &[u8]) -> Result<()> {
        if p.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if let Some(&b) = p.iter().find(|&&b| b == SEPARATOR || b > self.sigma) {
            return Err(Error::InvalidPatternByte(b));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryTree {
    /// Parent id per node; `u32::MAX` for the root.
    parent: Vec<u32>,
    children: Vec<Vec<u32>>,
    pub level: Vec<u32>,
    pub root: u32,
    pub height: u32,
    /// leaves[j-1] = leaf node of document j.
    pub leaves: Vec<u32>,
}

const NO_PARENT: u32 = u32::MAX;

impl CategoryTree {
    pub fn new(parents: Vec<Option<u32>>, leaves: Vec<u32>, num_docs: usize) -> Result<Self> {
        let delta = parents.len();
        let mut parent = vec![NO_PARENT; delta];
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); delta];
        let mut root = None;
        for (id, p) in parents.iter().enumerate() {
            match p {
                None => {
                    if root.replace(id as u32).is_some() {
                        return Err(Error::BadRootCount(2));
                    }
                }
                Some(p) => {
                    if *p as usize >= delta || *p == id as u32 {
                        return Err(Error::BadNodeId(*p));
                    }
                    parent[id] = *p;
                    children[*p as usize].push(id as u32);
                }
            }
        }
        let root = root.ok_or(Error::BadRootCount(0))?;
        for ch in &mut children {
            ch.sort_unstable();
        }

        // Levels by BFS from the root; anything unreached means a cycle.
        let mut level = vec![0u32; delta];
        level[root as usize] = 1;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut seen = 1usize;
        while let Some(v) = queue.pop_front() {
            for &c in &children[v as usize] {
                level[c as usize] = level[v as usize] + 1;
                seen += 1;
                queue.push_back(c);
            }
        }
        if seen != delta {
            let stray = (0..delta).find(|&i| level[i] == 0 && i as u32 != root).unwrap();
            return Err(Error::Disconnected(stray as u32));
        }

        let leaf_nodes: Vec<u32> = (0..delta as u32)
            .filter(|&v| children[v as usize].is_empty())
            .collect();
        if leaf_nodes.len() != num_docs {
            return Err(Error::LeafCountMismatch {
                got: leaf_nodes.len(),
                want: num_docs,
            });
        }
        if leaves.len() != num_docs {
            return Err(Error::LeafCountMismatch {
                got: leaves.len(),
                want: num_docs,
            });
        }
        let mut assigned = vec![false; delta];
        for &l in &leaves {
            if l as usize >= delta || !children[l as usize].is_empty() || assigned[l as usize] {
                return Err(Error::BadLeafList);
            }
            assigned[l as usize] = true;
        }
        let height = leaf_nodes.iter().map(|&l| level[l as usize]).max().unwrap();
        for &l in &leaf_nodes {
            if level[l as usize] != height {
                return Err(Error::RaggedLeaves(level[l as usize], height));
            }
        }
        Ok(CategoryTree {
            parent,
            children,
            level,
            root,
            height,
            leaves,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        let p = self.parent[v as usize];
        (p != NO_PARENT).then_some(p)
    }

    pub fn children(&self, v: u32) -> &[u32] {
        &self.children[v as usize]
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.children[v as usize].is_empty()
    }

    /// Document id (1-based) of a leaf node, or None for internal nodes.
    pub fn doc_of_leaf(&self, v: u32) -> Option<u32> {
        self.leaves.iter().position(|&l| l == v).map(|j| j as u32 + 1)
    }

    /// Number of nodes at each level, indexed by level-1.
    pub fn level_widths(&self) -> Vec<usize> {
        let mut widths = vec![0usize; self.height as usize];
        for &l in &self.level {
            widths[l as usize - 1] += 1;
        }
        widths
    }

    /// Dense per-level rank of every node (position among the sorted ids of
    /// its level), used to address the query-scratch bitvector.
    pub fn level_local_ranks(&self) -> Vec<u32> {
        let mut next = vec![0u32; self.height as usize];
        let mut rank = vec![0u32; self.node_count()];
        for v in 0..self.node_count() {
            let l = self.level[v] as usize - 1;
            rank[v] = next[l];
            next[l] += 1;
        }
        rank
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryResult {
    pub level: u32,
    /// Strictly ascending node ids at `level`.
    pub nodes: Vec<u32>,
}

impl QueryResult {
    pub fn t(&self) -> usize {
        self.nodes.len()
    }
}

// --- manifest / tree file parsing -------------------------------------------

#[derive(Deserialize)]
struct Manifest {
    sigma: Option<u8>,
    documents: Vec<ManifestDoc>,
}

#[derive(Deserialize)]
struct ManifestDoc {
    id: u32,
    #[serde(default)]
    path: Option<String>,
    #[serde(default)]
    text: Option<String>,
}

/// Load a corpus from a JSON manifest referencing document files or inline strings.
pub fn load_corpus(manifest: &Path) -> Result<Corpus> {
    let m: Manifest = serde_json::from_reader(std::fs::File::open(manifest)?)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut docs: Vec<(u32, Vec<u8>)> = Vec::with_capacity(m.documents.len());
    for d in m.documents {
        let bytes = match (&d.path, &d.text) {
            (Some(p), _) => std::fs::read(base.join(p))?,
            (None, Some(t)) => t.clone().into_bytes(),
            (None, None) => Vec::new(),
        };
        docs.push((d.id, bytes));
    }
    docs.sort_by_key(|(id, _)| *id);
    for (i, (id, _)) in docs.iter().enumerate() {
        if *id != i as u32 + 1 {
            return Err(Error::BadDocumentId(*id));
        }
    }
    Corpus::new(docs.into_iter().map(|(_, b)| b).collect(), m.sigma)
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    nodes: Vec<TreeFileNode>,
    leaves: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct TreeFileNode {
    id: u32,
    parent: Option<u32>,
}

/// Load and validate a category tree against an already-loaded corpus.
pub fn load_tree(tree_file: &Path, corpus: &Corpus) -> Result<CategoryTree> {
    let t: TreeFile = serde_json::from_reader(std::fs::File::open(tree_file)?)?;
    let mut parents = vec![None; t.nodes.len()];
    for n in &t.nodes {
        if n.id as usize >= t.nodes.len() {
            return Err(Error::BadNodeId(n.id));
        }
        parents[n.id as usize] = n.parent;
    }
    // ids must be dense: a node whose slot stayed None but is not declared root
    // is caught by connectivity checks in CategoryTree::new.
    CategoryTree::new(parents, t.leaves, corpus.num_docs())
}

/// Serialize a tree back to the JSON tree-file format (used by `ct gen`).
pub fn write_tree(tree: &CategoryTree, path: &Path) -> Result<()> {
    let nodes: Vec<TreeFileNode> = (0..tree.node_count() as u32)
        .map(|id| TreeFileNode {
            id,
            parent: tree.parent(id),
        })
        .collect();
    let tf = TreeFile {
        nodes,
        leaves: tree.leaves.clone(),
    };
    serde_json::to_writer_pretty(std::fs::File::create(path)?, &tf)?;
    Ok(())
}
