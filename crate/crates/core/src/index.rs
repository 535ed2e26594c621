//! Top-level index: owns the text index, document array, tree navigation and
//! whichever engines were built, and dispatches queries.

use serde::{Deserialize, Serialize};

use crate::colored::ColoredEngine;
use crate::corpus::{CategoryTree, Corpus, QueryResult};
use crate::error::{Error, Result};
use crate::heavy::HeavyPathIndex;
use crate::shaped::ShapedWaveletIndex;
use crate::text::{suffix_array, DocumentArray, SuffixIndex};
use crate::topo::LevelAncestorIndex;

/// Per-query instrumentation counters, reset at the start of every query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub rmq_calls: u64,
    pub ai_accesses: u64,
    pub wt_visits: u64,
    pub lf_steps: u64,
}

/// Query-local writable state: the seen bitvector of the colored engine
/// (sized D, addressed by per-level dense node ranks) plus the counters.
/// All-zero before and after every query.
pub struct QueryScratch {
    seen: Vec<u64>,
    touched: Vec<u32>,
    pub stats: QueryStats,
}

impl QueryScratch {
    pub fn new(capacity: usize) -> Self {
        QueryScratch {
            seen: vec![0u64; capacity.div_ceil(64)],
            touched: Vec::new(),
            stats: QueryStats::default(),
        }
    }

    /// Set bit `i`; returns true if it was previously clear.
    pub fn mark(&mut self, i: usize) -> bool {
        let (w, m) = (i / 64, 1u64 << (i % 64));
        if self.seen[w] & m != 0 {
            return false;
        }
        self.seen[w] |= m;
        self.touched.push(i as u32);
        true
    }

    /// Clear exactly the touched bits (O(t) reset).
    pub fn reset(&mut self) {
        for &i in &self.touched {
            self.seen[i as usize / 64] &= !(1u64 << (i % 64));
        }
        self.touched.clear();
    }

    pub fn is_all_zero(&self) -> bool {
        self.seen.iter().all(|&w| w == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    Colored,
    Wavelet,
    Heavy,
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "colored" => Ok(Engine::Colored),
            "wavelet" => Ok(Engine::Wavelet),
            "heavy" => Ok(Engine::Heavy),
            _ => Err(format!("unknown engine '{s}' (colored|wavelet|heavy)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BuildConfig {
    pub colored: bool,
    pub wavelet: bool,
    pub heavy: bool,
    /// Sparsification factor for the colored engine; None picks the default
    /// for the document-array mode (1 stored, ceil(h / log2 sigma) compact).
    pub alpha: Option<usize>,
    pub sample_rate: Option<usize>,
    /// false = compact document array (accesses go through locate).
    pub store_doc_array: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            colored: true,
            wavelet: true,
            heavy: true,
            alpha: None,
            sample_rate: None,
            store_doc_array: true,
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct CatIndex {
    pub sigma: u8,
    pub num_docs: u32,
    pub n: usize,
    pub n_prime: usize,
    pub tree: CategoryTree,
    pub laq: LevelAncestorIndex,
    pub text: SuffixIndex,
    pub docs: DocumentArray,
    pub colored: Option<ColoredEngine>,
    pub shaped: Option<ShapedWaveletIndex>,
    pub heavy: Option<HeavyPathIndex>,
}

impl CatIndex {
    pub fn build(corpus: &Corpus, tree: CategoryTree, cfg: &BuildConfig) -> Result<Self> {
        let sa = suffix_array(&corpus.concat);
        let sample_rate = cfg
            .sample_rate
            .unwrap_or_else(|| SuffixIndex::default_sample_rate(corpus.n_prime));
        let text = SuffixIndex::from_sa(corpus, &sa, sample_rate);
        let docs = DocumentArray::build(corpus, &sa, true);
        let laq = LevelAncestorIndex::build(&tree);
        let mut lf = 0u64;
        let a: Vec<u32> = (1..=corpus.n_prime)
            .map(|i| docs.doc_at(&text, i, &mut lf).unwrap())
            .collect();
        let alpha = cfg.alpha.unwrap_or_else(|| {
            if cfg.store_doc_array {
                1
            } else {
                // balances reporter space against per-report access cost
                let log_sigma = (corpus.sigma.max(2) as f64).log2();
                ((tree.height as f64 / log_sigma).ceil() as usize).max(1)
            }
        });
        let colored = cfg
            .colored
            .then(|| ColoredEngine::build(&a, &tree, &laq, alpha))
            .transpose()?;
        let shaped = cfg
            .wavelet
            .then(|| ShapedWaveletIndex::build(&a, &tree))
            .transpose()?;
        let heavy = cfg
            .heavy
            .then(|| HeavyPathIndex::build(&a, &tree))
            .transpose()?;
        let docs = if cfg.store_doc_array {
            docs
        } else {
            docs.into_compact()
        };
        Ok(CatIndex {
            sigma: corpus.sigma,
            num_docs: corpus.num_docs() as u32,
            n: corpus.n,
            n_prime: corpus.n_prime,
            tree,
            laq,
            text,
            docs,
            colored,
            shaped,
            heavy,
        })
    }

    pub fn new_scratch(&self) -> QueryScratch {
        QueryScratch::new(self.num_docs as usize)
    }

    pub fn query(
        &self,
        engine: Engine,
        p: &[u8],
        level: u32,
        scratch: &mut QueryScratch,
    ) -> Result<QueryResult> {
        scratch.stats = QueryStats::default();
        match engine {
            Engine::Colored => self
                .colored
                .as_ref()
                .ok_or_else(|| Error::EngineMissing("colored".into()))?
                .query(&self.text, &self.docs, &self.laq, p, level, scratch),
            Engine::Wavelet => self
                .shaped
                .as_ref()
                .ok_or_else(|| Error::EngineMissing("wavelet".into()))?
                .query(&self.text, &self.laq, p, level, &mut scratch.stats),
            Engine::Heavy => self
                .heavy
                .as_ref()
                .ok_or_else(|| Error::EngineMissing("heavy".into()))?
                .query(&self.text, &self.laq, p, level, &mut scratch.stats),
        }
    }

    pub fn engines(&self) -> Vec<Engine> {
        let mut v = Vec::new();
        if self.colored.is_some() {
            v.push(Engine::Colored);
        }
        if self.shaped.is_some() {
            v.push(Engine::Wavelet);
        }
        if self.heavy.is_some() {
            v.push(Engine::Heavy);
        }
        v
    }
}
