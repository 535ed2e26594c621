//! Categorical document retrieval: documents sit at the leaves of a fixed-height
//! category tree and a query (pattern, level) returns every level-`i` category
//! containing at least one matching document.
//!
//! Four interchangeable engines are provided: colored range reporting (exact,
//! sparsified and compact document-array variants), a category-shaped wavelet
//! tree, and its heavy-path-decomposed counterpart. All engines answer through
//! the same BWT backward-search front end and agree with a brute-force oracle.

pub mod colored;
pub mod container;
pub mod corpus;
pub mod error;
pub mod gen;
pub mod heavy;
pub mod index;
pub mod oracle;
pub mod shaped;
pub mod succinct;
pub mod text;
pub mod topo;

pub use corpus::{CategoryTree, Corpus, QueryResult};
pub use error::{Error, Result};
pub use index::{BuildConfig, CatIndex, Engine, QueryScratch, QueryStats};
