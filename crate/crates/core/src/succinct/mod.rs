//! Reusable succinct primitives: rank/select bitvector, packed integer vector,
//! range-minimum structure, and a shape-configurable wavelet tree.
//!
//! All public positions are 1-based; `rank` takes a prefix length in `0..=m`.

pub mod bitvector;
pub mod intvec;
pub mod rmq;
pub mod wavelet;

pub use bitvector::BitVector;
pub use intvec::IntVec;
pub use rmq::Rmq;
pub use wavelet::{Shape, WaveletTree};
