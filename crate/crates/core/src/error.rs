use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("document {0} is empty")]
    EmptyDocument(u32),
    #[error("document {doc} contains byte {byte}, outside [1..{sigma}]")]
    InvalidByte { doc: u32, byte: u8, sigma: u8 },
    #[error("document ids must be contiguous 1..D, got {0}")]
    BadDocumentId(u32),
    #[error("tree has {got} leaves but corpus has {want} documents")]
    LeafCountMismatch { got: usize, want: usize },
    #[error("leaves at differing levels ({0} and {1})")]
    RaggedLeaves(u32, u32),
    #[error("tree must have exactly one root, found {0}")]
    BadRootCount(usize),
    #[error("tree contains a cycle or unreachable node {0}")]
    Disconnected(u32),
    #[error("node id {0} out of range")]
    BadNodeId(u32),
    #[error("leaves list does not map bijectively onto leaf nodes")]
    BadLeafList,
    #[error("position {0} out of range (length {1})")]
    OutOfRange(usize, usize),
    #[error("occurrence index {0} exceeds count {1}")]
    SelectOutOfRange(usize, usize),
    #[error("invalid range [{0}..{1}]")]
    InvalidRange(usize, usize),
    #[error("symbol {0} outside shape coverage")]
    UnknownSymbol(u64),
    #[error("query on empty sequence")]
    EmptySequence,
    #[error("level {0} out of range [1..{1}]")]
    LevelOutOfRange(u32, u32),
    #[error("empty pattern")]
    EmptyPattern,
    #[error("pattern byte {0} outside [1..sigma]")]
    InvalidPatternByte(u8),
    #[error("sparsification factor must be >= 1")]
    InvalidAlpha,
    #[error("malformed index: {0}")]
    MalformedIndex(String),
    #[error("engine {0} not present in index")]
    EngineMissing(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
