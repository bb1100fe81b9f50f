use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph axiom violated: {0}")]
    AxiomViolation(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("contractions are not composable: {0}")]
    Incomposable(String),
    #[error("unsupported genus {0}")]
    UnsupportedGenus(usize),
    #[error("graphs with legs are not supported here")]
    LegsUnsupported,
    #[error("bad letter {letter} for rank {rank}")]
    BadLetter { letter: i32, rank: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("tuple length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("map is not an automorphism")]
    NotAnAutomorphism,
    #[error("nielsen reduction exceeded its search limit")]
    SearchLimit,
    #[error("markings live on different presentations")]
    PresentationMismatch,
    #[error("contraction source does not match the marked graph")]
    SourceMismatch,
    #[error("bad path: {0}")]
    BadPath(String),
    #[error("unknown object {0}")]
    UnknownObject(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("node {0} has valuation zero")]
    ZeroLengthNode(usize),
    #[error("node {0} has a parameter outside the valuation ring")]
    NegativeValuation(usize),
    #[error("dual graph is not stable")]
    UnstableDualGraph,
    #[error("no matching cell: {0}")]
    NoMatchingCell(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
