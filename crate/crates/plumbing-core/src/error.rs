use alloc::string::String;

use thiserror::Error;

/// Failure modes of the core computations.
///
/// Every variant carries a stable name (see [`Error::name`]) which the command
/// line layer prints verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("intersection form is not negative definite (leading minor of order {order} has the wrong sign)")]
    NotNegativeDefinite { order: usize },
    #[error("cycles or bundles belong to different graphs")]
    GraphMismatch,
    #[error("class is not in the dual lattice: pairing with `{0}` is not an integer")]
    NotInLprime(String),
    #[error("class is not in the negative Lipman cone: pairing with `{0}` is negative")]
    NotNegLipman(String),
    #[error("cycle must be at least the reduced cycle of the whole graph (coefficient of `{0}` is below 1)")]
    CycleBelowE(String),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("box has {volume} points, above the cap of {cap}")]
    BoxTooLarge { volume: u64, cap: u64 },
    #[error("integer overflow risk: {0}")]
    Overflow(String),
    #[error("input must be a connected nonzero cycle")]
    DisconnectedInput,
    #[error("first Chern class of the base bundle does not match the restricted class")]
    ChernMismatch,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("descriptor not supported by this oracle: {0}")]
    UnsupportedDescriptor(String),
    #[error("oracle has no entry for {0}")]
    MissingEntry(String),
    #[error("the space of effective divisors without fixed components is empty")]
    EmptyEca,
    #[error("tower has {size} nodes, above the cap of {cap}")]
    TowerTooLarge { size: u64, cap: u64 },
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
}

impl Error {
    /// Stable identifier of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyGraph => "EmptyGraph",
            Error::DuplicateVertex(_) => "DuplicateVertex",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::NotATree(_) => "NotATree",
            Error::NotNegativeDefinite { .. } => "NotNegativeDefinite",
            Error::GraphMismatch => "GraphMismatch",
            Error::NotInLprime(_) => "NotInLprime",
            Error::NotNegLipman(_) => "NotNegLipman",
            Error::CycleBelowE(_) => "CycleBelowE",
            Error::InvalidBox(_) => "InvalidBox",
            Error::BoxTooLarge { .. } => "BoxTooLarge",
            Error::Overflow(_) => "Overflow",
            Error::DisconnectedInput => "DisconnectedInput",
            Error::ChernMismatch => "ChernMismatch",
            Error::HypothesisViolation(_) => "HypothesisViolation",
            Error::UnsupportedDescriptor(_) => "UnsupportedDescriptor",
            Error::MissingEntry(_) => "MissingEntry",
            Error::EmptyEca => "EmptyEca",
            Error::TowerTooLarge { .. } => "TowerTooLarge",
            Error::InvariantViolated(_) => "InvariantViolated",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
