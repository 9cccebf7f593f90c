use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidGroupSpec(String),
    #[error("group order {order} exceeds the supported maximum of {max}")]
    OrderTooLarge { order: u128, max: usize },
    #[error("element index {index} out of range for group of order {order}")]
    ElementOutOfRange { index: usize, order: usize },
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("{0} must be nonempty")]
    EmptySet(&'static str),
    #[error("set is not a subgroup")]
    NotASubgroup,
    #[error("set is the whole group")]
    FullSet,
    #[error("coset does not generate the quotient")]
    NotAGenerator,
    #[error("quotient group is not cyclic")]
    QuotientNotCyclic,
    #[error("set literal error: {0}")]
    SetLiteral(String),
    #[error("trio literal error: {0}")]
    TrioLiteral(String),
    #[error("trio is trivial (a member is empty)")]
    TrivialTrio,
    #[error("trio is not critical")]
    TrioNotCritical,
    #[error("trio is not maximal")]
    TrioNotMaximal,
    #[error("(A,H) is not a critical pair")]
    PairNotCritical,
    #[error("coset R must meet B without being contained in it")]
    CosetNotSplit,
    #[error("no continuation: tag kind is pure")]
    PureTagHasNoContinuation,
    #[error("tag does not apply to this trio: {0}")]
    InvalidTag(String),
    #[error("no structure found for a maximal critical trio (theorem violation or bug): {0}")]
    NoStructureFound(String),
    #[error("unsupported document schema version {0}")]
    SchemaVersion(u32),
    #[error("malformed certificate document: {0}")]
    Document(String),
    #[error("exhaustive bound {bound} exceeded by group of order {order}")]
    BoundExceeded { order: usize, bound: usize },
    #[error("unknown theorem id {0:?}")]
    UnknownTheorem(String),
    #[error("theorem {id:?} does not apply to group {group}: {reason}")]
    TheoremDomain {
        id: String,
        group: String,
        reason: String,
    },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
