use thiserror::Error;

/// Errors raised by the library and mapped onto CLI exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // subshifts
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: String, to: String },
    #[error("state `{0}` has no incoming or no outgoing edge")]
    DanglingState(String),
    #[error("subshift is not irreducible: `{to}` is unreachable from `{from}`")]
    NotIrreducible { from: String, to: String },
    #[error("potential has {got} values but the graph has {expected} edges")]
    PotentialLength { expected: usize, got: usize },
    #[error("potential value on edge {edge} is not finite")]
    NonFinitePotential { edge: usize },
    #[error("roof value {value} on edge {edge} is not strictly positive")]
    NonPositiveRoof { edge: usize, value: f64 },
    #[error("objects live on different graphs")]
    GraphMismatch,
    #[error("cycle is not a closed path in the graph")]
    CycleNotInGraph,
    #[error("enumeration exceeded the cap of {cap} items")]
    BudgetExceeded { cap: usize },
    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(String),

    // flows
    #[error("direction is not tangent to the pressure-zero level set (residual {residual:e})")]
    NotTangent { residual: f64 },
    #[error("second difference of pressure is negative ({value:e}) even at the refined step")]
    NegativeCurvature { value: f64 },

    // words
    #[error("the identity has no conjugacy class representative")]
    IdentityElement,
    #[error("letter {letter} is outside the alphabet of rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("rank {0} is not supported here")]
    InvalidRank(usize),

    // representations
    #[error("generator {index} is singular or numerically ill-conditioned")]
    SingularGenerator { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigenvalue computation failed")]
    EigenFailure,
    #[error("element is not loxodromic (smallest modulus gap {gap:e})")]
    NonLoxodromic { gap: f64 },
    #[error("top eigenvalue is not simple (relative gap {gap:e})")]
    NonSimpleEigenvalue { gap: f64 },
    #[error("unknown functional preset `{0}`")]
    UnknownPreset(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("ping-pong certificate failed (smallest gap {min_gap})")]
    CertificateFailed { min_gap: f64 },

    // representation metrics
    #[error("non-positive length {value} for class {class}")]
    NonPositiveLength { class: String, value: f64 },
    #[error("insufficient data for entropy regression: {0}")]
    InsufficientData(String),

    // input
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status used by the CLI: 3 for input problems, 2 for domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
