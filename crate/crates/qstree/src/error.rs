use thiserror::Error;

/// Everything that can go wrong while reading a spec or analysing a coloring.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid spec: {0}")]
    Invalid(String),

    #[error("degree mismatch at vertex {vertex}: indices sum to {sum}, expected {degree}")]
    DegreeMismatch {
        vertex: String,
        sum: u64,
        degree: u32,
    },

    #[error("horizon insufficient: {0}")]
    Horizon(String),

    #[error("horizon unstable: b({n}) = {at_h} at horizon {h} but {at_2h} at horizon {h2}")]
    HorizonUnstable {
        n: usize,
        h: usize,
        h2: usize,
        at_h: usize,
        at_2h: usize,
    },

    #[error("search cap {cap} exceeded for n = {n} (best center covers {covered} of {total} classes)")]
    CapExceeded {
        n: usize,
        cap: usize,
        covered: usize,
        total: usize,
    },

    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("ambiguous lineage at n = {n}: both extensions contain {count} balls of class A")]
    Ambiguity { n: usize, count: u64 },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Invalid(_) | Error::DegreeMismatch { .. } | Error::Io(_) => 1,
            Error::Inconsistency(_) | Error::Ambiguity { .. } | Error::Precondition(_) => 2,
            Error::Horizon(_) | Error::HorizonUnstable { .. } | Error::CapExceeded { .. } => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
