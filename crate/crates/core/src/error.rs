use thiserror::Error;

/// Errors produced by design, coding and container operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("decision threshold must be a finite non-negative number, got {0}")]
    NegativeThreshold(f64),

    #[error("distortion must be a finite positive number, got {0}")]
    InvalidDistortion(f64),

    #[error(
        "infeasible target: distortion {requested} is below the two-level optimum 0.5 \
         (SQNR must not exceed {max_sqnr_db:.4} dB)"
    )]
    Infeasible { requested: f64, max_sqnr_db: f64 },

    #[error("could not bracket distortion {0}: target is at or above the supremum of D(t1)")]
    BracketFailure(f64),

    #[error("invalid symbol probabilities ({p1}, {p2}): must lie in [0, 1] and sum to 1")]
    InvalidProbability { p1: f64, p2: f64 },

    #[error("block size {0} out of range 1..=16")]
    BlockSizeOutOfRange(usize),

    #[error("block model needs at least 2 entries, got {0}")]
    DegenerateModel(usize),

    #[error("block {0} has zero probability")]
    ZeroProbability(usize),

    #[error("codebook and block model disagree ({0})")]
    ModelMismatch(String),

    #[error("no samples to encode")]
    EmptyInput,

    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),

    #[error("codebook was not built for this quantizer design")]
    CodebookMismatch,

    #[error("corrupt header: {0}")]
    CorruptHeader(String),

    #[error("truncated payload: decoded {decoded} of {expected} blocks")]
    TruncatedPayload { decoded: u64, expected: u64 },

    #[error("dangling bits: {0} payload bits do not form a codeword")]
    DanglingBits(u64),
}

impl Error {
    /// True for errors caused by malformed encoded data rather than by
    /// out-of-domain design parameters.
    pub fn is_format_error(&self) -> bool {
        matches!(
            self,
            Error::CorruptHeader(_) | Error::TruncatedPayload { .. } | Error::DanglingBits(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
