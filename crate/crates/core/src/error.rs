use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: shape mismatch between {left_rows}x{left_cols} and {right_rows}x{right_cols}")]
    Shape {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("{what}: expected length {expected}, found {found}")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{0}: input is empty")]
    Empty(&'static str),
    #[error("{0}: non-finite value encountered")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error("{what}: need at least {needed} samples, found {found}")]
    TooFewSamples {
        what: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("class {class} has {count} samples, fewer than the {k} folds requested")]
    ClassTooSmall { class: u8, count: usize, k: usize },
    #[error("dataset contains a single class; both labels are required")]
    SingleClass,
    #[error("{players} players exceeds the exact Shapley limit of {max}; use the sampling estimator")]
    TooManyPlayers { players: usize, max: usize },
    #[error("no precomputed embedding for article {0:?}")]
    MissingEmbedding(String),
    #[error("no attention in this configuration")]
    NoAttention,
    #[error("normalizer fitted on {fitted:?} used to evaluate fold {evaluated}")]
    Leakage { fitted: Option<u32>, evaluated: u32 },
}
