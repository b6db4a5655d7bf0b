use thiserror::Error;

/// Errors produced by box construction, inequality evaluation, membership
/// solves, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cycle length must be at least 3, got {0}")]
    CycleTooShort(usize),

    #[error("outcome alphabet must have at least 2 symbols, got {0}")]
    AlphabetTooSmall(usize),

    #[error("operation requires dichotomic outcomes (d = 2), box has d = {0}")]
    NotDichotomic(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("edge {edge}: entry {value} outside [0, 1] (tolerance {tol})")]
    InvalidProbability { edge: usize, value: f64, tol: f64 },

    #[error("edge {edge}: probabilities sum to {sum}, expected 1 (tolerance {tol})")]
    BadNormalization { edge: usize, sum: f64, tol: f64 },

    #[error("distribution entry {0} is negative")]
    NegativeProbability(f64),

    #[error("distribution sums to {0}, expected 1")]
    UnnormalizedDistribution(f64),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("sign vector has {got} entries where {expected} are required")]
    SignLength { expected: usize, got: usize },

    #[error("sign vector parity must be {expected}, got {got}")]
    ParityMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("observable X_{observable} has inconsistent marginals across its two edges (max deviation {delta:.3e}, tolerance {tol:.3e})")]
    Disturbing {
        observable: usize,
        delta: f64,
        tol: f64,
    },

    #[error("mixing weights invalid: {0}")]
    InvalidWeights(String),

    #[error("noise weight must lie in [0, 1], got {0}")]
    EpsilonOutOfRange(f64),

    #[error("mixing weight must lie in [0, 1], got {0}")]
    MixingWeightOutOfRange(f64),

    #[error("expansion is singular at epsilon = {0}; it requires 0 < epsilon < 1")]
    ExpansionDomain(f64),

    #[error("expansion requires 0 < v < 1, got {0}")]
    ExpansionWeightDomain(f64),

    #[error("problem size {size} exceeds guard {limit}")]
    SizeGuard { size: u128, limit: u128 },

    #[error("cycle length {n} exceeds the experiment guard {limit} (the vertex set grows exponentially); enable conjecture mode to lift it")]
    ExperimentGuard { n: usize, limit: usize },

    #[error("linear program inconclusive after {iterations} iterations")]
    LpInconclusive { iterations: usize },

    #[error("invalid relabeling: {0}")]
    InvalidRelabeling(String),

    #[error("invalid vertex label: {0}")]
    InvalidVertexLabel(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("box file parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
