use thiserror::Error;

/// Every failure the library can report.
///
/// Variants fall into two families that callers (the CLI in particular) treat
/// differently: domain errors, where the request itself is outside the
/// supported region, and budget errors, where the request is valid but would
/// need more work than the configured caps allow.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shift parameter a must be positive, got {0}")]
    NonPositiveShift(f64),
    #[error("weight w[{index}] must be positive, got {value}")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("weight list is empty")]
    EmptyWeights,
    #[error("declared rational weight mode but weight {0:?} is not an exact rational")]
    ConflictingDeclaration(String),
    #[error("weights mix {exact} exact rationals with floating-point values; the diagonal series has no supported rearrangement for this structure")]
    UnsupportedWeightStructure { exact: usize },
    #[error("integer overflow while counting representations of {k}")]
    Overflow { k: u64 },
    #[error("sigma = {sigma} is too small: this operation needs sigma > {bound}")]
    SigmaTooSmall { sigma: f64, bound: f64 },
    #[error("s = {re}{im:+}i lies within {guard} of the pole at {pole}")]
    NearPole {
        re: f64,
        im: f64,
        pole: u32,
        guard: f64,
    },
    #[error("|t| = {t} exceeds 2*pi*x/C = {limit} for truncation x = {x}")]
    TruncationTooShort { t: f64, x: f64, limit: f64 },
    #[error("work estimate {needed:.3e} exceeds the cap {cap:.3e} ({what})")]
    BudgetExceeded {
        what: &'static str,
        needed: f64,
        cap: f64,
    },
    #[error("invalid box range on axis {axis}: need 0 <= p < q, got ({p}, {q})")]
    InvalidBox { axis: usize, p: f64, q: f64 },
    #[error("need at least {needed} usable checkpoints, have {have}")]
    InsufficientCheckpoints { needed: usize, have: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Work-cap violations, as opposed to requests outside the domain.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::Overflow { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
