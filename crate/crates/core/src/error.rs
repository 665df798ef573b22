use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("variable x{index} out of range for ambient dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("domain guard violated in `{op}` (argument {value})")]
    Guard { op: &'static str, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid bump radii: need 0 <= r_in < r_out, got r_in={r_in}, r_out={r_out}")]
    InvalidBump { r_in: f64, r_out: f64 },

    #[error("invalid presentation: {0}")]
    Format(String),

    #[error("only {found} samples found, {required} required")]
    TooFewSamples { found: usize, required: usize },

    #[error("no chart domain can hold a cover ball around sample {sample} (radius floor {radius_floor})")]
    NoChartFits { sample: usize, radius_floor: f64 },

    #[error("refinement needs {needed} families, at most {allowed} allowed (offending elements {pattern:?})")]
    ExceededFamilies {
        needed: usize,
        allowed: usize,
        pattern: Vec<usize>,
    },

    #[error("partition normalizer vanishes at sample {sample} (sum {value:e})")]
    NormalizerVanishes { sample: usize, value: f64 },

    #[error("{kind} stage {stage}: no certified draw after {retries} retries")]
    MaxRetriesExceeded {
        stage: usize,
        kind: &'static str,
        retries: usize,
    },

    #[error("target dimension m={m} is below the required {required}")]
    EmbeddingDimension { m: usize, required: usize },

    #[error("presentation is not flagged as a manifold: {0}")]
    NotManifold(String),

    #[error("rank deficient at sample {sample}: rank {rank}, expected {expected}")]
    RankDeficient {
        sample: usize,
        rank: usize,
        expected: usize,
    },

    #[error("singular Gram matrix at sample {sample} (reciprocal condition {rcond:e})")]
    SingularGram { sample: usize, rcond: f64 },
}

impl Error {
    /// Failures of a numerical construction (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Guard { .. }
                | Error::NoChartFits { .. }
                | Error::ExceededFamilies { .. }
                | Error::NormalizerVanishes { .. }
                | Error::MaxRetriesExceeded { .. }
                | Error::RankDeficient { .. }
                | Error::SingularGram { .. }
                | Error::TooFewSamples { .. }
        )
    }
}
