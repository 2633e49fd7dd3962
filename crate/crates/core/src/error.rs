use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tau must lie in the upper half plane (got Im(tau) = {0})")]
    NotUpperHalfPlane(f64),

    #[error("gamma(n) is defined for n >= 2 (got {0})")]
    GammaIndex(i64),

    #[error("weight must be non-negative (got {0})")]
    NegativeWeight(i64),

    #[error("element is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("weight mismatch: element has weight {found}, span has weight {expected}")]
    WeightMismatch { expected: i64, found: i64 },

    #[error("element has sigma-charge {0}, expected 0")]
    ChargeMismatch(u8),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("residue basis is linearly dependent modulo {0} at weight {1}")]
    DependentResidueBasis(String, i64),

    #[error("element is not in the span of the residue basis at weight {0}")]
    NotInResidueSpan(i64),

    #[error("modular scalar is not closed: tau^({tau_half}/2), e^(i pi {eighth}/4)")]
    OpenModularScalar { tau_half: i32, eighth: u8 },

    #[error("S^2 is not a permutation matrix")]
    NotPermutation,

    #[error("Verlinde number N_({i},{j})^{k} = {value} is not a non-negative integer")]
    NonIntegralFusion {
        i: usize,
        j: usize,
        k: usize,
        value: String,
    },

    #[error("S_(0,{0}) vanishes")]
    SingularVacuumRow(usize),

    #[error("no glue vector found for (m, n) = ({m}, {n}); tried {tried:?}")]
    GlueNotFound {
        m: i64,
        n: i64,
        tried: Vec<(i64, i64)>,
    },

    #[error("m + n must not be divisible by 3 (got m = {0}, n = {1})")]
    GlueResidueZero(i64, i64),

    #[error("coefficient at exponent {0} lies beyond the truncation order")]
    BeyondTruncation(String),

    #[error("series cannot be inverted: {0}")]
    NonInvertibleSeries(String),

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
