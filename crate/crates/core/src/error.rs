use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid cyclic form [{m}/{n}]: need n >= 2, gcd(m, n) = 1 and m*n even")]
    InvalidCyclic { m: i64, n: i64 },
    #[error("invalid block exponent {0}: must be at least 1")]
    InvalidBlock(u32),
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("form is degenerate")]
    Degenerate,
    #[error("dimension mismatch: expected {expected} coefficients, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subgroup is not isotropic")]
    NotIsotropic,
    #[error("form is not 2-primary")]
    NotTwoPrimary,
    #[error("kappa must be nonzero")]
    ZeroKappa,
    #[error("kappa violates the gluing constraint: {0}")]
    BadKappa(String),
    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("total rank {0} exceeds 19")]
    RankTooLarge(u32),
    #[error("invalid binary lattice: {0}")]
    InvalidBinary(String),
    #[error("discriminant mismatch: {0}")]
    DiscMismatch(String),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("oracle cutoff exceeded: |F| = {size} > {cutoff}")]
    CutoffExceeded { size: u64, cutoff: u64 },
    #[error("not a nonspecial stratum: {0}")]
    NotNonspecial(String),
    #[error("involution enumeration exceeds the limit of {0}")]
    TooManyInvolutions(usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
