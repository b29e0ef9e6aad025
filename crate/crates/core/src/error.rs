use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::numfield::MAX_DIM)]
    TooLarge(usize),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid family: {0}")]
    FamilyParse(String),

    #[error("invalid tolerance {name} = {value}: must lie strictly between 0 and 1")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("matrix is singular at the rank tolerance (sigma_min/sigma_max = {ratio:e})")]
    SingularMatrix { ratio: f64 },

    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,

    #[error("eigenvalue clusters are ambiguous at the clustering tolerance: {0}")]
    ClusterAmbiguity(String),

    #[error("Jordan similarity is ill-conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("eigenvalue {re}{im:+}i is ambiguously real at the realness tolerance")]
    AmbiguousRealness { re: f64, im: f64 },

    #[error("spectrum is neither real nor paired with matching Jordan structure")]
    ConditionViolated,

    #[error("cannot align conjugate-pair blocks: {0}")]
    PairingMismatch(String),

    #[error("metric is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("metric has an eigenvalue below the rank tolerance ({0:e})")]
    NearSingular(f64),

    #[error("operator does not commute with H (residual {0:e})")]
    NotASymmetry(f64),

    #[error("antilinear operator is not involutory (residual {0:e})")]
    NotInvolutory(f64),

    #[error("no invertible M = cL + conj(c)I found among sampled scalars")]
    NoInvertibleM,

    #[error("Kramers pairing unavailable: {0}")]
    PairingUnavailable(String),

    #[error("H does not commute with the antilinear operator (residual {0:e})")]
    NotTSymmetric(f64),

    #[error("certificate {what} failed: residual {residual:e} exceeds {limit:e}")]
    CertificateFailed {
        what: &'static str,
        residual: f64,
        limit: f64,
    },
}

impl Error {
    /// True for failures caused by numerics rather than malformed input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::NotSquare { .. }
                | Error::TooLarge(_)
                | Error::NonFinite
                | Error::InvalidTolerance { .. }
                | Error::Parse { .. }
                | Error::Io { .. }
                | Error::FamilyParse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
