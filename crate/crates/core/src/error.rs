use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("fields are defined on different domains")]
    DomainMismatch,

    #[error("axial mode {n} lies outside the band |n| <= {n_z}")]
    ModeOutOfBand { n: i64, n_z: usize },

    #[error("Sobolev order {k} exceeds the supported maximum {max}")]
    SobolevOrder { k: usize, max: usize },

    #[error("singular radial operator for mode (n = {n}, m = {m})")]
    SingularOperator { n: i64, m: i64 },

    #[error("{context}: residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual {
        context: String,
        residual: f64,
        tolerance: f64,
    },

    #[error(
        "ambiguous constraint rank for mode n = {n}, group {group}: \
         singular values near threshold {singular_values:?}"
    )]
    RankAmbiguous {
        n: i64,
        group: i64,
        singular_values: Vec<f64>,
    },

    #[error("strong and weak assembly disagree for mode n = {n}: relative difference {relative:e}")]
    AssemblyMismatch { n: i64, relative: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{module}: criterion `{criterion}` failed: {message}")]
    Criterion {
        module: &'static str,
        criterion: String,
        message: String,
    },
}
