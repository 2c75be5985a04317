use thiserror::Error;

/// Errors shared across the model, analytic, search and varrep modules.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum DimerError {
    #[error("parameter `{0}` is not finite")]
    NonFiniteParameter(&'static str),

    #[error("state is not normalized: |a|^2+|b|^2+|c|^2 = {norm}")]
    NotNormalized { norm: f64 },

    #[error("point (g11={g11}, g12={g12}) lies outside the N-representability disk")]
    OutsideDisk { g11: f64, g12: f64 },

    #[error("polar radius R={0} outside [0, 1/2]")]
    InvalidPolarRadius(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensityOperator(String),

    #[error("the disk center (1/2, 0) has no polar angle; operation undefined there")]
    CenterUndefined,

    #[error("no analytic ellipse form for this interaction: {0}")]
    UnsupportedAnalytic(String),

    #[error("point too close to the disk boundary (R={r} < {min_r})")]
    TooCloseToBoundary { r: f64, min_r: f64 },

    #[error("Hessian evaluation excluded: {0}")]
    HessianExcluded(&'static str),

    #[error("grid has too few unmasked nodes ({0})")]
    TooFewNodes(usize),

    #[error("invalid search options: {0}")]
    InvalidOptions(String),

    #[error("functional kind {0} is not defined for this input: {1}")]
    KindMismatch(&'static str, &'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, DimerError>;
