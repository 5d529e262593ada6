use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tile outside truncation box: lattice point {m:?} not in [-{half_width}, {half_width}]^n")]
    TileOutsideBox { m: Vec<i64>, half_width: usize },

    #[error("grid under-resolves signal bandwidth: {points} points per axis, need at least {required}")]
    UnderResolved { points: usize, required: usize },

    #[error("window must be non-zero")]
    ZeroWindow,

    #[error("{0} must be non-zero")]
    ZeroInput(&'static str),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("⟨γ, g⟩ too small for stable inversion (|⟨γ, g⟩| = {inner:e}, threshold {threshold:e})")]
    UnstableInversion { inner: f64, threshold: f64 },

    #[error("power iteration did not converge after {iterations} iterations (eigenvalue {eigenvalue}, residual {residual:e})")]
    NotConverged {
        iterations: usize,
        eigenvalue: f64,
        residual: f64,
    },

    #[error("operator norm too close to 1; bound vacuous (norm = {op_norm})")]
    NearUnitNorm { op_norm: f64 },

    #[error("theorem requires product-form Σ")]
    NotProductForm,

    #[error("proposition requires (ν⊗μ)(Σ) < 1, got {measure}")]
    MeasureTooLarge { measure: f64 },

    #[error("family is not orthonormal: Gram entry ({i}, {j}) = {value}")]
    NotOrthonormal { i: usize, j: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
