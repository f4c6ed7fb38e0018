use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("scale {scale} outside [{lo}, {hi}]")]
    ScaleOutOfRange { scale: i32, lo: i32, hi: i32 },
    #[error("spectrum is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("grid mismatch")]
    GridMismatch,
    #[error("invalid atom index: {0}")]
    InvalidIndex(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("image: {0}")]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;
