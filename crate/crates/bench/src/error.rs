use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("bad IDX magic number {0:#010x} (expected 0x00000803)")]
    BadMagic(u32),

    #[error("IDX file truncated: need {expected} bytes, found {found}")]
    TruncatedFile { expected: usize, found: usize },

    #[error("image index {index} out of range for {count} images")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("competitive ratio needs positive distances, got {d1} and {d2}")]
    NonPositiveDistance { d1: f64, d2: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Core(#[from] otx_core::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
