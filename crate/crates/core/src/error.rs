use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("block size {sub} outside 1..={max}")]
    SubOutOfRange { sub: usize, max: usize },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("fidelity trace has imaginary part {imag:e}")]
    ComplexFidelity { imag: f64 },
    #[error("fidelity {value} outside [0, 1] beyond tolerance")]
    FidelityOutOfRange { value: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
