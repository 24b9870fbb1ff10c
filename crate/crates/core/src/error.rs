use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("index out of range: {0}")]
    Range(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("non-finite value encountered: {0}")]
    Numeric(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("expectation value has imaginary part {imag:e}; operator is not Hermitian")]
    HermiticityViolation { imag: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl SimError {
    pub(crate) fn shape(expected: usize, got: usize) -> Self {
        SimError::Shape { expected, got }
    }
}
