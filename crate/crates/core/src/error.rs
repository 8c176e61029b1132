use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("basis mismatch: {left} qubits vs {right} qubits")]
    BasisMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("time {t} outside the schedule [0, {t_anneal}]")]
    TimeOutOfRange { t: f64, t_anneal: f64 },

    #[error("ambiguous parity sector: |<K>| = {modulus} on level {level}")]
    AmbiguousSector { level: usize, modulus: f64 },

    #[error("integrator exhausted {max_steps} steps at t = {t}")]
    StepLimit { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("density matrix lost positivity at t = {t}: min eigenvalue {min_eigenvalue:e}")]
    Positivity { t: f64, min_eigenvalue: f64 },

    #[error("full-space oracle supports at most {max} qubits, got {got}")]
    OracleTooLarge { max: usize, got: usize },

    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("missing required field `{0}`")]
    MissingField(String),

    #[error("malformed config line {line}: {text}")]
    Malformed { line: usize, text: String },

    #[error("unknown figure `{id}`; valid ids: {valid}")]
    UnknownFigure { id: String, valid: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidValue { .. }
            | Error::UnknownKey(_)
            | Error::MissingField(_)
            | Error::Malformed { .. }
            | Error::UnknownFigure { .. }
            | Error::OracleTooLarge { .. } => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
