use thiserror::Error;

/// Errors raised by the solver, the measures and the command-line driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("the analytic solution requires identical atoms: {0}")]
    NonIdenticalAtoms(String),

    #[error("cubic discriminant x1^2 - 3 x2 = {value:e} is not above {threshold:e} (repeated roots)")]
    DegenerateDiscriminant { value: f64, threshold: f64 },

    #[error("cubic has complex roots: acos argument {argument} lies outside [-1, 1]")]
    ComplexRootRegime { argument: f64 },

    #[error("characteristic roots are degenerate (separation {separation:e})")]
    DegenerateRoots { separation: f64 },

    #[error("step halving did not reach tolerance (last endpoint change {change:e} at step {step:e})")]
    StepSizeFailure { step: f64, change: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("Fock truncation too small: tail mass {tail_mass:e} exceeds {tail_tol:e}; raise n_max")]
    TruncationTooSmall { tail_mass: f64, tail_tol: f64 },

    #[error("density matrix lacks the identical-atom structure (rows 2 and 3 differ by {deviation:e})")]
    StructureViolation { deviation: f64 },

    #[error("negative eigenvalue {value:e} below the clamp threshold")]
    NegativeEigenvalue { value: f64 },

    #[error("negative concurrence radicand {value:e}")]
    NegativeRadicand { value: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("block ({n1}, {n2}): {source}")]
    Block {
        n1: i64,
        n2: i64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config { line, message: message.into() }
    }

    pub(crate) fn in_block(self, n1: i64, n2: i64) -> Self {
        match self {
            e @ Error::Block { .. } => e,
            e => Error::Block { n1, n2, source: Box::new(e) },
        }
    }

    /// Process exit status for this error: 2 for configuration problems,
    /// 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParams(_) | Error::NonIdenticalAtoms(_) => 2,
            Error::Io(_) => 1,
            Error::Block { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
