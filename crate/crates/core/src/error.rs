use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length {0} is not a power of two (at least 2)")]
    NotPowerOfTwo(usize),

    #[error("matrix is not square: {len} entries")]
    NotSquare { len: usize },

    #[error("vector is not normalized: norm {0}")]
    NotNormalized(f64),

    #[error("operator is not unitary: max deviation {0:e}")]
    NotUnitary(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter count mismatch: circuit has {expected}, got {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("cost is not finite ({value}) at iteration {iteration}")]
    NonFiniteCost { value: f64, iteration: usize },

    #[error("post-selection probability {0:e} is too small")]
    DegenerateProjection(f64),

    #[error("singular linear system")]
    Singular,

    #[error("state has vanishing trace overlap: |<I|rho>| = {0:e}")]
    Traceless(f64),

    #[error("readout has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step {index}: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, index: usize) -> Self {
        Error::Step { index, source: Box::new(self) }
    }
}
