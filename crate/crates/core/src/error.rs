use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("orbit left the state domain at step {step} (x = {value})")]
    Divergence { step: usize, value: f64 },

    /// No limit cycle up to the search's largest period, typically a
    /// chaotic parameter value.
    #[error(
        "no limit cycle up to period {max_period} at lambda = {lambda} (residual {residual:e})"
    )]
    NoCycle {
        lambda: f64,
        max_period: usize,
        residual: f64,
    },

    #[error(
        "tail has not settled at depth {depth}: diagonal deviation {deviation_diag:e}, \
         off-diagonal deviation {deviation_offdiag:e}"
    )]
    Convergence {
        depth: usize,
        deviation_diag: f64,
        deviation_offdiag: f64,
    },

    #[error("no terminator root satisfies the branch rule at z = {re} + {im}i")]
    NumericalBranch { re: f64, im: f64 },

    #[error("spectral degeneracy: {0}")]
    SpectralDegeneracy(String),

    #[error("off-diagonal coefficient b_{index} vanishes")]
    DegenerateChain { index: usize },

    #[error("P_{degree}(z) vanishes at z = {re} + {im}i")]
    Pole { degree: usize, re: f64, im: f64 },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
