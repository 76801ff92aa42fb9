use thiserror::Error;

/// Errors produced by the kernel, the integrators and the experiment harness.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value in {0}")]
    Divergence(String),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular leaf: {0}")]
    SingularLeaf(String),

    #[error("unknown {kind} `{name}`; valid names: {}", valid.join(", "))]
    Catalogue {
        kind: &'static str,
        name: String,
        valid: Vec<String>,
    },

    #[error("error {error:e} at the largest step is below the precision floor; order cannot be measured")]
    PrecisionFloor { error: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips any `AtStep` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
