use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, TunnelError>;

#[derive(Debug, Error)]
pub enum TunnelError {
    /// An input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The (energy, barrier, angle) point lies outside the regime a model is defined for.
    #[error("regime error: {model} requires {requirement}")]
    Regime {
        model: &'static str,
        requirement: &'static str,
    },

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("singular interface: left wavenumber is zero")]
    SingularInterface,

    #[error("no crossover: {0}")]
    NoCrossover(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl TunnelError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        TunnelError::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TunnelError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the environment (files, configuration)
    /// rather than by the physics inputs.
    pub fn is_io_or_config(&self) -> bool {
        matches!(self, TunnelError::Io { .. } | TunnelError::Config(_))
    }
}
