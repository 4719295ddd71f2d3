use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A series or quadrature did not reach its tolerance.
    #[error("accuracy error in {op}: achieved error bound {achieved:e} exceeds target {target:e}")]
    Accuracy {
        op: &'static str,
        achieved: f64,
        target: f64,
    },

    #[error("invalid port layout: {0}")]
    Layout(String),

    /// A port is fully correlated with the reference (|ρ| = 1).
    #[error("port {port} has |rho| = 1; the conditional law is singular")]
    Singular { port: usize },

    /// The request exceeds what the chosen method can evaluate.
    #[error("capacity exceeded in {op}: {msg}")]
    Capacity { op: &'static str, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }
}
