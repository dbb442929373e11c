use thiserror::Error;

/// Problems with the command line or its inputs. These map to exit code 2.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed matroid JSON: {0}")]
    Json(#[source] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid matroid: {0}")]
    Matroid(tautring_core::Error),
    #[error("{0}")]
    Usage(String),
}
