use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants map one-to-one onto the CLI exit codes: structural and
/// configuration problems are caller mistakes, data errors come from the
/// sampled values themselves, and hypothesis violations reject an inequality
/// evaluation whose theorem does not apply.
#[derive(Debug, Error)]
pub enum PlpError {
    /// Shapes, lengths or grids that do not line up.
    #[error("structural error: {0}")]
    Structural(String),

    /// Invalid parameters or an unusable configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Non-finite samples, malformed files and similar.
    #[error("data error: {0}")]
    Data(String),

    /// An operation's precondition on the input data failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A theorem hypothesis is not met by the requested evaluation.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PlpError>;

impl PlpError {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        PlpError::Structural(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        PlpError::Config(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        PlpError::Data(msg.into())
    }
}
