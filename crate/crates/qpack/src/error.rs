//! Error type shared across the toolchain. Variants map onto the CLI exit
//! code contract: config 2, instability 3, analysis 4, anything else 1.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration or scene input: unknown keys, type mismatches,
    /// dangling references, out-of-domain geometry.
    #[error("config error: {0}")]
    Config(String),

    /// Geometry that the grid cannot represent (feature thinner than a cell
    /// without a sheet flag, source inside a conductor, ...).
    #[error("placement error: {0}")]
    Placement(String),

    /// Non-finite fields during time stepping.
    #[error("numerical instability at step {step}: {detail}")]
    Instability { step: usize, detail: String },

    /// Post-processing failure: tracked mode lost, empty spectrum, ...
    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI (0 is success and never returned here).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Placement(_) => 2,
            Error::Instability { .. } => 3,
            Error::Analysis(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
