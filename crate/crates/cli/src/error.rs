//! Command layer errors. Everything the core reports passes through
//! unchanged; the extra variants cover conditions only the CLI can
//! detect. Display keeps the `<VariantName>: <detail>` contract so
//! `error: <VariantName>` stays greppable.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Failure bubbled up from the core library.
    Core(svac_core::Error),
    /// Inspect aimed at a single-member clip, which has no aggregate.
    NoComposite(u64),
    /// Parallel runs of the same job produced different bytes.
    NondeterministicOutput(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::NoComposite(index) => {
                write!(f, "NoComposite: clip {index} has a single member and no aggregate")
            }
            CliError::NondeterministicOutput(d) => {
                write!(f, "NondeterministicOutput: {d}")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<svac_core::Error> for CliError {
    fn from(e: svac_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
