//! Shared error type for the toolkit.
//!
//! The `Display` form is stable: `<VariantName>: <detail>`. The CLI prints
//! it verbatim after an `error: ` prefix, so scripts can match on the
//! variant name.

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// A path given to a loader or writer does not exist.
    MissingPath(String),
    /// A PPM or raw-stream header failed to parse.
    MalformedHeader(String),
    /// Frames or tiles disagree on height/width.
    DimensionMismatch(String),
    /// Pixel payload shorter or longer than the header promises.
    TruncatedData(String),
    /// Underlying I/O failure, with the path that caused it.
    IoFailure(String),
    /// Clip length must be at least 2.
    InvalidClipLength(usize),
    /// An operation that needs at least one frame got none.
    EmptySequence,
    /// A grid layout does not fit the clip or aggregate it was paired with.
    LayoutMismatch(String),
    /// Index past the end of a tile grid, clip set, or frame range.
    IndexOutOfRange { index: usize, limit: usize },
    /// Frame dimensions are not a multiple of the patch size.
    NonDivisibleDimensions(String),
    /// Pooling window exceeds the token grid extent.
    WindowLargerThanGrid(String),
    /// Saliency score list length differs from the token count.
    ScoreCountMismatch { expected: usize, actual: usize },
    /// Manifest violates its schema or internal consistency rules.
    SchemaViolation(String),
    /// Manifest format_version differs from the one this build writes.
    VersionMismatch { found: u64, expected: u64 },
    /// Frame construction with an inconsistent pixel buffer.
    InvalidFrame(String),
    /// Frame sequence construction violating sequence invariants.
    InvalidSequence(String),
    /// Parameter outside its documented domain.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MissingPath(p) => write!(f, "MissingPath: {p}"),
            Error::MalformedHeader(d) => write!(f, "MalformedHeader: {d}"),
            Error::DimensionMismatch(d) => write!(f, "DimensionMismatch: {d}"),
            Error::TruncatedData(d) => write!(f, "TruncatedData: {d}"),
            Error::IoFailure(d) => write!(f, "IoFailure: {d}"),
            Error::InvalidClipLength(m) => {
                write!(f, "InvalidClipLength: clip length must be >= 2, got {m}")
            }
            Error::EmptySequence => write!(f, "EmptySequence: no frames to process"),
            Error::LayoutMismatch(d) => write!(f, "LayoutMismatch: {d}"),
            Error::IndexOutOfRange { index, limit } => {
                write!(f, "IndexOutOfRange: index {index} not below {limit}")
            }
            Error::NonDivisibleDimensions(d) => write!(f, "NonDivisibleDimensions: {d}"),
            Error::WindowLargerThanGrid(d) => write!(f, "WindowLargerThanGrid: {d}"),
            Error::ScoreCountMismatch { expected, actual } => {
                write!(f, "ScoreCountMismatch: expected {expected} scores, got {actual}")
            }
            Error::SchemaViolation(d) => write!(f, "SchemaViolation: {d}"),
            Error::VersionMismatch { found, expected } => {
                write!(f, "VersionMismatch: manifest version {found}, supported {expected}")
            }
            Error::InvalidFrame(d) => write!(f, "InvalidFrame: {d}"),
            Error::InvalidSequence(d) => write!(f, "InvalidSequence: {d}"),
            Error::InvalidArgument(d) => write!(f, "InvalidArgument: {d}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_starts_with_variant_name() {
        let cases: Vec<(Error, &str)> = vec![
            (Error::MissingPath("x".into()), "MissingPath"),
            (Error::MalformedHeader("x".into()), "MalformedHeader"),
            (Error::DimensionMismatch("x".into()), "DimensionMismatch"),
            (Error::TruncatedData("x".into()), "TruncatedData"),
            (Error::IoFailure("x".into()), "IoFailure"),
            (Error::InvalidClipLength(1), "InvalidClipLength"),
            (Error::EmptySequence, "EmptySequence"),
            (Error::LayoutMismatch("x".into()), "LayoutMismatch"),
            (Error::IndexOutOfRange { index: 3, limit: 3 }, "IndexOutOfRange"),
            (Error::NonDivisibleDimensions("x".into()), "NonDivisibleDimensions"),
            (Error::WindowLargerThanGrid("x".into()), "WindowLargerThanGrid"),
            (Error::ScoreCountMismatch { expected: 4, actual: 5 }, "ScoreCountMismatch"),
            (Error::SchemaViolation("x".into()), "SchemaViolation"),
            (Error::VersionMismatch { found: 2, expected: 1 }, "VersionMismatch"),
            (Error::InvalidFrame("x".into()), "InvalidFrame"),
            (Error::InvalidSequence("x".into()), "InvalidSequence"),
            (Error::InvalidArgument("x".into()), "InvalidArgument"),
        ];
        for (err, name) in cases {
            let text = err.to_string();
            assert!(
                text.starts_with(&format!("{name}: ")),
                "display {text:?} does not start with {name:?}"
            );
        }
    }
}
