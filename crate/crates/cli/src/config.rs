//! Run configuration resolution.
//!
//! Every setting comes from the first source that provides it, in
//! order: command line flag, then the SVAC_THREADS variable (threads
//! only), then the optional key=value config file, then the built-in
//! default. Subcommands share this module so the precedence is uniform.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use svac_core::io::SequenceFormat;
use svac_core::Error;

use crate::error::Result;

pub const DEFAULT_FRAMES: usize = 100;
pub const DEFAULT_CLIP_LEN: usize = 10;
pub const DEFAULT_CLIPS_PER_TOKEN: usize = 1;
pub const DEFAULT_PATCH: u32 = 16;
pub const DEFAULT_KEEP_RATIO: f64 = 0.25;
pub const DEFAULT_THREADS: usize = 0;
pub const DEFAULT_SEED: u64 = 0;

/// Keys a config file may define; anything else is a typo worth failing on.
const KNOWN_KEYS: [&str; 12] = [
    "input",
    "format",
    "output",
    "frames",
    "clip_len",
    "clips_per_token",
    "patch",
    "keep_ratio",
    "kernel_a",
    "method",
    "threads",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FormatArg {
    /// Directories hold PPM frames; anything else is a raw stream file.
    Auto,
    PpmDir,
    RawStream,
}

impl FormatArg {
    /// Resolves `auto` against what is actually on disk.
    pub fn sequence_format(self, input: &Path) -> SequenceFormat {
        match self {
            FormatArg::PpmDir => SequenceFormat::PpmDir,
            FormatArg::RawStream => SequenceFormat::RawStream,
            FormatArg::Auto => {
                if input.is_dir() {
                    SequenceFormat::PpmDir
                } else {
                    SequenceFormat::RawStream
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Method {
    Astc,
    AvgPool,
    MaxPool,
    Prune,
    Merge,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Astc => "astc",
            Method::AvgPool => "avg_pool",
            Method::MaxPool => "max_pool",
            Method::Prune => "prune",
            Method::Merge => "merge",
        }
    }
}

/// Parsed key=value config file. Lines may be blank or start with `#`.
#[derive(Debug, Default)]
pub struct FileConfig {
    entries: HashMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingPath(path.display().to_string())
            } else {
                Error::IoFailure(format!("{}: {e}", path.display()))
            }
        })?;
        let mut entries = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidArgument(format!(
                    "{} line {}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                ))
                .into());
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "{} line {}: unknown key {key:?}",
                    path.display(),
                    lineno + 1
                ))
                .into());
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(FileConfig { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Typed lookup; a present but unparsable value is an error.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(text) => text.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidArgument(format!("config key {key} has unusable value {text:?}"))
                    .into()
            }),
        }
    }

    /// ValueEnum lookup so config files accept the same names as flags.
    pub fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(text) => T::from_str(text, false).map(Some).map_err(|_| {
                Error::InvalidArgument(format!("config key {key} has unusable value {text:?}"))
                    .into()
            }),
        }
    }
}

/// SVAC_THREADS, when set, slots in between the flag and the config file.
pub fn env_threads() -> Result<Option<usize>> {
    match std::env::var("SVAC_THREADS") {
        Ok(text) => text.trim().parse::<usize>().map(Some).map_err(|_| {
            Error::InvalidArgument(format!("SVAC_THREADS must be a thread count, got {text:?}"))
                .into()
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::InvalidArgument(format!("SVAC_THREADS: {e}")).into()),
    }
}

/// Runs `job` on a pool of `threads` workers; 0 keeps the global pool
/// and its machine-sized default.
pub fn with_threads<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build {threads} thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Flag-style name of a sequence format for config echoes.
pub fn format_label(format: SequenceFormat) -> &'static str {
    match format {
        SequenceFormat::PpmDir => "ppm_dir",
        SequenceFormat::RawStream => "raw_stream",
    }
}

/// Human form of the threads setting for config echoes.
pub fn threads_label(threads: usize) -> String {
    if threads == 0 {
        "0 (auto)".to_string()
    } else {
        threads.to_string()
    }
}
