//! Bit-exact frame I/O.
//!
//! Two formats are supported:
//!
//! * Binary PPM (`P6`), one file per frame. The writer always emits the
//!   canonical header `P6\n<width> <height>\n255\n` followed by interleaved
//!   RGB8. The reader accepts any standard whitespace and `#` comments in
//!   the header but requires a maxval of exactly 255.
//! * A raw stream holding a whole sequence in one file: an 8-byte magic
//!   `SVACRAW1`, then height, width, and frame count as u32 little-endian,
//!   then the frames back to back as row-major RGB8.
//!
//! Both readers reject payloads whose length disagrees with the header, so
//! a decode-encode round trip reproduces the input byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};

pub const RAW_MAGIC: &[u8; 8] = b"SVACRAW1";
const RAW_HEADER_LEN: usize = 20;

/// On-disk layout of a whole sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceFormat {
    /// Directory of `.ppm` files, ordered by file name.
    PpmDir,
    /// Single `SVACRAW1` stream file.
    RawStream,
}

/// On-disk layout of a single frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFormat {
    Ppm,
    /// `SVACRAW1` stream holding exactly one frame.
    RawStreamSingle,
}

fn io_err(path: &Path, err: std::io::Error) -> Error {
    Error::IoFailure(format!("{}: {err}", path.display()))
}

/// Encodes one frame as binary PPM with the canonical header.
pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", frame.width(), frame.height());
    let mut bytes = Vec::with_capacity(header.len() + frame.data().len());
    bytes.extend_from_slice(header.as_bytes());
    bytes.extend_from_slice(frame.data());
    bytes
}

/// Header tokenizer for PPM: skips whitespace and `#` comments, returns
/// the next token and the offset just past it.
fn next_token(bytes: &[u8], mut at: usize) -> Result<(String, usize)> {
    loop {
        while at < bytes.len() && bytes[at].is_ascii_whitespace() {
            at += 1;
        }
        if at < bytes.len() && bytes[at] == b'#' {
            while at < bytes.len() && bytes[at] != b'\n' {
                at += 1;
            }
            continue;
        }
        break;
    }
    let start = at;
    while at < bytes.len() && !bytes[at].is_ascii_whitespace() && bytes[at] != b'#' {
        at += 1;
    }
    if start == at {
        return Err(Error::MalformedHeader("unexpected end of PPM header".into()));
    }
    let token = std::str::from_utf8(&bytes[start..at])
        .map_err(|_| Error::MalformedHeader("non-ASCII bytes in PPM header".into()))?;
    Ok((token.to_string(), at))
}

fn parse_header_u32(token: &str, what: &str) -> Result<u32> {
    token
        .parse::<u32>()
        .map_err(|_| Error::MalformedHeader(format!("{what} {token:?} is not a valid integer")))
}

/// Decodes a binary PPM held in memory. `origin` only labels errors.
pub fn decode_ppm(bytes: &[u8], origin: &str, source_index: u64) -> Result<Frame> {
    let (magic, at) = next_token(bytes, 0)?;
    if magic != "P6" {
        return Err(Error::MalformedHeader(format!(
            "{origin}: expected magic P6, found {magic:?}"
        )));
    }
    let (width_tok, at) = next_token(bytes, at)?;
    let (height_tok, at) = next_token(bytes, at)?;
    let (maxval_tok, at) = next_token(bytes, at)?;
    let width = parse_header_u32(&width_tok, "width")?;
    let height = parse_header_u32(&height_tok, "height")?;
    if maxval_tok != "255" {
        return Err(Error::MalformedHeader(format!(
            "{origin}: only maxval 255 is supported, found {maxval_tok:?}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "{origin}: zero dimension {width}x{height}"
        )));
    }
    // Exactly one whitespace byte separates the maxval from the pixels.
    if at >= bytes.len() || !bytes[at].is_ascii_whitespace() {
        return Err(Error::MalformedHeader(format!(
            "{origin}: missing separator after maxval"
        )));
    }
    let payload = &bytes[at + 1..];
    let expected = height as usize * width as usize * 3;
    if payload.len() != expected {
        return Err(Error::TruncatedData(format!(
            "{origin}: {height}x{width} needs {expected} pixel bytes, found {}",
            payload.len()
        )));
    }
    Frame::new(height, width, payload.to_vec(), source_index)
}

/// Encodes a sequence as one `SVACRAW1` stream.
pub fn encode_raw_stream(seq: &FrameSequence) -> Result<Vec<u8>> {
    let (height, width) = match seq.dimensions() {
        Some(dims) => dims,
        None => return Err(Error::EmptySequence),
    };
    let count = u32::try_from(seq.len())
        .map_err(|_| Error::InvalidArgument("sequence too long for raw stream".into()))?;
    let frame_len = height as usize * width as usize * 3;
    let mut bytes = Vec::with_capacity(RAW_HEADER_LEN + frame_len * seq.len());
    bytes.extend_from_slice(RAW_MAGIC);
    bytes.extend_from_slice(&height.to_le_bytes());
    bytes.extend_from_slice(&width.to_le_bytes());
    bytes.extend_from_slice(&count.to_le_bytes());
    for frame in seq.frames() {
        bytes.extend_from_slice(frame.data());
    }
    Ok(bytes)
}

/// Decodes a `SVACRAW1` stream. Frames get source indices `0..count`.
pub fn decode_raw_stream(bytes: &[u8], origin: &str) -> Result<FrameSequence> {
    if bytes.len() < RAW_HEADER_LEN {
        return Err(Error::MalformedHeader(format!(
            "{origin}: raw stream header needs {RAW_HEADER_LEN} bytes, found {}",
            bytes.len()
        )));
    }
    if &bytes[..8] != RAW_MAGIC {
        return Err(Error::MalformedHeader(format!(
            "{origin}: bad magic, expected {:?}",
            std::str::from_utf8(RAW_MAGIC).unwrap()
        )));
    }
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let width = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let count = u32::from_le_bytes(bytes[16..20].try_into().unwrap());
    if height == 0 || width == 0 {
        return Err(Error::MalformedHeader(format!(
            "{origin}: zero dimension {height}x{width}"
        )));
    }
    let frame_len = height as usize * width as usize * 3;
    let expected = RAW_HEADER_LEN + frame_len * count as usize;
    if bytes.len() != expected {
        return Err(Error::TruncatedData(format!(
            "{origin}: {count} frames of {height}x{width} need {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let mut frames = Vec::with_capacity(count as usize);
    for i in 0..count as usize {
        let start = RAW_HEADER_LEN + i * frame_len;
        let data = bytes[start..start + frame_len].to_vec();
        frames.push(Frame::new(height, width, data, i as u64)?);
    }
    FrameSequence::new(frames, None)
}

/// Lists the `.ppm` files of a directory in file-name order.
pub fn list_ppm_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingPath(dir.display().to_string()),
        _ => io_err(dir, e),
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "ppm") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Reads one PPM file. The frame's source index is taken from the caller.
pub fn read_ppm_file(path: &Path, source_index: u64) -> Result<Frame> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingPath(path.display().to_string()),
        _ => io_err(path, e),
    })?;
    decode_ppm(&bytes, &path.display().to_string(), source_index)
}

/// Loads a whole sequence from a directory of PPMs or a raw stream file.
///
/// PPM directory loads assign source indices by file-name order; all
/// frames must share dimensions.
pub fn load_sequence(path: &Path, format: SequenceFormat) -> Result<FrameSequence> {
    match format {
        SequenceFormat::PpmDir => {
            let files = list_ppm_files(path)?;
            if files.is_empty() {
                return Err(Error::MissingPath(format!(
                    "{}: no .ppm frames in directory",
                    path.display()
                )));
            }
            let mut frames = Vec::with_capacity(files.len());
            for (i, file) in files.iter().enumerate() {
                frames.push(read_ppm_file(file, i as u64)?);
            }
            FrameSequence::new(frames, None)
        }
        SequenceFormat::RawStream => {
            let bytes = fs::read(path).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => Error::MissingPath(path.display().to_string()),
                _ => io_err(path, e),
            })?;
            decode_raw_stream(&bytes, &path.display().to_string())
        }
    }
}

/// Writes one frame in the requested format.
pub fn write_frame(frame: &Frame, path: &Path, format: FrameFormat) -> Result<()> {
    let bytes = match format {
        FrameFormat::Ppm => encode_ppm(frame),
        FrameFormat::RawStreamSingle => {
            let seq = FrameSequence::new(vec![frame.clone().with_source_index(0)], None)?;
            encode_raw_stream(&seq)?
        }
    };
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Writes a whole sequence as one raw stream file.
pub fn write_raw_stream(seq: &FrameSequence, path: &Path) -> Result<()> {
    let bytes = encode_raw_stream(seq)?;
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}
