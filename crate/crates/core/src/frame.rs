//! In-memory frame and sequence types.
//!
//! A frame is interleaved RGB8, row-major. `source_index` records the
//! frame's position in the original (pre-sampling) video so downstream
//! stages can always point back at the footage they summarize.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    height: u32,
    width: u32,
    data: Vec<u8>,
    source_index: u64,
}

impl Frame {
    /// `data` must hold exactly `height * width * 3` bytes.
    pub fn new(height: u32, width: u32, data: Vec<u8>, source_index: u64) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidFrame(format!(
                "dimensions must be positive, got {height}x{width}"
            )));
        }
        let expected = height as usize * width as usize * 3;
        if data.len() != expected {
            return Err(Error::InvalidFrame(format!(
                "{height}x{width} frame needs {expected} bytes, got {}",
                data.len()
            )));
        }
        Ok(Frame { height, width, data, source_index })
    }

    /// Solid-color frame, handy for padding and tests.
    pub fn filled(height: u32, width: u32, rgb: [u8; 3], source_index: u64) -> Result<Self> {
        let pixels = height as usize * width as usize;
        let mut data = Vec::with_capacity(pixels * 3);
        for _ in 0..pixels {
            data.extend_from_slice(&rgb);
        }
        Frame::new(height, width, data, source_index)
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn source_index(&self) -> u64 {
        self.source_index
    }

    pub fn with_source_index(mut self, source_index: u64) -> Self {
        self.source_index = source_index;
        self
    }

    pub fn pixel(&self, y: u32, x: u32) -> [u8; 3] {
        let at = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[at], self.data[at + 1], self.data[at + 2]]
    }

    /// Pixel equality regardless of `source_index`.
    pub fn same_pixels(&self, other: &Frame) -> bool {
        self.height == other.height && self.width == other.width && self.data == other.data
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Frame")
            .field("height", &self.height)
            .field("width", &self.width)
            .field("source_index", &self.source_index)
            .field("data_len", &self.data.len())
            .finish()
    }
}

/// Ordered frames of uniform dimensions with strictly increasing
/// source indices. May be empty.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSequence {
    frames: Vec<Frame>,
    fps_hint: Option<f64>,
}

impl FrameSequence {
    pub fn new(frames: Vec<Frame>, fps_hint: Option<f64>) -> Result<Self> {
        if let Some(first) = frames.first() {
            let (h, w) = (first.height(), first.width());
            for frame in &frames {
                if frame.height() != h || frame.width() != w {
                    return Err(Error::DimensionMismatch(format!(
                        "sequence is {h}x{w} but frame {} is {}x{}",
                        frame.source_index(),
                        frame.height(),
                        frame.width()
                    )));
                }
            }
            for pair in frames.windows(2) {
                if pair[1].source_index() <= pair[0].source_index() {
                    return Err(Error::InvalidSequence(format!(
                        "source indices must be strictly increasing, got {} then {}",
                        pair[0].source_index(),
                        pair[1].source_index()
                    )));
                }
            }
        }
        Ok(FrameSequence { frames, fps_hint })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dimensions(&self) -> Option<(u32, u32)> {
        self.frames.first().map(|f| (f.height(), f.width()))
    }

    pub fn fps_hint(&self) -> Option<f64> {
        self.fps_hint
    }
}

/// Uniform temporal subsampling down to at most `target` frames.
///
/// Keeps frame `floor(i * len / target)` for `i` in `0..target`, which
/// always includes the first frame and never duplicates an index.
/// Sequences already at or under the target are returned unchanged.
pub fn sample_uniform(seq: &FrameSequence, target: usize) -> Result<FrameSequence> {
    if target == 0 {
        return Err(Error::InvalidArgument("sample target must be >= 1".into()));
    }
    let len = seq.len();
    if len <= target {
        return Ok(seq.clone());
    }
    let picked = (0..target)
        .map(|i| seq.frames()[i * len / target].clone())
        .collect();
    FrameSequence::new(picked, seq.fps_hint())
}
