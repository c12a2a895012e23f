//! Clip partitioning.
//!
//! A sequence of `T` frames splits into `ceil(T / m)` consecutive clips.
//! Every clip except possibly the last holds exactly `m` frames; the last
//! holds between 1 and `m`. The first frame of a clip is its anchor, the
//! rest are its followers.

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    index: usize,
    anchor: Frame,
    followers: Vec<Frame>,
}

impl Clip {
    pub fn new(index: usize, mut members: Vec<Frame>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptySequence);
        }
        let followers = members.split_off(1);
        let anchor = members.pop().expect("one member remains after split");
        for follower in &followers {
            if follower.height() != anchor.height() || follower.width() != anchor.width() {
                return Err(Error::DimensionMismatch(format!(
                    "clip {index} mixes {}x{} and {}x{} frames",
                    anchor.height(),
                    anchor.width(),
                    follower.height(),
                    follower.width()
                )));
            }
        }
        Ok(Clip { index, anchor, followers })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn anchor(&self) -> &Frame {
        &self.anchor
    }

    pub fn followers(&self) -> &[Frame] {
        &self.followers
    }

    /// Anchor plus followers.
    pub fn member_count(&self) -> usize {
        1 + self.followers.len()
    }

    pub fn frame_height(&self) -> u32 {
        self.anchor.height()
    }

    pub fn frame_width(&self) -> u32 {
        self.anchor.width()
    }

    /// Original-video indices of all members, anchor first.
    pub fn member_source_indices(&self) -> Vec<u64> {
        let mut indices = Vec::with_capacity(self.member_count());
        indices.push(self.anchor.source_index());
        indices.extend(self.followers.iter().map(Frame::source_index));
        indices
    }
}

/// Clips produced by one partition run, in temporal order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipSet {
    clips: Vec<Clip>,
    nominal_length: usize,
}

impl ClipSet {
    pub fn clips(&self) -> &[Clip] {
        &self.clips
    }

    pub fn len(&self) -> usize {
        self.clips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clips.is_empty()
    }

    /// The `m` the partition was built with.
    pub fn nominal_length(&self) -> usize {
        self.nominal_length
    }

    pub fn total_frames(&self) -> usize {
        self.clips.iter().map(Clip::member_count).sum()
    }

    pub fn frame_height(&self) -> u32 {
        self.clips[0].frame_height()
    }

    pub fn frame_width(&self) -> u32 {
        self.clips[0].frame_width()
    }

    /// Maps a position in the partitioned sequence to its clip index.
    pub fn clip_index_for_position(&self, position: usize) -> Result<usize> {
        let total = self.total_frames();
        if position >= total {
            return Err(Error::IndexOutOfRange { index: position, limit: total });
        }
        Ok(position / self.nominal_length)
    }
}

/// Splits `seq` into clips of `clip_length` frames (the last may be short).
pub fn partition_clips(seq: &FrameSequence, clip_length: usize) -> Result<ClipSet> {
    if clip_length < 2 {
        return Err(Error::InvalidClipLength(clip_length));
    }
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let clips = seq
        .frames()
        .chunks(clip_length)
        .enumerate()
        .map(|(index, members)| Clip::new(index, members.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClipSet { clips, nominal_length: clip_length })
}
