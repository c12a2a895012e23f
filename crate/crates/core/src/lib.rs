//! Anchor+composite compression for long video frame sequences.
//!
//! A sampled sequence splits into fixed-length clips. Each clip keeps its
//! first frame (the anchor) at full resolution; the remaining frames are
//! packed into a near-aspect-preserving grid, zero-padded, and bicubic
//! resized back to single-frame size. Two frames per clip, whatever the
//! clip length, so the visual-token cost drops to 2/m.
//!
//! Around that core: bit-exact frame I/O (binary PPM and a raw stream
//! format), exact integer token budgeting with an attention-cost
//! estimator, clip-to-segmentation-token allocation, baseline token
//! compressors (pooling, pruning, merging) for comparison, and a
//! validated JSON manifest that records everything a downstream consumer
//! needs to reproduce bytes.

pub mod astc;
pub mod clip;
pub mod cost;
pub mod error;
pub mod frame;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod resample;
pub mod seg_alloc;
pub mod token_ops;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use frame::{sample_uniform, Frame, FrameSequence};
