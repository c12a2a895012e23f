//! Frame builders shared by unit tests.

use crate::frame::{Frame, FrameSequence};

/// Deterministic textured frame; distinct per (y, x, source_index).
pub(crate) fn ramp_frame(height: u32, width: u32, source_index: u64) -> Frame {
    let mut data = Vec::with_capacity(height as usize * width as usize * 3);
    for y in 0..height {
        for x in 0..width {
            let v = ((y * 7 + x * 13 + source_index as u32 * 29) % 256) as u8;
            data.extend_from_slice(&[v, v.wrapping_add(1), v.wrapping_add(2)]);
        }
    }
    Frame::new(height, width, data, source_index).unwrap()
}

pub(crate) fn ramp_sequence(count: usize, height: u32, width: u32) -> FrameSequence {
    let frames = (0..count).map(|i| ramp_frame(height, width, i as u64)).collect();
    FrameSequence::new(frames, None).unwrap()
}
