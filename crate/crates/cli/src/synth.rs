//! Deterministic synthetic video for benchmarks: a drifting diagonal
//! gradient mixed with seeded noise, so every frame differs and token
//! statistics are non-trivial while runs stay exactly reproducible.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svac_core::{Frame, FrameSequence, Result};

pub fn synthetic_sequence(frames: usize, height: u32, width: u32, seed: u64) -> Result<FrameSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plane = (height as usize) * (width as usize) * 3;
    let mut noise = vec![0u8; plane];
    let mut out = Vec::with_capacity(frames);
    for t in 0..frames {
        rng.fill_bytes(&mut noise);
        let mut data = Vec::with_capacity(plane);
        for y in 0..height as usize {
            for x in 0..width as usize {
                let base = ((y * 3 + x * 5 + t * 11) % 256) as u32;
                let at = (y * width as usize + x) * 3;
                for ch in 0..3 {
                    // Three parts gradient to one part noise.
                    data.push(((base * 3 + noise[at + ch] as u32) / 4) as u8);
                }
            }
        }
        out.push(Frame::new(height, width, data, t as u64)?);
    }
    FrameSequence::new(out, None)
}
