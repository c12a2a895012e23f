//! Separable bicubic resampling with a pinned numeric convention.
//!
//! Every choice that affects output bytes is fixed here and recorded in
//! the manifest of each run:
//!
//! * cubic convolution kernel with parameter `a` (default -0.5);
//! * half-pixel centers: output x samples source `(x + 0.5) * in/out - 0.5`;
//! * clamp-to-edge for taps outside the source;
//! * all arithmetic in f64, rows then columns, with a single
//!   clamp-to-[0, 255] and round-half-away-from-zero at the very end.
//!
//! Resizing to the source dimensions short-circuits to a byte-identical
//! copy.

use crate::error::{Error, Result};
use crate::frame::Frame;

pub const DEFAULT_KERNEL_A: f64 = -0.5;

/// Convention labels, stored in manifests so a reader can tell whether a
/// different build would reproduce the same bytes.
pub const COORDINATE_CONVENTION: &str = "half_pixel_center";
pub const BOUNDARY: &str = "clamp_to_edge";
pub const ROUNDING: &str = "round_half_away_from_zero";

#[derive(Debug, Clone, PartialEq)]
pub struct ResampleSpec {
    pub kernel_a: f64,
}

impl Default for ResampleSpec {
    fn default() -> Self {
        ResampleSpec { kernel_a: DEFAULT_KERNEL_A }
    }
}

/// Cubic convolution kernel weight at distance `x`.
///
/// Piecewise cubic: `(a+2)|x|^3 - (a+3)|x|^2 + 1` for `|x| <= 1`,
/// `a|x|^3 - 5a|x|^2 + 8a|x| - 4a` for `1 < |x| < 2`, zero beyond.
pub fn cubic_weight(x: f64, a: f64) -> f64 {
    let t = x.abs();
    if t <= 1.0 {
        ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0
    } else if t < 2.0 {
        a * (((t - 5.0) * t + 8.0) * t - 4.0)
    } else {
        0.0
    }
}

/// Four taps for one output coordinate: source indices `base - 1 ..=
/// base + 2` (clamped) weighted by the kernel.
struct Taps {
    base: isize,
    weights: [f64; 4],
}

fn plan_taps(src: usize, dst: usize, a: f64) -> Vec<Taps> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let center = (i as f64 + 0.5) * scale - 0.5;
            let base = center.floor();
            let t = center - base;
            Taps {
                base: base as isize,
                weights: [
                    cubic_weight(t + 1.0, a),
                    cubic_weight(t, a),
                    cubic_weight(t - 1.0, a),
                    cubic_weight(t - 2.0, a),
                ],
            }
        })
        .collect()
}

fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Resizes a frame to `out_h` x `out_w`.
pub fn bicubic_resize(frame: &Frame, out_h: u32, out_w: u32, spec: &ResampleSpec) -> Result<Frame> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidArgument(format!(
            "output dimensions must be positive, got {out_h}x{out_w}"
        )));
    }
    if out_h == frame.height() && out_w == frame.width() {
        return Ok(frame.clone());
    }
    let in_h = frame.height() as usize;
    let in_w = frame.width() as usize;
    let dst_h = out_h as usize;
    let dst_w = out_w as usize;
    let src = frame.data();

    // Horizontal pass: in_h rows of dst_w samples, still at source height.
    let col_taps = plan_taps(in_w, dst_w, spec.kernel_a);
    let mut mid = vec![0.0f64; in_h * dst_w * 3];
    for y in 0..in_h {
        let row = &src[y * in_w * 3..(y + 1) * in_w * 3];
        for (x, taps) in col_taps.iter().enumerate() {
            let mut acc = [0.0f64; 3];
            for (k, w) in taps.weights.iter().enumerate() {
                let sx = clamp_index(taps.base - 1 + k as isize, in_w);
                let px = &row[sx * 3..sx * 3 + 3];
                acc[0] += w * px[0] as f64;
                acc[1] += w * px[1] as f64;
                acc[2] += w * px[2] as f64;
            }
            let at = (y * dst_w + x) * 3;
            mid[at..at + 3].copy_from_slice(&acc);
        }
    }

    // Vertical pass over the intermediate, then the single quantization.
    let row_taps = plan_taps(in_h, dst_h, spec.kernel_a);
    let mut out = vec![0u8; dst_h * dst_w * 3];
    for (y, taps) in row_taps.iter().enumerate() {
        for x in 0..dst_w {
            let mut acc = [0.0f64; 3];
            for (k, w) in taps.weights.iter().enumerate() {
                let sy = clamp_index(taps.base - 1 + k as isize, in_h);
                let at = (sy * dst_w + x) * 3;
                acc[0] += w * mid[at];
                acc[1] += w * mid[at + 1];
                acc[2] += w * mid[at + 2];
            }
            let at = (y * dst_w + x) * 3;
            for c in 0..3 {
                // f64::round ties away from zero, matching the convention.
                out[at + c] = acc[c].clamp(0.0, 255.0).round() as u8;
            }
        }
    }

    Frame::new(out_h, out_w, out, frame.source_index())
}
