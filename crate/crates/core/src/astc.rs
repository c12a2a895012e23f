//! Anchor + composite clip compression.
//!
//! Followers of a clip are packed into a `rows x cols` grid of
//! frame-sized tiles, left to right then top to bottom, trailing cells
//! zero-filled. The grid that minimizes aspect distortion of the
//! aggregate is chosen, then the aggregate is resized back to one frame's
//! dimensions. A clip therefore costs two frames regardless of length:
//! its anchor, kept verbatim, and the composite.

use crate::clip::Clip;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::resample::{bicubic_resize, ResampleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLayout {
    pub rows: u32,
    pub cols: u32,
    pub tile_height: u32,
    pub tile_width: u32,
    /// Occupied cells; the remaining `pad_cells` stay zero.
    pub num_tiles: u32,
    pub pad_cells: u32,
}

/// Aspect-distortion order of two candidate grids, compared exactly.
///
/// The objective `|ln((rows*h)/(cols*w)) - ln(h/w)|` simplifies to
/// `|ln(rows/cols)|`, so candidates order by the ratio
/// `max(rows, cols) / min(rows, cols)`, which integer cross
/// multiplication compares without touching floats.
fn distortion_cmp(a: (u32, u32), b: (u32, u32)) -> std::cmp::Ordering {
    let ratio = |(r, c): (u32, u32)| -> (u128, u128) {
        let hi = r.max(c) as u128;
        let lo = r.min(c) as u128;
        (hi, lo)
    };
    let (ah, al) = ratio(a);
    let (bh, bl) = ratio(b);
    (ah * bl).cmp(&(bh * al))
}

/// Picks the grid for `num_tiles` frame-sized tiles.
///
/// Candidates are all `rows, cols <= num_tiles` with
/// `rows * cols >= num_tiles`. The winner minimizes the aggregate's
/// aspect distortion relative to a single frame; ties fall to fewer pad
/// cells, then to smaller `rows`.
pub fn plan_grid(num_tiles: u32, frame_h: u32, frame_w: u32) -> Result<GridLayout> {
    if num_tiles == 0 {
        return Err(Error::InvalidArgument("grid needs at least one tile".into()));
    }
    if frame_h == 0 || frame_w == 0 {
        return Err(Error::InvalidArgument(format!(
            "tile dimensions must be positive, got {frame_h}x{frame_w}"
        )));
    }
    let mut best: Option<(u32, u32)> = None;
    for rows in 1..=num_tiles {
        for cols in 1..=num_tiles {
            let cells = rows as u64 * cols as u64;
            if cells < num_tiles as u64 {
                continue;
            }
            let better = match best {
                None => true,
                Some(incumbent) => {
                    let by_distortion = distortion_cmp((rows, cols), incumbent);
                    let pads = cells - num_tiles as u64;
                    let incumbent_pads =
                        incumbent.0 as u64 * incumbent.1 as u64 - num_tiles as u64;
                    by_distortion
                        .then(pads.cmp(&incumbent_pads))
                        .then(rows.cmp(&incumbent.0))
                        .is_lt()
                }
            };
            if better {
                best = Some((rows, cols));
            }
        }
    }
    let (rows, cols) = best.expect("the 1 x num_tiles strip is always a candidate");
    Ok(GridLayout {
        rows,
        cols,
        tile_height: frame_h,
        tile_width: frame_w,
        num_tiles,
        pad_cells: (rows as u64 * cols as u64 - num_tiles as u64) as u32,
    })
}

/// Frame-sized tiles packed into one large image.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateImage {
    pub image: Frame,
    pub layout: GridLayout,
}

/// Packs a clip's followers into the given layout.
///
/// Cell `j` covers rows `(j / cols) * tile_h ..` and columns
/// `(j % cols) * tile_w ..`; cells at and past `num_tiles` remain zero.
/// The aggregate inherits the first follower's source index.
pub fn compose_aggregate(clip: &Clip, layout: &GridLayout) -> Result<AggregateImage> {
    let followers = clip.followers();
    if followers.is_empty() {
        return Err(Error::LayoutMismatch(format!(
            "clip {} has no followers to compose",
            clip.index()
        )));
    }
    if layout.num_tiles as usize != followers.len() {
        return Err(Error::LayoutMismatch(format!(
            "layout holds {} tiles but clip {} has {} followers",
            layout.num_tiles,
            clip.index(),
            followers.len()
        )));
    }
    if layout.tile_height != clip.frame_height() || layout.tile_width != clip.frame_width() {
        return Err(Error::LayoutMismatch(format!(
            "layout tiles are {}x{} but clip frames are {}x{}",
            layout.tile_height,
            layout.tile_width,
            clip.frame_height(),
            clip.frame_width()
        )));
    }
    let tile_h = layout.tile_height as usize;
    let tile_w = layout.tile_width as usize;
    let agg_h = layout.rows as usize * tile_h;
    let agg_w = layout.cols as usize * tile_w;
    let mut data = vec![0u8; agg_h * agg_w * 3];
    for (j, follower) in followers.iter().enumerate() {
        let cell_y = (j / layout.cols as usize) * tile_h;
        let cell_x = (j % layout.cols as usize) * tile_w;
        for y in 0..tile_h {
            let src_at = y * tile_w * 3;
            let dst_at = ((cell_y + y) * agg_w + cell_x) * 3;
            data[dst_at..dst_at + tile_w * 3]
                .copy_from_slice(&follower.data()[src_at..src_at + tile_w * 3]);
        }
    }
    let image = Frame::new(agg_h as u32, agg_w as u32, data, followers[0].source_index())?;
    Ok(AggregateImage { image, layout: *layout })
}

/// Cuts tile `tile_index` back out of an aggregate, byte-exact.
///
/// The returned frame's source index is the tile ordinal; the aggregate
/// does not remember which video frame filled the cell.
pub fn extract_tile(agg: &AggregateImage, tile_index: u32) -> Result<Frame> {
    let layout = &agg.layout;
    if tile_index >= layout.num_tiles {
        return Err(Error::IndexOutOfRange {
            index: tile_index as usize,
            limit: layout.num_tiles as usize,
        });
    }
    let tile_h = layout.tile_height as usize;
    let tile_w = layout.tile_width as usize;
    let agg_w = layout.cols as usize * tile_w;
    let cell_y = (tile_index as usize / layout.cols as usize) * tile_h;
    let cell_x = (tile_index as usize % layout.cols as usize) * tile_w;
    let mut data = Vec::with_capacity(tile_h * tile_w * 3);
    for y in 0..tile_h {
        let at = ((cell_y + y) * agg_w + cell_x) * 3;
        data.extend_from_slice(&agg.image.data()[at..at + tile_w * 3]);
    }
    Frame::new(layout.tile_height, layout.tile_width, data, tile_index as u64)
}

/// One clip after compression. Single-member clips keep only their
/// anchor; `composite` and `layout` are both present otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedClip {
    pub clip_index: usize,
    pub anchor: Frame,
    pub composite: Option<Frame>,
    pub layout: Option<GridLayout>,
}

/// Compresses one clip: anchor verbatim, followers packed and resized
/// back to anchor dimensions.
pub fn compress_clip(clip: &Clip, spec: &ResampleSpec) -> Result<CompressedClip> {
    let anchor = clip.anchor().clone();
    if clip.followers().is_empty() {
        return Ok(CompressedClip {
            clip_index: clip.index(),
            anchor,
            composite: None,
            layout: None,
        });
    }
    let layout = plan_grid(
        clip.followers().len() as u32,
        clip.frame_height(),
        clip.frame_width(),
    )?;
    let agg = compose_aggregate(clip, &layout)?;
    let composite = bicubic_resize(&agg.image, anchor.height(), anchor.width(), spec)?;
    Ok(CompressedClip {
        clip_index: clip.index(),
        anchor,
        composite: Some(composite),
        layout: Some(layout),
    })
}

/// Copy of the aggregate with magenta cell borders burned in, for
/// eyeballing how followers were packed.
pub fn grid_preview(agg: &AggregateImage) -> Frame {
    const LINE: [u8; 3] = [255, 0, 255];
    let layout = &agg.layout;
    let agg_h = layout.rows as usize * layout.tile_height as usize;
    let agg_w = layout.cols as usize * layout.tile_width as usize;
    let mut data = agg.image.data().to_vec();
    let mut paint = |y: usize, x: usize| {
        let at = (y * agg_w + x) * 3;
        data[at..at + 3].copy_from_slice(&LINE);
    };
    for r in 1..layout.rows as usize {
        let y = r * layout.tile_height as usize;
        for x in 0..agg_w {
            paint(y, x);
        }
    }
    for c in 1..layout.cols as usize {
        let x = c * layout.tile_width as usize;
        for y in 0..agg_h {
            paint(y, x);
        }
    }
    Frame::new(agg.image.height(), agg.image.width(), data, agg.image.source_index())
        .expect("preview keeps aggregate dimensions")
}
