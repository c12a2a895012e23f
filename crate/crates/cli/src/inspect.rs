//! `svac inspect`: rebuild one clip's pre-resize aggregate from the
//! manifest and the original frames, with the grid burned in, so the
//! packing can be checked by eye.

use std::path::PathBuf;

use clap::Args;
use svac_core::astc::{compose_aggregate, grid_preview, plan_grid};
use svac_core::clip::Clip;
use svac_core::io::{load_sequence, write_frame, FrameFormat};
use svac_core::manifest::read_manifest;
use svac_core::Error;

use crate::config::{FileConfig, FormatArg};
use crate::error::{CliError, Result};

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Path to svac_manifest.json.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Clip index to rebuild.
    #[arg(long)]
    pub clip: u64,
    /// The frame source the manifest was built from.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output image; defaults to clip_<i>_aggregate.ppm beside the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional key=value config file, overridden by flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: InspectArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let input = match args.input.or(file.get("input")?) {
        Some(p) => p,
        None => return Err(Error::InvalidArgument("inspect needs --input".into()).into()),
    };
    let format = args.format.or(file.get_enum("format")?).unwrap_or(FormatArg::Auto);

    let manifest = read_manifest(&args.manifest)?;
    let record = manifest
        .clips
        .get(args.clip as usize)
        .ok_or(Error::IndexOutOfRange {
            index: args.clip as usize,
            limit: manifest.clips.len(),
        })?;
    let Some(recorded_layout) = record.layout else {
        return Err(CliError::NoComposite(args.clip));
    };

    let seq = load_sequence(&input, format.sequence_format(&input))?;
    match seq.dimensions() {
        Some((h, w)) if (h, w) == (manifest.frame_height, manifest.frame_width) => {}
        got => {
            return Err(Error::DimensionMismatch(format!(
                "input frames are {:?}, manifest records ({}, {})",
                got, manifest.frame_height, manifest.frame_width
            ))
            .into())
        }
    }

    // Member source indices equal positions in the original sequence.
    let mut members = Vec::with_capacity(record.member_source_indices.len());
    for &source in &record.member_source_indices {
        let frame = seq.frames().get(source as usize).ok_or(Error::IndexOutOfRange {
            index: source as usize,
            limit: seq.len(),
        })?;
        members.push(frame.clone());
    }
    let clip = Clip::new(args.clip as usize, members)?;

    let layout = plan_grid(
        clip.followers().len() as u32,
        manifest.frame_height,
        manifest.frame_width,
    )?;
    if (layout.rows, layout.cols, layout.num_tiles, layout.pad_cells)
        != (recorded_layout.rows, recorded_layout.cols, recorded_layout.num_tiles, recorded_layout.pad_cells)
    {
        return Err(Error::LayoutMismatch(format!(
            "manifest records {}x{} ({} tiles, {} pads) but the planner yields {}x{} ({} tiles, {} pads)",
            recorded_layout.rows,
            recorded_layout.cols,
            recorded_layout.num_tiles,
            recorded_layout.pad_cells,
            layout.rows,
            layout.cols,
            layout.num_tiles,
            layout.pad_cells
        ))
        .into());
    }

    let aggregate = compose_aggregate(&clip, &layout)?;
    let preview = grid_preview(&aggregate);
    let out = args.out.unwrap_or_else(|| {
        let name = format!("clip_{}_aggregate.ppm", args.clip);
        match args.manifest.parent() {
            Some(dir) => dir.join(name),
            None => PathBuf::from(name),
        }
    });
    write_frame(&preview, &out, FrameFormat::Ppm)?;
    println!(
        "wrote {} ({}x{} grid, {} tiles, {} pad cells, {}x{} pixels)",
        out.display(),
        layout.rows,
        layout.cols,
        layout.num_tiles,
        layout.pad_cells,
        preview.height(),
        preview.width()
    );
    Ok(())
}
