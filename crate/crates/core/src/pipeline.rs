//! End-to-end compression runs.
//!
//! `run_compression` does the in-memory work (sample, partition, compress
//! clips in parallel); `write_outputs` persists anchors, composites, and
//! the manifest. Clips are independent, so compression runs on whatever
//! rayon pool is installed; results are collected in clip order, keeping
//! output bytes identical across thread counts.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::astc::{compress_clip, CompressedClip};
use crate::clip::{partition_clips, ClipSet};
use crate::cost::{token_budget, CostReport};
use crate::error::{Error, Result};
use crate::frame::{sample_uniform, FrameSequence};
use crate::io::{write_frame, FrameFormat};
use crate::manifest::{
    write_manifest, ClipRecord, LayoutRecord, Manifest, ResampleRecord, SegAllocationRecord,
    TokenBudgetRecord, FORMAT_VERSION, MANIFEST_FILE_NAME,
};
use crate::resample::ResampleSpec;
use crate::seg_alloc::{allocate_seg_tokens, SegAllocation};

#[derive(Debug, Clone, PartialEq)]
pub struct CompressOptions {
    /// Uniform sampling target before clipping.
    pub sample_target: usize,
    /// Nominal clip length m.
    pub clip_length: usize,
    /// Segmentation-token granularity g.
    pub clips_per_token: usize,
    /// Patch size used only for token accounting.
    pub patch_size: u32,
    pub resample: ResampleSpec,
}

impl Default for CompressOptions {
    fn default() -> Self {
        CompressOptions {
            sample_target: 100,
            clip_length: 10,
            clips_per_token: 1,
            patch_size: 16,
            resample: ResampleSpec::default(),
        }
    }
}

/// Everything a compression produces, still in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionRun {
    pub clips: ClipSet,
    pub compressed: Vec<CompressedClip>,
    pub allocation: SegAllocation,
    pub budget: CostReport,
}

/// Tokens a vision encoder would spend per frame: patches are counted
/// with ceiling division, so dimensions that are not patch multiples
/// still get a defined budget.
pub fn tokens_per_frame(height: u32, width: u32, patch: u32) -> Result<u64> {
    if patch == 0 {
        return Err(Error::InvalidArgument("patch size must be >= 1".into()));
    }
    Ok(height.div_ceil(patch) as u64 * width.div_ceil(patch) as u64)
}

pub fn anchor_file_name(clip_index: usize) -> String {
    format!("clip_{clip_index}_anchor.ppm")
}

pub fn composite_file_name(clip_index: usize) -> String {
    format!("clip_{clip_index}_composite.ppm")
}

/// Samples, partitions, and compresses a sequence in memory.
pub fn run_compression(seq: &FrameSequence, opts: &CompressOptions) -> Result<CompressionRun> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let sampled = sample_uniform(seq, opts.sample_target)?;
    let clips = partition_clips(&sampled, opts.clip_length)?;
    let compressed: Vec<CompressedClip> = clips
        .clips()
        .par_iter()
        .map(|clip| compress_clip(clip, &opts.resample))
        .collect::<Result<_>>()?;
    let allocation = allocate_seg_tokens(clips.len(), opts.clips_per_token)?;
    let s = tokens_per_frame(clips.frame_height(), clips.frame_width(), opts.patch_size)?;
    let budget = token_budget(clips.total_frames() as u64, opts.clip_length as u64, s)?;
    Ok(CompressionRun { clips, compressed, allocation, budget })
}

/// Builds the manifest describing a finished run.
pub fn build_manifest(run: &CompressionRun, opts: &CompressOptions) -> Manifest {
    let clips = run
        .clips
        .clips()
        .iter()
        .zip(&run.compressed)
        .map(|(clip, compressed)| ClipRecord {
            clip_index: clip.index() as u64,
            member_source_indices: clip.member_source_indices(),
            anchor_path: anchor_file_name(clip.index()),
            composite_path: compressed.composite.as_ref().map(|_| composite_file_name(clip.index())),
            layout: compressed.layout.map(|l| LayoutRecord {
                rows: l.rows,
                cols: l.cols,
                num_tiles: l.num_tiles,
                pad_cells: l.pad_cells,
            }),
            seg_token_index: run.allocation.clip_to_token()[clip.index()] as u64,
        })
        .collect();
    Manifest {
        format_version: FORMAT_VERSION,
        frame_height: run.clips.frame_height(),
        frame_width: run.clips.frame_width(),
        total_frames: run.clips.total_frames() as u64,
        clip_length: opts.clip_length as u64,
        resample_spec: ResampleRecord::from_spec(&opts.resample),
        clips,
        seg_allocation: SegAllocationRecord {
            clips_per_token: run.allocation.clips_per_token() as u64,
            num_tokens: run.allocation.num_tokens() as u64,
        },
        token_budget: TokenBudgetRecord {
            s_per_frame: run.budget.tokens_per_frame,
            tokens_original: run.budget.tokens_original,
            tokens_reduced: run.budget.tokens_reduced,
            ratio_numerator: run.budget.ratio.numerator(),
            ratio_denominator: run.budget.ratio.denominator(),
        },
    }
}

/// Writes anchors, composites, and `svac_manifest.json` into `out_dir`.
pub fn write_outputs(run: &CompressionRun, opts: &CompressOptions, out_dir: &Path) -> Result<Manifest> {
    if !out_dir.is_dir() {
        return Err(Error::MissingPath(format!(
            "{}: output directory does not exist",
            out_dir.display()
        )));
    }
    for compressed in &run.compressed {
        write_frame(
            &compressed.anchor,
            &out_dir.join(anchor_file_name(compressed.clip_index)),
            FrameFormat::Ppm,
        )?;
        if let Some(composite) = &compressed.composite {
            write_frame(
                composite,
                &out_dir.join(composite_file_name(compressed.clip_index)),
                FrameFormat::Ppm,
            )?;
        }
    }
    let manifest = build_manifest(run, opts);
    write_manifest(&manifest, &out_dir.join(MANIFEST_FILE_NAME))?;
    Ok(manifest)
}

/// The whole job: compress `seq` and persist everything.
pub fn compress_to_dir(
    seq: &FrameSequence,
    opts: &CompressOptions,
    out_dir: &Path,
) -> Result<(CompressionRun, Manifest, PathBuf)> {
    let run = run_compression(seq, opts)?;
    let manifest = write_outputs(&run, opts, out_dir)?;
    Ok((run, manifest, out_dir.join(MANIFEST_FILE_NAME)))
}
