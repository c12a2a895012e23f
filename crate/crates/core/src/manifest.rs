//! The compression record consumed by downstream pipelines.
//!
//! `svac_manifest.json` is canonical JSON: keys in declaration order, no
//! floating-point fields (the token ratio is an integer rational and the
//! resample kernel parameter a decimal string), schema version 1.
//! `read_manifest` re-validates everything it accepts, so a manifest that
//! loads is internally consistent.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::Ratio;
use crate::error::{Error, Result};
use crate::resample::{self, ResampleSpec};
use crate::seg_alloc::allocate_seg_tokens;

pub const MANIFEST_FILE_NAME: &str = "svac_manifest.json";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u64,
    pub frame_height: u32,
    pub frame_width: u32,
    pub total_frames: u64,
    pub clip_length: u64,
    pub resample_spec: ResampleRecord,
    pub clips: Vec<ClipRecord>,
    pub seg_allocation: SegAllocationRecord,
    pub token_budget: TokenBudgetRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleRecord {
    /// Kernel parameter as decimal text, e.g. "-0.5".
    pub kernel_a: String,
    pub coordinate_convention: String,
    pub boundary: String,
    pub rounding: String,
}

impl ResampleRecord {
    pub fn from_spec(spec: &ResampleSpec) -> Self {
        ResampleRecord {
            kernel_a: format!("{}", spec.kernel_a),
            coordinate_convention: resample::COORDINATE_CONVENTION.to_string(),
            boundary: resample::BOUNDARY.to_string(),
            rounding: resample::ROUNDING.to_string(),
        }
    }

    pub fn to_spec(&self) -> Result<ResampleSpec> {
        let kernel_a = self
            .kernel_a
            .parse::<f64>()
            .ok()
            .filter(|a| a.is_finite())
            .ok_or_else(|| {
                Error::SchemaViolation(format!("kernel_a {:?} is not a decimal", self.kernel_a))
            })?;
        Ok(ResampleSpec { kernel_a })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipRecord {
    pub clip_index: u64,
    pub member_source_indices: Vec<u64>,
    pub anchor_path: String,
    pub composite_path: Option<String>,
    pub layout: Option<LayoutRecord>,
    pub seg_token_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutRecord {
    pub rows: u32,
    pub cols: u32,
    pub num_tiles: u32,
    pub pad_cells: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegAllocationRecord {
    pub clips_per_token: u64,
    pub num_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenBudgetRecord {
    pub s_per_frame: u64,
    pub tokens_original: u64,
    pub tokens_reduced: u64,
    pub ratio_numerator: u64,
    pub ratio_denominator: u64,
}

impl Manifest {
    /// Internal consistency check; both the writer and the reader run it.
    ///
    /// The rejected corruption cases:
    ///  1. clip_index values not exactly 0, 1, .., N-1 in order
    ///     (duplicates, gaps, reordering);
    ///  2. a clip with no members, or structural parameters out of
    ///     domain (clip_length < 2, zero dimensions, no clips);
    ///  3. member_source_indices not strictly increasing within and
    ///     across clips;
    ///  4. clip member counts breaking the partition rule (non-final
    ///     clip != clip_length, final clip not in 1..=clip_length, or
    ///     totals disagreeing with total_frames);
    ///  5. composite_path and layout not both present or both absent;
    ///  6. composite presence disagreeing with member count
    ///     (single-member clips carry none, longer clips must);
    ///  7. layout arithmetic broken (zero rows/cols, rows*cols <
    ///     num_tiles, pad_cells != rows*cols - num_tiles, or num_tiles
    ///     != member count - 1);
    ///  8. seg_token_index >= num_tokens;
    ///  9. seg allocation disagreeing with the closed form for
    ///     (N, clips_per_token);
    /// 10. token budget disagreeing with the clip structure or the
    ///     ratio not matching reduced/original exactly.
    pub fn validate(&self) -> Result<()> {
        fn fail(case: u32, detail: String) -> Result<()> {
            Err(Error::SchemaViolation(format!("case {case}: {detail}")))
        }

        if self.format_version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: self.format_version,
                expected: FORMAT_VERSION,
            });
        }
        self.resample_spec.to_spec()?;
        if self.resample_spec.coordinate_convention != resample::COORDINATE_CONVENTION
            || self.resample_spec.boundary != resample::BOUNDARY
            || self.resample_spec.rounding != resample::ROUNDING
        {
            return Err(Error::SchemaViolation(
                "resample conventions differ from the ones this build implements".into(),
            ));
        }

        if self.clips.is_empty() {
            return fail(2, "manifest holds no clips".into());
        }
        if self.frame_height == 0 || self.frame_width == 0 {
            return fail(2, "frame dimensions must be positive".into());
        }
        if self.clip_length < 2 {
            return fail(2, format!("clip_length {} is below 2", self.clip_length));
        }

        let n = self.clips.len();
        let mut counted_frames: u64 = 0;
        let mut previous_source: Option<u64> = None;
        for (i, clip) in self.clips.iter().enumerate() {
            if clip.clip_index != i as u64 {
                return fail(1, format!("clip at position {i} has clip_index {}", clip.clip_index));
            }
            let members = clip.member_source_indices.len() as u64;
            if members == 0 {
                return fail(2, format!("clip {i} has no members"));
            }
            for &source in &clip.member_source_indices {
                if previous_source.is_some_and(|p| source <= p) {
                    return fail(3, format!("source index {source} in clip {i} does not increase"));
                }
                previous_source = Some(source);
            }
            let is_final = i == n - 1;
            if !is_final && members != self.clip_length {
                return fail(4, format!("clip {i} has {members} members, expected {}", self.clip_length));
            }
            if is_final && members > self.clip_length {
                return fail(4, format!("final clip has {members} members, cap is {}", self.clip_length));
            }
            counted_frames += members;

            match (&clip.composite_path, &clip.layout) {
                (Some(_), Some(layout)) => {
                    if members == 1 {
                        return fail(6, format!("single-member clip {i} carries a composite"));
                    }
                    if layout.rows == 0 || layout.cols == 0 {
                        return fail(7, format!("clip {i} layout has a zero extent"));
                    }
                    let cells = layout.rows as u64 * layout.cols as u64;
                    if cells < layout.num_tiles as u64 {
                        return fail(7, format!("clip {i} layout holds fewer cells than tiles"));
                    }
                    if layout.pad_cells as u64 != cells - layout.num_tiles as u64 {
                        return fail(7, format!("clip {i} pad_cells is not cells minus tiles"));
                    }
                    if layout.num_tiles as u64 != members - 1 {
                        return fail(7, format!("clip {i} layout tiles != follower count"));
                    }
                }
                (None, None) => {
                    if members > 1 {
                        return fail(6, format!("multi-member clip {i} lacks a composite"));
                    }
                }
                _ => {
                    return fail(5, format!("clip {i} has composite_path and layout disagreeing"));
                }
            }

            if clip.seg_token_index >= self.seg_allocation.num_tokens {
                return fail(8, format!(
                    "clip {i} seg_token_index {} with only {} tokens",
                    clip.seg_token_index, self.seg_allocation.num_tokens
                ));
            }
        }
        if counted_frames != self.total_frames {
            return fail(4, format!(
                "clips cover {counted_frames} frames but total_frames is {}",
                self.total_frames
            ));
        }

        let g = usize::try_from(self.seg_allocation.clips_per_token)
            .map_err(|_| Error::SchemaViolation("case 9: clips_per_token out of range".into()))?;
        let expected = allocate_seg_tokens(n, g)
            .map_err(|e| Error::SchemaViolation(format!("case 9: {e}")))?;
        if self.seg_allocation.num_tokens != expected.num_tokens() as u64 {
            return fail(9, format!(
                "num_tokens {} but the closed form gives {}",
                self.seg_allocation.num_tokens,
                expected.num_tokens()
            ));
        }
        for (i, clip) in self.clips.iter().enumerate() {
            if clip.seg_token_index != expected.clip_to_token()[i] as u64 {
                return fail(9, format!(
                    "clip {i} routed to token {}, closed form gives {}",
                    clip.seg_token_index,
                    expected.clip_to_token()[i]
                ));
            }
        }

        let budget = &self.token_budget;
        if budget.s_per_frame == 0 {
            return fail(10, "s_per_frame must be positive".into());
        }
        let s = budget.s_per_frame;
        let mut original: u64 = 0;
        let mut reduced: u64 = 0;
        for clip in &self.clips {
            let members = clip.member_source_indices.len() as u64;
            original += members * s;
            reduced += if members == self.clip_length { 2 * s } else { s };
        }
        if budget.tokens_original != original || budget.tokens_reduced != reduced {
            return fail(10, format!(
                "budget records {}/{} tokens, clip structure gives {reduced}/{original}",
                budget.tokens_reduced, budget.tokens_original
            ));
        }
        let recorded = Ratio::new(budget.ratio_numerator, budget.ratio_denominator)
            .map_err(|_| Error::SchemaViolation("case 10: ratio denominator is zero".into()))?;
        if recorded != Ratio::new(reduced, original).expect("original is positive") {
            return fail(10, format!(
                "ratio {}/{} does not equal reduced/original",
                budget.ratio_numerator, budget.ratio_denominator
            ));
        }
        Ok(())
    }
}

/// Validates and writes canonical, pretty-printed JSON.
pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<()> {
    manifest.validate()?;
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::SchemaViolation(format!("serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::IoFailure(format!("{}: {e}", path.display())))
}

/// Reads, schema-checks, and validates a manifest file.
pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingPath(path.display().to_string()),
        _ => Error::IoFailure(format!("{}: {e}", path.display())),
    })?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::SchemaViolation(format!("not valid JSON: {e}")))?;
    // Version gate first, so future-version files are reported as such
    // rather than as schema noise.
    match value.get("format_version").and_then(serde_json::Value::as_u64) {
        Some(v) if v == FORMAT_VERSION => {}
        Some(v) => return Err(Error::VersionMismatch { found: v, expected: FORMAT_VERSION }),
        None => return Err(Error::SchemaViolation("format_version missing or not an integer".into())),
    }
    let manifest: Manifest = serde_json::from_value(value)
        .map_err(|e| Error::SchemaViolation(format!("schema mismatch: {e}")))?;
    manifest.validate()?;
    Ok(manifest)
}
