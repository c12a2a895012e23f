//! `svac plan`: exact token budgets and attention cost estimates for a
//! sweep of clip lengths, as a table or CSV.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use svac_core::cost::{token_budget, CostReport, ModelShape};
use svac_core::pipeline::tokens_per_frame;
use svac_core::Error;

use crate::config::{FileConfig, DEFAULT_CLIP_LEN, DEFAULT_FRAMES, DEFAULT_PATCH};
use crate::error::Result;

/// Clip lengths every plan covers, before adding the configured one.
const SWEEP: [u64; 6] = [2, 4, 5, 8, 10, 20];

const DEFAULT_HEIGHT: u32 = 256;
const DEFAULT_WIDTH: u32 = 256;

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Total frames T after sampling.
    #[arg(long)]
    pub frames: Option<u64>,
    /// Clip length m to include alongside the standard sweep.
    #[arg(long = "clip-len")]
    pub clip_len: Option<u64>,
    /// Patch size; tokens per frame follow from it and the frame size.
    #[arg(long)]
    pub patch: Option<u32>,
    /// Assumed frame height for the per-frame token count.
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    pub height: u32,
    /// Assumed frame width for the per-frame token count.
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    pub width: u32,
    /// Attention estimator: transformer layer count.
    #[arg(long, default_value_t = ModelShape::default().layers)]
    pub layers: u64,
    /// Attention estimator: hidden dimension.
    #[arg(long = "hidden-dim", default_value_t = ModelShape::default().hidden_dim)]
    pub hidden_dim: u64,
    /// Attention estimator: bytes per KV cache element.
    #[arg(long = "bytes-per-element", default_value_t = ModelShape::default().bytes_per_element)]
    pub bytes_per_element: u64,
    /// Also write the table to this path as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Optional key=value config file, overridden by flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

struct Row {
    m: u64,
    report: CostReport,
    flops_ratio: f64,
    kv_ratio: f64,
}

fn build_rows(frames: u64, clip_lens: &[u64], s: u64, shape: &ModelShape) -> Result<Vec<Row>> {
    let mut rows = Vec::with_capacity(clip_lens.len());
    for &m in clip_lens {
        let report = token_budget(frames, m, s)?.with_attention(shape)?;
        let original = report.attention_original.expect("attention filled in");
        let reduced = report.attention_reduced.expect("attention filled in");
        rows.push(Row {
            m,
            report,
            flops_ratio: reduced.flops as f64 / original.flops as f64,
            kv_ratio: reduced.kv_cache_bytes as f64 / original.kv_cache_bytes as f64,
        });
    }
    Ok(rows)
}

fn csv_text(rows: &[Row]) -> String {
    let mut text = String::from("m,tokens_original,tokens_reduced,ratio,flops_ratio,kv_ratio\n");
    for row in rows {
        text.push_str(&format!(
            "{},{},{},{}/{},{:.6},{:.6}\n",
            row.m,
            row.report.tokens_original,
            row.report.tokens_reduced,
            row.report.ratio.numerator(),
            row.report.ratio.denominator(),
            row.flops_ratio,
            row.kv_ratio
        ));
    }
    text
}

pub fn run(args: PlanArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let frames = args.frames.or(file.get("frames")?).unwrap_or(DEFAULT_FRAMES as u64);
    let clip_len = args.clip_len.or(file.get("clip_len")?).unwrap_or(DEFAULT_CLIP_LEN as u64);
    let patch = args.patch.or(file.get("patch")?).unwrap_or(DEFAULT_PATCH);
    let shape = ModelShape {
        layers: args.layers,
        hidden_dim: args.hidden_dim,
        bytes_per_element: args.bytes_per_element,
    };

    let s = tokens_per_frame(args.height, args.width, patch)?;
    let mut clip_lens: Vec<u64> = SWEEP.to_vec();
    if !clip_lens.contains(&clip_len) {
        clip_lens.push(clip_len);
        clip_lens.sort_unstable();
    }
    let rows = build_rows(frames, &clip_lens, s, &shape)?;

    println!(
        "plan: {frames} frames, {s} tokens/frame (patch {patch} on {}x{})",
        args.height, args.width
    );
    println!(
        "attention estimate: flops = 2*layers*n^2*hidden_dim, kv bytes = \
         2*layers*n*hidden_dim*bytes_per_element (layers={}, hidden_dim={}, bytes_per_element={})",
        shape.layers, shape.hidden_dim, shape.bytes_per_element
    );
    println!(
        "{:>4}  {:>16}  {:>14}  {:>20}  {:>11}  {:>9}",
        "m", "tokens_original", "tokens_reduced", "ratio", "flops_ratio", "kv_ratio"
    );
    for row in &rows {
        let marker = if row.m == clip_len { " *" } else { "" };
        println!(
            "{:>4}  {:>16}  {:>14}  {:>11} = {:>6.2}%  {:>11.6}  {:>9.6}{marker}",
            row.m,
            row.report.tokens_original,
            row.report.tokens_reduced,
            row.report.ratio.to_string(),
            row.report.ratio.as_f64() * 100.0,
            row.flops_ratio,
            row.kv_ratio
        );
        if !frames.is_multiple_of(row.m) {
            println!(
                "      (includes one short clip of {} frames, priced as anchor only)",
                frames % row.m
            );
        }
    }

    if let Some(csv) = &args.csv {
        fs::write(csv, csv_text(&rows))
            .map_err(|e| Error::IoFailure(format!("{}: {e}", csv.display())))?;
        println!("wrote {}", csv.display());
    }
    Ok(())
}
