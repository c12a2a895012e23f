//! `svac compress`: sample, clip, compose, resize, and write the
//! anchor/composite pairs plus the manifest.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use svac_core::io::load_sequence;
use svac_core::pipeline::{compress_to_dir, CompressOptions};
use svac_core::resample::{ResampleSpec, DEFAULT_KERNEL_A};
use svac_core::Error;

use crate::config::{
    self, FileConfig, FormatArg, Method, DEFAULT_CLIPS_PER_TOKEN, DEFAULT_CLIP_LEN,
    DEFAULT_FRAMES, DEFAULT_KEEP_RATIO, DEFAULT_PATCH, DEFAULT_SEED, DEFAULT_THREADS,
};
use crate::error::Result;

#[derive(Debug, Args)]
pub struct CompressArgs {
    /// Frame source: a directory of PPM files or a raw stream file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output directory for images and svac_manifest.json.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Uniform sampling target before clipping.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Frames per clip (m).
    #[arg(long = "clip-len")]
    pub clip_len: Option<usize>,
    /// Clips per segmentation token (g).
    #[arg(long = "clips-per-token")]
    pub clips_per_token: Option<usize>,
    /// Patch size for token accounting.
    #[arg(long)]
    pub patch: Option<u32>,
    /// Keep ratio for the prune and merge baselines.
    #[arg(long = "keep-ratio")]
    pub keep_ratio: Option<f64>,
    /// Bicubic kernel parameter a.
    #[arg(long = "kernel-a", allow_negative_numbers = true)]
    pub kernel_a: Option<f64>,
    /// Compression method; compress itself always runs astc.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Worker threads; 0 picks the machine default.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed recorded for synthetic sources; compress itself draws nothing.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Optional key=value config file, overridden by flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Flag > SVAC_THREADS (threads only) > config file > default.
struct Resolved {
    input: PathBuf,
    format: FormatArg,
    output: PathBuf,
    frames: usize,
    clip_len: usize,
    clips_per_token: usize,
    patch: u32,
    keep_ratio: f64,
    kernel_a: f64,
    method: Method,
    threads: usize,
    seed: u64,
}

fn resolve(args: CompressArgs, file: &FileConfig) -> Result<Resolved> {
    let input = match args.input.or(file.get("input")?) {
        Some(p) => p,
        None => return Err(Error::InvalidArgument("compress needs --input".into()).into()),
    };
    let output = match args.output.or(file.get("output")?) {
        Some(p) => p,
        None => return Err(Error::InvalidArgument("compress needs --output".into()).into()),
    };
    Ok(Resolved {
        input,
        format: args.format.or(file.get_enum("format")?).unwrap_or(FormatArg::Auto),
        output,
        frames: args.frames.or(file.get("frames")?).unwrap_or(DEFAULT_FRAMES),
        clip_len: args.clip_len.or(file.get("clip_len")?).unwrap_or(DEFAULT_CLIP_LEN),
        clips_per_token: args
            .clips_per_token
            .or(file.get("clips_per_token")?)
            .unwrap_or(DEFAULT_CLIPS_PER_TOKEN),
        patch: args.patch.or(file.get("patch")?).unwrap_or(DEFAULT_PATCH),
        keep_ratio: args.keep_ratio.or(file.get("keep_ratio")?).unwrap_or(DEFAULT_KEEP_RATIO),
        kernel_a: args.kernel_a.or(file.get("kernel_a")?).unwrap_or(DEFAULT_KERNEL_A),
        method: args.method.or(file.get_enum("method")?).unwrap_or(Method::Astc),
        threads: match args.threads.or(config::env_threads()?) {
            Some(t) => t,
            None => file.get("threads")?.unwrap_or(DEFAULT_THREADS),
        },
        seed: args.seed.or(file.get("seed")?).unwrap_or(DEFAULT_SEED),
    })
}

pub fn run(args: CompressArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let cfg = resolve(args, &file)?;
    if cfg.method != Method::Astc {
        return Err(Error::InvalidArgument(format!(
            "method {} produces no images; compress always runs astc (bench times the baselines)",
            cfg.method.name()
        ))
        .into());
    }

    println!("compress configuration");
    println!("  input           = {}", cfg.input.display());
    println!("  format          = {}", config::format_label(cfg.format.sequence_format(&cfg.input)));
    println!("  output          = {}", cfg.output.display());
    println!("  frames          = {}", cfg.frames);
    println!("  clip_len        = {}", cfg.clip_len);
    println!("  clips_per_token = {}", cfg.clips_per_token);
    println!("  patch           = {}", cfg.patch);
    println!("  keep_ratio      = {}", cfg.keep_ratio);
    println!("  kernel_a        = {}", cfg.kernel_a);
    println!("  method          = {}", cfg.method.name());
    println!("  threads         = {}", config::threads_label(cfg.threads));
    println!("  seed            = {}", cfg.seed);

    let seq = load_sequence(&cfg.input, cfg.format.sequence_format(&cfg.input))?;
    let loaded = seq.len();
    fs::create_dir_all(&cfg.output)
        .map_err(|e| Error::IoFailure(format!("{}: {e}", cfg.output.display())))?;

    let opts = CompressOptions {
        sample_target: cfg.frames,
        clip_length: cfg.clip_len,
        clips_per_token: cfg.clips_per_token,
        patch_size: cfg.patch,
        resample: ResampleSpec { kernel_a: cfg.kernel_a },
    };
    let (run, manifest, manifest_path) =
        config::with_threads(cfg.threads, || compress_to_dir(&seq, &opts, &cfg.output))??;

    let composites = run.compressed.iter().filter(|c| c.composite.is_some()).count();
    println!("sampled {} of {loaded} frames", run.clips.total_frames());
    println!(
        "wrote {} anchors, {composites} composites, {}",
        run.clips.len(),
        manifest_path.display()
    );
    println!(
        "token budget: {} -> {} (ratio {}/{} = {:.2}%)",
        run.budget.tokens_original,
        run.budget.tokens_reduced,
        manifest.token_budget.ratio_numerator,
        manifest.token_budget.ratio_denominator,
        run.budget.ratio.as_f64() * 100.0
    );
    Ok(())
}
