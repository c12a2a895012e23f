//! `svac bench`: median throughput for every compression method on a
//! seeded synthetic sequence, plus a determinism check that the full
//! pipeline produces identical bytes on 1 and 8 worker threads.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use svac_core::io::encode_ppm;
use svac_core::manifest::Manifest;
use svac_core::pipeline::{build_manifest, run_compression, CompressOptions};
use svac_core::resample::{ResampleSpec, DEFAULT_KERNEL_A};
use svac_core::token_ops::{
    avg_pool, max_pool, merge_tokens, patch_tokenize, prune_tokens, saliency_scores,
};
use svac_core::{Error, FrameSequence};

use crate::config::{
    self, FileConfig, Method, DEFAULT_CLIPS_PER_TOKEN, DEFAULT_CLIP_LEN, DEFAULT_FRAMES,
    DEFAULT_KEEP_RATIO, DEFAULT_PATCH, DEFAULT_SEED, DEFAULT_THREADS,
};
use crate::error::{CliError, Result};
use crate::synth::synthetic_sequence;

const DEFAULT_HEIGHT: u32 = 128;
const DEFAULT_WIDTH: u32 = 128;
const MIN_RUNS: usize = 5;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Synthetic frame count.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Synthetic frame height.
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    pub height: u32,
    /// Synthetic frame width.
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    pub width: u32,
    /// Timed repetitions per method; the median is reported.
    #[arg(long, default_value_t = MIN_RUNS)]
    pub runs: usize,
    /// Frames per clip (m).
    #[arg(long = "clip-len")]
    pub clip_len: Option<usize>,
    /// Clips per segmentation token (g).
    #[arg(long = "clips-per-token")]
    pub clips_per_token: Option<usize>,
    /// Patch size for the token baselines.
    #[arg(long)]
    pub patch: Option<u32>,
    /// Keep ratio for the prune and merge baselines.
    #[arg(long = "keep-ratio")]
    pub keep_ratio: Option<f64>,
    /// Bicubic kernel parameter a.
    #[arg(long = "kernel-a", allow_negative_numbers = true)]
    pub kernel_a: Option<f64>,
    /// Time only this method; the default times all of them.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Worker threads for the timed runs; 0 picks the machine default.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for the synthetic sequence.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Optional key=value config file, overridden by flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn median_secs(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).expect("durations are finite"));
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    }
}

/// Times `job` the requested number of times; the job's value from the
/// last run describes what was produced.
fn time_runs(runs: usize, job: impl Fn() -> Result<String>) -> Result<(f64, String)> {
    let mut samples = Vec::with_capacity(runs);
    let mut product = String::new();
    for _ in 0..runs {
        let start = Instant::now();
        product = job()?;
        samples.push(start.elapsed().as_secs_f64());
    }
    Ok((median_secs(samples), product))
}

/// The full pipeline's output as comparable bytes: every image PPM
/// encoded in clip order, plus the manifest structure.
fn astc_fingerprint(seq: &FrameSequence, opts: &CompressOptions) -> Result<(Manifest, Vec<u8>)> {
    let run = run_compression(seq, opts)?;
    let manifest = build_manifest(&run, opts);
    let mut bytes = Vec::new();
    for clip in &run.compressed {
        bytes.extend_from_slice(&encode_ppm(&clip.anchor));
        if let Some(composite) = &clip.composite {
            bytes.extend_from_slice(&encode_ppm(composite));
        }
    }
    Ok((manifest, bytes))
}

pub fn run(args: BenchArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let frames = args.frames.or(file.get("frames")?).unwrap_or(DEFAULT_FRAMES);
    let clip_len = args.clip_len.or(file.get("clip_len")?).unwrap_or(DEFAULT_CLIP_LEN);
    let clips_per_token = args
        .clips_per_token
        .or(file.get("clips_per_token")?)
        .unwrap_or(DEFAULT_CLIPS_PER_TOKEN);
    let patch = args.patch.or(file.get("patch")?).unwrap_or(DEFAULT_PATCH);
    let keep_ratio = args.keep_ratio.or(file.get("keep_ratio")?).unwrap_or(DEFAULT_KEEP_RATIO);
    let kernel_a = args.kernel_a.or(file.get("kernel_a")?).unwrap_or(DEFAULT_KERNEL_A);
    let method = args.method.or(file.get_enum("method")?);
    let threads = match args.threads.or(config::env_threads()?) {
        Some(t) => t,
        None => file.get("threads")?.unwrap_or(DEFAULT_THREADS),
    };
    let seed = args.seed.or(file.get("seed")?).unwrap_or(DEFAULT_SEED);

    if frames == 0 {
        return Err(Error::EmptySequence.into());
    }
    if args.runs < MIN_RUNS {
        return Err(Error::InvalidArgument(format!(
            "bench reports a median over at least {MIN_RUNS} runs, got {}",
            args.runs
        ))
        .into());
    }

    let seq = synthetic_sequence(frames, args.height, args.width, seed)?;
    let opts = CompressOptions {
        sample_target: frames,
        clip_length: clip_len,
        clips_per_token,
        patch_size: patch,
        resample: ResampleSpec { kernel_a },
    };

    let methods: Vec<Method> = match method {
        Some(m) => vec![m],
        None => vec![Method::Astc, Method::AvgPool, Method::MaxPool, Method::Prune, Method::Merge],
    };

    println!(
        "bench: {frames} frames of {}x{}, clip_len {clip_len}, patch {patch}, \
         keep_ratio {keep_ratio}, {} runs, seed {seed}, threads {}",
        args.height,
        args.width,
        args.runs,
        config::threads_label(threads)
    );

    for &m in &methods {
        let (median, product) = config::with_threads(threads, || -> Result<(f64, String)> {
            match m {
                Method::Astc => time_runs(args.runs, || {
                    let run = run_compression(&seq, &opts)?;
                    let composites =
                        run.compressed.iter().filter(|c| c.composite.is_some()).count();
                    Ok(format!("{} anchors + {composites} composites", run.clips.len()))
                }),
                Method::AvgPool => time_runs(args.runs, || {
                    let kept: svac_core::Result<usize> = seq
                        .frames()
                        .par_iter()
                        .map(|f| Ok(avg_pool(&patch_tokenize(f, patch)?, 2, 2)?.len()))
                        .try_reduce(|| 0, |a, b| Ok(a + b));
                    Ok(format!("{} tokens kept", kept?))
                }),
                Method::MaxPool => time_runs(args.runs, || {
                    let kept: svac_core::Result<usize> = seq
                        .frames()
                        .par_iter()
                        .map(|f| Ok(max_pool(&patch_tokenize(f, patch)?, 2, 2)?.len()))
                        .try_reduce(|| 0, |a, b| Ok(a + b));
                    Ok(format!("{} tokens kept", kept?))
                }),
                Method::Prune => time_runs(args.runs, || {
                    let kept: svac_core::Result<usize> = seq
                        .frames()
                        .par_iter()
                        .map(|f| {
                            let grid = patch_tokenize(f, patch)?;
                            let scores = saliency_scores(&grid);
                            Ok(prune_tokens(&grid, &scores, keep_ratio)?.len())
                        })
                        .try_reduce(|| 0, |a, b| Ok(a + b));
                    Ok(format!("{} tokens kept", kept?))
                }),
                Method::Merge => time_runs(args.runs, || {
                    let kept: svac_core::Result<usize> = seq
                        .frames()
                        .par_iter()
                        .map(|f| Ok(merge_tokens(&patch_tokenize(f, patch)?, keep_ratio)?.len()))
                        .try_reduce(|| 0, |a, b| Ok(a + b));
                    Ok(format!("{} tokens kept", kept?))
                }),
            }
        })??;
        println!(
            "  {:<8} : median {:.4} s, {:.1} frames/s ({product})",
            m.name(),
            median,
            frames as f64 / median
        );
    }

    let single = config::with_threads(1, || astc_fingerprint(&seq, &opts))??;
    let eight = config::with_threads(8, || astc_fingerprint(&seq, &opts))??;
    if single != eight {
        return Err(CliError::NondeterministicOutput(
            "threads 1 and 8 produced different compression outputs".into(),
        ));
    }
    println!("determinism: threads 1 vs 8 produce byte-identical outputs");
    Ok(())
}
