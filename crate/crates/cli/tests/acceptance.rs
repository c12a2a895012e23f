//! Acceptance gate: one test per criterion, each ending in a single
//! `criterion N (<name>): PASS` line (visible with --nocapture).
//!
//! Oracles here are written from the documented rules alone, not by
//! calling back into the code under test: grids are scored by the
//! floating-point objective, resizes by a direct 2D convolution, prune
//! and merge by brute-force selection and assignment.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use svac_core::astc::{compose_aggregate, extract_tile, plan_grid};
use svac_core::clip::Clip;
use svac_core::cost::{token_budget, Ratio};
use svac_core::frame::{Frame, FrameSequence};
use svac_core::io::write_raw_stream;
use svac_core::manifest::read_manifest;
use svac_core::pipeline::{compress_to_dir, CompressOptions};
use svac_core::resample::{bicubic_resize, cubic_weight, ResampleSpec};
use svac_core::seg_alloc::allocate_seg_tokens;
use svac_core::token_ops::{
    avg_pool, max_pool, merge_tokens, patch_tokenize, prune_tokens, saliency_scores, TokenGrid,
};

fn rng_range(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> u32 {
    lo + rng.next_u32() % (hi - lo + 1)
}

fn random_frame(rng: &mut ChaCha8Rng, h: u32, w: u32, source: u64) -> Frame {
    let mut data = vec![0u8; (h * w * 3) as usize];
    rng.fill_bytes(&mut data);
    Frame::new(h, w, data, source).unwrap()
}

fn random_sequence(rng: &mut ChaCha8Rng, frames: usize, h: u32, w: u32) -> FrameSequence {
    let frames = (0..frames).map(|t| random_frame(rng, h, w, t as u64)).collect();
    FrameSequence::new(frames, None).unwrap()
}

// ---------------------------------------------------------------- 1

#[test]
fn criterion_1_compression_ratio_exactness() {
    let start = Instant::now();
    for s in [1u64, 7, 256, 999, 4096] {
        let ten = token_budget(100, 10, s).unwrap();
        assert_eq!(ten.ratio, Ratio::new(1, 5).unwrap(), "m=10, s={s}");
        assert_eq!(ten.tokens_reduced * 5, ten.tokens_original, "m=10, s={s}");

        let eight = token_budget(100, 8, s).unwrap();
        assert_eq!(eight.ratio, Ratio::new(1, 4).unwrap(), "m=8, s={s}");
        assert_eq!(eight.tokens_reduced * 4, eight.tokens_original, "m=8, s={s}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("criterion 1 (compression-ratio exactness): PASS in {elapsed:?}");
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_2_reference_configuration_reproduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let seq = random_sequence(&mut rng, 100, 32, 32);
    let dir = tempfile::tempdir().unwrap();
    let opts = CompressOptions::default();
    let (run, manifest, manifest_path) = compress_to_dir(&seq, &opts, dir.path()).unwrap();

    assert_eq!(manifest.clips.len(), 10, "exactly 10 clips");
    let images = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().map(|x| x == "ppm").unwrap_or(false))
        .count();
    assert_eq!(images, 20, "exactly 20 output images");
    for clip in &manifest.clips {
        assert_eq!(clip.seg_token_index, clip.clip_index, "one token per clip");
    }
    assert_eq!(run.allocation.num_tokens(), 10);
    assert!(read_manifest(&manifest_path).is_ok());

    // Granularity sweep for 10 clips, and the documented g=3 grouping.
    for (g, expected_k) in [(10, 1), (5, 2), (3, 3), (2, 5), (1, 10)] {
        let alloc = allocate_seg_tokens(10, g).unwrap();
        assert_eq!(alloc.num_tokens(), expected_k, "g={g}");
    }
    assert_eq!(allocate_seg_tokens(10, 3).unwrap().group_sizes(), vec![3, 3, 4]);

    println!("criterion 2 (reference configuration reproduction): PASS");
}

// ---------------------------------------------------------------- 3

#[test]
fn criterion_3_pre_resize_losslessness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..200 {
        let h = rng_range(&mut rng, 1, 144);
        let w = rng_range(&mut rng, 1, 256);
        let m = rng_range(&mut rng, 2, 12) as usize;
        let members: Vec<Frame> =
            (0..m).map(|t| random_frame(&mut rng, h, w, t as u64)).collect();
        let clip = Clip::new(case, members).unwrap();

        let layout = plan_grid(clip.followers().len() as u32, h, w).unwrap();
        let agg = compose_aggregate(&clip, &layout).unwrap();
        for (j, follower) in clip.followers().iter().enumerate() {
            let tile = extract_tile(&agg, j as u32).unwrap();
            assert!(tile.same_pixels(follower), "case {case}: tile {j} not byte-exact");
        }
        for cell in layout.num_tiles..layout.rows * layout.cols {
            let cy = (cell / layout.cols) * layout.tile_height;
            let cx = (cell % layout.cols) * layout.tile_width;
            for y in 0..layout.tile_height {
                for x in 0..layout.tile_width {
                    assert_eq!(
                        agg.image.pixel(cy + y, cx + x),
                        [0, 0, 0],
                        "case {case}: pad cell {cell} not zero"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
    println!("criterion 3 (pre-resize losslessness): PASS in {elapsed:?}");
}

// ---------------------------------------------------------------- 4

/// Exhaustive enumeration scored by the documented objective
/// |ln((rows*h)/(cols*w)) - ln(h/w)|, ties by pad count then rows.
fn grid_oracle(num_tiles: u32, h: u32, w: u32) -> (u32, u32, u32) {
    let target = (h as f64 / w as f64).ln();
    let mut best: Option<(f64, u64, u32, u32)> = None;
    for rows in 1..=num_tiles {
        for cols in 1..=num_tiles {
            let cells = rows as u64 * cols as u64;
            if cells < num_tiles as u64 {
                continue;
            }
            let score = (((rows as f64 * h as f64) / (cols as f64 * w as f64)).ln() - target).abs();
            let pads = cells - num_tiles as u64;
            let better = match best {
                None => true,
                Some((bs, bp, br, _)) => {
                    if score < bs - 1e-9 {
                        true
                    } else if score > bs + 1e-9 {
                        false
                    } else if pads != bp {
                        pads < bp
                    } else {
                        rows < br
                    }
                }
            };
            if better {
                best = Some((score, pads, rows, cols));
            }
        }
    }
    let (_, pads, rows, cols) = best.unwrap();
    (rows, cols, pads as u32)
}

#[test]
fn criterion_4_grid_optimality() {
    // Aspect ratios 1:1, 4:3, 16:9, and 9:16 as height x width pairs.
    for (h, w) in [(128u32, 128u32), (96, 128), (72, 128), (128, 72)] {
        for num_tiles in 1u32..=64 {
            let got = plan_grid(num_tiles, h, w).unwrap();
            let want = grid_oracle(num_tiles, h, w);
            assert_eq!(
                (got.rows, got.cols, got.pad_cells),
                want,
                "num_tiles={num_tiles}, frame {h}x{w}"
            );
        }
    }
    println!("criterion 4 (grid optimality): PASS");
}

// ---------------------------------------------------------------- 5

/// Direct 2D convolution of the cubic kernel, no separation, no
/// short-circuits. Returns clamped, unrounded channel values.
fn direct_bicubic(frame: &Frame, out_h: u32, out_w: u32, a: f64) -> Vec<f64> {
    fn weight(x: f64, a: f64) -> f64 {
        let t = x.abs();
        if t <= 1.0 {
            (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0
        } else if t < 2.0 {
            a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a
        } else {
            0.0
        }
    }
    let (in_h, in_w) = (frame.height() as i64, frame.width() as i64);
    let sy = frame.height() as f64 / out_h as f64;
    let sx = frame.width() as f64 / out_w as f64;
    let mut out = Vec::with_capacity((out_h * out_w * 3) as usize);
    for y in 0..out_h {
        let cy = (y as f64 + 0.5) * sy - 0.5;
        let by = cy.floor() as i64;
        for x in 0..out_w {
            let cx = (x as f64 + 0.5) * sx - 0.5;
            let bx = cx.floor() as i64;
            for ch in 0..3usize {
                let mut acc = 0.0;
                for ky in -1..=2i64 {
                    let wy = weight(cy - (by + ky) as f64, a);
                    let py = (by + ky).clamp(0, in_h - 1);
                    for kx in -1..=2i64 {
                        let wx = weight(cx - (bx + kx) as f64, a);
                        let px = (bx + kx).clamp(0, in_w - 1);
                        acc += wy * wx * frame.data()[((py * in_w + px) * 3) as usize + ch] as f64;
                    }
                }
                out.push(acc.clamp(0.0, 255.0));
            }
        }
    }
    out
}

#[test]
fn criterion_5_resampler_correctness() {
    let start = Instant::now();
    let spec = ResampleSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    // Identity resizes return the input bytes untouched.
    for _ in 0..25 {
        let h = rng_range(&mut rng, 1, 64);
        let w = rng_range(&mut rng, 1, 64);
        let frame = random_frame(&mut rng, h, w, 0);
        let out = bicubic_resize(&frame, h, w, &spec).unwrap();
        assert_eq!(out, frame, "identity must be byte-identical");
    }

    // Constant images stay exactly constant at 50 random output sizes.
    for _ in 0..50 {
        let rgb = [
            rng.next_u32() as u8,
            (rng.next_u32() >> 8) as u8,
            (rng.next_u32() >> 16) as u8,
        ];
        let frame = Frame::filled(rng_range(&mut rng, 1, 32), rng_range(&mut rng, 1, 32), rgb, 0)
            .unwrap();
        let out_h = rng_range(&mut rng, 1, 48);
        let out_w = rng_range(&mut rng, 1, 48);
        let out = bicubic_resize(&frame, out_h, out_w, &spec).unwrap();
        assert!(
            out.data().chunks(3).all(|px| px == rgb),
            "constant {rgb:?} drifted at {out_h}x{out_w}"
        );
    }

    // Separable implementation vs the direct 2D convolution oracle.
    for case in 0..100 {
        let frame = random_frame(&mut rng, 16, 16, 0);
        let out_h = rng_range(&mut rng, 1, 40);
        let out_w = rng_range(&mut rng, 1, 40);
        let got = bicubic_resize(&frame, out_h, out_w, &spec).unwrap();
        let oracle = direct_bicubic(&frame, out_h, out_w, spec.kernel_a);
        for (i, (&g, &o)) in got.data().iter().zip(&oracle).enumerate() {
            assert!(
                (g as f64 - o).abs() <= 0.5 + 1e-9,
                "case {case}: sample {i} separable {g} vs direct {o:.6}"
            );
        }
    }

    // Partition of unity across 1000 kernel phases.
    for a in [-0.5, -0.75] {
        for k in 0..1000 {
            let t = k as f64 / 1000.0;
            let sum = cubic_weight(t + 1.0, a)
                + cubic_weight(t, a)
                + cubic_weight(1.0 - t, a)
                + cubic_weight(2.0 - t, a);
            assert!((sum - 1.0).abs() <= 1e-12, "a={a}, phase {t}: sum {sum}");
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
    println!("criterion 5 (resampler correctness): PASS in {elapsed:?}");
}

// ---------------------------------------------------------------- 6

#[test]
fn criterion_6_baseline_token_parity() {
    // A 512x512 frame at patch 16 gives the 32x32 reference token grid.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let frame = random_frame(&mut rng, 512, 512, 0);
    let grid = patch_tokenize(&frame, 16).unwrap();
    assert_eq!((grid.grid_h(), grid.grid_w()), (32, 32));
    assert_eq!(grid.len(), 1024);

    let avg = avg_pool(&grid, 2, 2).unwrap();
    assert_eq!(avg.len() * 4, grid.len(), "avg pool 2x2/2");

    let max = max_pool(&grid, 2, 2).unwrap();
    assert_eq!(max.len() * 4, grid.len(), "max pool 2x2/2");

    let scores = saliency_scores(&grid);
    let pruned = prune_tokens(&grid, &scores, 0.25).unwrap();
    assert_eq!(pruned.len() * 4, grid.len(), "prune top 25%");

    let merged = merge_tokens(&grid, 0.25).unwrap();
    assert_eq!(merged.len() * 4, grid.len(), "merge into 25%");

    // ASTC at m=8 with s tokens per frame: reduced is exactly a quarter.
    let report = token_budget(96, 8, 1024).unwrap();
    assert_eq!(report.tokens_reduced * 4, report.tokens_original, "astc m=8");
    assert_eq!(report.ratio, Ratio::new(1, 4).unwrap());

    println!("criterion 6 (baseline token parity at 25%): PASS");
}

// ---------------------------------------------------------------- 7

/// Brute-force prune: repeatedly scan for the best remaining score,
/// preferring the lower index on ties.
fn prune_oracle(scores: &[f64], keep_ratio: f64) -> Vec<usize> {
    let keep = (keep_ratio * scores.len() as f64).round() as usize;
    let mut taken = vec![false; scores.len()];
    let mut kept = Vec::with_capacity(keep);
    for _ in 0..keep {
        let mut best: Option<usize> = None;
        for i in 0..scores.len() {
            if taken[i] {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) if scores[i] > scores[b] => Some(i),
                Some(b) => Some(b),
            };
        }
        let b = best.expect("keep never exceeds len");
        taken[b] = true;
        kept.push(b);
    }
    kept.sort_unstable();
    kept
}

/// Brute-force merge: destinations at floor(j*s/d), every source checked
/// against every destination, first maximum wins, unweighted mean in
/// ascending index order.
fn merge_oracle(values: &[Vec<f64>], keep_ratio: f64) -> (Vec<usize>, Vec<Vec<f64>>) {
    fn cos(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            0.0
        } else {
            dot / (na * nb)
        }
    }
    let s = values.len();
    let d = (keep_ratio * s as f64).round() as usize;
    let dests: Vec<usize> = (0..d).map(|j| j * s / d).collect();
    let mut groups: Vec<Vec<usize>> = dests.iter().map(|&i| vec![i]).collect();
    for i in 0..s {
        if dests.contains(&i) {
            continue;
        }
        let sims: Vec<f64> = dests.iter().map(|&dst| cos(&values[i], &values[dst])).collect();
        let top = sims.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let pick = sims.iter().position(|&x| x == top).expect("d >= 1");
        groups[pick].push(i);
    }
    // Every source lands in exactly one group.
    let mut seen = vec![0usize; s];
    for g in &groups {
        for &i in g {
            seen[i] += 1;
        }
    }
    assert!(seen.iter().all(|&c| c == 1), "assignment must partition the tokens");
    let means = groups
        .iter_mut()
        .map(|g| {
            g.sort_unstable();
            let mut mean = vec![0.0; values[0].len()];
            for &i in g.iter() {
                for (m, v) in mean.iter_mut().zip(&values[i]) {
                    *m += v;
                }
            }
            for m in &mut mean {
                *m /= g.len() as f64;
            }
            mean
        })
        .collect();
    (dests, means)
}

/// Calls `visit` with every distinct permutation of the multiset.
fn each_multiset_permutation(
    counts: &mut Vec<(f64, usize)>,
    prefix: &mut Vec<f64>,
    len: usize,
    visit: &mut impl FnMut(&[f64]),
) {
    if prefix.len() == len {
        visit(prefix);
        return;
    }
    for i in 0..counts.len() {
        if counts[i].1 == 0 {
            continue;
        }
        counts[i].1 -= 1;
        prefix.push(counts[i].0);
        each_multiset_permutation(counts, prefix, len, visit);
        prefix.pop();
        counts[i].1 += 1;
    }
}

fn scalar_grid(scores: &[f64]) -> TokenGrid {
    TokenGrid::new(1, scores.len(), 1, scores.iter().map(|&v| vec![v]).collect()).unwrap()
}

#[test]
fn criterion_7_prune_merge_oracle_equivalence() {
    // Prune: every permutation of tie-heavy score multisets, s <= 12.
    let mut checked = 0usize;
    for s in 1..=12usize {
        for modulus in [2usize, 3] {
            let mut counts: Vec<(f64, usize)> = (0..modulus)
                .map(|v| (v as f64, (0..s).filter(|i| i % modulus == v).count()))
                .filter(|&(_, c)| c > 0)
                .collect();
            let mut prefix = Vec::with_capacity(s);
            each_multiset_permutation(&mut counts, &mut prefix, s, &mut |scores| {
                let grid = scalar_grid(scores);
                for ratio in [0.25, 0.5, 1.0] {
                    let got = prune_tokens(&grid, scores, ratio).unwrap();
                    assert_eq!(
                        got.indices,
                        prune_oracle(scores, ratio),
                        "s={s}, scores={scores:?}, ratio={ratio}"
                    );
                    checked += 1;
                }
            });
        }
    }
    assert!(checked > 150_000, "permutation sweep materialized ({checked} checks)");

    // Merge: brute-force assignment on tie-heavy vector sets, s <= 12.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in 1..=12usize {
        for case in 0..300 {
            // Components in {-1, 0, 1} force parallel, antiparallel, and
            // zero vectors, the tie cases that matter.
            let values: Vec<Vec<f64>> = (0..s)
                .map(|_| (0..2).map(|_| (rng.next_u32() % 3) as f64 - 1.0).collect())
                .collect();
            for ratio in [0.25, 0.5, 1.0] {
                let d = (ratio * s as f64).round() as usize;
                if d == 0 {
                    continue;
                }
                let grid =
                    TokenGrid::new(1, s, 1, values.clone()).unwrap();
                let got = merge_tokens(&grid, ratio).unwrap();
                let (dests, means) = merge_oracle(&values, ratio);
                assert_eq!(got.indices, dests, "s={s} case {case} ratio {ratio}");
                assert_eq!(got.values, means, "s={s} case {case} ratio {ratio}");
            }
        }
    }

    println!("criterion 7 (prune/merge oracle equivalence): PASS ({checked} prune permutations)");
}

// ---------------------------------------------------------------- 8

fn svac_bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_svac"));
    cmd.env_remove("SVAC_THREADS");
    cmd
}

fn write_synthetic_video(path: &Path, frames: usize, h: u32, w: u32, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = random_sequence(&mut rng, frames, h, w);
    write_raw_stream(&seq, path).unwrap();
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut paths: Vec<PathBuf> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect()
}

#[test]
fn criterion_8_determinism_under_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let video = dir.path().join("in.svacraw");
    write_synthetic_video(&video, 100, 64, 64, 8);

    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out_dir = dir.path().join(format!("out_{threads}"));
        let status = svac_bin()
            .arg("compress")
            .arg("--input")
            .arg(&video)
            .arg("--output")
            .arg(&out_dir)
            .args(["--threads", threads])
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "threads {threads}: {}",
            String::from_utf8_lossy(&status.stderr)
        );
        outputs.push(dir_contents(&out_dir));
    }
    assert_eq!(outputs[0].len(), 21, "10 anchors + 10 composites + manifest");
    let names: Vec<&String> = outputs[0].iter().map(|(n, _)| n).collect();
    let other: Vec<&String> = outputs[1].iter().map(|(n, _)| n).collect();
    assert_eq!(names, other, "same file sets");
    for ((name, a), (_, b)) in outputs[0].iter().zip(&outputs[1]) {
        assert_eq!(a, b, "{name} differs between --threads 1 and --threads 8");
    }
    println!("criterion 8 (determinism under parallelism): PASS");
}

// ---------------------------------------------------------------- 9

#[test]
fn criterion_9_throughput_report() {
    let dir = tempfile::tempdir().unwrap();
    let video = dir.path().join("in.svacraw");
    write_synthetic_video(&video, 100, 360, 640, 9);

    let mut timings = Vec::new();
    for threads in ["1", "8"] {
        let out_dir = dir.path().join(format!("out_{threads}"));
        let start = Instant::now();
        let out = svac_bin()
            .arg("compress")
            .arg("--input")
            .arg(&video)
            .arg("--output")
            .arg(&out_dir)
            .args(["--threads", threads])
            .output()
            .unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        // Gated on completion only; the timing figures are a report.
        assert!(
            out.status.success(),
            "threads {threads}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        timings.push(elapsed);
    }
    println!(
        "criterion 9 (throughput sanity, non-gating): PASS - 100 frames of 640x360 \
         compressed in {:.2} s single-threaded (report budget 10 s), {:.2} s with 8 threads \
         (speedup {:.2}x)",
        timings[0],
        timings[1],
        timings[0] / timings[1]
    );
}
