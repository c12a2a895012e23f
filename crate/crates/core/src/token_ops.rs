//! Token-level baselines.
//!
//! Frames tokenize into a grid of non-overlapping square patches. The
//! operators here shrink that grid the ways common token compressors do:
//! window pooling, score-based pruning, and similarity merging. They
//! exist to give the clip compressor something honest to be measured
//! against.

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Patch tokens of one frame, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenGrid {
    grid_h: usize,
    grid_w: usize,
    dim: usize,
    patch_size: u32,
    values: Vec<Vec<f64>>,
}

impl TokenGrid {
    /// `values` must hold `grid_h * grid_w` vectors of equal length.
    pub fn new(grid_h: usize, grid_w: usize, patch_size: u32, values: Vec<Vec<f64>>) -> Result<Self> {
        if grid_h == 0 || grid_w == 0 {
            return Err(Error::InvalidArgument("token grid must be non-empty".into()));
        }
        if values.len() != grid_h * grid_w {
            return Err(Error::InvalidArgument(format!(
                "{grid_h}x{grid_w} grid needs {} tokens, got {}",
                grid_h * grid_w,
                values.len()
            )));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidArgument("token vectors must share a positive length".into()));
        }
        Ok(TokenGrid { grid_h, grid_w, dim, patch_size, values })
    }

    pub fn grid_h(&self) -> usize {
        self.grid_h
    }

    pub fn grid_w(&self) -> usize {
        self.grid_w
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn patch_size(&self) -> u32 {
        self.patch_size
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn token(&self, row: usize, col: usize) -> &[f64] {
        &self.values[row * self.grid_w + col]
    }
}

/// Surviving tokens of a prune or merge, ordered by original index.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSet {
    pub indices: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

impl TokenSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Cuts a frame into `patch` x `patch` tokens.
///
/// Token `(r, c)` flattens its patch in frame order (row, then column,
/// then R, G, B) and scales bytes to `[0, 1]` by dividing by 255, so the
/// vector length is `3 * patch * patch`.
pub fn patch_tokenize(frame: &Frame, patch: u32) -> Result<TokenGrid> {
    if patch == 0 {
        return Err(Error::InvalidArgument("patch size must be >= 1".into()));
    }
    if !frame.height().is_multiple_of(patch) || !frame.width().is_multiple_of(patch) {
        return Err(Error::NonDivisibleDimensions(format!(
            "{}x{} frame is not a multiple of patch {patch}",
            frame.height(),
            frame.width()
        )));
    }
    let grid_h = (frame.height() / patch) as usize;
    let grid_w = (frame.width() / patch) as usize;
    let p = patch as usize;
    let w = frame.width() as usize;
    let data = frame.data();
    let mut values = Vec::with_capacity(grid_h * grid_w);
    for r in 0..grid_h {
        for c in 0..grid_w {
            let mut v = Vec::with_capacity(p * p * 3);
            for y in 0..p {
                let at = ((r * p + y) * w + c * p) * 3;
                v.extend(data[at..at + p * 3].iter().map(|&b| b as f64 / 255.0));
            }
            values.push(v);
        }
    }
    TokenGrid::new(grid_h, grid_w, patch, values)
}

fn pooled_extent(grid: &TokenGrid, window: usize, stride: usize) -> Result<(usize, usize)> {
    if window == 0 || stride == 0 {
        return Err(Error::InvalidArgument("window and stride must be >= 1".into()));
    }
    if window > grid.grid_h || window > grid.grid_w {
        return Err(Error::WindowLargerThanGrid(format!(
            "window {window} on a {}x{} grid",
            grid.grid_h, grid.grid_w
        )));
    }
    Ok(((grid.grid_h - window) / stride + 1, (grid.grid_w - window) / stride + 1))
}

fn pool_with(
    grid: &TokenGrid,
    window: usize,
    stride: usize,
    fold: impl Fn(&mut [f64], &[f64]),
    init: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<TokenGrid> {
    let (out_h, out_w) = pooled_extent(grid, window, stride)?;
    let mut values = Vec::with_capacity(out_h * out_w);
    for r in 0..out_h {
        for c in 0..out_w {
            let mut acc = init(grid.token(r * stride, c * stride));
            for wy in 0..window {
                for wx in 0..window {
                    if wy == 0 && wx == 0 {
                        continue;
                    }
                    fold(&mut acc, grid.token(r * stride + wy, c * stride + wx));
                }
            }
            values.push(acc);
        }
    }
    TokenGrid::new(out_h, out_w, grid.patch_size, values)
}

/// Element-wise mean over each `window` x `window` block of tokens.
pub fn avg_pool(grid: &TokenGrid, window: usize, stride: usize) -> Result<TokenGrid> {
    let scale = 1.0 / (window * window) as f64;
    let mut pooled = pool_with(
        grid,
        window,
        stride,
        |acc, tok| {
            for (a, t) in acc.iter_mut().zip(tok) {
                *a += t;
            }
        },
        |first| first.to_vec(),
    )?;
    for v in &mut pooled.values {
        for x in v.iter_mut() {
            *x *= scale;
        }
    }
    Ok(pooled)
}

/// Element-wise maximum over each `window` x `window` block of tokens.
pub fn max_pool(grid: &TokenGrid, window: usize, stride: usize) -> Result<TokenGrid> {
    pool_with(
        grid,
        window,
        stride,
        |acc, tok| {
            for (a, t) in acc.iter_mut().zip(tok) {
                *a = a.max(*t);
            }
        },
        |first| first.to_vec(),
    )
}

/// Rounds half away from zero, the convention for all count arithmetic.
fn round_count(x: f64) -> usize {
    x.round() as usize
}

/// Keeps the `round(keep_ratio * len)` highest-scoring tokens.
///
/// Score ties resolve to the lower token index. Survivors come back in
/// original index order. A ratio small enough to round to zero keeps
/// nothing.
pub fn prune_tokens(grid: &TokenGrid, scores: &[f64], keep_ratio: f64) -> Result<TokenSet> {
    check_ratio(keep_ratio)?;
    let s = grid.len();
    if scores.len() != s {
        return Err(Error::ScoreCountMismatch { expected: s, actual: scores.len() });
    }
    let keep = round_count(keep_ratio * s as f64);
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&i, &j| {
        scores[j].partial_cmp(&scores[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j))
    });
    let mut kept: Vec<usize> = order.into_iter().take(keep).collect();
    kept.sort_unstable();
    let values = kept.iter().map(|&i| grid.values[i].clone()).collect();
    Ok(TokenSet { indices: kept, values })
}

fn check_ratio(keep_ratio: f64) -> Result<()> {
    if !(keep_ratio > 0.0 && keep_ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "keep ratio must be in (0, 1], got {keep_ratio}"
        )));
    }
    Ok(())
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        // A zero vector has no direction; it matches nothing.
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Merges tokens down to `round(keep_ratio * len)` destinations.
///
/// Destination `j` is the token at index `floor(j * len / d)`. Every
/// other token joins the destination whose original vector it matches
/// best by cosine similarity, ties to the lower destination index. Each
/// output vector is the plain mean of the destination and its sources,
/// summed in ascending token index order.
pub fn merge_tokens(grid: &TokenGrid, keep_ratio: f64) -> Result<TokenSet> {
    check_ratio(keep_ratio)?;
    let s = grid.len();
    let d = round_count(keep_ratio * s as f64);
    if d == 0 {
        return Err(Error::InvalidArgument(format!(
            "merge ratio {keep_ratio} rounds to zero destinations for {s} tokens"
        )));
    }
    let dests: Vec<usize> = (0..d).map(|j| j * s / d).collect();
    let mut is_dest = vec![false; s];
    for &i in &dests {
        is_dest[i] = true;
    }
    let mut members: Vec<Vec<usize>> = dests.iter().map(|&i| vec![i]).collect();
    for (i, _) in is_dest.iter().enumerate().filter(|(_, &taken)| !taken) {
        let mut best = 0;
        let mut best_sim = f64::NEG_INFINITY;
        for (j, &dest) in dests.iter().enumerate() {
            let sim = cosine(&grid.values[i], &grid.values[dest]);
            if sim > best_sim {
                best_sim = sim;
                best = j;
            }
        }
        members[best].push(i);
    }
    let dim = grid.dim;
    let mut values = Vec::with_capacity(d);
    for group in &mut members {
        group.sort_unstable();
        let mut mean = vec![0.0f64; dim];
        for &i in group.iter() {
            for (m, x) in mean.iter_mut().zip(&grid.values[i]) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= group.len() as f64;
        }
        values.push(mean);
    }
    Ok(TokenSet { indices: dests, values })
}

/// Per-token saliency proxy: population variance of the vector's
/// components. Flat patches score zero.
pub fn saliency_scores(grid: &TokenGrid) -> Vec<f64> {
    grid.values
        .iter()
        .map(|v| {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
        })
        .collect()
}

/// Parses a saliency sidecar: one f64 per line, blank lines ignored.
pub fn parse_scores(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad score line {l:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::ramp_frame;

    fn grid_from(values: Vec<Vec<f64>>, grid_h: usize, grid_w: usize) -> TokenGrid {
        TokenGrid::new(grid_h, grid_w, 1, values).unwrap()
    }

    fn flat(values: &[f64]) -> Vec<Vec<f64>> {
        values.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn tokenize_counts_and_scales() {
        let frame = Frame::filled(128, 128, [51, 51, 51], 0).unwrap();
        let grid = patch_tokenize(&frame, 16).unwrap();
        assert_eq!((grid.grid_h(), grid.grid_w()), (8, 8));
        assert_eq!(grid.len(), 64);
        assert_eq!(grid.dim(), 768);
        assert!(grid.values().iter().all(|v| v.iter().all(|&x| x == 0.2)));
    }

    #[test]
    fn tokenize_orders_patch_bytes_like_the_frame() {
        let frame = ramp_frame(4, 6, 0);
        let grid = patch_tokenize(&frame, 2).unwrap();
        assert_eq!((grid.grid_h(), grid.grid_w()), (2, 3));
        // Token (0, 1) starts at pixel (0, 2).
        let expected: Vec<f64> = [
            frame.pixel(0, 2), frame.pixel(0, 3),
            frame.pixel(1, 2), frame.pixel(1, 3),
        ]
        .iter()
        .flatten()
        .map(|&b| b as f64 / 255.0)
        .collect();
        assert_eq!(grid.token(0, 1), &expected[..]);
    }

    #[test]
    fn tokenize_rejects_non_divisible_dimensions() {
        let frame = ramp_frame(360, 640, 0);
        let err = patch_tokenize(&frame, 16).unwrap_err();
        assert!(matches!(err, Error::NonDivisibleDimensions(_)));
    }

    #[test]
    fn pools_match_hand_computed_two_by_two() {
        let grid = grid_from(flat(&[1.0, 3.0, 5.0, 7.0]), 2, 2);
        let avg = avg_pool(&grid, 2, 2).unwrap();
        assert_eq!((avg.grid_h(), avg.grid_w()), (1, 1));
        assert_eq!(avg.token(0, 0), &[4.0]);
        let max = max_pool(&grid, 2, 2).unwrap();
        assert_eq!(max.token(0, 0), &[7.0]);
    }

    #[test]
    fn pool_extent_follows_floor_formula() {
        let grid = grid_from(flat(&[0.0; 64]), 8, 8);
        assert_eq!(avg_pool(&grid, 2, 2).unwrap().len(), 16);
        let odd = grid_from(flat(&[0.0; 9]), 3, 3);
        assert_eq!(avg_pool(&odd, 2, 1).unwrap().len(), 4);
        assert_eq!(avg_pool(&odd, 2, 2).unwrap().len(), 1);
        assert_eq!(max_pool(&odd, 3, 1).unwrap().len(), 1);
    }

    #[test]
    fn pool_rejects_oversized_window() {
        let grid = grid_from(flat(&[0.0, 1.0, 2.0, 3.0]), 2, 2);
        assert!(matches!(avg_pool(&grid, 3, 1), Err(Error::WindowLargerThanGrid(_))));
        assert!(matches!(max_pool(&grid, 3, 1), Err(Error::WindowLargerThanGrid(_))));
    }

    #[test]
    fn prune_keeps_top_quarter_by_score() {
        let scores: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let grid = grid_from(flat(&scores), 4, 4);
        let kept = prune_tokens(&grid, &scores, 0.25).unwrap();
        assert_eq!(kept.indices, vec![12, 13, 14, 15]);
        assert_eq!(kept.values[0], vec![12.0]);
    }

    #[test]
    fn prune_breaks_score_ties_toward_lower_index() {
        let grid = grid_from(flat(&[9.0; 8]), 2, 4);
        let kept = prune_tokens(&grid, &[9.0; 8], 0.5).unwrap();
        assert_eq!(kept.indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn prune_full_ratio_keeps_everything_in_order() {
        let scores = [3.0, 1.0, 2.0, 0.0];
        let grid = grid_from(flat(&scores), 2, 2);
        let kept = prune_tokens(&grid, &scores, 1.0).unwrap();
        assert_eq!(kept.indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn prune_can_round_to_nothing() {
        let grid = grid_from(flat(&[1.0, 2.0]), 1, 2);
        let kept = prune_tokens(&grid, &[1.0, 2.0], 0.1).unwrap();
        assert!(kept.is_empty());
    }

    #[test]
    fn prune_validates_scores_and_ratio() {
        let grid = grid_from(flat(&[1.0, 2.0]), 1, 2);
        assert!(matches!(
            prune_tokens(&grid, &[1.0], 0.5),
            Err(Error::ScoreCountMismatch { expected: 2, actual: 1 })
        ));
        assert!(prune_tokens(&grid, &[1.0, 2.0], 0.0).is_err());
        assert!(prune_tokens(&grid, &[1.0, 2.0], 1.5).is_err());
    }

    #[test]
    fn merge_destinations_stride_evenly() {
        let values: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64 + 1.0, 1.0]).collect();
        let grid = grid_from(values, 4, 4);
        let merged = merge_tokens(&grid, 0.25).unwrap();
        assert_eq!(merged.indices, vec![0, 4, 8, 12]);
        assert_eq!(merged.len(), 4);
    }

    #[test]
    fn merge_of_identical_tokens_ties_to_first_destination() {
        let grid = grid_from(vec![vec![2.0, 1.0]; 8], 2, 4);
        let merged = merge_tokens(&grid, 0.25).unwrap();
        assert_eq!(merged.indices, vec![0, 4]);
        // All six sources tie at similarity 1 and join destination 0.
        assert_eq!(merged.values[0], vec![2.0, 1.0]);
        assert_eq!(merged.values[1], vec![2.0, 1.0]);
    }

    #[test]
    fn merge_means_are_unweighted_over_dest_and_sources() {
        // Two orthogonal directions: tokens 0, 1 point along x, token 2
        // and 3 along y. Destinations 0 and 2; token 1 joins 0, token 3
        // joins 2.
        let grid = grid_from(
            vec![vec![1.0, 0.0], vec![3.0, 0.0], vec![0.0, 2.0], vec![0.0, 6.0]],
            2,
            2,
        );
        let merged = merge_tokens(&grid, 0.5).unwrap();
        assert_eq!(merged.indices, vec![0, 2]);
        assert_eq!(merged.values[0], vec![2.0, 0.0]);
        assert_eq!(merged.values[1], vec![0.0, 4.0]);
    }

    #[test]
    fn merge_sends_zero_vectors_to_the_first_destination() {
        let grid = grid_from(
            vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 3.0]],
            2,
            2,
        );
        let merged = merge_tokens(&grid, 0.5).unwrap();
        // Zero vector scores 0 against both destinations; tie goes to 0.
        assert_eq!(merged.values[0], vec![0.5, 0.0]);
    }

    #[test]
    fn merge_full_ratio_is_identity() {
        let values: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 1.0]).collect();
        let grid = grid_from(values.clone(), 1, 5);
        let merged = merge_tokens(&grid, 1.0).unwrap();
        assert_eq!(merged.indices, vec![0, 1, 2, 3, 4]);
        assert_eq!(merged.values, values);
    }

    #[test]
    fn merge_rejects_zero_destinations() {
        let grid = grid_from(flat(&[1.0]), 1, 1);
        assert!(matches!(merge_tokens(&grid, 0.25), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn saliency_is_population_variance() {
        let grid = grid_from(vec![vec![0.0, 1.0, 0.0, 1.0], vec![7.0, 7.0, 7.0, 7.0]], 1, 2);
        let scores = saliency_scores(&grid);
        assert_eq!(scores, vec![0.25, 0.0]);
    }

    #[test]
    fn score_parsing_round_trips_plain_floats() {
        assert_eq!(parse_scores("1.0\n2.5\n-3\n\n").unwrap(), vec![1.0, 2.5, -3.0]);
        assert!(parse_scores("1.0\nnope\n").is_err());
    }
}
