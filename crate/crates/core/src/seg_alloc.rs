//! Segmentation-token allocation.
//!
//! Downstream consumers mark clip boundaries with dedicated tokens. At
//! granularity `g` (clips per token), `N` clips share
//! `K = floor(N / g)` tokens (one token when `g > N`): clip `i` maps to
//! token `min(floor(i / g), K - 1)`, so a remainder folds into the last
//! group rather than minting an extra token.

use crate::clip::ClipSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegAllocation {
    num_clips: usize,
    clips_per_token: usize,
    num_tokens: usize,
    clip_to_token: Vec<usize>,
}

impl SegAllocation {
    pub fn num_clips(&self) -> usize {
        self.num_clips
    }

    pub fn clips_per_token(&self) -> usize {
        self.clips_per_token
    }

    pub fn num_tokens(&self) -> usize {
        self.num_tokens
    }

    pub fn clip_to_token(&self) -> &[usize] {
        &self.clip_to_token
    }

    pub fn token_for_clip(&self, clip_index: usize) -> Result<usize> {
        self.clip_to_token
            .get(clip_index)
            .copied()
            .ok_or(Error::IndexOutOfRange { index: clip_index, limit: self.num_clips })
    }

    /// Clips per token group, in token order. Sums to `num_clips`.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_tokens];
        for &t in &self.clip_to_token {
            sizes[t] += 1;
        }
        sizes
    }
}

/// Allocates tokens for `num_clips` clips at `clips_per_token`
/// granularity.
pub fn allocate_seg_tokens(num_clips: usize, clips_per_token: usize) -> Result<SegAllocation> {
    if num_clips == 0 {
        return Err(Error::InvalidArgument("allocation needs at least one clip".into()));
    }
    if clips_per_token == 0 {
        return Err(Error::InvalidArgument("clips per token must be >= 1".into()));
    }
    let num_tokens = if clips_per_token <= num_clips { num_clips / clips_per_token } else { 1 };
    let clip_to_token = (0..num_clips)
        .map(|i| (i / clips_per_token).min(num_tokens - 1))
        .collect();
    Ok(SegAllocation { num_clips, clips_per_token, num_tokens, clip_to_token })
}

/// Token of the clip containing sampled frame `frame_position`.
pub fn token_for_frame(
    alloc: &SegAllocation,
    clips: &ClipSet,
    frame_position: usize,
) -> Result<usize> {
    if alloc.num_clips != clips.len() {
        return Err(Error::InvalidArgument(format!(
            "allocation covers {} clips but the set has {}",
            alloc.num_clips,
            clips.len()
        )));
    }
    let clip_index = clips.clip_index_for_position(frame_position)?;
    alloc.token_for_clip(clip_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clip::partition_clips;
    use crate::testutil::ramp_sequence;

    #[test]
    fn identity_granularity_gives_one_token_per_clip() {
        let alloc = allocate_seg_tokens(10, 1).unwrap();
        assert_eq!(alloc.num_tokens(), 10);
        let expected: Vec<usize> = (0..10).collect();
        assert_eq!(alloc.clip_to_token(), &expected[..]);
    }

    #[test]
    fn remainder_clips_fold_into_the_last_group() {
        let alloc = allocate_seg_tokens(10, 3).unwrap();
        assert_eq!(alloc.num_tokens(), 3);
        assert_eq!(alloc.clip_to_token(), &[0, 0, 0, 1, 1, 1, 2, 2, 2, 2]);
        assert_eq!(alloc.group_sizes(), vec![3, 3, 4]);
    }

    #[test]
    fn granularity_beyond_clip_count_collapses_to_one_token() {
        let alloc = allocate_seg_tokens(10, 10).unwrap();
        assert_eq!(alloc.num_tokens(), 1);
        let far = allocate_seg_tokens(2, 5).unwrap();
        assert_eq!(far.num_tokens(), 1);
        assert_eq!(far.clip_to_token(), &[0, 0]);
    }

    #[test]
    fn token_counts_across_granularities_for_ten_clips() {
        let expected = [(1usize, 10usize), (2, 5), (3, 3), (5, 2), (10, 1)];
        for (g, k) in expected {
            assert_eq!(allocate_seg_tokens(10, g).unwrap().num_tokens(), k, "g={g}");
        }
    }

    #[test]
    fn group_sizes_always_sum_to_clip_count() {
        for n in 1..=30 {
            for g in 1..=12 {
                let alloc = allocate_seg_tokens(n, g).unwrap();
                assert_eq!(alloc.group_sizes().iter().sum::<usize>(), n, "n={n} g={g}");
                assert!(alloc.clip_to_token().windows(2).all(|p| p[1] >= p[0]));
            }
        }
    }

    #[test]
    fn frame_positions_route_through_their_clip() {
        let seq = ramp_sequence(100, 4, 4);
        let clips = partition_clips(&seq, 10).unwrap();
        let fine = allocate_seg_tokens(clips.len(), 1).unwrap();
        assert_eq!(token_for_frame(&fine, &clips, 57).unwrap(), 5);
        let coarse = allocate_seg_tokens(clips.len(), 3).unwrap();
        assert_eq!(token_for_frame(&coarse, &clips, 95).unwrap(), 2);
        assert!(matches!(
            token_for_frame(&fine, &clips, 100),
            Err(Error::IndexOutOfRange { index: 100, limit: 100 })
        ));
    }

    #[test]
    fn mismatched_allocation_and_clip_set_is_rejected() {
        let seq = ramp_sequence(30, 4, 4);
        let clips = partition_clips(&seq, 10).unwrap();
        let alloc = allocate_seg_tokens(5, 1).unwrap();
        assert!(matches!(token_for_frame(&alloc, &clips, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rejects_zero_arguments() {
        assert!(allocate_seg_tokens(0, 1).is_err());
        assert!(allocate_seg_tokens(4, 0).is_err());
    }
}
