//! Exact token-budget accounting.
//!
//! A clip of `L` frames costs `L * s` visual tokens uncompressed. The
//! anchor+composite form costs `2 * s` (just `s` for a single-member
//! clip), so a full partition into clips of length `m` compresses by
//! exactly `2 / m`. Ratios stay integer rationals; nothing here touches
//! floating point except for display.

use std::fmt;

use crate::error::{Error, Result};

/// Rational in lowest terms. Denominator is never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    numerator: u64,
    denominator: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidArgument("ratio denominator must be non-zero".into()));
        }
        let g = gcd(numerator, denominator).max(1);
        Ok(Ratio { numerator: numerator / g, denominator: denominator / g })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Transformer shape for attention cost estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelShape {
    pub layers: u64,
    pub hidden_dim: u64,
    pub bytes_per_element: u64,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape { layers: 32, hidden_dim: 4096, bytes_per_element: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttentionCost {
    /// `2 * layers * n^2 * hidden_dim`.
    pub flops: u128,
    /// `2 * layers * n * hidden_dim * bytes_per_element`.
    pub kv_cache_bytes: u128,
}

/// Quadratic attention flops and linear KV-cache bytes for a context of
/// `n_tokens`. An order-of-magnitude estimator, not a benchmark.
pub fn attention_cost(n_tokens: u64, shape: &ModelShape) -> Result<AttentionCost> {
    if n_tokens == 0 {
        return Err(Error::InvalidArgument("attention context must be >= 1 token".into()));
    }
    if shape.layers == 0 || shape.hidden_dim == 0 || shape.bytes_per_element == 0 {
        return Err(Error::InvalidArgument("model shape fields must all be positive".into()));
    }
    let n = n_tokens as u128;
    let layers = shape.layers as u128;
    let hidden = shape.hidden_dim as u128;
    Ok(AttentionCost {
        flops: 2 * layers * n * n * hidden,
        kv_cache_bytes: 2 * layers * n * hidden * shape.bytes_per_element as u128,
    })
}

/// Token totals for one compression run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostReport {
    pub tokens_per_frame: u64,
    pub tokens_original: u64,
    pub tokens_reduced: u64,
    pub ratio: Ratio,
    pub attention_original: Option<AttentionCost>,
    pub attention_reduced: Option<AttentionCost>,
}

impl CostReport {
    /// Fills in attention estimates for the given model shape.
    pub fn with_attention(mut self, shape: &ModelShape) -> Result<CostReport> {
        self.attention_original = Some(attention_cost(self.tokens_original, shape)?);
        self.attention_reduced = Some(attention_cost(self.tokens_reduced, shape)?);
        Ok(self)
    }
}

/// Exact budget for `total_frames` split into clips of `clip_length`,
/// each frame worth `tokens_per_frame` tokens.
///
/// A full clip is priced at the anchor plus composite pair, 2s. A short
/// trailing clip is priced at its anchor alone, s, which nudges the
/// realized ratio below the full-clip figure of 2/m. For 100 frames at
/// m=8 the totals land on 25s/100s, exactly 1/4.
pub fn token_budget(total_frames: u64, clip_length: u64, tokens_per_frame: u64) -> Result<CostReport> {
    if total_frames == 0 {
        return Err(Error::EmptySequence);
    }
    if clip_length < 2 {
        return Err(Error::InvalidClipLength(clip_length as usize));
    }
    if tokens_per_frame == 0 {
        return Err(Error::InvalidArgument("tokens per frame must be >= 1".into()));
    }
    let s = tokens_per_frame;
    let full_clips = total_frames / clip_length;
    let remainder = total_frames % clip_length;
    let tokens_original = total_frames * s;
    let tokens_reduced = full_clips * 2 * s + if remainder == 0 { 0 } else { s };
    Ok(CostReport {
        tokens_per_frame: s,
        tokens_original,
        tokens_reduced,
        ratio: Ratio::new(tokens_reduced, tokens_original)?,
        attention_original: None,
        attention_reduced: None,
    })
}
