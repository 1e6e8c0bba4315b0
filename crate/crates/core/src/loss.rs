//! Reference implementations of the parsing network's training losses.
//!
//! These are plain numeric reductions meant for checking an external training
//! pipeline, not for training. Every loss averages per-pixel terms over all N
//! pixels of the map (there is no ignore label) and clamps probabilities at
//! [`LOG_EPS`] before taking logarithms.
//!
//! Sums use a fixed pairwise reduction tree so results are bit-stable.

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryMap, WeightMap};
use crate::labelmap::LabelMap;

/// Lower clamp applied to every probability before `ln`.
pub const LOG_EPS: f64 = 1e-12;

/// Tolerance on per-pixel channel sums.
pub const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LossError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("expected {expected} values, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("probability {value} at index {index} is outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("channels of pixel {pixel} sum to {sum}, not 1")]
    NotNormalized { pixel: usize, sum: f64 },
    #[error("label {label} has no channel in a {channels}-channel map")]
    LabelOutOfRange { label: u8, channels: usize },
    #[error("expected a {expected}-channel map, got {found}")]
    WrongChannels { expected: usize, found: usize },
    #[error("loss weights must be finite and non-negative: {0:?}")]
    InvalidWeights([f64; 3]),
}

/// Per-pixel class probabilities, pixel-major (`values[pixel * channels + c]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProbMapRepr", into = "ProbMapRepr")]
pub struct ProbMap {
    width: u32,
    height: u32,
    channels: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProbMapRepr {
    width: u32,
    height: u32,
    channels: usize,
    values: Vec<f64>,
}

impl From<ProbMap> for ProbMapRepr {
    fn from(p: ProbMap) -> Self {
        ProbMapRepr { width: p.width, height: p.height, channels: p.channels, values: p.values }
    }
}

impl TryFrom<ProbMapRepr> for ProbMap {
    type Error = LossError;
    fn try_from(r: ProbMapRepr) -> Result<Self, LossError> {
        ProbMap::new(r.width, r.height, r.channels, r.values)
    }
}

impl ProbMap {
    /// Validates ranges, and for multi-channel maps that each pixel sums to 1.
    pub fn new(width: u32, height: u32, channels: usize, values: Vec<f64>) -> Result<ProbMap, LossError> {
        let expected = width as usize * height as usize * channels;
        if channels == 0 || values.len() != expected {
            return Err(LossError::WrongLength { expected, found: values.len() });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(LossError::InvalidProbability { index, value });
        }
        if channels > 1 {
            for (pixel, chunk) in values.chunks_exact(channels).enumerate() {
                let sum: f64 = chunk.iter().sum();
                if (sum - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(LossError::NotNormalized { pixel, sum });
                }
            }
        }
        Ok(ProbMap { width, height, channels, values })
    }

    /// Single-channel boundary probabilities.
    pub fn boundary(width: u32, height: u32, values: Vec<f64>) -> Result<ProbMap, LossError> {
        ProbMap::new(width, height, 1, values)
    }

    /// Probability 1/C for every class at every pixel.
    pub fn uniform(width: u32, height: u32, channels: usize) -> ProbMap {
        let n = width as usize * height as usize * channels;
        ProbMap { width, height, channels, values: vec![1.0 / channels as f64; n] }
    }

    /// Probability 1 on the labelled class.
    pub fn one_hot(labels: &LabelMap, channels: usize) -> Result<ProbMap, LossError> {
        let mut values = vec![0.0; labels.len() * channels];
        for (i, &l) in labels.labels().iter().enumerate() {
            if l as usize >= channels {
                return Err(LossError::LabelOutOfRange { label: l, channels });
            }
            values[i * channels + l as usize] = 1.0;
        }
        Ok(ProbMap { width: labels.width(), height: labels.height(), channels, values })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pixels(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn prob(&self, pixel: usize, channel: usize) -> f64 {
        self.values[pixel * self.channels + channel]
    }

    fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }
}

/// Branch weights of the total loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub semantic: f64,
    pub boundary: f64,
    pub fusion: f64,
}

impl LossWeights {
    /// Semantic 1, boundary 1, fusion 2.
    pub const DEFAULT: LossWeights = LossWeights { semantic: 1.0, boundary: 1.0, fusion: 2.0 };

    pub fn new(semantic: f64, boundary: f64, fusion: f64) -> Result<LossWeights, LossError> {
        let all = [semantic, boundary, fusion];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(LossError::InvalidWeights(all));
        }
        Ok(LossWeights { semantic, boundary, fusion })
    }
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights::DEFAULT
    }
}

fn check(a: (u32, u32), b: (u32, u32)) -> Result<(), LossError> {
    if a != b {
        return Err(LossError::DimensionMismatch(a.0, a.1, b.0, b.1));
    }
    Ok(())
}

fn neg_log(p: f64) -> f64 {
    -p.max(LOG_EPS).ln()
}

/// Deterministic pairwise sum with a fixed split point at each level.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn mean(terms: &[f64]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    pairwise_sum(terms) / terms.len() as f64
}

/// Per-pixel cross-entropy terms `-ln p[i, y_i]`.
pub fn semantic_terms(p: &ProbMap, y: &LabelMap) -> Result<Vec<f64>, LossError> {
    check(p.dims(), y.dims())?;
    y.labels()
        .iter()
        .enumerate()
        .map(|(i, &label)| {
            if label as usize >= p.channels {
                return Err(LossError::LabelOutOfRange { label, channels: p.channels });
            }
            Ok(neg_log(p.prob(i, label as usize)))
        })
        .collect()
}

/// Mean cross-entropy of the semantic branch.
pub fn semantic_loss(p: &ProbMap, y: &LabelMap) -> Result<f64, LossError> {
    Ok(mean(&semantic_terms(p, y)?))
}

/// Per-pixel terms of the fusion loss, `w_i · -ln p[i, y_i]`.
pub fn fusion_terms(p: &ProbMap, y: &LabelMap, w: &WeightMap) -> Result<Vec<f64>, LossError> {
    check(p.dims(), w.dims())?;
    let base = semantic_terms(p, y)?;
    Ok(base.iter().zip(w.weights()).map(|(t, wi)| wi * t).collect())
}

/// Boundary-weighted cross-entropy of the fusion branch.
pub fn fusion_loss(p: &ProbMap, y: &LabelMap, w: &WeightMap) -> Result<f64, LossError> {
    Ok(mean(&fusion_terms(p, y, w)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryLoss {
    pub value: f64,
    /// True when class balancing was requested and applied.
    pub balanced: bool,
    pub positives: usize,
    pub negatives: usize,
}

/// Per-pixel binary cross-entropy terms, optionally class-balanced.
///
/// With balancing, positive terms are scaled by `N_neg / N` and negative
/// terms by `N_pos / N`. When one class is absent the balancing is skipped.
pub fn boundary_terms(p: &ProbMap, y: &BoundaryMap, balance: bool) -> Result<(Vec<f64>, BoundaryLoss), LossError> {
    check(p.dims(), y.dims())?;
    if p.channels != 1 {
        return Err(LossError::WrongChannels { expected: 1, found: p.channels });
    }
    let n = y.flags().len();
    let positives = y.count();
    let negatives = n - positives;
    let balanced = balance && positives > 0 && negatives > 0;
    if balance && !balanced {
        log::warn!(
            "boundary loss balancing skipped: map has only one class ({positives} positive, {negatives} negative)"
        );
    }
    let (w_pos, w_neg) = if balanced { (negatives as f64 / n as f64, positives as f64 / n as f64) } else { (1.0, 1.0) };
    let terms = y
        .flags()
        .iter()
        .zip(p.values())
        .map(|(&on, &prob)| if on { w_pos * neg_log(prob) } else { w_neg * neg_log(1.0 - prob) })
        .collect();
    Ok((terms, BoundaryLoss { value: 0.0, balanced, positives, negatives }))
}

pub fn boundary_loss_detailed(p: &ProbMap, y: &BoundaryMap, balance: bool) -> Result<BoundaryLoss, LossError> {
    let (terms, info) = boundary_terms(p, y, balance)?;
    Ok(BoundaryLoss { value: mean(&terms), ..info })
}

/// Binary cross-entropy of the boundary branch.
pub fn boundary_loss(p: &ProbMap, y: &BoundaryMap, balance: bool) -> Result<f64, LossError> {
    boundary_loss_detailed(p, y, balance).map(|l| l.value)
}

pub fn total_loss(semantic: f64, boundary: f64, fusion: f64, weights: &LossWeights) -> f64 {
    weights.semantic * semantic + weights.boundary * boundary + weights.fusion * fusion
}
