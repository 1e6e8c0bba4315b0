//! Pixel-level F1 scoring of predicted label maps.
//!
//! Counts are accumulated over a whole dataset before precision and recall are
//! computed. Two aggregate views are provided: the mean F1 over the ten
//! foreground categories, and merged scores where left/right brows, left/right
//! eyes and the three mouth categories are collapsed into one class each.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::category::{Category, NUM_CATEGORIES};
use crate::labelmap::LabelMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("mean F1 needs exactly 10 foreground scores, got {0}")]
    WrongArity(usize),
}

/// Per-class true positive, false positive and false negative pixel counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: Vec<u64>,
    pub fp: Vec<u64>,
    #[serde(rename = "fn")]
    pub fn_: Vec<u64>,
}

impl ConfusionCounts {
    pub fn new(classes: usize) -> ConfusionCounts {
        ConfusionCounts { tp: vec![0; classes], fp: vec![0; classes], fn_: vec![0; classes] }
    }

    /// Counts over the 11 fine-grained categories.
    pub fn fine() -> ConfusionCounts {
        ConfusionCounts::new(NUM_CATEGORIES)
    }

    pub fn classes(&self) -> usize {
        self.tp.len()
    }

    /// Adds one prediction/ground-truth pair, mapping labels through `class_of`.
    pub fn accumulate_with(
        &mut self,
        pred: &LabelMap,
        gt: &LabelMap,
        class_of: impl Fn(u8) -> usize,
    ) -> Result<(), MetricsError> {
        if pred.dims() != gt.dims() {
            let (a, b) = (pred.dims(), gt.dims());
            return Err(MetricsError::DimensionMismatch(a.0, a.1, b.0, b.1));
        }
        for (&p, &g) in pred.labels().iter().zip(gt.labels()) {
            let (p, g) = (class_of(p), class_of(g));
            if p == g {
                self.tp[p] += 1;
            } else {
                self.fp[p] += 1;
                self.fn_[g] += 1;
            }
        }
        Ok(())
    }

    pub fn accumulate(&mut self, pred: &LabelMap, gt: &LabelMap) -> Result<(), MetricsError> {
        self.accumulate_with(pred, gt, |v| v as usize)
    }

    /// Elementwise sum; counts form a commutative monoid under this.
    pub fn merge(&mut self, other: &ConfusionCounts) {
        assert_eq!(self.classes(), other.classes(), "merging counts over different class sets");
        for i in 0..self.classes() {
            self.tp[i] += other.tp[i];
            self.fp[i] += other.fp[i];
            self.fn_[i] += other.fn_[i];
        }
    }

    pub fn score(&self, class: usize) -> Score {
        Score::from_counts(self.tp[class], self.fp[class], self.fn_[class])
    }
}

/// Adds one image pair to `acc` and returns it.
pub fn accumulate(pred: &LabelMap, gt: &LabelMap, mut acc: ConfusionCounts) -> Result<ConfusionCounts, MetricsError> {
    acc.accumulate(pred, gt)?;
    Ok(acc)
}

/// Precision, recall and F1 as fractions in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Score {
    /// 0/0 ratios are taken as 0.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Score {
        let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Score { precision, recall, f1 }
    }
}

pub fn f1(counts: &ConfusionCounts, category: Category) -> f64 {
    counts.score(category.id() as usize).f1
}

/// Arithmetic mean of the ten foreground F1 scores (background excluded).
pub fn mean_f1(per_category: &[f64]) -> Result<f64, MetricsError> {
    if per_category.len() != Category::FOREGROUND.len() {
        return Err(MetricsError::WrongArity(per_category.len()));
    }
    // plain left-to-right sum; a pairwise sum changes the last bit and can flip a .xx5 tie
    let sum = per_category.iter().fold(0.0, |acc, v| acc + v);
    Ok(sum / per_category.len() as f64)
}

/// Rounds to two decimals for reports.
///
/// Rounds the exact binary value, as printing with `{:.2}` does. Scaling by
/// 100 first would push 87.55499999999999 up to 8755.5 and round the wrong way.
pub fn round2(v: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    format!("{v:.2}").parse().unwrap_or(v)
}

/// Coarse classes used for cross-dataset comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergedClass {
    Background,
    Skin,
    Brows,
    Eyes,
    Nose,
    Mouth,
    Hair,
}

impl MergedClass {
    pub const ALL: [MergedClass; 7] = [
        MergedClass::Background,
        MergedClass::Skin,
        MergedClass::Brows,
        MergedClass::Eyes,
        MergedClass::Nose,
        MergedClass::Mouth,
        MergedClass::Hair,
    ];

    /// Classes combined into the overall score.
    pub const OVERALL: [MergedClass; 4] =
        [MergedClass::Brows, MergedClass::Eyes, MergedClass::Nose, MergedClass::Mouth];

    pub fn of(c: Category) -> MergedClass {
        match c {
            Category::Background => MergedClass::Background,
            Category::Skin => MergedClass::Skin,
            Category::LeftEyebrow | Category::RightEyebrow => MergedClass::Brows,
            Category::LeftEye | Category::RightEye => MergedClass::Eyes,
            Category::Nose => MergedClass::Nose,
            Category::UpperLip | Category::InnerMouth | Category::LowerLip => MergedClass::Mouth,
            Category::Hair => MergedClass::Hair,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            MergedClass::Background => "background",
            MergedClass::Skin => "skin",
            MergedClass::Brows => "brows",
            MergedClass::Eyes => "eyes",
            MergedClass::Nose => "nose",
            MergedClass::Mouth => "mouth",
            MergedClass::Hair => "hair",
        }
    }
}

fn merged_index(label: u8) -> usize {
    MergedClass::of(Category::from_id(label).expect("valid label")).index()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverallMode {
    /// Precision and recall from TP/FP/FN summed over the four classes.
    #[default]
    Micro,
    /// Unweighted mean of the four merged F1 scores.
    Macro,
}

/// Accumulates fine and merged counts over a stream of image pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluator {
    fine: ConfusionCounts,
    merged: ConfusionCounts,
    images: usize,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new()
    }
}

impl Evaluator {
    pub fn new() -> Evaluator {
        Evaluator { fine: ConfusionCounts::fine(), merged: ConfusionCounts::new(MergedClass::ALL.len()), images: 0 }
    }

    pub fn add(&mut self, pred: &LabelMap, gt: &LabelMap) -> Result<(), MetricsError> {
        self.fine.accumulate(pred, gt)?;
        self.merged.accumulate_with(pred, gt, merged_index)?;
        self.images += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &Evaluator) {
        self.fine.merge(&other.fine);
        self.merged.merge(&other.merged);
        self.images += other.images;
    }

    pub fn fine_counts(&self) -> &ConfusionCounts {
        &self.fine
    }

    pub fn merged_counts(&self) -> &ConfusionCounts {
        &self.merged
    }

    pub fn scores(&self, mode: OverallMode) -> CategoryScores {
        let per_category: Vec<CategoryScore> = Category::ALL
            .iter()
            .map(|&c| CategoryScore { category: c, score: self.fine.score(c.id() as usize) })
            .collect();
        let fg: Vec<f64> = Category::FOREGROUND.iter().map(|&c| per_category[c.id() as usize].score.f1).collect();
        let mean = mean_f1(&fg).expect("ten foreground categories");
        let merged: Vec<MergedScore> =
            MergedClass::ALL.iter().map(|&m| MergedScore { class: m, score: self.merged.score(m.index()) }).collect();
        let overall = match mode {
            OverallMode::Micro => {
                let sum = |v: &[u64]| MergedClass::OVERALL.iter().map(|m| v[m.index()]).sum::<u64>();
                Score::from_counts(sum(&self.merged.tp), sum(&self.merged.fp), sum(&self.merged.fn_)).f1
            }
            OverallMode::Macro => {
                MergedClass::OVERALL.iter().map(|m| merged[m.index()].score.f1).sum::<f64>()
                    / MergedClass::OVERALL.len() as f64
            }
        };
        CategoryScores { images: self.images, per_category, mean_f1: mean, merged, overall, overall_mode: mode }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub category: Category,
    #[serde(flatten)]
    pub score: Score,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergedScore {
    pub class: MergedClass,
    #[serde(flatten)]
    pub score: Score,
}

/// Scores as fractions; the text report shows them as percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryScores {
    pub images: usize,
    pub per_category: Vec<CategoryScore>,
    pub mean_f1: f64,
    pub merged: Vec<MergedScore>,
    pub overall: f64,
    pub overall_mode: OverallMode,
}

impl CategoryScores {
    pub fn f1(&self, c: Category) -> f64 {
        self.per_category[c.id() as usize].score.f1
    }

    pub fn merged_f1(&self, m: MergedClass) -> f64 {
        self.merged[m.index()].score.f1
    }

    /// Two text tables: fine-grained F1 with the foreground mean, and the
    /// merged view with the overall score. Values are percentages.
    pub fn report(&self) -> String {
        let pct = |v: f64| format!("{:.2}", round2(v * 100.0));
        let mut out = String::new();
        let fine_cols: Vec<(String, f64)> = Category::FOREGROUND
            .iter()
            .chain(std::iter::once(&Category::Background))
            .map(|&c| (c.name().to_string(), self.f1(c)))
            .chain(std::iter::once(("mean".to_string(), self.mean_f1)))
            .collect();
        write_table(&mut out, &fine_cols, pct);
        out.push('\n');
        let merged_cols: Vec<(String, f64)> =
            [Category::Skin, Category::Nose, Category::UpperLip, Category::InnerMouth, Category::LowerLip]
                .iter()
                .map(|&c| (c.name().to_string(), self.f1(c)))
                .chain(
                    [MergedClass::Brows, MergedClass::Eyes, MergedClass::Mouth]
                        .iter()
                        .map(|&m| (m.name().to_string(), self.merged_f1(m))),
                )
                .chain(std::iter::once(("overall".to_string(), self.overall)))
                .collect();
        write_table(&mut out, &merged_cols, pct);
        out
    }
}

fn write_table(out: &mut String, cols: &[(String, f64)], fmt: impl Fn(f64) -> String) {
    let cells: Vec<(String, String)> = cols.iter().map(|(n, v)| (n.clone(), fmt(*v))).collect();
    let widths: Vec<usize> = cells.iter().map(|(n, v)| n.len().max(v.len())).collect();
    for ((n, _), w) in cells.iter().zip(&widths) {
        let _ = write!(out, "{n:>w$}  ");
    }
    out.push('\n');
    for ((_, v), w) in cells.iter().zip(&widths) {
        let _ = write!(out, "{v:>w$}  ");
    }
    out.push('\n');
}

/// Merged and fine scores over a stream of `(prediction, ground truth)` pairs.
pub fn merged_scores<'a, I>(pairs: I, mode: OverallMode) -> Result<CategoryScores, MetricsError>
where
    I: IntoIterator<Item = (&'a LabelMap, &'a LabelMap)>,
{
    let mut eval = Evaluator::new();
    for (pred, gt) in pairs {
        eval.add(pred, gt)?;
    }
    Ok(eval.scores(mode))
}
