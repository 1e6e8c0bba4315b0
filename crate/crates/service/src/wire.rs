//! Request and response bodies of the `/v1` API.

use faceparse_core::geometry::Point;
use faceparse_core::metrics::OverallMode;
use faceparse_core::pipeline::PartFit;
use faceparse_core::rle::RleLabelMap;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRequest {
    pub landmarks: Vec<[f64; 2]>,
    #[serde(default)]
    pub visible: Option<Vec<bool>>,
    pub width: u32,
    pub height: u32,
    #[serde(default = "default_schema")]
    pub schema: String,
}

pub fn default_schema() -> String {
    "default".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResponse {
    pub schema: String,
    pub width: u32,
    pub height: u32,
    pub labels: RleLabelMap,
    pub parts: Vec<PartFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSession {
    pub sample_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointMove {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub visible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovePoints {
    pub revision: u64,
    pub moves: Vec<PointMove>,
}

/// Optional body of undo, save and next. When a revision is given it must match.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevisionGuard {
    #[serde(default)]
    pub revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub sample_id: String,
    pub revision: u64,
    pub width: u32,
    pub height: u32,
    pub landmarks: Vec<[f64; 2]>,
    pub visible: Vec<bool>,
    /// Points that differ from the state the sample was opened with.
    pub edited: Vec<bool>,
    pub dirty: bool,
    pub undo_depth: usize,
    /// Set on an undo response when there was nothing left to undo.
    pub history_exhausted: bool,
    /// Older edits were dropped because the history reached its depth limit.
    pub history_truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaveResponse {
    pub session: SessionView,
    /// False when the session had no unsaved edits.
    pub written: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NextResponse {
    pub session: SessionView,
    pub saved: bool,
    /// The session was on the last sample and stays there.
    pub end_of_manifest: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalPair {
    pub pred: RleLabelMap,
    pub gt: RleLabelMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRequest {
    pub pairs: Vec<EvalPair>,
    #[serde(default)]
    pub overall: OverallMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleList {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

pub fn to_pairs(points: &[Point]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.x, p.y]).collect()
}
