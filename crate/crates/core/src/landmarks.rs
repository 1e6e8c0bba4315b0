//! 106-point landmark sets and their text format.
//!
//! The text format is one header line with the point count followed by one
//! `x y` line per point, in landmark order:
//!
//! ```text
//! 106
//! 112.5 87.25
//! 113.0 91.75
//! ...
//! ```
//!
//! A line may carry an optional third token `0` marking the point invisible
//! (occluded). Points are visible otherwise, and the writer only emits the
//! token for invisible points, so files without it round-trip unchanged.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// Number of landmarks in the dense convention used throughout the crate.
pub const NUM_LANDMARKS: usize = 106;

/// Coordinates must stay strictly inside this magnitude.
pub const COORD_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LandmarkError {
    #[error("expected {expected} points, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("point {index} has invalid coordinates ({x}, {y})")]
    InvalidCoordinate { index: usize, x: f64, y: f64 },
    #[error("visibility list has {found} entries, expected {expected}")]
    VisibilityMismatch { expected: usize, found: usize },
}

/// An ordered set of 106 facial landmarks in pixel coordinates.
///
/// Points may lie outside the image (profile faces) but must be finite and
/// within `COORD_LIMIT`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkSet {
    points: Vec<Point>,
    visible: Vec<bool>,
    frame: Option<(u32, u32)>,
}

impl LandmarkSet {
    pub fn new(points: Vec<Point>) -> Result<LandmarkSet, LandmarkError> {
        let n = points.len();
        LandmarkSet::with_visibility(points, vec![true; n])
    }

    pub fn with_visibility(points: Vec<Point>, visible: Vec<bool>) -> Result<LandmarkSet, LandmarkError> {
        if points.len() != NUM_LANDMARKS {
            return Err(LandmarkError::CountMismatch { expected: NUM_LANDMARKS, found: points.len() });
        }
        if visible.len() != points.len() {
            return Err(LandmarkError::VisibilityMismatch { expected: points.len(), found: visible.len() });
        }
        for (index, p) in points.iter().enumerate() {
            if !valid_coord(p.x) || !valid_coord(p.y) {
                return Err(LandmarkError::InvalidCoordinate { index, x: p.x, y: p.y });
            }
        }
        Ok(LandmarkSet { points, visible, frame: None })
    }

    /// Anchors the set to an image of the given size.
    pub fn in_frame(mut self, width: u32, height: u32) -> LandmarkSet {
        self.frame = Some((width, height));
        self
    }

    pub fn frame(&self) -> Option<(u32, u32)> {
        self.frame
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point {
        self.points[index]
    }

    pub fn is_visible(&self, index: usize) -> bool {
        self.visible[index]
    }

    pub fn visibility(&self) -> &[bool] {
        &self.visible
    }

    /// Replaces one point, returning the previous value.
    pub fn set_point(&mut self, index: usize, p: Point) -> Result<Point, LandmarkError> {
        if index >= self.points.len() {
            return Err(LandmarkError::CountMismatch { expected: NUM_LANDMARKS, found: index + 1 });
        }
        if !valid_coord(p.x) || !valid_coord(p.y) {
            return Err(LandmarkError::InvalidCoordinate { index, x: p.x, y: p.y });
        }
        Ok(std::mem::replace(&mut self.points[index], p))
    }

    pub fn set_visible(&mut self, index: usize, visible: bool) {
        self.visible[index] = visible;
    }

    /// Parses the landmark text format.
    pub fn parse(text: &str) -> Result<LandmarkSet, LandmarkError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (header_no, header) =
            lines.next().ok_or(LandmarkError::CountMismatch { expected: NUM_LANDMARKS, found: 0 })?;
        let declared: usize = header.trim().parse().map_err(|_| LandmarkError::MalformedLine {
            line: header_no + 1,
            reason: format!("point count {:?} is not an integer", header.trim()),
        })?;
        if declared != NUM_LANDMARKS {
            return Err(LandmarkError::CountMismatch { expected: NUM_LANDMARKS, found: declared });
        }

        let mut points = Vec::with_capacity(NUM_LANDMARKS);
        let mut visible = Vec::with_capacity(NUM_LANDMARKS);
        for (line_no, line) in lines {
            let line_no = line_no + 1;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 && tokens.len() != 3 {
                return Err(LandmarkError::MalformedLine {
                    line: line_no,
                    reason: format!("expected \"x y\", found {} tokens", tokens.len()),
                });
            }
            let x = parse_coord(tokens[0], line_no)?;
            let y = parse_coord(tokens[1], line_no)?;
            let vis = match tokens.get(2) {
                None | Some(&"1") => true,
                Some(&"0") => false,
                Some(other) => {
                    return Err(LandmarkError::MalformedLine {
                        line: line_no,
                        reason: format!("visibility flag {other:?} is not 0 or 1"),
                    })
                }
            };
            points.push(Point::new(x, y));
            visible.push(vis);
        }
        if points.len() != declared {
            return Err(LandmarkError::CountMismatch { expected: declared, found: points.len() });
        }
        LandmarkSet::with_visibility(points, visible)
    }

    pub fn parse_bytes(bytes: &[u8]) -> Result<LandmarkSet, LandmarkError> {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| LandmarkError::MalformedLine { line: 0, reason: format!("not UTF-8: {e}") })?;
        LandmarkSet::parse(text)
    }

    /// Writes the canonical text form. `parse(to_text(s)) == s` for every valid set
    /// (frame excluded, it is not part of the file).
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 24);
        let _ = writeln!(out, "{}", self.points.len());
        for (p, vis) in self.points.iter().zip(&self.visible) {
            out.push_str(&format_coord(p.x));
            out.push(' ');
            out.push_str(&format_coord(p.y));
            if !vis {
                out.push_str(" 0");
            }
            out.push('\n');
        }
        out
    }
}

fn valid_coord(v: f64) -> bool {
    v.is_finite() && v.abs() < COORD_LIMIT
}

fn parse_coord(token: &str, line: usize) -> Result<f64, LandmarkError> {
    let v: f64 = token
        .parse()
        .map_err(|_| LandmarkError::MalformedLine { line, reason: format!("{token:?} is not a decimal number") })?;
    if !v.is_finite() {
        return Err(LandmarkError::MalformedLine { line, reason: format!("{token:?} is not finite") });
    }
    Ok(v)
}

/// Shortest decimal that parses back to the same `f64`, always with a fractional part.
pub fn format_coord(v: f64) -> String {
    // Display never uses exponent notation and round-trips exactly.
    let mut s = format!("{v}");
    if !s.contains('.') {
        s.push_str(".0");
    }
    s
}
