//! Category-wise contour fitting.
//!
//! Every part is fitted in a normalized frame: centroid at the origin, the
//! part's principal axis along +x, and the axis half-length scaled to 1. The
//! fitted curve is mapped back with the inverse transform, which makes every
//! fit equivariant under similarity transforms of the input landmarks.

mod contour;
mod nose;
mod parabola;
mod smooth;
mod transform;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

pub use contour::Contour;
pub use nose::fit_nose;
pub use parabola::{fit_parabola, fit_parabola_pair, Parabola, ParabolaPairOptions, DEFAULT_PARABOLA_SAMPLES};
pub(crate) use smooth::smooth_in_frame;
pub use smooth::{fit_polygon_smooth, smooth_chain};
pub use transform::{normalize_part, SimilarityTransform};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("degenerate part: {0}")]
    DegeneratePart(String),
    #[error("ill-conditioned parabola fit (condition estimate {condition:.3e})")]
    IllConditionedFit { condition: f64 },
}

pub(crate) fn degenerate(msg: impl Into<String>) -> FitError {
    FitError::DegeneratePart(msg.into())
}

/// Drops consecutive duplicates (and, for rings, a trailing copy of the first vertex).
pub(crate) fn dedup_consecutive(points: &[Point], ring: bool) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    if ring {
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
    }
    out
}
