use serde::{Deserialize, Serialize};

use super::{degenerate, FitError, Point};

/// `p ↦ scale · R(rotation) · p + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: f64,
    pub translation: Point,
}

impl SimilarityTransform {
    pub const IDENTITY: SimilarityTransform =
        SimilarityTransform { scale: 1.0, rotation: 0.0, translation: Point::new(0.0, 0.0) };

    pub fn new(scale: f64, rotation: f64, translation: Point) -> SimilarityTransform {
        assert!(scale > 0.0 && scale.is_finite(), "similarity scale must be positive and finite");
        SimilarityTransform { scale, rotation, translation }
    }

    pub fn apply(&self, p: Point) -> Point {
        let (sin, cos) = self.rotation.sin_cos();
        Point::new(
            self.scale * (cos * p.x - sin * p.y) + self.translation.x,
            self.scale * (sin * p.x + cos * p.y) + self.translation.y,
        )
    }

    pub fn apply_all(&self, points: &[Point]) -> Vec<Point> {
        points.iter().map(|&p| self.apply(p)).collect()
    }

    pub fn inverse(&self) -> SimilarityTransform {
        let inv_scale = 1.0 / self.scale;
        let rotation = -self.rotation;
        let (sin, cos) = rotation.sin_cos();
        let t = self.translation;
        SimilarityTransform {
            scale: inv_scale,
            rotation,
            translation: Point::new(-inv_scale * (cos * t.x - sin * t.y), -inv_scale * (sin * t.x + cos * t.y)),
        }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &SimilarityTransform) -> SimilarityTransform {
        SimilarityTransform {
            scale: self.scale * other.scale,
            rotation: self.rotation + other.rotation,
            translation: self.apply(other.translation),
        }
    }
}

/// Maps a part into its standard pose using the first and last point as the principal axis.
pub fn normalize_part(points: &[Point]) -> Result<(SimilarityTransform, Vec<Point>), FitError> {
    if points.is_empty() {
        return Err(degenerate("no points"));
    }
    normalize_with_axis(points, points[0], points[points.len() - 1])
}

/// Centroid to the origin, `from → to` onto +x, axis half-length to 1.
///
/// If the axis endpoints coincide the axis falls back to `from` and the point
/// farthest from it.
pub(crate) fn normalize_with_axis(
    points: &[Point],
    from: Point,
    to: Point,
) -> Result<(SimilarityTransform, Vec<Point>), FitError> {
    if points.len() < 2 {
        return Err(degenerate("fewer than two points"));
    }
    let (mut from, mut to) = (from, to);
    if from == to {
        from = points[0];
        to = points.iter().copied().max_by(|a, b| a.dist(from).total_cmp(&b.dist(from))).unwrap_or(from);
    }
    let axis = to - from;
    let half_len = axis.norm() / 2.0;
    if !(half_len > 0.0) || !half_len.is_finite() {
        return Err(degenerate("all points coincide"));
    }

    let n = points.len() as f64;
    let centroid = points.iter().fold(Point::default(), |acc, &p| acc + p) * (1.0 / n);
    let rotation = -axis.y.atan2(axis.x);
    let scale = 1.0 / half_len;
    let to_origin = SimilarityTransform::new(1.0, 0.0, Point::new(-centroid.x, -centroid.y));
    let align = SimilarityTransform::new(scale, rotation, Point::default());
    let transform = align.compose(&to_origin);
    let normalized = transform.apply_all(points);
    Ok((transform, normalized))
}
