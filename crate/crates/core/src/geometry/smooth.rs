//! Interpolating polygon smoothing with centripetal Catmull-Rom segments.

use super::transform::normalize_with_axis;
use super::{dedup_consecutive, degenerate, Contour, FitError, Point};

const ALPHA: f64 = 0.5;

/// Fits a closed contour through `points`, inserting `density - 1` interpolated
/// vertices per segment.
///
/// With `closed` the spline wraps around; otherwise the chain is interpolated
/// as an open curve and closed with a straight edge from last to first point.
/// Input points are emitted verbatim, so `density == 1` is the plain polygon.
pub fn fit_polygon_smooth(points: &[Point], density: u32, closed: bool) -> Result<Contour, FitError> {
    let pts = dedup_consecutive(points, closed);
    if pts.len() < 3 {
        return Err(degenerate(format!("polygon needs 3 distinct points, has {}", pts.len())));
    }
    let first = pts[0];
    let last = pts[pts.len() - 1];
    Contour::new(smooth_in_frame(&pts, density, closed, first, last)?)
}

/// Smooths an open or closed chain, returning the vertex list (no closing vertex).
pub fn smooth_chain(points: &[Point], density: u32, closed: bool) -> Result<Vec<Point>, FitError> {
    let pts = dedup_consecutive(points, closed);
    if pts.len() < 2 {
        return Err(degenerate("chain needs 2 distinct points"));
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    smooth_in_frame(&pts, density, closed, first, last)
}

pub(crate) fn smooth_in_frame(
    pts: &[Point],
    density: u32,
    closed: bool,
    axis_from: Point,
    axis_to: Point,
) -> Result<Vec<Point>, FitError> {
    let density = density.max(1);
    if density == 1 || pts.len() < 2 {
        return Ok(pts.to_vec());
    }
    let (transform, norm) = normalize_with_axis(pts, axis_from, axis_to)?;
    let inverse = transform.inverse();
    let n = norm.len();
    let segments = if closed { n } else { n - 1 };

    let mut out = Vec::with_capacity(segments * density as usize + 1);
    for i in 0..segments {
        let p1 = norm[i];
        let p2 = norm[(i + 1) % n];
        let p0 = if i > 0 || closed { norm[(i + n - 1) % n] } else { p1 * 2.0 - p2 };
        let p3 = if closed || i + 2 < n { norm[(i + 2) % n] } else { p2 * 2.0 - p1 };
        out.push(pts[i]);
        for k in 1..density {
            let u = k as f64 / density as f64;
            out.push(inverse.apply(catmull_rom(p0, p1, p2, p3, u)));
        }
    }
    if !closed {
        out.push(pts[n - 1]);
    }
    Ok(out)
}

fn knot_step(a: Point, b: Point) -> f64 {
    // Guard against collapsed phantom neighbours; equal real neighbours were deduplicated.
    a.dist(b).powf(ALPHA).max(1e-12)
}

/// Barry-Goldman evaluation of the segment p1→p2 at fraction `u` of its knot span.
fn catmull_rom(p0: Point, p1: Point, p2: Point, p3: Point, u: f64) -> Point {
    let t0 = 0.0;
    let t1 = t0 + knot_step(p0, p1);
    let t2 = t1 + knot_step(p1, p2);
    let t3 = t2 + knot_step(p2, p3);
    let t = t1 + u * (t2 - t1);

    let lerp = |a: Point, b: Point, ta: f64, tb: f64| a * ((tb - t) / (tb - ta)) + b * ((t - ta) / (tb - ta));
    let a1 = lerp(p0, p1, t0, t1);
    let a2 = lerp(p1, p2, t1, t2);
    let a3 = lerp(p2, p3, t2, t3);
    let b1 = lerp(a1, a2, t0, t2);
    let b2 = lerp(a2, a3, t1, t3);
    lerp(b1, b2, t1, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimilarityTransform;

    #[test]
    fn square_density_one_is_plain_polygon() {
        let sq = [Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(4.0, 4.0), Point::new(0.0, 4.0)];
        let c = fit_polygon_smooth(&sq, 1, true).unwrap();
        assert_eq!(c.vertices(), &sq);
    }

    #[test]
    fn vertex_count() {
        let sq = [Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(4.0, 4.0), Point::new(0.0, 4.0)];
        assert_eq!(fit_polygon_smooth(&sq, 4, true).unwrap().len(), 16);
        // open chain: 3 segments * 4 + final point
        assert_eq!(smooth_chain(&sq, 4, false).unwrap().len(), 13);
    }

    #[test]
    fn passes_through_inputs() {
        let pts = [
            Point::new(3.0, 1.0),
            Point::new(9.5, 2.0),
            Point::new(12.0, 8.0),
            Point::new(6.0, 11.0),
            Point::new(1.0, 6.0),
        ];
        let c = fit_polygon_smooth(&pts, 5, true).unwrap();
        for p in &pts {
            assert!(c.vertices().contains(p));
        }
    }

    #[test]
    fn circle_is_approximated_better_than_chords() {
        let r = 100.0;
        let pts: Vec<Point> = (0..8)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 8.0;
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let chord_dev = r * (1.0 - (std::f64::consts::PI / 8.0).cos());
        let c = fit_polygon_smooth(&pts, 8, true).unwrap();
        let spline_dev = c.vertices().iter().map(|p| (p.norm() - r).abs()).fold(0.0, f64::max);
        assert!(spline_dev < chord_dev, "{spline_dev} vs {chord_dev}");
    }

    #[test]
    fn equivariant_under_similarity() {
        let pts = [
            Point::new(3.0, 1.0),
            Point::new(9.5, 2.0),
            Point::new(12.0, 8.0),
            Point::new(6.0, 11.0),
            Point::new(1.0, 6.0),
        ];
        let t = SimilarityTransform::new(3.7, 1.1, Point::new(40.0, -12.0));
        let a = fit_polygon_smooth(&t.apply_all(&pts), 4, true).unwrap();
        let b = fit_polygon_smooth(&pts, 4, true).unwrap().transformed(&t);
        for (p, q) in a.vertices().iter().zip(b.vertices()) {
            assert!(p.dist(*q) < 1e-9);
        }
    }

    #[test]
    fn too_few_points() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.0)];
        assert!(fit_polygon_smooth(&pts, 4, true).is_err());
    }
}
