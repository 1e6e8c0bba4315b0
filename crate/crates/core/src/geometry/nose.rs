//! Piecewise nose fitting: the two halves are interpolated separately so a
//! profile face can drop the occluded side.

use super::smooth::smooth_in_frame;
use super::{dedup_consecutive, degenerate, fit_polygon_smooth, Contour, FitError, Point};

/// Fits the nose from a left and a right chain of landmark indices.
///
/// Both chains run from the bridge top down to the base. The left chain is
/// emitted top to bottom, the right one bottom to top, so the closed contour
/// crosses the bridge axis at the shared endpoints. A half whose own points
/// (those not shared with the other half) are all invisible is dropped and the
/// contour is the straight-closed fit of the remaining half.
pub fn fit_nose(
    points: &[Point],
    visible: &[bool],
    left: &[usize],
    right: &[usize],
    density: u32,
) -> Result<Contour, FitError> {
    if left.len() < 2 || right.len() < 2 {
        return Err(degenerate("each nose half needs at least 2 points"));
    }
    let gather = |idx: &[usize]| -> Vec<Point> { idx.iter().map(|&i| points[i]).collect() };
    let half_visible = |own: &[usize], other: &[usize]| {
        let exclusive: Vec<usize> = own.iter().copied().filter(|i| !other.contains(i)).collect();
        let pool = if exclusive.is_empty() { own.to_vec() } else { exclusive };
        pool.iter().any(|&i| visible.get(i).copied().unwrap_or(true))
    };

    let left_pts = gather(left);
    let right_pts = gather(right);
    match (half_visible(left, right), half_visible(right, left)) {
        (false, false) => Err(degenerate("both nose halves are invisible")),
        (true, false) => fit_polygon_smooth(&left_pts, density, false),
        (false, true) => fit_polygon_smooth(&right_pts, density, false),
        (true, true) => {
            let left_pts = dedup_consecutive(&left_pts, false);
            let right_pts = dedup_consecutive(&right_pts, false);
            if left_pts.len() < 2 || right_pts.len() < 2 {
                return Err(degenerate("nose half collapses to a point"));
            }
            let from = left_pts[0];
            let to = left_pts[left_pts.len() - 1];
            let left_chain = smooth_in_frame(&left_pts, density, false, from, to)?;
            let mut right_chain = smooth_in_frame(&right_pts, density, false, from, to)?;
            right_chain.reverse();
            let mut ring = left_chain;
            ring.extend(right_chain);
            Contour::new(ring)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // bridge top (0), left side 1..=3, base (4), right side 5..=7
    fn nose_points(mirror_right: bool) -> Vec<Point> {
        let left = [Point::new(-3.0, 8.0), Point::new(-9.0, 22.0), Point::new(-5.0, 27.0)];
        let mut pts = vec![Point::new(0.0, 0.0)];
        pts.extend(left);
        pts.push(Point::new(0.0, 30.0));
        for p in left {
            pts.push(if mirror_right { Point::new(-p.x, p.y) } else { Point::new(-p.x + 1.5, p.y - 2.0) });
        }
        pts
    }

    const LEFT: [usize; 5] = [0, 1, 2, 3, 4];
    const RIGHT: [usize; 5] = [0, 5, 6, 7, 4];

    #[test]
    fn mirrored_halves_give_symmetric_contour() {
        let pts = nose_points(true);
        let c = fit_nose(&pts, &[true; 8], &LEFT, &RIGHT, 4).unwrap();
        for v in c.vertices() {
            let m = Point::new(-v.x, v.y);
            let best = c.vertices().iter().map(|w| w.dist(m)).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "{v:?}");
        }
    }

    #[test]
    fn invisible_right_half_uses_left_alone() {
        let pts = nose_points(false);
        let mut vis = [true; 8];
        vis[5] = false;
        vis[6] = false;
        vis[7] = false;
        let c = fit_nose(&pts, &vis, &LEFT, &RIGHT, 4).unwrap();
        let left: Vec<Point> = LEFT.iter().map(|&i| pts[i]).collect();
        assert_eq!(c, fit_polygon_smooth(&left, 4, false).unwrap());
    }

    #[test]
    fn all_visible_points_are_vertices() {
        let pts = nose_points(false);
        let c = fit_nose(&pts, &[true; 8], &LEFT, &RIGHT, 3).unwrap();
        for p in &pts {
            assert!(c.vertices().contains(p), "{p:?} missing");
        }
    }

    #[test]
    fn both_halves_invisible() {
        let pts = nose_points(false);
        let vis = [true, false, false, false, true, false, false, false];
        assert!(fit_nose(&pts, &vis, &LEFT, &RIGHT, 4).is_err());
    }
}
