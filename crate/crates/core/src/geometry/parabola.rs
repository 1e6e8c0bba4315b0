//! Least-squares parabola pairs for eyes and the inner mouth.

use serde::{Deserialize, Serialize};

use super::transform::normalize_with_axis;
use super::{degenerate, Contour, FitError, Point, SimilarityTransform};

pub const DEFAULT_PARABOLA_SAMPLES: usize = 16;

/// Normal-equation systems with a 1-norm condition estimate above this are rejected.
const MAX_CONDITION: f64 = 1e12;

/// `y = a·x² + b·x + c` restricted to `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parabola {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Parabola {
    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    /// Sum of squared vertical residuals.
    pub fn residual(&self, points: &[Point]) -> f64 {
        points.iter().map(|p| (p.y - self.eval(p.x)).powi(2)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolaPairOptions {
    /// Samples per arc, corners included.
    pub samples: usize,
}

impl Default for ParabolaPairOptions {
    fn default() -> Self {
        ParabolaPairOptions { samples: DEFAULT_PARABOLA_SAMPLES }
    }
}

/// Ordinary least squares fit of `y(x)`; exact for three points with distinct x.
pub fn fit_parabola(points: &[Point]) -> Result<Parabola, FitError> {
    if points.len() < 3 {
        return Err(degenerate(format!("parabola needs 3 points, has {}", points.len())));
    }
    let (x_min, x_max) =
        points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
    if !(x_min < x_max) {
        return Err(degenerate("arc has no horizontal extent"));
    }

    let mut s = [0.0f64; 5];
    let mut rhs = [0.0f64; 3];
    for p in points {
        let x2 = p.x * p.x;
        s[0] += 1.0;
        s[1] += p.x;
        s[2] += x2;
        s[3] += x2 * p.x;
        s[4] += x2 * x2;
        rhs[0] += x2 * p.y;
        rhs[1] += p.x * p.y;
        rhs[2] += p.y;
    }
    let normal = [[s[4], s[3], s[2]], [s[3], s[2], s[1]], [s[2], s[1], s[0]]];
    let inverse = invert3(&normal).ok_or(FitError::IllConditionedFit { condition: f64::INFINITY })?;
    let condition = norm1(&normal) * norm1(&inverse);
    if !(condition <= MAX_CONDITION) {
        return Err(FitError::IllConditionedFit { condition });
    }
    let solve = |row: &[f64; 3]| row[0] * rhs[0] + row[1] * rhs[1] + row[2] * rhs[2];
    let (mut a, mut b, mut c) = (solve(&inverse[0]), solve(&inverse[1]), solve(&inverse[2]));
    // One step of iterative refinement keeps exact-interpolation cases at machine precision.
    let r = [
        rhs[0] - (normal[0][0] * a + normal[0][1] * b + normal[0][2] * c),
        rhs[1] - (normal[1][0] * a + normal[1][1] * b + normal[1][2] * c),
        rhs[2] - (normal[2][0] * a + normal[2][1] * b + normal[2][2] * c),
    ];
    let corr = |row: &[f64; 3]| row[0] * r[0] + row[1] * r[1] + row[2] * r[2];
    a += corr(&inverse[0]);
    b += corr(&inverse[1]);
    c += corr(&inverse[2]);
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(FitError::IllConditionedFit { condition });
    }
    Ok(Parabola { a, b, c, x_min, x_max })
}

fn norm1(m: &[[f64; 3]; 3]) -> f64 {
    (0..3).map(|j| (0..3).map(|i| m[i][j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Gauss-Jordan inversion with partial pivoting.
fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut a = *m;
    let mut inv = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = norm1(m);
    if !(scale > 0.0) {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= scale * 1e-300 || a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for k in 0..3 {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for row in 0..3 {
            if row != col {
                let f = a[row][col];
                for k in 0..3 {
                    a[row][k] -= f * a[col][k];
                    inv[row][k] -= f * inv[col][k];
                }
            }
        }
    }
    Some(inv)
}

/// Result of fitting two arcs, kept for overlays and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolaPairFit {
    pub contour: Contour,
    pub upper: Parabola,
    pub lower: Parabola,
    /// Image → normalized frame.
    pub transform: SimilarityTransform,
}

/// Fits one parabola per arc in the part's normalized frame and joins them at the corners.
///
/// The principal axis runs from the first to the last point of `upper`. The
/// lower arc may be listed in either direction.
pub fn fit_parabola_pair(upper: &[Point], lower: &[Point], options: ParabolaPairOptions) -> Result<Contour, FitError> {
    fit_parabola_pair_detailed(upper, lower, options).map(|f| f.contour)
}

pub fn fit_parabola_pair_detailed(
    upper: &[Point],
    lower: &[Point],
    options: ParabolaPairOptions,
) -> Result<ParabolaPairFit, FitError> {
    if upper.len() < 3 || lower.len() < 3 {
        return Err(degenerate("each arc needs at least 3 points"));
    }
    let mut lower = lower.to_vec();
    let (u0, u1) = (upper[0], upper[upper.len() - 1]);
    if lower[0].dist(u1) + lower[lower.len() - 1].dist(u0) < lower[0].dist(u0) + lower[lower.len() - 1].dist(u1) {
        lower.reverse();
    }

    let all: Vec<Point> = upper.iter().chain(lower.iter()).copied().collect();
    let (transform, norm) = normalize_with_axis(&all, u0, u1)?;
    let (nu, nl) = norm.split_at(upper.len());
    let upper_fit = fit_parabola(nu)?;
    let lower_fit = fit_parabola(nl)?;

    let left = (nu[0] + nl[0]) * 0.5;
    let right = (nu[nu.len() - 1] + nl[nl.len() - 1]) * 0.5;
    if !(left.x < right.x) {
        return Err(degenerate("arc corners do not span the principal axis"));
    }
    let samples = options.samples.max(2);
    let xs: Vec<f64> = (0..samples).map(|k| left.x + (right.x - left.x) * k as f64 / (samples - 1) as f64).collect();

    let mut ring = Vec::with_capacity(2 * samples);
    ring.push(left);
    ring.extend(xs[1..samples - 1].iter().map(|&x| Point::new(x, upper_fit.eval(x))));
    ring.push(right);
    ring.extend(xs[1..samples - 1].iter().rev().map(|&x| Point::new(x, lower_fit.eval(x))));

    let inverse = transform.inverse();
    let contour = Contour::new(inverse.apply_all(&ring))?;
    Ok(ParabolaPairFit {
        contour,
        upper: Parabola { x_min: left.x, x_max: right.x, ..upper_fit },
        lower: Parabola { x_min: left.x, x_max: right.x, ..lower_fit },
        transform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn three_points_on_unit_parabola() {
        let p = fit_parabola(&pts(&[(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)])).unwrap();
        assert!((p.a - 1.0).abs() < 1e-9 && p.b.abs() < 1e-9 && p.c.abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn least_squares_not_worse_than_line() {
        let arc = pts(&[(-2.0, 3.1), (-1.0, 0.9), (0.0, 0.2), (0.5, 0.1), (1.0, 1.2), (2.0, 3.9)]);
        let p = fit_parabola(&arc).unwrap();
        // best straight line through the same points
        let n = arc.len() as f64;
        let (sx, sy) = arc.iter().fold((0.0, 0.0), |(a, b), q| (a + q.x, b + q.y));
        let (sxx, sxy) = arc.iter().fold((0.0, 0.0), |(a, b), q| (a + q.x * q.x, b + q.x * q.y));
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let icpt = (sy - slope * sx) / n;
        let line_res: f64 = arc.iter().map(|q| (q.y - slope * q.x - icpt).powi(2)).sum();
        assert!(p.residual(&arc) <= line_res + 1e-12);
    }

    #[test]
    fn repeated_abscissa_is_ill_conditioned() {
        let arc = pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert!(matches!(fit_parabola(&arc), Err(FitError::IllConditionedFit { .. })));
    }

    #[test]
    fn lens_contour_is_symmetric() {
        let upper = pts(&[(-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)]);
        let lower = pts(&[(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        let fit = fit_parabola_pair_detailed(&upper, &lower, ParabolaPairOptions::default()).unwrap();
        assert_eq!(fit.contour.len(), 2 * DEFAULT_PARABOLA_SAMPLES - 2);
        for v in fit.contour.vertices() {
            let mirrored = Point::new(v.x, -v.y);
            assert!(fit.contour.vertices().iter().any(|w| w.dist(mirrored) < 1e-12));
        }
        // polygon area converges to 8/3 from below
        let area = fit.contour.area();
        assert!(area < 8.0 / 3.0 && area > 8.0 / 3.0 * 0.98, "{area}");
    }

    #[test]
    fn lower_arc_direction_does_not_matter() {
        let upper = pts(&[(10.0, 10.0), (15.0, 7.0), (20.0, 10.0)]);
        let lower = pts(&[(10.0, 10.0), (15.0, 12.0), (20.0, 10.0)]);
        let rev: Vec<Point> = lower.iter().rev().copied().collect();
        let a = fit_parabola_pair(&upper, &lower, ParabolaPairOptions::default()).unwrap();
        let b = fit_parabola_pair(&upper, &rev, ParabolaPairOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn collinear_arcs_collapse() {
        let upper = pts(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let lower = pts(&[(-1.0, 0.0), (0.5, 0.0), (1.0, 0.0)]);
        let fit = fit_parabola_pair_detailed(&upper, &lower, ParabolaPairOptions::default()).unwrap();
        assert!(fit.upper.a.abs() < 1e-12 && fit.lower.a.abs() < 1e-12);
        assert!(fit.contour.area() < 1e-12);
    }
}
