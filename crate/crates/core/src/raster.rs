//! Even-odd scanline fill with pixel-center sampling.

use crate::geometry::{Contour, Point};
use crate::labelmap::Mask;

/// Sets every pixel whose center `(x + 0.5, y + 0.5)` lies inside `contour`
/// under the even-odd rule. Parts of the contour outside the image are clipped.
pub fn rasterize(contour: &Contour, width: u32, height: u32) -> Mask {
    rasterize_points(contour.vertices(), width, height)
}

/// Same as [`rasterize`] for a raw vertex ring (implicitly closed).
pub fn rasterize_points(vertices: &[Point], width: u32, height: u32) -> Mask {
    let mut mask = Mask::new(width, height);
    let n = vertices.len();
    if n < 3 || width == 0 || height == 0 {
        return mask;
    }
    let (y_lo, y_hi) =
        vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
    let row_start = (y_lo - 0.5).floor().max(0.0).min(height as f64) as u32;
    let row_end = ((y_hi - 0.5).ceil() + 1.0).max(0.0).min(height as f64) as u32;

    let mut crossings: Vec<f64> = Vec::with_capacity(16);
    for row in row_start..row_end {
        let py = row as f64 + 0.5;
        crossings.clear();
        let mut j = n - 1;
        for i in 0..n {
            let (vi, vj) = (vertices[i], vertices[j]);
            if (vi.y > py) != (vj.y > py) {
                crossings.push((vj.x - vi.x) * (py - vi.y) / (vj.y - vi.y) + vi.x);
            }
            j = i;
        }
        crossings.sort_by(f64::total_cmp);
        for span in crossings.chunks_exact(2) {
            fill_span(&mut mask, row, span[0], span[1], width);
        }
    }
    mask
}

/// Sets pixels with `start <= x + 0.5 < end`.
fn fill_span(mask: &mut Mask, row: u32, start: f64, end: f64, width: u32) {
    let w = width as f64;
    let mut x = (start - 0.5).floor().clamp(0.0, w) as u32;
    while x < width && (x as f64 + 0.5) < start {
        x += 1;
    }
    while x < width && (x as f64 + 0.5) < end {
        mask.set(x, row, true);
        x += 1;
    }
}
