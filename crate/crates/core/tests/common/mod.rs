//! Independent reference implementations shared by the oracle tests and the
//! acceptance runner. They are written as naive loops over pixels and
//! classes so that they share no code paths with the library.

#![allow(dead_code)]

use faceparse_core::geometry::Point;
use faceparse_core::{LabelMap, Mask};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Classic pnpoly crossing test at one point.
pub fn pnpoly(vertices: &[Point], px: f64, py: f64) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (vertices[i], vertices[j]);
        if (vi.y > py) != (vj.y > py) && px < (vj.x - vi.x) * (py - vi.y) / (vj.y - vi.y) + vi.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Tests every pixel center of a `w × h` grid.
pub fn raster_oracle(vertices: &[Point], w: u32, h: u32) -> Vec<bool> {
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            out.push(pnpoly(vertices, x as f64 + 0.5, y as f64 + 0.5));
        }
    }
    out
}

/// Random star-shaped polygon: sorted angles around a center, random radii.
/// Star-shaped with respect to the center, hence simple.
pub fn star_polygon(r: &mut impl Rng, size: f64) -> Vec<Point> {
    let n = r.gen_range(3..=12);
    let cx = r.gen_range(size * 0.2..size * 0.8);
    let cy = r.gen_range(size * 0.2..size * 0.8);
    let mut angles: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    if angles.len() < 3 {
        angles = vec![0.0, 2.1, 4.2];
    }
    angles
        .iter()
        .map(|&a| {
            let rad = r.gen_range(1.0..size * 0.6);
            Point::new(cx + rad * a.cos(), cy + rad * a.sin())
        })
        .collect()
}

pub fn random_labels(r: &mut impl Rng, w: u32, h: u32, classes: u8) -> LabelMap {
    let raw = (0..w * h).map(|_| r.gen_range(0..classes)).collect();
    LabelMap::from_raw(w, h, raw).unwrap()
}

pub fn random_mask(r: &mut impl Rng, w: u32, h: u32, density: f64) -> Mask {
    let bits = (0..w * h).map(|_| r.gen_bool(density)).collect();
    Mask::from_bits(w, h, bits).unwrap()
}

/// Random per-pixel distributions over `channels` classes, pixel-major.
pub fn random_probs(r: &mut impl Rng, pixels: usize, channels: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(pixels * channels);
    for _ in 0..pixels {
        let raw: Vec<f64> = (0..channels).map(|_| r.gen_range(1e-3..1.0)).collect();
        let total: f64 = raw.iter().sum();
        out.extend(raw.iter().map(|v| v / total));
    }
    out
}

/// True when some 4-neighbor of `(x, y)` carries a different label.
pub fn boundary_oracle(labels: &LabelMap, x: u32, y: u32) -> bool {
    let (w, h) = labels.dims();
    let v = labels.get(x, y);
    let (x, y) = (x as i64, y as i64);
    [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|&(dx, dy)| {
        let (nx, ny) = (x + dx, y + dy);
        nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 && labels.get(nx as u32, ny as u32) != v
    })
}

/// Mean cross-entropy by a double loop over rows and columns.
pub fn semantic_oracle(probs: &[f64], channels: usize, labels: &LabelMap, weights: Option<&[f64]>) -> f64 {
    let (w, h) = labels.dims();
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let c = labels.get(x, y) as usize;
            let wi = weights.map_or(1.0, |ws| ws[i]);
            total += wi * -probs[i * channels + c].max(1e-12).ln();
        }
    }
    total / (w * h) as f64
}

/// Binary cross-entropy by a double loop; class-balanced when both classes occur.
pub fn boundary_oracle_loss(probs: &[f64], flags: &[bool], w: u32, h: u32, balance: bool) -> f64 {
    let n = (w * h) as usize;
    let pos = flags.iter().filter(|&&f| f).count();
    let neg = n - pos;
    let (wp, wn) =
        if balance && pos > 0 && neg > 0 { (neg as f64 / n as f64, pos as f64 / n as f64) } else { (1.0, 1.0) };
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let p = probs[i];
            total += if flags[i] { -wp * p.max(1e-12).ln() } else { -wn * (1.0 - p).max(1e-12).ln() };
        }
    }
    total / n as f64
}

/// Per-class F1 counted pixel by pixel.
pub fn f1_oracle(pred: &LabelMap, gt: &LabelMap, class: u8) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    let (w, h) = pred.dims();
    for y in 0..h {
        for x in 0..w {
            let (p, g) = (pred.get(x, y) == class, gt.get(x, y) == class);
            match (p, g) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                _ => {}
            }
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Label each pixel by replaying the layers in order, last writer wins.
pub fn fusion_oracle(skin: Option<&Mask>, parts: &[(u8, Mask)], hair: Option<&Mask>, x: u32, y: u32) -> u8 {
    let mut label = 0;
    if skin.is_some_and(|m| m.get(x, y)) {
        label = 1;
    }
    for (c, m) in parts {
        if m.get(x, y) {
            label = *c;
        }
    }
    if hair.is_some_and(|m| m.get(x, y)) {
        label = 10;
    }
    label
}

pub fn max_dist(a: &[Point], b: &[Point]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(p, q)| p.dist(*q)).fold(0.0, f64::max)
}
