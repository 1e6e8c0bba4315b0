//! Synthetic frontal-face landmark sets laid out per the default 106-point schema.
//!
//! Used for demos, fixtures and property tests. The face lives in a unit frame
//! (roughly x in [-1, 1], y in [-0.8, 1.1], y pointing down) and is placed into
//! the image with a similarity transform plus optional per-point jitter.

use std::f64::consts::PI;

use crate::geometry::{Point, SimilarityTransform};
use crate::landmarks::{LandmarkSet, NUM_LANDMARKS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacePose {
    pub center: Point,
    /// Pixels per face unit.
    pub scale: f64,
    pub rotation: f64,
    /// Maximum per-coordinate jitter in pixels.
    pub jitter: f64,
    pub seed: u64,
}

impl FacePose {
    pub fn centered(width: u32, height: u32) -> FacePose {
        FacePose {
            center: Point::new(width as f64 / 2.0, height as f64 / 2.0),
            scale: width.min(height) as f64 * 0.32,
            rotation: 0.0,
            jitter: 0.0,
            seed: 0,
        }
    }
}

/// splitmix64; enough for reproducible jitter without pulling in an RNG crate.
struct Jitter(u64);

impl Jitter {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

fn lerp(a: f64, b: f64, u: f64) -> f64 {
    a + (b - a) * u
}

/// The 106 canonical points in the unit face frame.
pub fn canonical_face() -> Vec<Point> {
    let mut p = vec![Point::default(); NUM_LANDMARKS];

    // jawline, left temple → chin → right temple
    for (k, slot) in p.iter_mut().enumerate().take(33) {
        let t = PI - k as f64 * PI / 32.0;
        *slot = Point::new(t.cos(), -0.1 + 1.2 * t.sin());
    }

    // eyebrows: upper arc outer → inner, lower arc inner → outer
    for (base, side) in [(33usize, -1.0), (42usize, 1.0)] {
        let (outer, inner, y0) = (0.75 * side, 0.15 * side, -0.45);
        for k in 0..5 {
            let u = k as f64 / 4.0;
            p[base + k] = Point::new(lerp(outer, inner, u), y0 - 0.12 * (PI * u).sin());
        }
        for k in 0..4 {
            let u = 0.8 - 0.2 * k as f64;
            p[base + 5 + k] = Point::new(lerp(outer, inner, u), y0 - 0.12 * (PI * u).sin() + 0.07);
        }
    }

    // nose: bridge top, base, then left and right sides top → bottom
    p[51] = Point::new(0.0, -0.3);
    p[52] = Point::new(0.0, 0.35);
    let side = [(-0.06, -0.1), (-0.12, 0.12), (-0.2, 0.28), (-0.1, 0.36)];
    for (k, &(x, y)) in side.iter().enumerate() {
        p[53 + k] = Point::new(x, y);
        p[57 + k] = Point::new(-x, y);
    }

    // eyes: corners, upper lid, lower lid, pupil
    for (base, s) in [(61usize, -1.0), (70usize, 1.0)] {
        let (outer, inner, y0) = (0.62 * s, 0.25 * s, -0.2);
        p[base] = Point::new(outer, y0);
        p[base + 4] = Point::new(inner, y0);
        for k in 0..3 {
            let u = 0.25 * (k + 1) as f64;
            let x = lerp(outer, inner, u);
            p[base + 1 + k] = Point::new(x, y0 - 0.09 * (PI * u).sin());
            p[base + 5 + k] = Point::new(x, y0 + 0.06 * (PI * u).sin());
        }
        p[base + 8] = Point::new(lerp(outer, inner, 0.5), y0);
    }

    // outer lip line
    p[79] = Point::new(-0.4, 0.62);
    p[85] = Point::new(0.4, 0.62);
    for k in 0..5 {
        let u = (k + 1) as f64 / 6.0;
        let x = lerp(-0.4, 0.4, u);
        let bow = if k == 2 { 0.03 } else { 0.0 };
        p[80 + k] = Point::new(x, 0.62 - 0.12 * (PI * u).sin() + bow);
        p[86 + k] = Point::new(x, 0.62 + 0.16 * (PI * u).sin());
    }

    // inner lip line
    p[91] = Point::new(-0.3, 0.64);
    p[95] = Point::new(0.3, 0.64);
    for k in 0..3 {
        let u = 0.25 * (k + 1) as f64;
        let x = lerp(-0.3, 0.3, u);
        p[92 + k] = Point::new(x, 0.64 - 0.03 * (PI * u).sin());
        p[96 + k] = Point::new(x, 0.64 + 0.05 * (PI * u).sin());
    }

    // forehead guides
    for k in 0..7 {
        p[99 + k] = Point::new(lerp(-0.6, 0.6, k as f64 / 6.0), -0.8);
    }
    p
}

/// Places the canonical face into an image.
pub fn synthetic_face(pose: &FacePose) -> LandmarkSet {
    let t = SimilarityTransform::new(pose.scale, pose.rotation, pose.center);
    let mut rng = Jitter(pose.seed);
    let points = canonical_face()
        .into_iter()
        .map(|q| {
            let p = t.apply(q);
            let j = Point::new(rng.next_unit(), rng.next_unit()) * pose.jitter;
            let p = p + j;
            // quarter-pixel grid keeps fixture files short and exact
            Point::new((p.x * 4.0).round() / 4.0, (p.y * 4.0).round() / 4.0)
        })
        .collect();
    LandmarkSet::new(points).expect("synthetic face has 106 finite points")
}
