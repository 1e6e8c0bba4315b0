//! Regenerates the bundled six-sample fixture dataset.
//!
//! ```text
//! cargo run -p faceparse-core --example make_fixture -- crates/core/tests/fixtures/dataset
//! ```
//!
//! Golden label maps are produced separately by the golden-file test with
//! `UPDATE_GOLDEN=1`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use faceparse_core::dataset::write_atomic;
use faceparse_core::synth::{synthetic_face, FacePose};
use faceparse_core::{LandmarkSet, Mask, Point, SimilarityTransform};
use image::{GrayImage, Luma};

const SIZE: u32 = 128;

struct Sample {
    id: &'static str,
    pose: FacePose,
    bangs: bool,
    hide_right_nose: bool,
}

fn pose(cx: f64, cy: f64, scale: f64, rotation_deg: f64, jitter: f64, seed: u64) -> FacePose {
    FacePose { center: Point::new(cx, cy), scale, rotation: rotation_deg * PI / 180.0, jitter, seed }
}

fn samples() -> Vec<Sample> {
    vec![
        Sample { id: "face_000", pose: pose(64.0, 66.0, 40.0, 0.0, 0.0, 1), bangs: false, hide_right_nose: false },
        Sample { id: "face_001", pose: pose(62.0, 64.0, 36.0, 8.0, 0.8, 2), bangs: false, hide_right_nose: false },
        Sample { id: "face_002", pose: pose(66.0, 68.0, 42.0, -6.0, 0.6, 3), bangs: true, hide_right_nose: false },
        Sample { id: "face_003", pose: pose(64.0, 60.0, 30.0, 3.0, 1.0, 4), bangs: false, hide_right_nose: false },
        Sample { id: "face_004", pose: pose(96.0, 70.0, 44.0, 0.0, 0.5, 5), bangs: false, hide_right_nose: false },
        Sample { id: "face_005", pose: pose(60.0, 66.0, 38.0, 15.0, 0.7, 6), bangs: false, hide_right_nose: true },
    ]
}

/// Face-frame predicate rendered into an image-space mask.
fn face_mask(pose: &FacePose, inside: impl Fn(Point) -> bool) -> Mask {
    let to_face = SimilarityTransform::new(pose.scale, pose.rotation, pose.center).inverse();
    Mask::from_fn(SIZE, SIZE, |x, y| inside(to_face.apply(Point::new(x as f64 + 0.5, y as f64 + 0.5))))
}

fn skin(p: Point) -> bool {
    p.x * p.x + ((p.y - 0.05) / 1.15).powi(2) <= 1.0
}

fn hair(p: Point, bangs: bool) -> bool {
    let outer = (p.x / 1.25).powi(2) + ((p.y - 0.05) / 1.4).powi(2) <= 1.0;
    let crown = p.y < -0.75;
    let sides = p.x.abs() > 0.93 && p.y < 0.3;
    let fringe = bangs && p.x < -0.05 && p.y < -0.2 + 0.15 * (p.x + 1.0);
    outer && (crown || sides || fringe)
}

fn write_png(path: &Path, img: &GrayImage) {
    let mut buf = std::io::Cursor::new(Vec::new());
    img.write_to(&mut buf, image::ImageFormat::Png).expect("encode png");
    write_atomic(path, buf.get_ref()).expect("write png");
}

fn main() {
    let root: PathBuf = std::env::args().nth(1).expect("usage: make_fixture <dataset-dir>").into();
    let masks = root.join("masks");
    for s in samples() {
        let mut lm: LandmarkSet = synthetic_face(&s.pose);
        if s.hide_right_nose {
            for i in 57..=60 {
                lm.set_visible(i, false);
            }
        }
        write_atomic(&root.join("landmarks").join(format!("{}.txt", s.id)), lm.to_text().as_bytes()).unwrap();

        let img = GrayImage::from_fn(SIZE, SIZE, |x, y| Luma([((x + 2 * y) % 256) as u8]));
        write_png(&root.join("images").join(format!("{}.png", s.id)), &img);
        write_png(&masks.join("skin").join(format!("{}.png", s.id)), &face_mask(&s.pose, skin).to_image());
        write_png(
            &masks.join("hair").join(format!("{}.png", s.id)),
            &face_mask(&s.pose, |p| hair(p, s.bangs)).to_image(),
        );
    }
    let ids: Vec<&str> = samples().iter().map(|s| s.id).collect();
    write_atomic(&root.join("train.txt"), format!("{}\n", ids[..4].join("\n")).as_bytes()).unwrap();
    write_atomic(&root.join("val.txt"), format!("{}\n", ids[4]).as_bytes()).unwrap();
    write_atomic(&root.join("test.txt"), format!("{}\n", ids[5]).as_bytes()).unwrap();
    println!("wrote {} samples to {}", ids.len(), root.display());
}
