//! Acceptance runner. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! ```text
//! cargo test -p faceparse-core --test acceptance
//! ```

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use faceparse_core::dataset::{annotate_dataset, scan_dataset, AnnotateOptions, MaskSource};
use faceparse_core::geometry::{fit_parabola, fit_polygon_smooth, normalize_part, Point};
use faceparse_core::loss::{
    boundary_loss, fusion_loss, fusion_terms, semantic_loss, semantic_terms, total_loss, LossWeights, ProbMap,
};
use faceparse_core::metrics::{mean_f1, round2, ConfusionCounts};
use faceparse_core::synth::{synthetic_face, FacePose};
use faceparse_core::{
    extract_boundary, fuse, make_weight_map, rasterize, Annotator, Category, Contour, LabelMap, LandmarkSet, Mask,
    SimilarityTransform,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn aggregation() -> Outcome {
    let rows: [(&str, [f64; 10], f64); 3] = [
        ("Model C", [95.32, 96.54, 84.34, 84.27, 84.86, 85.17, 94.66, 82.45, 85.63, 82.31], 87.55),
        ("Model B", [95.30, 96.27, 83.32, 82.82, 82.45, 82.72, 94.43, 81.25, 84.73, 81.24], 86.45),
        ("Model A", [94.86, 95.95, 81.79, 81.61, 81.50, 81.69, 93.79, 80.10, 84.10, 80.45], 85.58),
    ];
    let mut got = Vec::new();
    for (name, row, expected) in rows {
        let m = round2(mean_f1(&row).map_err(|e| e.to_string())?);
        ensure(m == expected, || format!("{name}: mean {m} != {expected}"))?;
        got.push(format!("{m}"));
    }
    Ok(got.join(", "))
}

fn loss_identities() -> Outcome {
    let mut r = common::rng(11);
    let ln11 = 11f64.ln();
    for _ in 0..20 {
        let (w, h) = (r.gen_range(1..20), r.gen_range(1..20));
        let y = common::random_labels(&mut r, w, h, 11);
        let s = semantic_loss(&ProbMap::uniform(w, h, 11), &y).map_err(|e| e.to_string())?;
        ensure((s - ln11).abs() <= 1e-9, || format!("uniform semantic loss {s} vs ln 11 {ln11}"))?;
    }

    for _ in 0..100 {
        let (w, h) = (r.gen_range(1..24), r.gen_range(1..24));
        let y = common::random_labels(&mut r, w, h, 11);
        let p = ProbMap::new(w, h, 11, common::random_probs(&mut r, (w * h) as usize, 11)).unwrap();
        let s = semantic_loss(&p, &y).unwrap();
        let f = fusion_loss(&p, &y, &faceparse_core::WeightMap::uniform(w, h)).unwrap();
        ensure((s - f).abs() <= 1e-12, || format!("unit-weight fusion {f} vs semantic {s}"))?;
    }

    for _ in 0..1000 {
        let l: [f64; 6] = std::array::from_fn(|_| r.gen_range(0.0..10.0));
        let (a, b) = (r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let wts = LossWeights::new(r.gen_range(0.0..4.0), r.gen_range(0.0..4.0), r.gen_range(0.0..4.0)).unwrap();
        let lhs = total_loss(a * l[0] + b * l[3], a * l[1] + b * l[4], a * l[2] + b * l[5], &wts);
        let rhs = a * total_loss(l[0], l[1], l[2], &wts) + b * total_loss(l[3], l[4], l[5], &wts);
        ensure((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), || format!("linearity: {lhs} vs {rhs}"))?;
    }

    let mut checked = 0;
    for _ in 0..50 {
        let (w, h) = (r.gen_range(2..16), r.gen_range(2..16));
        let y = common::random_labels(&mut r, w, h, 3);
        let p = ProbMap::new(w, h, 11, common::random_probs(&mut r, (w * h) as usize, 11)).unwrap();
        let boundary = extract_boundary(&y);
        let weights = make_weight_map(&boundary, 200.0).unwrap();
        let base = semantic_terms(&p, &y).unwrap();
        let weighted = fusion_terms(&p, &y, &weights).unwrap();
        for (i, &on) in boundary.flags().iter().enumerate() {
            if on {
                ensure(weighted[i] == 201.0 * base[i], || format!("pixel {i}: {} != 201 x {}", weighted[i], base[i]))?;
                checked += 1;
            } else {
                ensure(weighted[i] == base[i], || format!("non-boundary pixel {i} reweighted"))?;
            }
        }
    }
    Ok(format!("ln 11, 100 unit-weight instances, 1000 linearity draws, {checked} boundary pixels at 201x"))
}

fn oracle_equivalence() -> Outcome {
    let mut r = common::rng(23);
    for t in 0..600 {
        let poly = common::star_polygon(&mut r, 32.0);
        let contour = Contour::new(poly.clone()).map_err(|e| e.to_string())?;
        let mask = rasterize(&contour, 32, 32);
        ensure(mask.bits() == common::raster_oracle(&poly, 32, 32).as_slice(), || format!("polygon {t}: {poly:?}"))?;
    }

    for t in 0..150 {
        let (w, h) = (r.gen_range(1..20), r.gen_range(1..20));
        let y = common::random_labels(&mut r, w, h, 11);
        let probs = common::random_probs(&mut r, (w * h) as usize, 11);
        let p = ProbMap::new(w, h, 11, probs.clone()).unwrap();
        let s = semantic_loss(&p, &y).unwrap();
        let s_ref = common::semantic_oracle(&probs, 11, &y, None);
        ensure((s - s_ref).abs() <= 1e-12, || format!("semantic {t}: {s} vs {s_ref}"))?;

        let alpha = r.gen_range(0.0..300.0);
        let weights = make_weight_map(&extract_boundary(&y), alpha).unwrap();
        let f = fusion_loss(&p, &y, &weights).unwrap();
        let f_ref = common::semantic_oracle(&probs, 11, &y, Some(weights.weights()));
        ensure((f - f_ref).abs() <= 1e-12 * (1.0 + f_ref), || format!("fusion {t}: {f} vs {f_ref}"))?;

        let edges = extract_boundary(&y);
        let bp: Vec<f64> = (0..w * h).map(|_| r.gen_range(0.0..1.0)).collect();
        let pb = ProbMap::boundary(w, h, bp.clone()).unwrap();
        for balance in [false, true] {
            let b = boundary_loss(&pb, &edges, balance).unwrap();
            let b_ref = common::boundary_oracle_loss(&bp, edges.flags(), w, h, balance);
            ensure((b - b_ref).abs() <= 1e-12, || format!("boundary {t} balance={balance}: {b} vs {b_ref}"))?;
        }
    }

    for t in 0..150 {
        let pred = common::random_labels(&mut r, 8, 8, 11);
        let gt = common::random_labels(&mut r, 8, 8, 11);
        let mut counts = ConfusionCounts::fine();
        counts.accumulate(&pred, &gt).unwrap();
        for c in Category::ALL {
            let got = faceparse_core::metrics::f1(&counts, c);
            let want = common::f1_oracle(&pred, &gt, c.id());
            ensure((got - want).abs() <= 1e-12, || format!("pair {t} {c}: f1 {got} vs {want}"))?;
        }
    }
    Ok("600 polygons bit-exact, 150 x 4 loss instances, 150 F1 pairs".into())
}

fn fusion_semantics() -> Outcome {
    let mut r = common::rng(37);
    let mut hair_over_eye = 0usize;
    for t in 0..1000 {
        let skin = r.gen_bool(0.8).then(|| common::random_mask(&mut r, 16, 16, 0.6));
        let hair = r.gen_bool(0.8).then(|| common::random_mask(&mut r, 16, 16, 0.3));
        let n = r.gen_range(0..=8);
        let parts: Vec<(Category, Mask)> =
            (0..n).map(|_| (Category::FITTED[r.gen_range(0..8)], common::random_mask(&mut r, 16, 16, 0.25))).collect();
        let map = fuse(skin.as_ref(), &parts, hair.as_ref(), 16, 16).map_err(|e| e.to_string())?;
        let ids: Vec<(u8, Mask)> = parts.iter().map(|(c, m)| (c.id(), m.clone())).collect();
        for y in 0..16 {
            for x in 0..16 {
                let want = common::fusion_oracle(skin.as_ref(), &ids, hair.as_ref(), x, y);
                ensure(map.get(x, y) == want, || format!("trial {t} ({x},{y}): {} vs {want}", map.get(x, y)))?;
                let eye = parts.iter().any(|(c, m)| matches!(c, Category::LeftEye | Category::RightEye) && m.get(x, y));
                if eye && hair.as_ref().is_some_and(|h| h.get(x, y)) {
                    ensure(map.get(x, y) == 10, || format!("trial {t}: eye over hair at ({x},{y})"))?;
                    hair_over_eye += 1;
                }
            }
        }
    }
    Ok(format!("1000 trials, 0 violations, {hair_over_eye} hair-over-eye pixels"))
}

fn random_similarity(r: &mut impl Rng) -> SimilarityTransform {
    SimilarityTransform::new(
        r.gen_range(0.3..3.0),
        r.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        Point::new(r.gen_range(-300.0..300.0), r.gen_range(-300.0..300.0)),
    )
}

fn geometry() -> Outcome {
    let mut r = common::rng(41);
    let mut worst_parabola = 0.0f64;
    for _ in 0..500 {
        let (a, b, c) = (r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let mut xs: Vec<f64> = (0..3).map(|_| r.gen_range(-3.0..3.0)).collect();
        xs.sort_by(f64::total_cmp);
        if xs[1] - xs[0] < 0.05 || xs[2] - xs[1] < 0.05 {
            continue;
        }
        let pts: Vec<Point> = xs.iter().map(|&x| Point::new(x, a * x * x + b * x + c)).collect();
        let fit = fit_parabola(&pts).map_err(|e| e.to_string())?;
        for p in &pts {
            worst_parabola = worst_parabola.max((fit.eval(p.x) - p.y).abs());
        }
    }
    ensure(worst_parabola <= 1e-9, || format!("3-point parabola residual {worst_parabola:e}"))?;

    let annotator = Annotator::default_106();
    let mut worst_equiv = 0.0f64;
    for t in 0..150 {
        let pose = FacePose {
            center: Point::new(r.gen_range(40.0..90.0), r.gen_range(40.0..90.0)),
            scale: r.gen_range(20.0..60.0),
            rotation: r.gen_range(-0.5..0.5),
            jitter: r.gen_range(0.0..1.5),
            seed: t,
        };
        let lm = synthetic_face(&pose);
        let tr = random_similarity(&mut r);
        let moved = LandmarkSet::new(tr.apply_all(lm.points())).map_err(|e| e.to_string())?;
        let a = annotator.fit_parts(&lm).map_err(|e| e.to_string())?;
        let b = annotator.fit_parts(&moved).map_err(|e| e.to_string())?;
        for (pa, pb) in a.iter().zip(&b) {
            let (ca, cb) = (pa.contour.as_ref().unwrap(), pb.contour.as_ref().unwrap());
            ensure(ca.len() == cb.len(), || format!("trial {t} {}: vertex count differs", pa.category))?;
            worst_equiv = worst_equiv.max(common::max_dist(ca.transformed(&tr).vertices(), cb.vertices()));
        }
    }
    ensure(worst_equiv <= 1e-5, || format!("equivariance error {worst_equiv:e} px"))?;

    for t in 0..200 {
        let poly = common::star_polygon(&mut r, 100.0);
        let c = fit_polygon_smooth(&poly, 1, true).map_err(|e| e.to_string())?;
        ensure(c.vertices() == poly.as_slice(), || format!("polygon {t}: density 1 altered the vertices"))?;
    }

    let mut worst_norm = 0.0f64;
    for _ in 0..200 {
        let pts: Vec<Point> = (0..r.gen_range(2..12))
            .map(|_| Point::new(r.gen_range(-500.0..500.0), r.gen_range(-500.0..500.0)))
            .collect();
        let (tr, norm) = normalize_part(&pts).map_err(|e| e.to_string())?;
        worst_norm = worst_norm.max(common::max_dist(&tr.inverse().apply_all(&norm), &pts));
    }
    ensure(worst_norm <= 1e-6, || format!("normalize round trip error {worst_norm:e} px"))?;

    Ok(format!(
        "parabola {worst_parabola:.1e}, equivariance {worst_equiv:.1e} px over 150 trials, density 1 exact, normalize {worst_norm:.1e} px"
    ))
}

fn mirror(map: &LabelMap) -> LabelMap {
    let (w, h) = map.dims();
    let raw = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).map(|(x, y)| map.get(w - 1 - x, y)).collect();
    LabelMap::from_raw(w, h, raw).unwrap()
}

fn boundary() -> Outcome {
    for pattern in 0u32..512 {
        let raw = (0..9).map(|k| ((pattern >> k) & 1) as u8).collect();
        let map = LabelMap::from_raw(3, 3, raw).unwrap();
        let b = extract_boundary(&map);
        for y in 0..3 {
            for x in 0..3 {
                ensure(b.get(x, y) == common::boundary_oracle(&map, x, y), || {
                    format!("pattern {pattern:09b} at ({x},{y})")
                })?;
            }
        }
    }
    let mut r = common::rng(53);
    for t in 0..100 {
        let (w, h) = (r.gen_range(1..30), r.gen_range(1..30));
        let classes = r.gen_range(1..11);
        let map = common::random_labels(&mut r, w, h, classes);
        let direct = extract_boundary(&mirror(&map));
        let flipped = extract_boundary(&map);
        for y in 0..h {
            for x in 0..w {
                ensure(direct.get(x, y) == flipped.get(w - 1 - x, y), || {
                    format!("map {t}: mirror mismatch at ({x},{y})")
                })?;
            }
        }
    }
    Ok("512 patterns, 100 mirrored maps".into())
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn golden_and_determinism() -> Outcome {
    let manifest = scan_dataset(&fixture().join("dataset")).map_err(|e| e.to_string())?;
    let annotator = Annotator::default_106();
    let mut runs = Vec::new();
    for workers in [1, 3] {
        let out = tempfile::tempdir().unwrap();
        let opts = AnnotateOptions {
            masks: MaskSource::Dir(fixture().join("dataset/masks")),
            output: out.path().to_path_buf(),
            workers,
        };
        let summary = annotate_dataset(&manifest, &annotator, &opts).map_err(|e| e.to_string())?;
        ensure(summary.failed() == 0, || format!("{:?}", summary.failures))?;
        runs.push((read_tree(&out.path().join("labels")), read_tree(&out.path().join("boundaries"))));
    }
    ensure(runs[0] == runs[1], || "two runs differ".into())?;
    let golden = read_tree(&fixture().join("golden"));
    ensure(!golden.is_empty(), || "no golden files".into())?;
    ensure(runs[0].0 == golden, || "label maps differ from golden files".into())?;
    Ok(format!("{} golden label maps byte-exact, runs identical", golden.len()))
}

fn round_trips() -> Outcome {
    let mut r = common::rng(67);
    for t in 0..300 {
        let mag = [1.0, 100.0, 4096.0, 999_999.0][t % 4];
        let points = (0..106).map(|_| Point::new(r.gen_range(-mag..mag), r.gen_range(-mag..mag))).collect();
        let visible = (0..106).map(|_| r.gen_bool(0.9)).collect();
        let lm = LandmarkSet::with_visibility(points, visible).map_err(|e| e.to_string())?;
        let back = LandmarkSet::parse(&lm.to_text()).map_err(|e| format!("case {t}: {e}"))?;
        ensure(back == lm, || format!("landmark case {t} changed"))?;
    }
    for t in 0..300 {
        let (w, h) = (r.gen_range(1..64), r.gen_range(1..64));
        let map = common::random_labels(&mut r, w, h, 11);
        let bytes = map.encode_png().map_err(|e| e.to_string())?;
        let back = LabelMap::decode_png(&bytes).map_err(|e| e.to_string())?;
        ensure(back == map, || format!("label map case {t} changed"))?;
        let rle = faceparse_core::rle::RleLabelMap::encode(&map);
        ensure(rle.decode().ok() == Some(map), || format!("rle case {t} changed"))?;
    }
    Ok("300 landmark files, 300 label-map PNGs and RLE encodings".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("aggregation reproduction", aggregation, Some(Duration::from_secs(1))),
        ("loss identities", loss_identities, Some(Duration::from_secs(5))),
        ("oracle equivalence", oracle_equivalence, Some(Duration::from_secs(60))),
        ("fusion semantics", fusion_semantics, None),
        ("geometry", geometry, None),
        ("boundary", boundary, None),
        ("end-to-end determinism and golden files", golden_and_determinism, None),
        ("format round-trips", round_trips, None),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, budget {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
