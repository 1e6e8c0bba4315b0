//! Dataset layout, split manifests and batch annotation.
//!
//! Two on-disk layouts are recognised.
//!
//! Flat, with split list files (one sample id per line):
//!
//! ```text
//! root/
//!   train.txt  val.txt  test.txt
//!   images/<id>.{png,jpg,jpeg}
//!   landmarks/<id>.txt
//!   labels/<id>.png          (optional until annotated)
//! ```
//!
//! Split directories, where each split carries its own subtrees and the ids
//! are the landmark file stems:
//!
//! ```text
//! root/{train,val,test}/{images,landmarks,labels}/...
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::labelmap::{LabelMap, Mask};
use crate::landmarks::LandmarkSet;
use crate::pipeline::{Annotator, ExternalLayers};

pub const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("split file {0} is missing")]
    MissingSplitFile(PathBuf),
    #[error("sample {id:?} in split {split} has no landmark file")]
    DanglingId { id: String, split: Split },
    #[error("sample {id:?} is listed in both {first} and {second}")]
    OverlappingSplits { id: String, first: Split, second: Split },
    #[error("{0} is not a dataset root")]
    NotADataset(PathBuf),
    #[error("manifest JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Flat,
    SplitDirs,
}

/// Files of one sample, relative to the dataset root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFiles {
    pub image: Option<PathBuf>,
    pub landmarks: PathBuf,
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub layout: Layout,
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    pub samples: BTreeMap<String, SampleFiles>,
}

impl DatasetManifest {
    pub fn split(&self, split: Split) -> &[String] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.train.len(), self.val.len(), self.test.len())
    }

    /// Every id in split order: train, then val, then test.
    pub fn all_ids(&self) -> impl Iterator<Item = &str> {
        self.train.iter().chain(&self.val).chain(&self.test).map(String::as_str)
    }

    /// The id after `id` in [`all_ids`](Self::all_ids) order.
    pub fn next_id(&self, id: &str) -> Option<&str> {
        let mut it = self.all_ids().skip_while(|x| *x != id);
        it.next()?;
        it.next()
    }

    pub fn files(&self, id: &str) -> Option<&SampleFiles> {
        self.samples.get(id)
    }

    pub fn landmark_path(&self, id: &str) -> Option<PathBuf> {
        self.files(id).map(|f| self.root.join(&f.landmarks))
    }

    pub fn image_path(&self, id: &str) -> Option<PathBuf> {
        self.files(id).and_then(|f| f.image.as_ref()).map(|p| self.root.join(p))
    }

    /// Where the label map of `id` lives, whether or not it exists yet.
    pub fn label_path(&self, id: &str) -> Option<PathBuf> {
        let files = self.files(id)?;
        Some(match &files.labels {
            Some(p) => self.root.join(p),
            None => self.root.join(files.landmarks.parent()?.with_file_name("labels")).join(format!("{id}.png")),
        })
    }

    pub fn to_json(&self) -> Result<String, DatasetError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<DatasetManifest, DatasetError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes `train.txt`, `val.txt` and `test.txt` under `root` (flat layout only).
    pub fn write_split_files(&self, root: &Path) -> Result<(), DatasetError> {
        for split in Split::ALL {
            let path = root.join(format!("{}.txt", split.name()));
            let mut body = String::new();
            for id in self.split(split) {
                body.push_str(id);
                body.push('\n');
            }
            write_atomic(&path, body.as_bytes())?;
        }
        Ok(())
    }
}

/// Scans a dataset root and validates its manifest.
pub fn scan_dataset(root: &Path) -> Result<DatasetManifest, DatasetError> {
    if root.join("train").join("landmarks").is_dir() {
        scan_split_dirs(root)
    } else if root.join("landmarks").is_dir() {
        scan_flat(root)
    } else {
        Err(DatasetError::NotADataset(root.to_path_buf()))
    }
}

fn find_image(dir: &Path, id: &str) -> Option<String> {
    IMAGE_EXTENSIONS.iter().map(|ext| format!("{id}.{ext}")).find(|name| dir.join(name).is_file())
}

fn sample_files(root: &Path, base: &Path, id: &str) -> Option<SampleFiles> {
    let landmarks = base.join("landmarks").join(format!("{id}.txt"));
    if !root.join(&landmarks).is_file() {
        return None;
    }
    let image = find_image(&root.join(base).join("images"), id).map(|n| base.join("images").join(n));
    let labels = Some(base.join("labels").join(format!("{id}.png"))).filter(|p| root.join(p).is_file());
    Some(SampleFiles { image, landmarks, labels })
}

fn scan_flat(root: &Path) -> Result<DatasetManifest, DatasetError> {
    let mut lists: BTreeMap<Split, Vec<String>> = BTreeMap::new();
    for split in Split::ALL {
        let path = root.join(format!("{}.txt", split.name()));
        if !path.is_file() {
            return Err(DatasetError::MissingSplitFile(path));
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        lists.insert(split, text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect());
    }
    let mut samples = BTreeMap::new();
    let mut owner: BTreeMap<String, Split> = BTreeMap::new();
    for (&split, ids) in &lists {
        for id in ids {
            if let Some(&first) = owner.get(id) {
                return Err(DatasetError::OverlappingSplits { id: id.clone(), first, second: split });
            }
            owner.insert(id.clone(), split);
            let files = sample_files(root, Path::new(""), id)
                .ok_or_else(|| DatasetError::DanglingId { id: id.clone(), split })?;
            samples.insert(id.clone(), files);
        }
    }
    let mut take = |s| lists.remove(&s).unwrap_or_default();
    Ok(DatasetManifest {
        root: root.to_path_buf(),
        layout: Layout::Flat,
        train: take(Split::Train),
        val: take(Split::Val),
        test: take(Split::Test),
        samples,
    })
}

fn scan_split_dirs(root: &Path) -> Result<DatasetManifest, DatasetError> {
    let mut lists: BTreeMap<Split, Vec<String>> = BTreeMap::new();
    let mut samples = BTreeMap::new();
    let mut owner: BTreeMap<String, Split> = BTreeMap::new();
    for split in Split::ALL {
        let base = PathBuf::from(split.name());
        let dir = root.join(&base).join("landmarks");
        if !dir.is_dir() {
            return Err(DatasetError::MissingSplitFile(dir));
        }
        let mut ids: BTreeSet<String> = BTreeSet::new();
        for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let path = entry.map_err(io_err(&dir))?.path();
            if path.extension().and_then(|e| e.to_str()) == Some("txt") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.insert(stem.to_string());
                }
            }
        }
        for id in &ids {
            if let Some(&first) = owner.get(id) {
                return Err(DatasetError::OverlappingSplits { id: id.clone(), first, second: split });
            }
            owner.insert(id.clone(), split);
            let files =
                sample_files(root, &base, id).ok_or_else(|| DatasetError::DanglingId { id: id.clone(), split })?;
            samples.insert(id.clone(), files);
        }
        lists.insert(split, ids.into_iter().collect());
    }
    let mut take = |s| lists.remove(&s).unwrap_or_default();
    Ok(DatasetManifest {
        root: root.to_path_buf(),
        layout: Layout::SplitDirs,
        train: take(Split::Train),
        val: take(Split::Val),
        test: take(Split::Test),
        samples,
    })
}

/// Writes to a temporary file in the destination directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| DatasetError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

/// Where externally produced hair and skin masks come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaskSource {
    /// Parts-only output.
    None,
    /// `<dir>/skin/<id>.png` and `<dir>/hair/<id>.png`, nonzero = covered.
    Dir(PathBuf),
}

impl MaskSource {
    pub fn load(&self, id: &str, width: u32, height: u32) -> Result<ExternalLayers, String> {
        match self {
            MaskSource::None => Ok(ExternalLayers::default()),
            MaskSource::Dir(dir) => {
                let load = |kind: &str| -> Result<Mask, String> {
                    let path = dir.join(kind).join(format!("{id}.png"));
                    let m = Mask::load_png(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                    if m.dims() != (width, height) {
                        return Err(format!(
                            "{} is {}x{}, image is {width}x{height}",
                            path.display(),
                            m.width(),
                            m.height()
                        ));
                    }
                    Ok(m)
                };
                Ok(ExternalLayers { skin: Some(load("skin")?), hair: Some(load("hair")?) })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnnotateOptions {
    pub masks: MaskSource,
    pub output: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AnnotateSummary {
    pub processed: usize,
    pub succeeded: usize,
    pub failures: Vec<(String, String)>,
    /// Pixel count per category id over all written label maps.
    pub label_pixels: Vec<u64>,
}

impl AnnotateSummary {
    pub fn failed(&self) -> usize {
        self.failures.len()
    }
}

/// Reads and parses the landmark file of `id`.
pub fn load_landmarks(manifest: &DatasetManifest, id: &str) -> Result<LandmarkSet, String> {
    let path = manifest.landmark_path(id).ok_or_else(|| format!("unknown sample {id:?}"))?;
    let text = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    LandmarkSet::parse_bytes(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Width and height of the image of `id`, read from the file header.
pub fn image_dimensions(manifest: &DatasetManifest, id: &str) -> Result<(u32, u32), String> {
    let image = manifest.image_path(id).ok_or_else(|| format!("sample {id:?} has no image"))?;
    image::image_dimensions(&image).map_err(|e| format!("{}: {e}", image.display()))
}

/// Annotates one sample and returns its label map (not written).
pub fn annotate_sample(
    manifest: &DatasetManifest,
    annotator: &Annotator,
    masks: &MaskSource,
    id: &str,
) -> Result<crate::pipeline::Annotation, String> {
    let landmarks = load_landmarks(manifest, id)?;
    let (w, h) = image_dimensions(manifest, id)?;
    let layers = masks.load(id, w, h)?;
    annotator.annotate(&landmarks.in_frame(w, h), w, h, &layers).map_err(|e| e.to_string())
}

/// Fits, rasterizes and fuses every sample, writing `labels/<id>.png` and
/// `boundaries/<id>.png` under the output directory.
pub fn annotate_dataset(
    manifest: &DatasetManifest,
    annotator: &Annotator,
    options: &AnnotateOptions,
) -> Result<AnnotateSummary, DatasetError> {
    let ids: Vec<&str> = manifest.all_ids().collect();
    let run = |id: &str| -> Result<LabelMap, String> {
        let ann = annotate_sample(manifest, annotator, &options.masks, id)?;
        let labels_png = ann.labels.encode_png().map_err(|e| e.to_string())?;
        let boundary_png = ann.boundary.encode_png().map_err(|e| e.to_string())?;
        write_atomic(&options.output.join("labels").join(format!("{id}.png")), &labels_png)
            .map_err(|e| e.to_string())?;
        write_atomic(&options.output.join("boundaries").join(format!("{id}.png")), &boundary_png)
            .map_err(|e| e.to_string())?;
        Ok(ann.labels)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| DatasetError::Io { path: options.output.clone(), source: std::io::Error::other(e) })?;
    let results: Vec<(&str, Result<LabelMap, String>)> =
        pool.install(|| ids.par_iter().map(|&id| (id, run(id))).collect());

    let mut summary = AnnotateSummary { label_pixels: vec![0; crate::category::NUM_CATEGORIES], ..Default::default() };
    for (id, result) in results {
        summary.processed += 1;
        match result {
            Ok(map) => {
                summary.succeeded += 1;
                for &v in map.labels() {
                    summary.label_pixels[v as usize] += 1;
                }
            }
            Err(e) => {
                log::error!("{id}: {e}");
                summary.failures.push((id.to_string(), e));
            }
        }
    }
    Ok(summary)
}
