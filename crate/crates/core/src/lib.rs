//! Landmark-guided face parsing annotation.
//!
//! Turns a 106-point landmark set into an 11-category label map: each facial
//! part is fitted with its own curve family in a pose-normalized frame, the
//! resulting contours are rasterized, and the part masks are fused with
//! externally supplied skin and hair masks in occlusion order. The crate also
//! derives boundary and weight maps from label maps, provides reference
//! implementations of the boundary-aware training losses, and scores
//! predictions with per-category and merged F1.
//!
//! ```no_run
//! use faceparse_core::{Annotator, ExternalLayers, LandmarkSet};
//!
//! let text = std::fs::read_to_string("face.txt").unwrap();
//! let landmarks = LandmarkSet::parse(&text).unwrap();
//! let ann = Annotator::default_106()
//!     .annotate(&landmarks, 256, 256, &ExternalLayers::default())
//!     .unwrap();
//! std::fs::write("face.png", ann.labels.encode_png().unwrap()).unwrap();
//! ```

// `!(a < b)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod category;
pub mod dataset;
pub mod fusion;
pub mod geometry;
pub mod labelmap;
pub mod landmarks;
pub mod loss;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod rle;
pub mod schema;
pub mod strategy;
pub mod synth;

pub use boundary::{extract_boundary, make_weight_map, BoundaryMap, WeightMap};
pub use category::Category;
pub use fusion::fuse;
pub use geometry::{Contour, FitError, Point, SimilarityTransform};
pub use labelmap::{LabelMap, Mask};
pub use landmarks::LandmarkSet;
pub use pipeline::{Annotation, Annotator, ExternalLayers};
pub use raster::rasterize;
pub use schema::PartSchema;
pub use strategy::{FitStrategy, StrategyRegistry};
