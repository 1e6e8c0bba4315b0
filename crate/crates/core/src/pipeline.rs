//! Landmarks → fitted contours → masks → fused label map.

use std::sync::Arc;

use serde::Serialize;

use crate::boundary::{extract_boundary, BoundaryMap};
use crate::category::Category;
use crate::fusion::fuse;
use crate::geometry::{Contour, FitError};
use crate::labelmap::{LabelMap, MapError, Mask};
use crate::landmarks::LandmarkSet;
use crate::raster::rasterize;
use crate::schema::PartSchema;
use crate::strategy::StrategyRegistry;

#[derive(Debug, thiserror::Error)]
pub enum AnnotateError {
    #[error("fitting {category} failed: {source}")]
    Fit {
        category: Category,
        #[source]
        source: FitError,
    },
    #[error("schema references strategy {0:?} which is not registered")]
    UnknownStrategy(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Outcome of fitting one part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartFit {
    pub category: Category,
    /// `None` when every landmark of the part is invisible.
    pub contour: Option<Contour>,
}

/// Hair and skin masks from an external segmenter.
#[derive(Debug, Clone, Default)]
pub struct ExternalLayers {
    pub skin: Option<Mask>,
    pub hair: Option<Mask>,
}

#[derive(Debug, Clone)]
pub struct Annotation {
    pub labels: LabelMap,
    pub boundary: BoundaryMap,
    pub parts: Vec<PartFit>,
}

/// A schema bound to the strategies that fit it.
#[derive(Debug, Clone)]
pub struct Annotator {
    schema: Arc<PartSchema>,
    registry: Arc<StrategyRegistry>,
}

impl Annotator {
    pub fn new(schema: PartSchema) -> Annotator {
        Annotator::with_registry(Arc::new(schema), Arc::new(StrategyRegistry::with_builtins()))
    }

    pub fn with_registry(schema: Arc<PartSchema>, registry: Arc<StrategyRegistry>) -> Annotator {
        Annotator { schema, registry }
    }

    pub fn default_106() -> Annotator {
        Annotator::new(PartSchema::default_106())
    }

    pub fn schema(&self) -> &PartSchema {
        &self.schema
    }

    /// Fits every schema entry in schema order.
    pub fn fit_parts(&self, landmarks: &LandmarkSet) -> Result<Vec<PartFit>, AnnotateError> {
        self.schema
            .entries()
            .iter()
            .map(|entry| {
                let strategy = self
                    .registry
                    .get(&entry.strategy)
                    .ok_or_else(|| AnnotateError::UnknownStrategy(entry.strategy.clone()))?;
                if entry.indices().iter().all(|&i| !landmarks.is_visible(i)) {
                    return Ok(PartFit { category: entry.category, contour: None });
                }
                let contour = strategy
                    .fit(entry, landmarks)
                    .map_err(|source| AnnotateError::Fit { category: entry.category, source })?;
                if !contour.is_simple() {
                    log::warn!("{} contour self-intersects", entry.category);
                }
                Ok(PartFit { category: entry.category, contour: Some(contour) })
            })
            .collect()
    }

    /// Rasterizes fitted parts in schema order.
    pub fn part_masks(parts: &[PartFit], width: u32, height: u32) -> Vec<(Category, Mask)> {
        parts.iter().filter_map(|p| p.contour.as_ref().map(|c| (p.category, rasterize(c, width, height)))).collect()
    }

    pub fn annotate(
        &self,
        landmarks: &LandmarkSet,
        width: u32,
        height: u32,
        layers: &ExternalLayers,
    ) -> Result<Annotation, AnnotateError> {
        let parts = self.fit_parts(landmarks)?;
        let masks = Annotator::part_masks(&parts, width, height);
        let labels = fuse(layers.skin.as_ref(), &masks, layers.hair.as_ref(), width, height)?;
        let boundary = extract_boundary(&labels);
        Ok(Annotation { labels, boundary, parts })
    }
}
