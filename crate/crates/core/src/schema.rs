//! Part schemas: which landmarks form each facial part and how it is fitted.
//!
//! Schemas are TOML documents. See `docs/part-schema.md` for the grammar and
//! `schemas/default_106.toml` for the shipped default.

use std::collections::BTreeSet;

use serde::Deserialize;

use crate::category::Category;
use crate::landmarks::NUM_LANDMARKS;
use crate::strategy::{StrategyRegistry, DEFAULT_DENSITY};

/// The default 106-point schema, compiled in.
pub const DEFAULT_SCHEMA_TOML: &str = include_str!("../schemas/default_106.toml");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchemaError {
    #[error("schema is not valid TOML: {0}")]
    Parse(String),
    #[error("part {category}: landmark index {index} is out of range 0..{NUM_LANDMARKS}")]
    IndexOutOfRange { category: String, index: usize },
    #[error("category {0} appears more than once")]
    DuplicateCategory(Category),
    #[error("category {0} has no entry")]
    MissingCategory(Category),
    #[error("part {category}: unknown fit strategy {strategy:?}")]
    BadStrategy { category: String, strategy: String },
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("category {0} is supplied as a mask and cannot be fitted")]
    NotFittable(Category),
    #[error("part {category}: {reason}")]
    InvalidLayout { category: String, reason: String },
}

/// How a part's landmark indices are arranged, per strategy family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartLayout {
    /// A single ordered ring or chain.
    Ring(Vec<usize>),
    /// Upper and lower arcs sharing the corner landmarks.
    ArcPair { upper: Vec<usize>, lower: Vec<usize> },
    /// Left and right halves, both running bridge top to base.
    Halves { left: Vec<usize>, right: Vec<usize> },
}

impl PartLayout {
    /// All indices in listing order, without repeats.
    pub fn indices(&self) -> Vec<usize> {
        let chained: Vec<usize> = match self {
            PartLayout::Ring(v) => v.clone(),
            PartLayout::ArcPair { upper, lower } => upper.iter().chain(lower).copied().collect(),
            PartLayout::Halves { left, right } => left.iter().chain(right).copied().collect(),
        };
        let mut seen = BTreeSet::new();
        chained.into_iter().filter(|i| seen.insert(*i)).collect()
    }
}

/// One entry of a schema file before strategy-specific validation.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPart {
    pub category: String,
    pub strategy: String,
    pub indices: Option<Vec<usize>>,
    pub upper: Option<Vec<usize>>,
    pub lower: Option<Vec<usize>>,
    pub left: Option<Vec<usize>>,
    pub right: Option<Vec<usize>>,
    pub axis: Option<[usize; 2]>,
    pub smoothing: Option<u32>,
    pub closed: Option<bool>,
    pub samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchema {
    name: Option<String>,
    #[serde(default)]
    part: Vec<RawPart>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartEntry {
    pub category: Category,
    pub strategy: String,
    pub layout: PartLayout,
    /// Principal axis endpoints (landmark indices).
    pub axis: [usize; 2],
    /// Interpolation density; 1 means straight segments.
    pub smoothing: u32,
    pub closed: bool,
    /// Samples per parabola arc, where relevant.
    pub samples: usize,
}

impl PartEntry {
    pub fn indices(&self) -> Vec<usize> {
        self.layout.indices()
    }
}

/// A validated schema. Entry order is the paint order inside the facial-parts layer.
#[derive(Debug, Clone, PartialEq)]
pub struct PartSchema {
    name: String,
    entries: Vec<PartEntry>,
}

impl PartSchema {
    pub fn default_106() -> PartSchema {
        PartSchema::from_toml(DEFAULT_SCHEMA_TOML).expect("shipped default schema is valid")
    }

    pub fn from_toml(text: &str) -> Result<PartSchema, SchemaError> {
        PartSchema::from_toml_with(text, StrategyRegistry::builtin())
    }

    pub fn from_toml_with(text: &str, registry: &StrategyRegistry) -> Result<PartSchema, SchemaError> {
        let raw: RawSchema = toml::from_str(text).map_err(|e| SchemaError::Parse(e.to_string()))?;
        let mut entries = Vec::with_capacity(raw.part.len());
        let mut seen = BTreeSet::new();
        for part in &raw.part {
            let category: Category =
                part.category.parse().map_err(|_| SchemaError::UnknownCategory(part.category.clone()))?;
            if !category.is_fitted() {
                return Err(SchemaError::NotFittable(category));
            }
            if !seen.insert(category) {
                return Err(SchemaError::DuplicateCategory(category));
            }
            let strategy = registry.get(&part.strategy).ok_or_else(|| SchemaError::BadStrategy {
                category: part.category.clone(),
                strategy: part.strategy.clone(),
            })?;
            let layout = strategy.layout(part)?;
            for index in layout.indices() {
                if index >= NUM_LANDMARKS {
                    return Err(SchemaError::IndexOutOfRange { category: part.category.clone(), index });
                }
            }
            let axis = match part.axis {
                Some(axis) => {
                    if let Some(&index) = axis.iter().find(|&&i| i >= NUM_LANDMARKS) {
                        return Err(SchemaError::IndexOutOfRange { category: part.category.clone(), index });
                    }
                    axis
                }
                None => default_axis(&layout),
            };
            let smoothing = part.smoothing.unwrap_or(DEFAULT_DENSITY);
            if smoothing == 0 {
                return Err(SchemaError::InvalidLayout {
                    category: part.category.clone(),
                    reason: "smoothing density must be at least 1".into(),
                });
            }
            let samples = part.samples.unwrap_or(crate::geometry::DEFAULT_PARABOLA_SAMPLES);
            if samples < 2 {
                return Err(SchemaError::InvalidLayout {
                    category: part.category.clone(),
                    reason: "samples must be at least 2".into(),
                });
            }
            entries.push(PartEntry {
                category,
                strategy: part.strategy.clone(),
                layout,
                axis,
                smoothing,
                closed: part.closed.unwrap_or(true),
                samples,
            });
        }
        for category in Category::FITTED {
            if !seen.contains(&category) {
                return Err(SchemaError::MissingCategory(category));
            }
        }
        Ok(PartSchema { name: raw.name.unwrap_or_else(|| "unnamed".into()), entries })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[PartEntry] {
        &self.entries
    }

    pub fn entry(&self, category: Category) -> Option<&PartEntry> {
        self.entries.iter().find(|e| e.category == category)
    }
}

fn default_axis(layout: &PartLayout) -> [usize; 2] {
    let chain = match layout {
        PartLayout::Ring(v) => v,
        PartLayout::ArcPair { upper, .. } => upper,
        PartLayout::Halves { left, .. } => left,
    };
    [chain[0], chain[chain.len() - 1]]
}
