//! Fit strategies, looked up by the name a schema entry gives in `strategy = "..."`.
//!
//! Three strategies are built in: `polygon`, `parabola_pair` and
//! `piecewise_nose`. Additional ones can be registered on a custom
//! [`StrategyRegistry`] and used by schemas loaded with
//! [`PartSchema::from_toml_with`](crate::schema::PartSchema::from_toml_with).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::geometry::{fit_nose, fit_parabola_pair, Contour, FitError, ParabolaPairOptions, Point};
use crate::landmarks::LandmarkSet;
use crate::schema::{PartEntry, PartLayout, RawPart, SchemaError};

/// Interpolation density used when a schema entry gives none.
pub const DEFAULT_DENSITY: u32 = 4;

pub trait FitStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Extracts and checks the strategy-specific index lists of a schema entry.
    fn layout(&self, raw: &RawPart) -> Result<PartLayout, SchemaError>;

    /// Fits the part in image coordinates. The caller has already skipped
    /// parts whose landmarks are all invisible.
    fn fit(&self, part: &PartEntry, landmarks: &LandmarkSet) -> Result<Contour, FitError>;
}

#[derive(Clone, Default)]
pub struct StrategyRegistry {
    strategies: BTreeMap<String, Arc<dyn FitStrategy>>,
}

impl fmt::Debug for StrategyRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.strategies.keys()).finish()
    }
}

impl StrategyRegistry {
    pub fn empty() -> StrategyRegistry {
        StrategyRegistry::default()
    }

    pub fn with_builtins() -> StrategyRegistry {
        let mut r = StrategyRegistry::empty();
        r.register(Arc::new(PolygonStrategy));
        r.register(Arc::new(ParabolaPairStrategy));
        r.register(Arc::new(PiecewiseNoseStrategy));
        r
    }

    /// Shared registry holding only the built-in strategies.
    pub fn builtin() -> &'static StrategyRegistry {
        static BUILTIN: OnceLock<StrategyRegistry> = OnceLock::new();
        BUILTIN.get_or_init(StrategyRegistry::with_builtins)
    }

    /// Registers a strategy, returning the one it replaced.
    pub fn register(&mut self, strategy: Arc<dyn FitStrategy>) -> Option<Arc<dyn FitStrategy>> {
        let name = strategy.name().to_string();
        let previous = self.strategies.insert(name.clone(), strategy);
        if previous.is_some() {
            log::warn!("fit strategy {name:?} replaced");
        }
        previous
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn FitStrategy>> {
        self.strategies.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.strategies.keys().map(String::as_str)
    }
}

fn require<'a>(
    raw: &'a RawPart,
    field: &str,
    value: &'a Option<Vec<usize>>,
    min: usize,
) -> Result<&'a [usize], SchemaError> {
    let v = value.as_deref().ok_or_else(|| SchemaError::InvalidLayout {
        category: raw.category.clone(),
        reason: format!("strategy {} requires `{field}`", raw.strategy),
    })?;
    if v.len() < min {
        return Err(SchemaError::InvalidLayout {
            category: raw.category.clone(),
            reason: format!("`{field}` needs at least {min} indices, has {}", v.len()),
        });
    }
    Ok(v)
}

fn forbid(raw: &RawPart, fields: &[(&str, bool)]) -> Result<(), SchemaError> {
    match fields.iter().find(|(_, present)| *present) {
        Some((name, _)) => Err(SchemaError::InvalidLayout {
            category: raw.category.clone(),
            reason: format!("`{name}` is not used by strategy {}", raw.strategy),
        }),
        None => Ok(()),
    }
}

fn gather(landmarks: &LandmarkSet, indices: &[usize]) -> Vec<Point> {
    indices.iter().map(|&i| landmarks.point(i)).collect()
}

/// Interpolated polygon through an ordered ring (eyebrows, lips).
#[derive(Debug, Clone, Copy)]
pub struct PolygonStrategy;

impl FitStrategy for PolygonStrategy {
    fn name(&self) -> &'static str {
        "polygon"
    }

    fn layout(&self, raw: &RawPart) -> Result<PartLayout, SchemaError> {
        forbid(
            raw,
            &[
                ("upper", raw.upper.is_some()),
                ("lower", raw.lower.is_some()),
                ("left", raw.left.is_some()),
                ("right", raw.right.is_some()),
                ("samples", raw.samples.is_some()),
            ],
        )?;
        Ok(PartLayout::Ring(require(raw, "indices", &raw.indices, 3)?.to_vec()))
    }

    fn fit(&self, part: &PartEntry, landmarks: &LandmarkSet) -> Result<Contour, FitError> {
        let PartLayout::Ring(indices) = &part.layout else {
            return Err(FitError::DegeneratePart("polygon strategy needs a ring layout".into()));
        };
        let pts = gather(landmarks, indices);
        let from = landmarks.point(part.axis[0]);
        let to = landmarks.point(part.axis[1]);
        let ring = crate::geometry::dedup_consecutive(&pts, part.closed);
        if ring.len() < 3 {
            return Err(FitError::DegeneratePart(format!("{} has fewer than 3 distinct points", part.category)));
        }
        let vertices = crate::geometry::smooth_in_frame(&ring, part.smoothing, part.closed, from, to)?;
        Contour::new(vertices)
    }
}

/// Two least-squares parabolas joined at the corners (eyes, inner mouth).
#[derive(Debug, Clone, Copy)]
pub struct ParabolaPairStrategy;

impl FitStrategy for ParabolaPairStrategy {
    fn name(&self) -> &'static str {
        "parabola_pair"
    }

    fn layout(&self, raw: &RawPart) -> Result<PartLayout, SchemaError> {
        forbid(
            raw,
            &[
                ("indices", raw.indices.is_some()),
                ("left", raw.left.is_some()),
                ("right", raw.right.is_some()),
                ("axis", raw.axis.is_some()),
                ("smoothing", raw.smoothing.is_some()),
                ("closed", raw.closed.is_some()),
            ],
        )?;
        Ok(PartLayout::ArcPair {
            upper: require(raw, "upper", &raw.upper, 3)?.to_vec(),
            lower: require(raw, "lower", &raw.lower, 3)?.to_vec(),
        })
    }

    fn fit(&self, part: &PartEntry, landmarks: &LandmarkSet) -> Result<Contour, FitError> {
        let PartLayout::ArcPair { upper, lower } = &part.layout else {
            return Err(FitError::DegeneratePart("parabola_pair strategy needs upper/lower arcs".into()));
        };
        fit_parabola_pair(
            &gather(landmarks, upper),
            &gather(landmarks, lower),
            ParabolaPairOptions { samples: part.samples },
        )
    }
}

/// Left and right halves interpolated separately (nose).
#[derive(Debug, Clone, Copy)]
pub struct PiecewiseNoseStrategy;

impl FitStrategy for PiecewiseNoseStrategy {
    fn name(&self) -> &'static str {
        "piecewise_nose"
    }

    fn layout(&self, raw: &RawPart) -> Result<PartLayout, SchemaError> {
        forbid(
            raw,
            &[
                ("indices", raw.indices.is_some()),
                ("upper", raw.upper.is_some()),
                ("lower", raw.lower.is_some()),
                ("axis", raw.axis.is_some()),
                ("closed", raw.closed.is_some()),
                ("samples", raw.samples.is_some()),
            ],
        )?;
        Ok(PartLayout::Halves {
            left: require(raw, "left", &raw.left, 2)?.to_vec(),
            right: require(raw, "right", &raw.right, 2)?.to_vec(),
        })
    }

    fn fit(&self, part: &PartEntry, landmarks: &LandmarkSet) -> Result<Contour, FitError> {
        let PartLayout::Halves { left, right } = &part.layout else {
            return Err(FitError::DegeneratePart("piecewise_nose strategy needs left/right halves".into()));
        };
        fit_nose(landmarks.points(), landmarks.visibility(), left, right, part.smoothing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Triangle;

    impl FitStrategy for Triangle {
        fn name(&self) -> &'static str {
            "triangle"
        }
        fn layout(&self, raw: &RawPart) -> Result<PartLayout, SchemaError> {
            Ok(PartLayout::Ring(require(raw, "indices", &raw.indices, 3)?[..3].to_vec()))
        }
        fn fit(&self, part: &PartEntry, landmarks: &LandmarkSet) -> Result<Contour, FitError> {
            Contour::new(gather(landmarks, &part.indices()))
        }
    }

    #[test]
    fn builtins_registered() {
        let names: Vec<&str> = StrategyRegistry::builtin().names().collect();
        assert_eq!(names, ["parabola_pair", "piecewise_nose", "polygon"]);
    }

    #[test]
    fn custom_strategy_usable_from_schema() {
        let mut reg = StrategyRegistry::with_builtins();
        assert!(reg.register(Arc::new(Triangle)).is_none());
        let text = crate::schema::DEFAULT_SCHEMA_TOML.replacen(
            "category = \"left_eyebrow\"\nstrategy = \"polygon\"",
            "category = \"left_eyebrow\"\nstrategy = \"triangle\"",
            1,
        );
        assert!(crate::schema::PartSchema::from_toml(&text).is_err());
        let schema = crate::schema::PartSchema::from_toml_with(&text, &reg).unwrap();
        assert_eq!(schema.entry(crate::category::Category::LeftEyebrow).unwrap().strategy, "triangle");
    }
}
