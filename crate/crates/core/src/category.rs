//! The fixed 11-entry category table shared by every label map.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Number of categories, background included.
pub const NUM_CATEGORIES: usize = 11;

/// A face parsing category. The discriminant is the value written into label maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Category {
    Background = 0,
    Skin = 1,
    LeftEyebrow = 2,
    RightEyebrow = 3,
    LeftEye = 4,
    RightEye = 5,
    Nose = 6,
    UpperLip = 7,
    InnerMouth = 8,
    LowerLip = 9,
    Hair = 10,
}

impl Category {
    pub const ALL: [Category; NUM_CATEGORIES] = [
        Category::Background,
        Category::Skin,
        Category::LeftEyebrow,
        Category::RightEyebrow,
        Category::LeftEye,
        Category::RightEye,
        Category::Nose,
        Category::UpperLip,
        Category::InnerMouth,
        Category::LowerLip,
        Category::Hair,
    ];

    /// Categories produced by landmark fitting. Hair and skin arrive as external masks.
    pub const FITTED: [Category; 8] = [
        Category::LeftEyebrow,
        Category::RightEyebrow,
        Category::LeftEye,
        Category::RightEye,
        Category::Nose,
        Category::UpperLip,
        Category::InnerMouth,
        Category::LowerLip,
    ];

    /// The ten foreground categories in report order, hair first.
    pub const FOREGROUND: [Category; 10] = [
        Category::Hair,
        Category::Skin,
        Category::LeftEyebrow,
        Category::RightEyebrow,
        Category::LeftEye,
        Category::RightEye,
        Category::Nose,
        Category::UpperLip,
        Category::InnerMouth,
        Category::LowerLip,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Category> {
        Category::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Background => "background",
            Category::Skin => "skin",
            Category::LeftEyebrow => "left_eyebrow",
            Category::RightEyebrow => "right_eyebrow",
            Category::LeftEye => "left_eye",
            Category::RightEye => "right_eye",
            Category::Nose => "nose",
            Category::UpperLip => "upper_lip",
            Category::InnerMouth => "inner_mouth",
            Category::LowerLip => "lower_lip",
            Category::Hair => "hair",
        }
    }

    pub fn is_fitted(self) -> bool {
        Category::FITTED.contains(&self)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown category name {0:?}")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| UnknownCategory(s.to_string()))
    }
}
