//! Hierarchical merge of skin, facial-part and hair layers into one label map.

use crate::category::Category;
use crate::labelmap::{check_dims, LabelMap, MapError, Mask};

/// Paints skin, then each part mask in the given order, then hair, over a
/// background-initialized map. Background is whatever no layer covered.
///
/// `skin` and `hair` may be `None` when no external segmentation is available.
pub fn fuse(
    skin: Option<&Mask>,
    parts: &[(Category, Mask)],
    hair: Option<&Mask>,
    width: u32,
    height: u32,
) -> Result<LabelMap, MapError> {
    let mut map = LabelMap::new(width, height)?;
    let dims = (width, height);
    for m in skin.iter().chain(hair.iter()) {
        check_dims(dims, m.dims())?;
    }
    for (_, m) in parts {
        check_dims(dims, m.dims())?;
    }

    if let Some(skin) = skin {
        map.paint(skin, Category::Skin)?;
    }
    for (category, mask) in parts {
        map.paint(mask, *category)?;
    }
    if let Some(hair) = hair {
        map.paint(hair, Category::Hair)?;
    }
    Ok(map)
}
