//! Boundary ground truth and boundary-weighted loss maps.
//!
//! A pixel is a boundary pixel when any of its 4-neighbours carries a
//! different label, so every label transition is marked on both sides.

use image::{GrayImage, Luma};

use crate::labelmap::{encode_png, LabelMap, MapError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMap {
    width: u32,
    height: u32,
    flags: Vec<bool>,
}

impl BoundaryMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.flags[y as usize * self.width as usize + x as usize]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }

    pub fn from_flags(width: u32, height: u32, flags: Vec<bool>) -> Result<BoundaryMap, MapError> {
        if flags.len() != width as usize * height as usize {
            return Err(MapError::DimensionMismatch(width, height, flags.len() as u32, 1));
        }
        Ok(BoundaryMap { width, height, flags })
    }

    /// 0/255 grayscale rendering.
    pub fn to_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| Luma([if self.get(x, y) { 255 } else { 0 }]))
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, MapError> {
        encode_png(&self.to_image())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum WeightError {
    #[error("alpha must be a finite non-negative number, got {0}")]
    NegativeAlpha(f64),
}

/// Per-pixel loss weights: `1 + alpha` on boundary pixels, `1` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    width: u32,
    height: u32,
    weights: Vec<f64>,
}

impl WeightMap {
    pub fn uniform(width: u32, height: u32) -> WeightMap {
        WeightMap { width, height, weights: vec![1.0; width as usize * height as usize] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.weights[y as usize * self.width as usize + x as usize]
    }
}

pub fn extract_boundary(labels: &LabelMap) -> BoundaryMap {
    let (w, h) = labels.dims();
    let raw = labels.labels();
    let (wu, hu) = (w as usize, h as usize);
    let mut flags = vec![false; raw.len()];
    for y in 0..hu {
        for x in 0..wu {
            let i = y * wu + x;
            let v = raw[i];
            // mark both sides of each right and down transition
            if x + 1 < wu && raw[i + 1] != v {
                flags[i] = true;
                flags[i + 1] = true;
            }
            if y + 1 < hu && raw[i + wu] != v {
                flags[i] = true;
                flags[i + wu] = true;
            }
        }
    }
    BoundaryMap { width: w, height: h, flags }
}

pub fn make_weight_map(boundary: &BoundaryMap, alpha: f64) -> Result<WeightMap, WeightError> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(WeightError::NegativeAlpha(alpha));
    }
    let on = 1.0 + alpha;
    Ok(WeightMap {
        width: boundary.width,
        height: boundary.height,
        weights: boundary.flags.iter().map(|&b| if b { on } else { 1.0 }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_map_has_no_boundary() {
        let map = LabelMap::from_raw(5, 4, vec![3; 20]).unwrap();
        assert_eq!(extract_boundary(&map).count(), 0);
    }

    #[test]
    fn vertical_split() {
        let labels: Vec<u8> = (0..16).map(|i| if i % 4 < 2 { 1 } else { 2 }).collect();
        let b = extract_boundary(&LabelMap::from_raw(4, 4, labels).unwrap());
        assert_eq!(b.count(), 8);
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(b.get(x, y), x == 1 || x == 2);
            }
        }
    }

    #[test]
    fn weights() {
        let labels: Vec<u8> = (0..16).map(|i| if i % 4 < 2 { 1 } else { 2 }).collect();
        let b = extract_boundary(&LabelMap::from_raw(4, 4, labels).unwrap());
        let w = make_weight_map(&b, 200.0).unwrap();
        assert_eq!(w.get(1, 0), 201.0);
        assert_eq!(w.get(0, 0), 1.0);
        assert!(make_weight_map(&b, 0.0).unwrap().weights().iter().all(|&v| v == 1.0));
        assert_eq!(make_weight_map(&b, -1.0), Err(WeightError::NegativeAlpha(-1.0)));
        assert!(make_weight_map(&b, f64::NAN).is_err());
    }
}
