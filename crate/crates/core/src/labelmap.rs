//! Binary masks and 11-category label maps, plus their PNG encodings.
//!
//! Label maps are stored as 8-bit single-channel PNGs whose pixel values are
//! category ids. Masks and boundary maps are stored as 0/255 grayscale PNGs.

use std::io::Cursor;
use std::path::Path;

use image::{GrayImage, ImageFormat, Luma};

use crate::category::{Category, NUM_CATEGORIES};

#[derive(Debug, thiserror::Error)]
pub enum MapError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("label value {value} at ({x}, {y}) is outside 0..{NUM_CATEGORIES}")]
    InvalidLabel { x: u32, y: u32, value: u8 },
    #[error("map dimensions must be positive")]
    Empty,
    #[error("image must be 8-bit single channel, found {0:?}")]
    WrongColorType(image::ColorType),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dims(a: (u32, u32), b: (u32, u32)) -> Result<(), MapError> {
    if a != b {
        return Err(MapError::DimensionMismatch(a.0, a.1, b.0, b.1));
    }
    Ok(())
}

/// A row-major boolean mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Mask {
        Mask { width, height, bits: vec![false; width as usize * height as usize] }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Mask, MapError> {
        if bits.len() != width as usize * height as usize {
            return Err(MapError::DimensionMismatch(width, height, bits.len() as u32, 1));
        }
        Ok(Mask { width, height, bits })
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Mask {
        let bits = (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect();
        Mask { width, height, bits }
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

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[self.offset(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let i = self.offset(x, y);
        self.bits[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    pub fn to_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| Luma([if self.get(x, y) { 255 } else { 0 }]))
    }

    /// Any nonzero pixel counts as set.
    pub fn from_image(img: &GrayImage) -> Mask {
        Mask::from_fn(img.width(), img.height(), |x, y| img.get_pixel(x, y).0[0] != 0)
    }

    pub fn load_png(path: &Path) -> Result<Mask, MapError> {
        Ok(Mask::from_image(&load_gray(path)?))
    }
}

/// A row-major map of category ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelMap {
    width: u32,
    height: u32,
    labels: Vec<u8>,
}

impl LabelMap {
    /// An all-background map.
    pub fn new(width: u32, height: u32) -> Result<LabelMap, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::Empty);
        }
        Ok(LabelMap { width, height, labels: vec![Category::Background.id(); width as usize * height as usize] })
    }

    pub fn from_raw(width: u32, height: u32, labels: Vec<u8>) -> Result<LabelMap, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::Empty);
        }
        if labels.len() != width as usize * height as usize {
            return Err(MapError::DimensionMismatch(width, height, labels.len() as u32, 1));
        }
        if let Some(i) = labels.iter().position(|&v| v as usize >= NUM_CATEGORIES) {
            return Err(MapError::InvalidLabel {
                x: (i % width as usize) as u32,
                y: (i / width as usize) as u32,
                value: labels[i],
            });
        }
        Ok(LabelMap { width, height, labels })
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

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn category(&self, x: u32, y: u32) -> Category {
        Category::from_id(self.get(x, y)).expect("label map holds valid ids")
    }

    pub fn set(&mut self, x: u32, y: u32, c: Category) {
        let w = self.width as usize;
        self.labels[y as usize * w + x as usize] = c.id();
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Overwrites every pixel covered by `mask` with `c`.
    pub fn paint(&mut self, mask: &Mask, c: Category) -> Result<(), MapError> {
        check_dims(self.dims(), mask.dims())?;
        for (cell, &on) in self.labels.iter_mut().zip(mask.bits()) {
            if on {
                *cell = c.id();
            }
        }
        Ok(())
    }

    /// Relabels every pixel through `f`.
    pub fn map_labels(&self, f: impl Fn(u8) -> u8) -> LabelMap {
        LabelMap { width: self.width, height: self.height, labels: self.labels.iter().map(|&v| f(v)).collect() }
    }

    pub fn present_labels(&self) -> Vec<u8> {
        let mut seen = [false; NUM_CATEGORIES];
        for &v in &self.labels {
            seen[v as usize] = true;
        }
        (0..NUM_CATEGORIES as u8).filter(|&v| seen[v as usize]).collect()
    }

    pub fn to_image(&self) -> GrayImage {
        GrayImage::from_raw(self.width, self.height, self.labels.clone()).expect("buffer matches dimensions")
    }

    pub fn from_image(img: &GrayImage) -> Result<LabelMap, MapError> {
        LabelMap::from_raw(img.width(), img.height(), img.as_raw().clone())
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, MapError> {
        encode_png(&self.to_image())
    }

    pub fn decode_png(bytes: &[u8]) -> Result<LabelMap, MapError> {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?;
        LabelMap::from_image(&into_gray(img)?)
    }

    pub fn load_png(path: &Path) -> Result<LabelMap, MapError> {
        LabelMap::from_image(&load_gray(path)?)
    }
}

pub(crate) fn encode_png(img: &GrayImage) -> Result<Vec<u8>, MapError> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)?;
    Ok(buf.into_inner())
}

fn into_gray(img: image::DynamicImage) -> Result<GrayImage, MapError> {
    match img {
        image::DynamicImage::ImageLuma8(g) => Ok(g),
        other => Err(MapError::WrongColorType(other.color())),
    }
}

fn load_gray(path: &Path) -> Result<GrayImage, MapError> {
    let img = image::ImageReader::open(path)?.with_guessed_format()?.decode()?;
    into_gray(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_labels() {
        let err = LabelMap::from_raw(2, 2, vec![0, 1, 11, 3]).unwrap_err();
        assert!(matches!(err, MapError::InvalidLabel { x: 0, y: 1, value: 11 }));
        assert!(matches!(LabelMap::new(0, 3), Err(MapError::Empty)));
    }

    #[test]
    fn png_round_trip() {
        let labels: Vec<u8> = (0..35u8).map(|v| v % 11).collect();
        let map = LabelMap::from_raw(7, 5, labels).unwrap();
        let bytes = map.encode_png().unwrap();
        assert_eq!(LabelMap::decode_png(&bytes).unwrap(), map);
    }

    #[test]
    fn paint_checks_dims() {
        let mut map = LabelMap::new(3, 3).unwrap();
        assert!(map.paint(&Mask::new(3, 2), Category::Hair).is_err());
        let m = Mask::from_fn(3, 3, |x, y| x == y);
        map.paint(&m, Category::Nose).unwrap();
        assert_eq!(map.present_labels(), vec![0, 6]);
        assert_eq!(map.get(1, 1), 6);
    }

    #[test]
    fn mask_image_round_trip() {
        let m = Mask::from_fn(5, 4, |x, y| (x + y) % 3 == 0);
        assert_eq!(Mask::from_image(&m.to_image()), m);
    }
}
