//! Aligned face rasters and 68-point landmark sets.

use crate::error::{MoverError, Result};
use crate::scalar::Scalar;
use ndarray::Array3;
use std::path::Path;

/// Side length of every aligned face crop, in pixels.
pub const FACE_SIZE: usize = 224;
/// Number of landmark points per face.
pub const N_LANDMARKS: usize = 68;

// 68-point convention, 0-indexed.
pub const JAW: std::ops::Range<usize> = 0..17;
pub const BROWS: std::ops::Range<usize> = 17..27;
pub const NOSE: std::ops::Range<usize> = 27..36;
pub const EYES: std::ops::Range<usize> = 36..48;
pub const MOUTH: std::ops::Range<usize> = 48..68;

/// Where a landmark set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkSource {
    Detector,
    Synthetic,
    Cache,
}

/// 68 labeled 2-D keypoints in face-crop pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    pub points: [(f64, f64); N_LANDMARKS],
    pub source: LandmarkSource,
}

impl LandmarkSet {
    pub fn new(points: [(f64, f64); N_LANDMARKS], source: LandmarkSource) -> Result<Self> {
        let lm = LandmarkSet { points, source };
        lm.validate()?;
        Ok(lm)
    }

    /// Checks the crop-coordinate invariants: finite, within [0, 224).
    pub fn validate(&self) -> Result<()> {
        for (i, &(x, y)) in self.points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(MoverError::Geometry(format!(
                    "landmark {i} is not finite: ({x}, {y})"
                )));
            }
            if !(0.0..FACE_SIZE as f64).contains(&x) || !(0.0..FACE_SIZE as f64).contains(&y) {
                return Err(MoverError::Geometry(format!(
                    "landmark {i} outside [0,{FACE_SIZE}): ({x}, {y})"
                )));
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box (min_x, min_y, max_x, max_y).
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        let mut min_x = f64::INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for &(x, y) in &self.points {
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        (min_x, min_y, max_x, max_y)
    }

    pub fn max_y_over(&self, idx: impl IntoIterator<Item = usize>) -> f64 {
        idx.into_iter()
            .map(|i| self.points[i].1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_y_over(&self, idx: impl IntoIterator<Item = usize>) -> f64 {
        idx.into_iter()
            .map(|i| self.points[i].1)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Aligned RGB face crop: 224x224x3 (row, col, channel), values in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct FaceImage<T: Scalar> {
    pub pixels: Array3<T>,
    pub frame_index: usize,
    pub video_id: String,
}

impl<T: Scalar> FaceImage<T> {
    pub fn new(pixels: Array3<T>, frame_index: usize, video_id: impl Into<String>) -> Result<Self> {
        if pixels.dim() != (FACE_SIZE, FACE_SIZE, 3) {
            return Err(MoverError::Shape {
                expected: format!("{FACE_SIZE}x{FACE_SIZE}x3"),
                got: format!("{:?}", pixels.dim()),
            });
        }
        Ok(FaceImage {
            pixels,
            frame_index,
            video_id: video_id.into(),
        })
    }

    pub fn zeros(frame_index: usize, video_id: impl Into<String>) -> Self {
        FaceImage {
            pixels: Array3::zeros((FACE_SIZE, FACE_SIZE, 3)),
            frame_index,
            video_id: video_id.into(),
        }
    }

    /// True when every pixel lies in [0,1].
    pub fn in_unit_range(&self) -> bool {
        self.pixels
            .iter()
            .all(|&v| v >= T::zero() && v <= T::one())
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        let mut buf = image::RgbImage::new(FACE_SIZE as u32, FACE_SIZE as u32);
        for (y, x, px) in buf.enumerate_pixels_mut().map(|(x, y, p)| (y, x, p)) {
            let at = |c: usize| {
                let v = self.pixels[(y as usize, x as usize, c)].as_f64();
                (v.clamp(0.0, 1.0) * 255.0).round() as u8
            };
            *px = image::Rgb([at(0), at(1), at(2)]);
        }
        buf.save(path)
            .map_err(|e| MoverError::Media {
                path: path.to_path_buf(),
                reason: e.to_string(),
            })
    }

    pub fn load_png(path: &Path, frame_index: usize, video_id: &str) -> Result<Self> {
        let img = image::open(path).map_err(|e| MoverError::Media {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let rgb = img.to_rgb8();
        if rgb.width() as usize != FACE_SIZE || rgb.height() as usize != FACE_SIZE {
            return Err(MoverError::Shape {
                expected: format!("{FACE_SIZE}x{FACE_SIZE} png"),
                got: format!("{}x{}", rgb.width(), rgb.height()),
            });
        }
        let mut pixels = Array3::zeros((FACE_SIZE, FACE_SIZE, 3));
        for (x, y, p) in rgb.enumerate_pixels() {
            for c in 0..3 {
                pixels[(y as usize, x as usize, c)] = T::of_f64(p.0[c] as f64 / 255.0);
            }
        }
        FaceImage::new(pixels, frame_index, video_id)
    }
}
