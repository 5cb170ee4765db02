//! 8-bit raster containers.

use super::ImageError;

/// Row-major 8-bit single-channel raster. Pixel centers sit at integer
/// coordinates; sub-pixel access uses bilinear interpolation with
/// replicated edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage { width, height });
        }
        if data.len() != width * height {
            return Err(ImageError::DataSizeMismatch { len: data.len(), width, height });
        }
        Ok(Self { width, height, data })
    }

    /// Constant-valued image.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0);
        Self { width, height, data: vec![value; width * height] }
    }

    /// Build from a per-pixel function `f(x, y)`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0);
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    /// Pixel value with indices clamped to the image rectangle
    /// (replicated-edge padding).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    /// Bilinear sample at a sub-pixel position, replicated-edge padding
    /// outside the image rectangle.
    #[inline]
    pub fn sample(&self, x: f32, y: f32) -> f32 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let xi = x0 as isize;
        let yi = y0 as isize;
        let p00 = self.get_clamped(xi, yi) as f32;
        let p10 = self.get_clamped(xi + 1, yi) as f32;
        let p01 = self.get_clamped(xi, yi + 1) as f32;
        let p11 = self.get_clamped(xi + 1, yi + 1) as f32;
        let top = p00 + fx * (p10 - p00);
        let bot = p01 + fx * (p11 - p01);
        top + fy * (bot - top)
    }
}

/// Row-major 8-bit RGB raster (3 bytes per pixel).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage { width, height });
        }
        if data.len() != width * height * 3 {
            return Err(ImageError::DataSizeMismatch { len: data.len(), width, height });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0);
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        Self { width, height, data }
    }

    /// Replicate a gray raster into all three channels.
    pub fn from_gray(gray: &GrayImage) -> Self {
        let mut data = Vec::with_capacity(gray.width() * gray.height() * 3);
        for &v in gray.data() {
            data.extend_from_slice(&[v, v, v]);
        }
        Self { width: gray.width(), height: gray.height(), data }
    }

    /// Luminance conversion with BT.601 weights, rounded to nearest.
    pub fn to_luma(&self) -> GrayImage {
        let data = self
            .data
            .chunks_exact(3)
            .map(|px| {
                let y = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
                y.round().clamp(0.0, 255.0) as u8
            })
            .collect();
        GrayImage { width: self.width, height: self.height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_data() {
        assert!(GrayImage::new(4, 4, vec![0; 15]).is_err());
        assert!(GrayImage::new(0, 4, vec![]).is_err());
    }

    #[test]
    fn sample_at_pixel_centers_is_exact() {
        let img = GrayImage::from_fn(4, 4, |x, y| (x * 10 + y) as u8);
        assert_eq!(img.sample(2.0, 3.0), img.get(2, 3) as f32);
    }

    #[test]
    fn sample_midpoint_interpolates() {
        let img = GrayImage::new(2, 1, vec![0, 100]).unwrap();
        assert_eq!(img.sample(0.5, 0.0), 50.0);
    }

    #[test]
    fn sample_outside_replicates_edge() {
        let img = GrayImage::new(2, 2, vec![10, 20, 30, 40]).unwrap();
        assert_eq!(img.sample(-5.0, -5.0), 10.0);
        assert_eq!(img.sample(10.0, 10.0), 40.0);
    }

    #[test]
    fn luma_conversion_is_bt601() {
        let img = RgbImage::filled(1, 1, [255, 0, 0]);
        // 0.299 * 255 = 76.245 -> 76
        assert_eq!(img.to_luma().get(0, 0), 76);
        let gray = RgbImage::filled(1, 1, [77, 77, 77]);
        assert_eq!(gray.to_luma().get(0, 0), 77);
    }
}
