//! Image pyramids: each level is a 2x2 box-filtered decimation of the
//! previous, halving width and height (floor, minimum 1).

use super::image::GrayImage;
use super::ImageError;

/// Ordered pyramid levels; level 0 is full resolution.
#[derive(Debug, Clone)]
pub struct Pyramid {
    levels: Vec<GrayImage>,
}

impl Pyramid {
    pub fn levels(&self) -> &[GrayImage] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &GrayImage {
        &self.levels[i]
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn base(&self) -> &GrayImage {
        &self.levels[0]
    }
}

/// Build a pyramid with `levels` levels. Rejects counts that would shrink
/// either dimension below 1 pixel before the floor rule kicks in
/// (`2^(levels-1)` must not exceed the smaller dimension).
pub fn build_pyramid(img: &GrayImage, levels: usize) -> Result<Pyramid, ImageError> {
    if levels == 0 {
        return Err(ImageError::NoLevels);
    }
    let min_dim = img.width().min(img.height());
    if levels > 1 && (1usize << (levels - 1)) > min_dim {
        return Err(ImageError::TooManyLevels {
            levels,
            width: img.width(),
            height: img.height(),
        });
    }
    let mut out = Vec::with_capacity(levels);
    out.push(img.clone());
    for _ in 1..levels {
        out.push(halve(out.last().unwrap()));
    }
    Ok(Pyramid { levels: out })
}

/// 2x2 box-filtered decimation with replicated edges on odd dimensions.
/// Integer rounding is half-up, so constants are preserved exactly.
fn halve(src: &GrayImage) -> GrayImage {
    let w = (src.width() / 2).max(1);
    let h = (src.height() / 2).max(1);
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        let y0 = 2 * y;
        let y1 = (2 * y + 1).min(src.height() - 1);
        for x in 0..w {
            let x0 = 2 * x;
            let x1 = (2 * x + 1).min(src.width() - 1);
            let sum = src.get(x0, y0) as u16
                + src.get(x1, y0) as u16
                + src.get(x0, y1) as u16
                + src.get(x1, y1) as u16;
            data.push(((sum + 2) / 4) as u8);
        }
    }
    GrayImage::new(w, h, data).expect("halved dimensions are positive")
}
