//! Spatial gradients with the Scharr 3x3 kernel and replicated-edge
//! padding. Responses are normalized by 1/32 so a unit intensity ramp
//! yields a gradient of exactly 1.0 gray level per pixel.

use super::image::GrayImage;
use super::ImageError;
use crate::exec;

const SCHARR_NORM: f32 = 1.0 / 32.0;

/// Horizontal and vertical derivative rasters, same dimensions as the
/// input. Requires at least a 3x3 image.
pub fn gradients(img: &GrayImage) -> Result<(Vec<f32>, Vec<f32>), ImageError> {
    if img.width() < 3 || img.height() < 3 {
        return Err(ImageError::KernelTooLarge { width: img.width(), height: img.height() });
    }
    let w = img.width();
    let h = img.height();
    let mut ix = vec![0f32; w * h];
    let mut iy = vec![0f32; w * h];
    // Scharr x: [-3 0 3; -10 0 10; -3 0 3]; y is the transpose.
    exec::for_each_chunk_mut(&mut ix, w, |y, row| {
        let yi = y as isize;
        for (x, out) in row.iter_mut().enumerate() {
            let xi = x as isize;
            let p = |dx: isize, dy: isize| img.get_clamped(xi + dx, yi + dy) as f32;
            *out = (3.0 * (p(1, -1) - p(-1, -1))
                + 10.0 * (p(1, 0) - p(-1, 0))
                + 3.0 * (p(1, 1) - p(-1, 1)))
                * SCHARR_NORM;
        }
    });
    exec::for_each_chunk_mut(&mut iy, w, |y, row| {
        let yi = y as isize;
        for (x, out) in row.iter_mut().enumerate() {
            let xi = x as isize;
            let p = |dx: isize, dy: isize| img.get_clamped(xi + dx, yi + dy) as f32;
            *out = (3.0 * (p(-1, 1) - p(-1, -1))
                + 10.0 * (p(0, 1) - p(0, -1))
                + 3.0 * (p(1, 1) - p(1, -1)))
                * SCHARR_NORM;
        }
    });
    Ok((ix, iy))
}
