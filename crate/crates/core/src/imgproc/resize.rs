//! Bilinear resampling with half-pixel-centered sampling.
//!
//! Destination pixel `(ox, oy)` samples the source at
//! `((ox + 0.5) * sx - 0.5, (oy + 0.5) * sy - 0.5)` where `sx`, `sy` are
//! the per-axis scale ratios. Gray output rounds half away from zero;
//! that rounding is frozen for golden tests.

use super::image::GrayImage;
use super::ImageError;
use crate::exec;

/// Shrink an image to exactly `target_w x target_h`. Upscaling and zero
/// targets are rejected.
pub fn downscale(img: &GrayImage, target_w: usize, target_h: usize) -> Result<GrayImage, ImageError> {
    if target_w == 0 || target_h == 0 {
        return Err(ImageError::ZeroTarget);
    }
    if target_w > img.width() || target_h > img.height() {
        return Err(ImageError::UpscaleRejected {
            src_w: img.width(),
            src_h: img.height(),
            target_w,
            target_h,
        });
    }
    if target_w == img.width() && target_h == img.height() {
        return Ok(img.clone());
    }
    let sx = img.width() as f32 / target_w as f32;
    let sy = img.height() as f32 / target_h as f32;
    let mut data = vec![0u8; target_w * target_h];
    exec::for_each_chunk_mut(&mut data, target_w, |oy, row| {
        let src_y = (oy as f32 + 0.5) * sy - 0.5;
        for (ox, out) in row.iter_mut().enumerate() {
            let src_x = (ox as f32 + 0.5) * sx - 0.5;
            let v = img.sample(src_x, src_y);
            // Round half away from zero; samples are non-negative here.
            *out = (v + 0.5).floor().clamp(0.0, 255.0) as u8;
        }
    });
    GrayImage::new(target_w, target_h, data)
}

/// Resample a real-valued field (row-major, `w x h`) to `tw x th` with
/// the same half-pixel-centered bilinear kernel. Used to scale heat-map
/// rasters onto backgrounds of a different resolution.
pub fn resize_field(field: &[f32], w: usize, h: usize, tw: usize, th: usize) -> Vec<f32> {
    assert_eq!(field.len(), w * h);
    assert!(tw > 0 && th > 0);
    if tw == w && th == h {
        return field.to_vec();
    }
    let sx = w as f32 / tw as f32;
    let sy = h as f32 / th as f32;
    let sample = |x: f32, y: f32| -> f32 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let xi = x0 as isize;
        let yi = y0 as isize;
        let at = |px: isize, py: isize| -> f32 {
            let cx = px.clamp(0, w as isize - 1) as usize;
            let cy = py.clamp(0, h as isize - 1) as usize;
            field[cy * w + cx]
        };
        let top = at(xi, yi) + fx * (at(xi + 1, yi) - at(xi, yi));
        let bot = at(xi, yi + 1) + fx * (at(xi + 1, yi + 1) - at(xi, yi + 1));
        top + fy * (bot - top)
    };
    let mut out = vec![0f32; tw * th];
    exec::for_each_chunk_mut(&mut out, tw, |oy, row| {
        let src_y = (oy as f32 + 0.5) * sy - 0.5;
        for (ox, v) in row.iter_mut().enumerate() {
            let src_x = (ox as f32 + 0.5) * sx - 0.5;
            *v = sample(src_x, src_y);
        }
    });
    out
}
