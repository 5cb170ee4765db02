//! Color overlay rendering: alpha-blend the normalized heat map over a
//! background frame through a fixed 5-stop colormap. All arithmetic and
//! rounding are fixed, so outputs are byte-stable for golden tests.

use super::AnalyticsError;
use crate::imgproc::RgbImage;

const ALPHA: f64 = 0.6;

/// 5-stop linear colormap: blue, cyan, green, yellow, red at
/// v = 0, 0.25, 0.5, 0.75, 1.
pub fn colormap(v: f32) -> [u8; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [0.0, 0.0, 255.0],
        [0.0, 255.0, 255.0],
        [0.0, 255.0, 0.0],
        [255.0, 255.0, 0.0],
        [255.0, 0.0, 0.0],
    ];
    let v = v.clamp(0.0, 1.0) as f64;
    let scaled = v * 4.0;
    let seg = (scaled.floor() as usize).min(3);
    let t = scaled - seg as f64;
    let mut rgb = [0u8; 3];
    for c in 0..3 {
        let x = STOPS[seg][c] + t * (STOPS[seg + 1][c] - STOPS[seg][c]);
        rgb[c] = (x + 0.5).floor().clamp(0.0, 255.0) as u8;
    }
    rgb
}

/// Per-pixel blend `out = (1 - a*v) * bg + a*v * colormap(v)` with
/// a = 0.6. The normalized raster and background must already share
/// dimensions (scale one of them first).
pub fn render_overlay(
    normalized: &[f32],
    width: usize,
    height: usize,
    background: &RgbImage,
) -> Result<RgbImage, AnalyticsError> {
    if normalized.len() != width * height {
        return Err(AnalyticsError::BadRaster { len: normalized.len(), width, height });
    }
    if background.width() != width || background.height() != height {
        return Err(AnalyticsError::DimensionMismatch {
            map_w: width,
            map_h: height,
            bg_w: background.width(),
            bg_h: background.height(),
        });
    }
    let mut out = Vec::with_capacity(width * height * 3);
    for (i, &v) in normalized.iter().enumerate() {
        let v = v.clamp(0.0, 1.0);
        let heat = colormap(v);
        let bg = &background.data()[i * 3..i * 3 + 3];
        let a = ALPHA * v as f64;
        for c in 0..3 {
            let x = (1.0 - a) * bg[c] as f64 + a * heat[c] as f64;
            out.push((x + 0.5).floor().clamp(0.0, 255.0) as u8);
        }
    }
    Ok(RgbImage::new(width, height, out).expect("dimensions validated"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_hits_the_stops() {
        assert_eq!(colormap(0.0), [0, 0, 255]);
        assert_eq!(colormap(0.25), [0, 255, 255]);
        assert_eq!(colormap(0.5), [0, 255, 0]);
        assert_eq!(colormap(0.75), [255, 255, 0]);
        assert_eq!(colormap(1.0), [255, 0, 0]);
    }

    #[test]
    fn zero_heat_returns_background() {
        let bg = RgbImage::filled(4, 3, [10, 130, 200]);
        let out = render_overlay(&vec![0.0; 12], 4, 3, &bg).unwrap();
        assert_eq!(out, bg);
    }

    #[test]
    fn full_heat_pixel_is_sixty_percent_red() {
        let bg = RgbImage::filled(2, 1, [100, 100, 100]);
        let mut v = vec![0.0f32; 2];
        v[0] = 1.0;
        let out = render_overlay(&v, 2, 1, &bg).unwrap();
        // 0.4 * 100 + 0.6 * 255 = 193; 0.4 * 100 = 40.
        assert_eq!(out.get(0, 0), [193, 40, 40]);
        assert_eq!(out.get(1, 0), [100, 100, 100]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let bg = RgbImage::filled(4, 4, [0, 0, 0]);
        assert!(render_overlay(&vec![0.0; 12], 4, 3, &bg).is_err());
        assert!(render_overlay(&vec![0.0; 9], 4, 3, &bg).is_err());
    }

    #[test]
    fn rendering_is_deterministic() {
        let bg = RgbImage::filled(8, 8, [37, 81, 14]);
        let v: Vec<f32> = (0..64).map(|i| i as f32 / 63.0).collect();
        let a = render_overlay(&v, 8, 8, &bg).unwrap();
        let b = render_overlay(&v, 8, 8, &bg).unwrap();
        assert_eq!(a, b);
    }
}
