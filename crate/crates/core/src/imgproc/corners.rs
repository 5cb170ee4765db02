//! Shi-Tomasi corner extraction: minimum eigenvalue of the 2x2 structure
//! tensor summed over a 3x3 window, greedy min-distance suppression in
//! score order. Deterministic: score descending, ties row-major.

use super::gradient::gradients;
use super::image::GrayImage;
use super::ImageError;
use crate::exec;
use crate::geom::{BBox, Point2f};

/// Seeding parameters. Defaults give ~30 points per person box at the
/// 512x288 processing raster.
#[derive(Debug, Clone, Copy)]
pub struct CornerParams {
    pub max_corners: usize,
    /// Relative score floor in (0,1): keep points scoring at least
    /// `quality x best_in_roi`.
    pub quality: f32,
    /// Minimum pairwise distance between returned points, in pixels.
    pub min_distance: f32,
}

impl Default for CornerParams {
    fn default() -> Self {
        Self { max_corners: 30, quality: 0.01, min_distance: 3.0 }
    }
}

/// Extract up to `max_corners` corner points strictly inside
/// `roi ∩ image bounds`. A textureless roi yields an empty list.
pub fn shi_tomasi_corners(
    img: &GrayImage,
    roi: &BBox,
    params: &CornerParams,
) -> Result<Vec<Point2f>, ImageError> {
    if params.max_corners == 0 {
        return Err(ImageError::BadCornerParams("max_corners must be >= 1".into()));
    }
    if !(params.quality > 0.0 && params.quality < 1.0) {
        return Err(ImageError::BadCornerParams(format!(
            "quality {} outside (0,1)",
            params.quality
        )));
    }
    if !roi.is_valid() {
        return Err(ImageError::EmptyRoi);
    }
    let x_lo = roi.x.max(0.0);
    let y_lo = roi.y.max(0.0);
    let x_hi = roi.right().min(img.width() as f32);
    let y_hi = roi.bottom().min(img.height() as f32);
    if x_lo >= x_hi || y_lo >= y_hi {
        return Err(ImageError::EmptyRoi);
    }

    let (ix, iy) = gradients(img)?;
    let w = img.width();

    // Integer pixel rows whose centers fall strictly inside the region.
    let ys: Vec<usize> = (0..img.height())
        .filter(|&y| (y as f32) > y_lo && (y as f32) < y_hi)
        .collect();
    let xs: Vec<usize> = (0..img.width())
        .filter(|&x| (x as f32) > x_lo && (x as f32) < x_hi)
        .collect();
    if ys.is_empty() || xs.is_empty() {
        return Ok(Vec::new());
    }

    // Min-eigenvalue score per candidate, 3x3 window mean.
    let rows: Vec<Vec<(f32, usize, usize)>> = exec::map_slice(&ys, |&y| {
        let mut row = Vec::with_capacity(xs.len());
        for &x in &xs {
            let mut sxx = 0f32;
            let mut sxy = 0f32;
            let mut syy = 0f32;
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let cx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                    let cy = (y as isize + dy).clamp(0, img.height() as isize - 1) as usize;
                    let gx = ix[cy * w + cx];
                    let gy = iy[cy * w + cx];
                    sxx += gx * gx;
                    sxy += gx * gy;
                    syy += gy * gy;
                }
            }
            sxx /= 9.0;
            sxy /= 9.0;
            syy /= 9.0;
            let d = sxx - syy;
            let min_eig = 0.5 * (sxx + syy - (d * d + 4.0 * sxy * sxy).sqrt());
            if min_eig > 0.0 {
                row.push((min_eig, x, y));
            }
        }
        row
    });
    let mut candidates: Vec<(f32, usize, usize)> = rows.into_iter().flatten().collect();
    if candidates.is_empty() {
        return Ok(Vec::new());
    }

    let best = candidates.iter().map(|c| c.0).fold(f32::MIN, f32::max);
    let floor = params.quality * best;
    candidates.retain(|c| c.0 >= floor);
    // Score descending, then row-major (y, then x).
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)).then(a.1.cmp(&b.1)));

    let min_dist2 = params.min_distance * params.min_distance;
    let mut picked: Vec<Point2f> = Vec::with_capacity(params.max_corners);
    for (_, x, y) in candidates {
        let p = Point2f::new(x as f32, y as f32);
        if picked.iter().all(|q| {
            let dx = q.x - p.x;
            let dy = q.y - p.y;
            dx * dx + dy * dy >= min_dist2
        }) {
            picked.push(p);
            if picked.len() == params.max_corners {
                break;
            }
        }
    }
    Ok(picked)
}
