//! Seeded smooth textures for synthetic scenes. Value noise (a random
//! lattice with bilinear interpolation) gives the sparse tracker enough
//! gradient everywhere while staying bit-reproducible and cheap to
//! evaluate at arbitrary sub-pixel positions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec;
use crate::imgproc::GrayImage;

/// A continuous gray-level field over the plane, values in [24, 232].
#[derive(Debug, Clone)]
pub struct ValueNoise {
    grid_w: usize,
    grid_h: usize,
    cell: f32,
    lattice: Vec<f32>,
}

impl ValueNoise {
    /// Lattice spacing `cell` pixels, covering a `width x height` region
    /// (evaluation clamps beyond it).
    pub fn new(seed: u64, width: usize, height: usize, cell: f32) -> Self {
        assert!(cell >= 1.0);
        let grid_w = (width as f32 / cell).ceil() as usize + 2;
        let grid_h = (height as f32 / cell).ceil() as usize + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lattice = (0..grid_w * grid_h).map(|_| rng.gen_range(24.0f32..232.0)).collect();
        Self { grid_w, grid_h, cell, lattice }
    }

    /// Field value at a sub-pixel position.
    pub fn eval(&self, x: f32, y: f32) -> f32 {
        let gx = (x / self.cell).clamp(0.0, (self.grid_w - 2) as f32);
        let gy = (y / self.cell).clamp(0.0, (self.grid_h - 2) as f32);
        let x0 = gx.floor() as usize;
        let y0 = gy.floor() as usize;
        let fx = gx - x0 as f32;
        let fy = gy - y0 as f32;
        let at = |xi: usize, yi: usize| self.lattice[yi * self.grid_w + xi];
        let top = at(x0, y0) + fx * (at(x0 + 1, y0) - at(x0, y0));
        let bot = at(x0, y0 + 1) + fx * (at(x0 + 1, y0 + 1) - at(x0, y0 + 1));
        top + fy * (bot - top)
    }
}

fn quantize(v: f32) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Render the noise field sampled at integer pixel centers.
pub fn textured_image(width: usize, height: usize, seed: u64) -> GrayImage {
    let noise = ValueNoise::new(seed, width, height, 4.0);
    render_shifted(&noise, width, height, 0.0, 0.0)
}

/// A pair of frames showing the same field, the second translated by
/// `(dx, dy)` — the ground-truth shift for flow tests. Sub-pixel shifts
/// are exact because the field is continuous.
pub fn translated_pair(
    width: usize,
    height: usize,
    seed: u64,
    dx: f32,
    dy: f32,
) -> (GrayImage, GrayImage) {
    let noise = ValueNoise::new(seed, width + dx.abs().ceil() as usize, height + dy.abs().ceil() as usize, 4.0);
    let a = render_shifted(&noise, width, height, 0.0, 0.0);
    let b = render_shifted(&noise, width, height, dx, dy);
    (a, b)
}

fn render_shifted(noise: &ValueNoise, width: usize, height: usize, dx: f32, dy: f32) -> GrayImage {
    let mut data = vec![0u8; width * height];
    exec::for_each_chunk_mut(&mut data, width, |y, row| {
        for (x, out) in row.iter_mut().enumerate() {
            *out = quantize(noise.eval(x as f32 - dx, y as f32 - dy));
        }
    });
    GrayImage::new(width, height, data).expect("dimensions positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_texture_is_reproducible() {
        let a = textured_image(64, 48, 5);
        let b = textured_image(64, 48, 5);
        assert_eq!(a, b);
        let c = textured_image(64, 48, 6);
        assert_ne!(a, c);
    }

    #[test]
    fn integer_translation_shifts_pixels() {
        let (a, b) = translated_pair(64, 48, 9, 3.0, 2.0);
        // b(x, y) == a(x - 3, y - 2) wherever both are defined.
        for y in 2..48 {
            for x in 3..64 {
                assert_eq!(b.get(x, y), a.get(x - 3, y - 2), "at ({x},{y})");
            }
        }
    }

    #[test]
    fn texture_has_gradient_everywhere() {
        let img = textured_image(64, 64, 3);
        // No 8x8 block should be constant.
        for by in 0..8 {
            for bx in 0..8 {
                let mut lo = 255u8;
                let mut hi = 0u8;
                for y in 0..8 {
                    for x in 0..8 {
                        let v = img.get(bx * 8 + x, by * 8 + y);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                assert!(hi - lo > 4, "flat block at ({bx},{by})");
            }
        }
    }
}
