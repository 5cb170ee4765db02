//! Per-pixel accumulation of weighted bounding-box occupancy. The weight
//! kernel peaks at the box center and falls to zero at its borders,
//! which suppresses the jitter of raw detector boxes.

use crate::geom::BBox;

/// Increment weighting across a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKernel {
    /// Separable tent: `(1 - |2 dx / w|) * (1 - |2 dy / h|)`, center 1,
    /// borders 0.
    Tent,
    /// Separable Gaussian with sigma = extent / 4 per axis, rescaled to
    /// peak at 1; a softer alternative.
    Gaussian,
}

/// Accumulation grid over the processing raster.
#[derive(Debug, Clone)]
pub struct HeatMap {
    width: usize,
    height: usize,
    acc: Vec<f64>,
    frame_span: Option<(u64, u64)>,
}

impl HeatMap {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0);
        Self { width, height, acc: vec![0.0; width * height], frame_span: None }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.acc
    }

    /// First and last frame indices folded into this map.
    pub fn frame_span(&self) -> Option<(u64, u64)> {
        self.frame_span
    }

    /// Add one box with the tent kernel.
    pub fn accumulate(&mut self, bbox: &BBox) {
        self.accumulate_with(bbox, WeightKernel::Tent);
    }

    /// Add one box with an explicit kernel. Boxes disjoint from the map
    /// are a no-op.
    pub fn accumulate_with(&mut self, bbox: &BBox, kernel: WeightKernel) {
        let center = bbox.center();
        let x0 = bbox.x.max(0.0).ceil() as usize;
        let y0 = bbox.y.max(0.0).ceil() as usize;
        let x1 = bbox.right().min(self.width as f32 - 1.0).floor();
        let y1 = bbox.bottom().min(self.height as f32 - 1.0).floor();
        if x1 < 0.0 || y1 < 0.0 {
            return;
        }
        let (x1, y1) = (x1 as usize, y1 as usize);
        for py in y0..=y1.min(self.height - 1) {
            let wy = axis_weight(py as f32, center.y, bbox.h, kernel);
            if wy <= 0.0 {
                continue;
            }
            let row = py * self.width;
            for px in x0..=x1.min(self.width - 1) {
                let wx = axis_weight(px as f32, center.x, bbox.w, kernel);
                if wx > 0.0 {
                    self.acc[row + px] += (wx * wy) as f64;
                }
            }
        }
    }

    /// Fold a frame's boxes into the map and extend the frame span.
    pub fn accumulate_frame<'a>(&mut self, frame: u64, boxes: impl IntoIterator<Item = &'a BBox>) {
        self.frame_span = Some(match self.frame_span {
            None => (frame, frame),
            Some((lo, hi)) => (lo.min(frame), hi.max(frame)),
        });
        for b in boxes {
            self.accumulate(b);
        }
    }

    /// Normalized view in `[0, 1]`: divide by the max accumulator. An
    /// all-zero map stays all zero.
    pub fn normalize(&self) -> Vec<f32> {
        let max = self.acc.iter().copied().fold(0.0f64, f64::max);
        if max <= 0.0 {
            return vec![0.0; self.acc.len()];
        }
        self.acc.iter().map(|&v| (v / max) as f32).collect()
    }

    /// Index of the hottest pixel, row-major first on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0usize;
        for (i, v) in self.acc.iter().enumerate() {
            if *v > self.acc[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    /// Plain-text matrix for regression diffs: one row per line,
    /// space-separated accumulators in shortest round-trip form.
    pub fn matrix_text(&self) -> String {
        let mut out = String::new();
        for row in self.acc.chunks(self.width) {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                out.push_str(&v.to_string());
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

fn axis_weight(p: f32, center: f32, extent: f32, kernel: WeightKernel) -> f32 {
    let t = 2.0 * (p - center) / extent;
    match kernel {
        WeightKernel::Tent => (1.0 - t.abs()).max(0.0),
        WeightKernel::Gaussian => {
            if t.abs() > 1.0 {
                0.0
            } else {
                // sigma = extent/4 means t is measured in units of 2 sigma.
                (-2.0 * t * t).exp()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_weights_on_3x3_box() {
        // 3x3 box centered at (1,1): center weight 1, edge-adjacent 1/3,
        // corners 1/9 (tent product evaluated at the pixel centers).
        let mut map = HeatMap::new(3, 3);
        map.accumulate(&BBox::new(-0.5, -0.5, 3.0, 3.0));
        let acc = map.accumulators();
        let expect = [
            1.0 / 9.0,
            1.0 / 3.0,
            1.0 / 9.0,
            1.0 / 3.0,
            1.0,
            1.0 / 3.0,
            1.0 / 9.0,
            1.0 / 3.0,
            1.0 / 9.0,
        ];
        for (i, (got, want)) in acc.iter().zip(expect.iter()).enumerate() {
            assert!((got - want).abs() < 1e-6, "pixel {i}: {got} vs {want}");
        }
    }

    #[test]
    fn center_gains_max_corners_gain_almost_nothing() {
        // Box centered exactly on pixel (30, 30).
        let mut map = HeatMap::new(64, 64);
        let bbox = BBox::new(19.5, 19.5, 21.0, 21.0);
        map.accumulate(&bbox);
        assert_eq!(map.argmax(), (30, 30));
        assert!((map.accumulators()[30 * 64 + 30] - 1.0).abs() < 1e-9);
        // Pixels near the box corners sit next to the tent's zero contour.
        assert!(map.accumulators()[20 * 64 + 20] < 0.01);
    }

    #[test]
    fn accumulation_is_additive() {
        let mut once = HeatMap::new(32, 32);
        let mut twice = HeatMap::new(32, 32);
        let bbox = BBox::new(5.0, 5.0, 12.0, 20.0);
        once.accumulate(&bbox);
        twice.accumulate(&bbox);
        twice.accumulate(&bbox);
        for (a, b) in once.accumulators().iter().zip(twice.accumulators()) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn accumulation_is_order_independent() {
        let boxes = [
            BBox::new(3.0, 4.0, 10.0, 8.0),
            BBox::new(15.5, 2.25, 7.0, 19.0),
            BBox::new(0.0, 0.0, 30.0, 30.0),
        ];
        let mut fwd = HeatMap::new(32, 32);
        let mut rev = HeatMap::new(32, 32);
        for b in &boxes {
            fwd.accumulate(b);
        }
        for b in boxes.iter().rev() {
            rev.accumulate(b);
        }
        assert_eq!(fwd.accumulators(), rev.accumulators());
    }

    #[test]
    fn tent_mass_matches_analytic_integral() {
        // The tent product integrates to (w/2)(h/2) over the box; the
        // pixel sum is a Riemann approximation within 2% for boxes of at
        // least 10x10.
        for (w, h) in [(10.0f32, 10.0f32), (25.0, 14.0), (60.0, 33.0)] {
            let mut map = HeatMap::new(128, 128);
            map.accumulate(&BBox::new(30.2, 40.7, w, h));
            let mass: f64 = map.accumulators().iter().sum();
            let analytic = (w as f64 / 2.0) * (h as f64 / 2.0);
            let rel = (mass - analytic).abs() / analytic;
            assert!(rel < 0.02, "{w}x{h}: mass {mass} vs {analytic} (rel {rel})");
        }
    }

    #[test]
    fn normalize_peaks_at_one_and_guards_zero() {
        let mut map = HeatMap::new(16, 16);
        map.accumulate(&BBox::new(2.0, 2.0, 9.0, 9.0));
        let norm = map.normalize();
        let max = norm.iter().copied().fold(0.0f32, f32::max);
        assert_eq!(max, 1.0);
        assert!(norm.iter().all(|&v| (0.0..=1.0).contains(&v)));

        let empty = HeatMap::new(8, 8);
        assert!(empty.normalize().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalization_is_scale_invariant_and_keeps_argmax() {
        let mut a = HeatMap::new(16, 16);
        a.accumulate(&BBox::new(2.0, 3.0, 9.0, 7.0));
        let mut b = a.clone();
        for _ in 0..6 {
            b.accumulate(&BBox::new(2.0, 3.0, 9.0, 7.0));
        }
        // b = 7x scaled version of a.
        let na = a.normalize();
        let nb = b.normalize();
        for (x, y) in na.iter().zip(nb.iter()) {
            assert!((x - y).abs() < 1e-6);
        }
        assert_eq!(a.argmax(), b.argmax());
    }

    #[test]
    fn disjoint_box_is_a_noop() {
        let mut map = HeatMap::new(16, 16);
        map.accumulate(&BBox::new(100.0, 100.0, 5.0, 5.0));
        assert!(map.accumulators().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn frame_span_tracks_extremes() {
        let mut map = HeatMap::new(8, 8);
        let b = BBox::new(1.0, 1.0, 3.0, 3.0);
        map.accumulate_frame(10, [&b]);
        map.accumulate_frame(4, [&b]);
        map.accumulate_frame(7, [&b]);
        assert_eq!(map.frame_span(), Some((4, 10)));
    }
}
