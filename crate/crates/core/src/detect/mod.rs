//! Detection data model and pluggable detection providers.
//!
//! The neural-network detector is out of scope; providers stand in for
//! it: [`FileProvider`] replays a detection file, [`ScriptedProvider`]
//! perturbs synthetic ground truth, and [`WithLatency`] models a slow
//! detector for pipeline-overlap experiments.

mod file;
mod provider;

pub use file::{load_detection_file, save_detection_file, DetectionFileError};
pub use provider::{
    ConfidenceRule, DropPlan, DropRule, FileProvider, GroundTruth, ProviderError,
    ScriptedProvider, TruthBox, WithLatency,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geom::BBox;
use crate::imgproc::GrayImage;

/// A detector output: box plus confidence in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub bbox: BBox,
    pub confidence: f32,
}

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("confidence {0} outside [0, 1]")]
    BadConfidence(f32),
    #[error("box dimensions must be positive and finite: ({x}, {y}, {w}, {h})")]
    BadBox { x: f32, y: f32, w: f32, h: f32 },
}

impl Detection {
    pub fn new(bbox: BBox, confidence: f32) -> Result<Self, DetectError> {
        if !bbox.is_valid() {
            return Err(DetectError::BadBox { x: bbox.x, y: bbox.y, w: bbox.w, h: bbox.h });
        }
        if !(0.0..=1.0).contains(&confidence) || !confidence.is_finite() {
            return Err(DetectError::BadConfidence(confidence));
        }
        Ok(Self { bbox, confidence })
    }
}

/// Frame-indexed detection lists.
pub type FrameDetections = BTreeMap<u64, Vec<Detection>>;

/// Detections for one processed batch; carries an entry (possibly empty)
/// for every requested detection frame.
#[derive(Debug, Clone, Default)]
pub struct DetectionBatchResult {
    by_frame: BTreeMap<u64, Vec<Detection>>,
}

impl DetectionBatchResult {
    /// Build a result covering exactly `requested`, filling absent frames
    /// with empty lists.
    pub fn new(requested: &[u64], mut found: FrameDetections) -> Self {
        let mut by_frame = BTreeMap::new();
        for &f in requested {
            by_frame.insert(f, found.remove(&f).unwrap_or_default());
        }
        Self { by_frame }
    }

    pub fn frames(&self) -> impl Iterator<Item = u64> + '_ {
        self.by_frame.keys().copied()
    }

    pub fn get(&self, frame: u64) -> &[Detection] {
        self.by_frame.get(&frame).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn covers(&self, frame: u64) -> bool {
        self.by_frame.contains_key(&frame)
    }
}

/// A frame handed to a provider: index plus the processing-resolution
/// luminance raster.
pub struct ProviderFrame<'a> {
    pub index: u64,
    pub image: &'a GrayImage,
}

/// The detector stand-in. Implementations may take wall-clock time; the
/// result must cover every requested frame.
pub trait DetectionProvider: Send {
    fn detect(&mut self, frames: &[ProviderFrame<'_>]) -> Result<DetectionBatchResult, ProviderError>;
}

/// Intersection over union of two boxes, in `[0, 1]`; 0 when disjoint.
/// Computed in f64 so identical boxes score exactly 1.0.
pub fn iou(a: &BBox, b: &BBox) -> f32 {
    let (ax, ay, aw, ah) = (a.x as f64, a.y as f64, a.w as f64, a.h as f64);
    let (bx, by, bw, bh) = (b.x as f64, b.y as f64, b.w as f64, b.h as f64);
    let x0 = ax.max(bx);
    let y0 = ay.max(by);
    let x1 = (ax + aw).min(bx + bw);
    let y1 = (ay + ah).min(by + bh);
    if x1 > x0 && y1 > y0 {
        let inter = (x1 - x0) * (y1 - y0);
        (inter / (aw * ah + bw * bh - inter)) as f32
    } else {
        0.0
    }
}

/// Keep detections with confidence strictly greater than `threshold`,
/// preserving order.
pub fn confidence_gate(dets: &[Detection], threshold: f32) -> Vec<Detection> {
    dets.iter().filter(|d| d.confidence > threshold).copied().collect()
}
