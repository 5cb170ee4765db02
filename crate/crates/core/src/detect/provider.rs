//! Detection providers: file replay, scripted synthetic ground truth with
//! dropout and jitter, and a latency shim for pipeline experiments.

use std::ops::Range;
use std::sync::Arc;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use super::{Detection, DetectionBatchResult, DetectionProvider, FrameDetections, ProviderFrame};
use crate::geom::BBox;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("frame {frame} outside scenario range (frame_count {frame_count})")]
    OutOfRange { frame: u64, frame_count: u64 },
    #[error("provider failed: {0}")]
    Other(String),
}

/// One ground-truth box: owning agent, geometry, and the fraction of its
/// area left visible by the scene's occluders.
#[derive(Debug, Clone)]
pub struct TruthBox {
    pub agent: usize,
    pub bbox: BBox,
    pub visible_fraction: f32,
}

/// Per-frame ground truth with agent identities, produced by the scene
/// generator and consumed by providers and the evaluation kit.
#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    pub frame_count: u64,
    pub agent_names: Vec<String>,
    pub by_frame: std::collections::BTreeMap<u64, Vec<TruthBox>>,
}

impl GroundTruth {
    pub fn boxes(&self, frame: u64) -> &[TruthBox] {
        self.by_frame.get(&frame).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total_boxes(&self) -> usize {
        self.by_frame.values().map(Vec::len).sum()
    }
}

/// Replays a loaded detection table; frames without a record yield no
/// detections.
pub struct FileProvider {
    table: FrameDetections,
}

impl FileProvider {
    pub fn new(table: FrameDetections) -> Self {
        Self { table }
    }
}

impl DetectionProvider for FileProvider {
    fn detect(&mut self, frames: &[ProviderFrame<'_>]) -> Result<DetectionBatchResult, ProviderError> {
        let requested: Vec<u64> = frames.iter().map(|f| f.index).collect();
        let mut found = FrameDetections::new();
        for &f in &requested {
            if let Some(dets) = self.table.get(&f) {
                found.insert(f, dets.clone());
            }
        }
        Ok(DetectionBatchResult::new(&requested, found))
    }
}

/// How scripted detections get their confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfidenceRule {
    Constant(f32),
    /// Confidence equals the box's visible fraction.
    Visibility,
}

/// Drop an agent's detections over a frame range (half-open).
#[derive(Debug, Clone)]
pub struct DropRule {
    pub agent: String,
    pub frames: Range<u64>,
}

/// Perturbation plan for the scripted provider.
#[derive(Debug, Clone)]
pub struct DropPlan {
    pub rules: Vec<DropRule>,
    /// Standard deviation of the Gaussian position jitter, in pixels.
    pub jitter_sigma: f32,
    pub seed: u64,
    pub confidence: ConfidenceRule,
    /// Boxes with a visible fraction below this are suppressed, modeling
    /// a detector that misses occluded people. 0 emits everything.
    pub min_visibility: f32,
}

impl Default for DropPlan {
    fn default() -> Self {
        Self {
            rules: Vec::new(),
            jitter_sigma: 0.0,
            seed: 0,
            confidence: ConfidenceRule::Constant(1.0),
            min_visibility: 0.0,
        }
    }
}

/// Emits ground-truth boxes perturbed by a [`DropPlan`]. Jitter is keyed
/// by (seed, frame, agent), so results do not depend on batch boundaries.
pub struct ScriptedProvider {
    truth: Arc<GroundTruth>,
    plan: DropPlan,
}

impl ScriptedProvider {
    pub fn new(truth: Arc<GroundTruth>, plan: DropPlan) -> Self {
        Self { truth, plan }
    }

    fn dropped(&self, agent: &str, frame: u64) -> bool {
        self.plan
            .rules
            .iter()
            .any(|r| r.agent == agent && r.frames.contains(&frame))
    }
}

impl DetectionProvider for ScriptedProvider {
    fn detect(&mut self, frames: &[ProviderFrame<'_>]) -> Result<DetectionBatchResult, ProviderError> {
        let requested: Vec<u64> = frames.iter().map(|f| f.index).collect();
        let mut found = FrameDetections::new();
        for &frame in &requested {
            if frame >= self.truth.frame_count {
                return Err(ProviderError::OutOfRange { frame, frame_count: self.truth.frame_count });
            }
            let mut dets = Vec::new();
            for tb in self.truth.boxes(frame) {
                let name = &self.truth.agent_names[tb.agent];
                if self.dropped(name, frame) || tb.visible_fraction < self.plan.min_visibility {
                    continue;
                }
                let bbox = if self.plan.jitter_sigma > 0.0 {
                    let mut rng = per_box_rng(self.plan.seed, frame, tb.agent);
                    let dx: f32 = rng.sample::<f32, _>(StandardNormal) * self.plan.jitter_sigma;
                    let dy: f32 = rng.sample::<f32, _>(StandardNormal) * self.plan.jitter_sigma;
                    tb.bbox.translated(dx, dy)
                } else {
                    tb.bbox
                };
                let conf = match self.plan.confidence {
                    ConfidenceRule::Constant(c) => c,
                    ConfidenceRule::Visibility => tb.visible_fraction.clamp(0.0, 1.0),
                };
                dets.push(
                    Detection::new(bbox, conf.clamp(0.0, 1.0))
                        .map_err(|e| ProviderError::Other(e.to_string()))?,
                );
            }
            found.insert(frame, dets);
        }
        Ok(DetectionBatchResult::new(&requested, found))
    }
}

fn per_box_rng(seed: u64, frame: u64, agent: usize) -> ChaCha8Rng {
    // splitmix-style mixing keeps streams independent per (frame, agent).
    let mut z = seed
        ^ frame.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (agent as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Wraps a provider with a fixed per-batch latency, modeling a slow
/// detector without a GPU.
pub struct WithLatency<P> {
    inner: P,
    per_batch: Duration,
}

impl<P> WithLatency<P> {
    pub fn new(inner: P, per_batch: Duration) -> Self {
        Self { inner, per_batch }
    }
}

impl<P: DetectionProvider> DetectionProvider for WithLatency<P> {
    fn detect(&mut self, frames: &[ProviderFrame<'_>]) -> Result<DetectionBatchResult, ProviderError> {
        if !self.per_batch.is_zero() {
            std::thread::sleep(self.per_batch);
        }
        self.inner.detect(frames)
    }
}
