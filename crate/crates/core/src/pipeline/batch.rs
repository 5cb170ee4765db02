//! Batch assembly: partition a frame run into evenly strided detection
//! frames and tracker-only frames.

use super::PipelineError;
use crate::imgproc::GrayImage;

/// Split `len` batch positions into detection positions `{0, s, 2s, ...}`
/// (stride `s = len / detections_per_batch`) and the tracker-only rest.
/// The partition is exact and disjoint; non-divisible lengths are
/// rejected.
pub fn partition_batch(
    len: usize,
    detections_per_batch: usize,
) -> Result<(Vec<usize>, Vec<usize>), PipelineError> {
    if detections_per_batch == 0 || len == 0 || len % detections_per_batch != 0 {
        return Err(PipelineError::NonDivisibleBatch { len, dets: detections_per_batch });
    }
    let stride = len / detections_per_batch;
    let detection: Vec<usize> = (0..detections_per_batch).map(|k| k * stride).collect();
    let tracker_only: Vec<usize> = (0..len).filter(|p| p % stride != 0).collect();
    Ok((detection, tracker_only))
}

/// One ingested frame at processing resolution.
#[derive(Debug, Clone)]
pub struct BatchFrame {
    pub index: u64,
    pub image: GrayImage,
}

/// A contiguous frame run plus its detection-position subset.
#[derive(Debug)]
pub struct FrameBatch {
    pub frames: Vec<BatchFrame>,
    /// Positions within `frames` designated for the detector; sorted.
    pub detection_positions: Vec<usize>,
}

impl FrameBatch {
    pub fn detection_frame_indices(&self) -> Vec<u64> {
        self.detection_positions.iter().map(|&p| self.frames[p].index).collect()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Accumulates frames into full batches; the final partial run is
/// truncated to the largest stride-divisible prefix and the remainder is
/// processed with every frame as a detection frame, so no frame is
/// dropped and partition invariants hold for every emitted batch.
pub struct Batcher {
    buffer_size: usize,
    detections_per_batch: usize,
    pending: Vec<BatchFrame>,
}

impl Batcher {
    pub fn new(buffer_size: usize, detections_per_batch: usize) -> Self {
        Self { buffer_size, detections_per_batch, pending: Vec::with_capacity(buffer_size) }
    }

    /// Add a frame; returns a full batch once `buffer_size` frames are
    /// buffered.
    pub fn push(&mut self, frame: BatchFrame) -> Result<Option<FrameBatch>, PipelineError> {
        self.pending.push(frame);
        if self.pending.len() == self.buffer_size {
            let frames = std::mem::take(&mut self.pending);
            self.pending = Vec::with_capacity(self.buffer_size);
            let (detection_positions, _) = partition_batch(frames.len(), self.detections_per_batch)?;
            return Ok(Some(FrameBatch { frames, detection_positions }));
        }
        Ok(None)
    }

    /// Flush the remaining frames as up to two final batches.
    pub fn finish(&mut self) -> Result<Vec<FrameBatch>, PipelineError> {
        let rest = std::mem::take(&mut self.pending);
        if rest.is_empty() {
            return Ok(Vec::new());
        }
        let stride = self.buffer_size / self.detections_per_batch;
        let prefix_len = (rest.len() / stride) * stride;
        let mut out = Vec::new();
        let mut rest = rest;
        let tail = rest.split_off(prefix_len);
        if !rest.is_empty() {
            let dets = rest.len() / stride;
            let (detection_positions, _) = partition_batch(rest.len(), dets)?;
            out.push(FrameBatch { frames: rest, detection_positions });
        }
        if !tail.is_empty() {
            // Every remainder frame becomes a detection frame (stride 1).
            let n = tail.len();
            let (detection_positions, _) = partition_batch(n, n)?;
            out.push(FrameBatch { frames: tail, detection_positions });
        }
        Ok(out)
    }
}
