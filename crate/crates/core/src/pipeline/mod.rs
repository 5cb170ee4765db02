//! The batch-processing engine: bounded image buffer, batch partition
//! into detection and tracker-only frames, and concurrent detector /
//! tracker units. Throughput, not latency, is the objective; the summary
//! reports both.

mod batch;
mod engine;
mod source;

pub use batch::{partition_batch, BatchFrame, Batcher, FrameBatch};
pub use engine::{
    run_pipeline, run_sequential, scale_detections, CollectSink, FrameOutput, PipelineSink,
    RunSummary,
};
pub use source::{DirectorySource, FrameSource, MemorySource, SourceError, SourceFrame};

use std::time::Duration;

use thiserror::Error;

use crate::detect::ProviderError;
use crate::flow::FlowError;
use crate::imgproc::ImageError;
use crate::track::TrackError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid pipeline config: {0}")]
    BadConfig(String),
    #[error("batch of {len} frames is not divisible by {dets} detections per batch")]
    NonDivisibleBatch { len: usize, dets: usize },
    #[error("frame source failed: {0}")]
    Source(#[from] SourceError),
    #[error("detection provider failed: {0}")]
    Provider(#[from] ProviderError),
    #[error("provider broke its contract: no result for requested frame {frame}")]
    ProviderContract { frame: u64 },
    #[error("optical flow failed: {0}")]
    Flow(#[from] FlowError),
    #[error("image processing failed: {0}")]
    Image(#[from] ImageError),
    #[error("tracker failed: {0}")]
    Track(#[from] TrackError),
    #[error("pipeline stage disconnected: {0}")]
    Disconnected(&'static str),
}

/// Batch-processing configuration. Defaults mirror the reference
/// operating point: 24-frame buffer, 8 detection frames per batch,
/// 512x288 processing raster.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Frames collected per batch.
    pub buffer_size: usize,
    /// Frames of each batch handed to the detector; must divide
    /// `buffer_size`.
    pub detections_per_batch: usize,
    pub proc_width: usize,
    pub proc_height: usize,
    /// Bounded queue capacity between stages, in batches.
    pub queue_capacity: usize,
    /// Synthetic per-batch tracker work, for scheduling experiments.
    pub tracker_load: Duration,
    /// Raster the provider's coordinates live in; detections are scaled
    /// to the processing raster when this differs.
    pub provider_resolution: Option<(f32, f32)>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            buffer_size: 24,
            detections_per_batch: 8,
            proc_width: 512,
            proc_height: 288,
            queue_capacity: 2,
            tracker_load: Duration::ZERO,
            provider_resolution: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.detections_per_batch == 0 {
            return Err(PipelineError::BadConfig("detections_per_batch must be >= 1".into()));
        }
        if self.buffer_size == 0 {
            return Err(PipelineError::BadConfig("buffer_size must be >= 1".into()));
        }
        if self.buffer_size % self.detections_per_batch != 0 {
            return Err(PipelineError::BadConfig(format!(
                "buffer_size {} must be divisible by detections_per_batch {}",
                self.buffer_size, self.detections_per_batch
            )));
        }
        if self.queue_capacity == 0 {
            return Err(PipelineError::BadConfig("queue_capacity must be >= 1".into()));
        }
        if self.proc_width < 16 || self.proc_height < 16 {
            return Err(PipelineError::BadConfig(format!(
                "processing resolution {}x{} too small",
                self.proc_width, self.proc_height
            )));
        }
        Ok(())
    }

    /// Detection-frame stride within a full batch.
    pub fn stride(&self) -> usize {
        self.buffer_size / self.detections_per_batch
    }
}
