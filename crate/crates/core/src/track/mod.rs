//! The identity layer: track state machine, detection-to-track matching,
//! optical-flow propagation through tracker-only frames, miss counting,
//! and the lost-track memory with radius/quadrant recovery.

mod engine;
mod event;
mod matching;
mod recovery;

pub use engine::{Tracker, TrackSnapshot};
pub use event::{format_event_log, parse_event_log, EventKind, EventParseError, TrackEvent};
pub use matching::{match_detections, Assignment};
pub use recovery::{motion_direction, select_lost_candidate, LostCandidate};

use thiserror::Error;

use crate::flow::FlowParams;
use crate::geom::{BBox, Point2f};
use crate::imgproc::CornerParams;

pub type TrackId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackState {
    Active,
    Lost,
    Dead,
}

/// One tracked identity. IDs are assigned monotonically and never reused
/// within a run; Dead tracks are never revived.
#[derive(Debug, Clone)]
pub struct Track {
    pub id: TrackId,
    pub state: TrackState,
    pub bbox: BBox,
    /// Sparse point representation inside the box.
    pub points: Vec<Point2f>,
    /// Detection-frame box centers, strictly increasing frame indices.
    pub history: Vec<(u64, Point2f)>,
    /// Consecutive detection-frame misses.
    pub miss_count: u32,
    /// Frame at which the track entered the Lost state.
    pub lost_since: Option<u64>,
    /// Set when flow lost too many points; cleared by the next re-seed.
    pub needs_reseed: bool,
    /// Confidence inherited from the last matched detection.
    pub confidence: f32,
    pub spawn_frame: u64,
}

#[derive(Debug, Error)]
pub enum TrackError {
    #[error("invalid tracker config: {0}")]
    BadConfig(String),
}

/// Tracker parameters. `recovery_radius` is expressed in the native
/// camera raster and scaled to the processing raster by the engine.
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    /// Consecutive detection-frame misses before a track goes Lost.
    pub miss_threshold: u32,
    /// How long a lost track is remembered, in seconds.
    pub lost_memory_s: f32,
    /// Recovery radius in native-raster pixels (1280x720 by default).
    pub recovery_radius: f32,
    /// Width of the native raster the recovery radius refers to.
    pub native_width: f32,
    /// Minimum IoU for a detection-to-track match.
    pub iou_match_threshold: f32,
    /// Detections at or below this confidence are ignored by the tracker.
    pub confidence_threshold: f32,
    /// Stream frame rate, used to convert lost memory to frames.
    pub fps: f32,
    /// History entries considered by the motion-direction estimate.
    pub gradient_window: usize,
    /// Minimum surviving flow points for a valid median displacement.
    pub min_survivors: usize,
    pub corner: CornerParams,
    pub flow: FlowParams,
    pub pyramid_levels: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            miss_threshold: 5,
            lost_memory_s: 5.0,
            recovery_radius: 200.0,
            native_width: 1280.0,
            iou_match_threshold: 0.3,
            confidence_threshold: 0.10,
            fps: 25.0,
            gradient_window: 5,
            min_survivors: 3,
            corner: CornerParams::default(),
            flow: FlowParams::default(),
            pyramid_levels: 3,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), TrackError> {
        if self.miss_threshold == 0 {
            return Err(TrackError::BadConfig("miss_threshold must be >= 1".into()));
        }
        if !(self.lost_memory_s >= 0.0) {
            return Err(TrackError::BadConfig("lost_memory_s must be >= 0".into()));
        }
        if !(self.recovery_radius > 0.0) {
            return Err(TrackError::BadConfig("recovery_radius must be > 0".into()));
        }
        if !(self.native_width > 0.0) {
            return Err(TrackError::BadConfig("native_width must be > 0".into()));
        }
        if self.corner.max_corners == 0 {
            return Err(TrackError::BadConfig("corner.max_corners must be >= 1".into()));
        }
        if !(self.corner.quality > 0.0 && self.corner.quality < 1.0) {
            return Err(TrackError::BadConfig("corner.quality must be in (0, 1)".into()));
        }
        if self.flow.window < 5 || self.flow.window % 2 == 0 {
            return Err(TrackError::BadConfig("flow.window must be odd and >= 5".into()));
        }
        for (name, v) in [
            ("iou_match_threshold", self.iou_match_threshold),
            ("confidence_threshold", self.confidence_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(TrackError::BadConfig(format!("{name} {v} outside [0, 1]")));
            }
        }
        if !(self.fps > 0.0) {
            return Err(TrackError::BadConfig("fps must be > 0".into()));
        }
        if self.gradient_window < 2 {
            return Err(TrackError::BadConfig("gradient_window must be >= 2".into()));
        }
        if self.pyramid_levels == 0 {
            return Err(TrackError::BadConfig("pyramid_levels must be >= 1".into()));
        }
        Ok(())
    }

    /// Lost-track memory horizon in frames.
    pub fn lost_memory_frames(&self) -> u64 {
        (self.lost_memory_s * self.fps).ceil() as u64
    }
}
