//! Heat-map accumulation with jitter-suppressing weighted increments,
//! normalization, color overlay rendering, and per-track visit
//! statistics.

mod heatmap;
mod render;
mod stats;

pub use heatmap::{HeatMap, WeightKernel};
pub use render::{colormap, render_overlay};
pub use stats::{collect_stats, stats_from_events, TrackVisit, VisitStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("overlay dimensions {bg_w}x{bg_h} do not match map {map_w}x{map_h}")]
    DimensionMismatch { map_w: usize, map_h: usize, bg_w: usize, bg_h: usize },
    #[error("normalized raster length {len} does not match {width}x{height}")]
    BadRaster { len: usize, width: usize, height: usize },
    #[error("event log: {0}")]
    EventLog(#[from] crate::track::EventParseError),
}
