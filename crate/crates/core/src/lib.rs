//! Person-flow analysis for fixed-camera video: a tracking-by-detection
//! pipeline that interleaves sparse detection batches with optical-flow
//! tracking on the in-between frames, keeps stable per-person IDs through
//! occlusions via a lost-track memory, and emits heat maps and visit
//! statistics.
//!
//! The detector itself is pluggable (see [`detect::DetectionProvider`]);
//! this crate ships a file-backed provider and a scripted synthetic one
//! for experiments and tests.

pub mod analytics;
pub mod detect;
pub mod evalkit;
pub mod flow;
pub mod geom;
pub mod imgproc;
pub mod pipeline;
pub mod track;

mod exec;

pub use geom::{BBox, Point2f};
