//! Evaluation harness: synthetic scene generation with exact ground
//! truth, precision-recall / AP scoring, id-switch counting, throughput
//! comparison, and the miss-threshold sweep.

mod bench;
mod pr;
mod scene;
mod switches;
pub mod texture;

pub use bench::{
    evaluate_tracking, sweep_miss_threshold, throughput_bench, BenchRow, BenchTable, SweepRow,
    SweepTable,
};
pub use pr::{pr_curve, PrCurve, PrPoint, ScoredBox};
pub use scene::{demo_scene_spec, generate_scene, AgentSpec, Scene, SceneError, SceneSpec};
pub use switches::id_switches;
