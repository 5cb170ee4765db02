//! Throughput comparison (sequential vs pipelined execution) and the
//! miss-threshold sweep harness. Machines vary, so results report ratios
//! and medians, never absolute targets.

use std::collections::BTreeMap;
use std::time::Duration;

use super::pr::{pr_curve, PrCurve, ScoredBox};
use super::scene::Scene;
use super::switches::id_switches;
use crate::detect::{DropPlan, ScriptedProvider, WithLatency};
use crate::geom::BBox;
use crate::pipeline::{
    run_pipeline, run_sequential, CollectSink, MemorySource, PipelineConfig, PipelineError,
};
use crate::track::TrackerConfig;

/// One benchmark configuration's outcome.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub buffer_size: usize,
    pub detections_per_batch: usize,
    pub stride: usize,
    pub tracker_only_per_batch: usize,
    pub sequential_fps: f64,
    pub pipelined_fps: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    pub repetitions: usize,
}

impl BenchTable {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>6} {:>4} {:>6} {:>12} {:>10} {:>10} {:>6}  (median of {})\n",
            "buffer", "dets", "stride", "tracker_only", "seq_fps", "pipe_fps", "ratio", self.repetitions
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>6} {:>4} {:>6} {:>12} {:>10.2} {:>10.2} {:>6.2}\n",
                r.buffer_size,
                r.detections_per_batch,
                r.stride,
                r.tracker_only_per_batch,
                r.sequential_fps,
                r.pipelined_fps,
                r.ratio
            ));
        }
        out
    }

    pub fn machine_block(&self) -> String {
        let mut out = format!("repetitions={}\n", self.repetitions);
        for r in &self.rows {
            let key = format!("bench.{}x{}", r.buffer_size, r.detections_per_batch);
            out.push_str(&format!(
                "{key}.stride={}\n{key}.tracker_only={}\n{key}.sequential_fps={:.3}\n{key}.pipelined_fps={:.3}\n{key}.ratio={:.3}\n",
                r.stride, r.tracker_only_per_batch, r.sequential_fps, r.pipelined_fps, r.ratio
            ));
        }
        out
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Run the scene through both execution modes for every
/// `(buffer_size, detections_per_batch)` variant, with a provider latency
/// shim and synthetic tracker load, reporting median FPS over
/// `repetitions` runs.
pub fn throughput_bench(
    scene: &Scene,
    tracker_cfg: &TrackerConfig,
    base: &PipelineConfig,
    variants: &[(usize, usize)],
    provider_latency: Duration,
    tracker_load: Duration,
    repetitions: usize,
) -> Result<BenchTable, PipelineError> {
    assert!(repetitions >= 1);
    let mut rows = Vec::new();
    for &(buffer_size, detections_per_batch) in variants {
        let pcfg = PipelineConfig { buffer_size, detections_per_batch, tracker_load, ..base.clone() };
        pcfg.validate()?;
        let mut seq = Vec::with_capacity(repetitions);
        let mut pipe = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let source = MemorySource::new(scene.frames.clone());
            let provider = WithLatency::new(
                ScriptedProvider::new(scene.truth.clone(), DropPlan::default()),
                provider_latency,
            );
            let mut sink = CollectSink::default();
            let summary = run_sequential(source, provider, &pcfg, tracker_cfg, &mut sink)?;
            seq.push(summary.fps);
        }
        for _ in 0..repetitions {
            let source = MemorySource::new(scene.frames.clone());
            let provider = WithLatency::new(
                ScriptedProvider::new(scene.truth.clone(), DropPlan::default()),
                provider_latency,
            );
            let mut sink = CollectSink::default();
            let summary = run_pipeline(source, provider, &pcfg, tracker_cfg, &mut sink)?;
            pipe.push(summary.fps);
        }
        let sequential_fps = median(seq);
        let pipelined_fps = median(pipe);
        let stride = buffer_size / detections_per_batch;
        rows.push(BenchRow {
            buffer_size,
            detections_per_batch,
            stride,
            tracker_only_per_batch: buffer_size - detections_per_batch,
            sequential_fps,
            pipelined_fps,
            ratio: if sequential_fps > 0.0 { pipelined_fps / sequential_fps } else { 0.0 },
        });
    }
    Ok(BenchTable { rows, repetitions })
}

/// One miss-threshold configuration's outcome in the sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub miss_threshold: u32,
    pub ap: f64,
    pub id_switches: usize,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub iou_min: f32,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_text(&self) -> String {
        let mut out = format!("miss_threshold ap id_switches (iou_min {})\n", self.iou_min);
        for r in &self.rows {
            out.push_str(&format!("{} {:.6} {}\n", r.miss_threshold, r.ap, r.id_switches));
        }
        out
    }

    pub fn machine_block(&self) -> String {
        let mut out = format!("sweep.iou_min={}\n", self.iou_min);
        for r in &self.rows {
            out.push_str(&format!(
                "sweep.{}.ap={:.6}\nsweep.{}.id_switches={}\n",
                r.miss_threshold, r.ap, r.miss_threshold, r.id_switches
            ));
        }
        out
    }
}

/// End-to-end evaluation of one run: track the scene with the given
/// configs and score the per-frame track boxes against the full ground
/// truth. Track boxes inherit the confidence of their last matched
/// detection.
pub fn evaluate_tracking(
    scene: &Scene,
    plan: &DropPlan,
    pcfg: &PipelineConfig,
    tcfg: &TrackerConfig,
    iou_min: f32,
) -> Result<(PrCurve, usize), PipelineError> {
    let source = MemorySource::new(scene.frames.clone());
    let provider = ScriptedProvider::new(scene.truth.clone(), plan.clone());
    let mut sink = CollectSink::default();
    run_sequential(source, provider, pcfg, tcfg, &mut sink)?;
    let tracks = sink.tracks_per_frame();
    let preds: Vec<ScoredBox> = tracks
        .iter()
        .flat_map(|(frame, snaps)| {
            snaps.iter().map(|s| ScoredBox { frame: *frame, bbox: s.bbox, confidence: s.confidence })
        })
        .collect();
    let truth_boxes: BTreeMap<u64, Vec<BBox>> = scene
        .truth
        .by_frame
        .iter()
        .map(|(f, v)| (*f, v.iter().map(|tb| tb.bbox).collect()))
        .collect();
    let curve = pr_curve(&preds, &truth_boxes, iou_min);
    let switches = id_switches(&tracks, &scene.truth);
    Ok((curve, switches))
}

/// Run the same scene at each miss threshold and report AP and id-switch
/// counts side by side. The direction of change is dataset-dependent and
/// deliberately not asserted anywhere.
pub fn sweep_miss_threshold(
    scene: &Scene,
    plan: &DropPlan,
    pcfg: &PipelineConfig,
    tcfg: &TrackerConfig,
    thresholds: &[u32],
    iou_min: f32,
) -> Result<SweepTable, PipelineError> {
    let mut rows = Vec::new();
    for &miss_threshold in thresholds {
        let cfg = TrackerConfig { miss_threshold, ..tcfg.clone() };
        let (curve, switches) = evaluate_tracking(scene, plan, pcfg, &cfg, iou_min)?;
        rows.push(SweepRow { miss_threshold, ap: curve.ap, id_switches: switches });
    }
    Ok(SweepTable { iou_min, rows })
}
