//! Pipeline behavior under awkward conditions: partial batches, slow
//! sinks, failing providers, and file-based sources.

use std::time::Duration;

use personflow::detect::{
    load_detection_file, save_detection_file, DetectionBatchResult, DetectionProvider, DropPlan,
    FileProvider, ProviderError, ProviderFrame, ScriptedProvider,
};
use personflow::evalkit::{generate_scene, AgentSpec, Scene, SceneSpec};
use personflow::imgproc::write_pgm;
use personflow::pipeline::{
    run_pipeline, run_sequential, scale_detections, CollectSink, DirectorySource, FrameOutput,
    MemorySource, PipelineConfig, PipelineError, PipelineSink,
};
use personflow::track::TrackerConfig;

fn small_scene(frames: u64) -> Scene {
    let spec = SceneSpec {
        width: 128,
        height: 96,
        frame_count: frames,
        agents: vec![AgentSpec {
            name: "a".into(),
            waypoints: vec![(0, 40.0, 48.0), (frames - 1, 80.0, 48.0)],
            width: 30.0,
            height: 60.0,
            texture_seed: 5,
        }],
        ..SceneSpec::default()
    };
    generate_scene(&spec).unwrap()
}

fn small_cfg() -> (PipelineConfig, TrackerConfig) {
    let pcfg = PipelineConfig { proc_width: 128, proc_height: 96, ..PipelineConfig::default() };
    let tcfg = TrackerConfig {
        flow: personflow::flow::FlowParams { window: 11, ..Default::default() },
        corner: personflow::imgproc::CornerParams { max_corners: 12, ..Default::default() },
        ..TrackerConfig::default()
    };
    (pcfg, tcfg)
}

#[test]
fn empty_source_shuts_down_cleanly() {
    let (pcfg, tcfg) = small_cfg();
    let mut sink = CollectSink::default();
    let scene = small_scene(2);
    let provider = ScriptedProvider::new(scene.truth.clone(), DropPlan::default());
    let summary = run_pipeline(MemorySource::new(vec![]), provider, &pcfg, &tcfg, &mut sink).unwrap();
    assert_eq!(summary.frames, 0);
    assert_eq!(summary.batches, 0);
    assert!(sink.outputs.is_empty());
}

#[test]
fn partial_final_batches_cover_every_frame() {
    // 58 = 2 full 24-frame batches + 10 = stride-3 prefix of 9 + tail of 1.
    let scene = small_scene(58);
    let (pcfg, tcfg) = small_cfg();
    for runner in [true, false] {
        let provider = ScriptedProvider::new(scene.truth.clone(), DropPlan::default());
        let source = MemorySource::new(scene.frames.clone());
        let mut sink = CollectSink::default();
        let summary = if runner {
            run_pipeline(source, provider, &pcfg, &tcfg, &mut sink).unwrap()
        } else {
            run_sequential(source, provider, &pcfg, &tcfg, &mut sink).unwrap()
        };
        assert_eq!(summary.frames, 58);
        assert_eq!(summary.batches, 4);
        let frames: Vec<u64> = sink.outputs.iter().map(|o| o.frame).collect();
        assert_eq!(frames, (0..58).collect::<Vec<_>>());
    }
}

#[test]
fn pipelined_matches_sequential_on_partial_batches() {
    let scene = small_scene(58);
    let (pcfg, tcfg) = small_cfg();
    let mut a = CollectSink::default();
    run_sequential(
        MemorySource::new(scene.frames.clone()),
        ScriptedProvider::new(scene.truth.clone(), DropPlan::default()),
        &pcfg,
        &tcfg,
        &mut a,
    )
    .unwrap();
    let mut b = CollectSink::default();
    run_pipeline(
        MemorySource::new(scene.frames.clone()),
        ScriptedProvider::new(scene.truth.clone(), DropPlan::default()),
        &pcfg,
        &tcfg,
        &mut b,
    )
    .unwrap();
    assert_eq!(a.event_log(), b.event_log());
}

struct SlowSink {
    outputs: Vec<FrameOutput>,
}

impl PipelineSink for SlowSink {
    fn on_frame(&mut self, out: FrameOutput) {
        std::thread::sleep(Duration::from_millis(2));
        self.outputs.push(out);
    }
}

#[test]
fn back_pressure_bounds_buffered_frames() {
    let scene = small_scene(96);
    let (mut pcfg, tcfg) = small_cfg();
    pcfg.queue_capacity = 1;
    let mut sink = SlowSink { outputs: Vec::new() };
    let provider = ScriptedProvider::new(scene.truth.clone(), DropPlan::default());
    let summary =
        run_pipeline(MemorySource::new(scene.frames.clone()), provider, &pcfg, &tcfg, &mut sink)
            .unwrap();
    assert_eq!(summary.frames, 96);
    // Ingest may hold one partial buffer plus queue_capacity batches.
    let bound = pcfg.buffer_size + pcfg.queue_capacity * pcfg.buffer_size;
    assert!(
        summary.peak_buffered_frames <= bound,
        "peak {} exceeds bound {bound}",
        summary.peak_buffered_frames
    );
}

struct FailingProvider {
    after: usize,
    calls: usize,
}

impl DetectionProvider for FailingProvider {
    fn detect(&mut self, frames: &[ProviderFrame<'_>]) -> Result<DetectionBatchResult, ProviderError> {
        self.calls += 1;
        if self.calls > self.after {
            return Err(ProviderError::Other("injected failure".into()));
        }
        let requested: Vec<u64> = frames.iter().map(|f| f.index).collect();
        Ok(DetectionBatchResult::new(&requested, Default::default()))
    }
}

#[test]
fn provider_failure_aborts_with_diagnostic() {
    let scene = small_scene(96);
    let (pcfg, tcfg) = small_cfg();
    let mut sink = CollectSink::default();
    let err = run_pipeline(
        MemorySource::new(scene.frames.clone()),
        FailingProvider { after: 2, calls: 0 },
        &pcfg,
        &tcfg,
        &mut sink,
    )
    .unwrap_err();
    assert!(matches!(err, PipelineError::Provider(_)), "{err}");
    assert!(err.to_string().contains("injected failure"));
    // The first two batches were already delivered in order.
    assert_eq!(sink.outputs.len(), 48);
}

struct IncompleteProvider;

impl DetectionProvider for IncompleteProvider {
    fn detect(&mut self, frames: &[ProviderFrame<'_>]) -> Result<DetectionBatchResult, ProviderError> {
        // Drops the last requested frame from the result.
        let requested: Vec<u64> = frames.iter().map(|f| f.index).collect();
        let kept = &requested[..requested.len() - 1];
        Ok(DetectionBatchResult::new(kept, Default::default()))
    }
}

#[test]
fn contract_violation_is_detected() {
    let scene = small_scene(24);
    let (pcfg, tcfg) = small_cfg();
    let mut sink = CollectSink::default();
    let err = run_sequential(
        MemorySource::new(scene.frames.clone()),
        IncompleteProvider,
        &pcfg,
        &tcfg,
        &mut sink,
    )
    .unwrap_err();
    assert!(matches!(err, PipelineError::ProviderContract { frame: 21 }), "{err}");
}

#[test]
fn directory_source_with_file_provider_end_to_end() {
    let scene = small_scene(48);
    let dir = tempfile::tempdir().unwrap();
    for (i, frame) in scene.frames.iter().enumerate() {
        write_pgm(&dir.path().join(format!("frame_{i:06}.pgm")), frame).unwrap();
    }
    // Ground truth saved as a detection file and replayed from disk.
    let mut table = personflow::detect::FrameDetections::new();
    for (frame, boxes) in &scene.truth.by_frame {
        let dets: Vec<_> = boxes
            .iter()
            .map(|tb| personflow::detect::Detection::new(tb.bbox, 0.95).unwrap())
            .collect();
        table.insert(*frame, dets);
    }
    let det_path = dir.path().join("dets.txt");
    save_detection_file(&det_path, &table).unwrap();
    let reloaded = load_detection_file(&det_path, 48).unwrap();

    let (pcfg, tcfg) = small_cfg();
    let mut sink = CollectSink::default();
    let source = DirectorySource::new(dir.path().to_path_buf()).unwrap();
    let summary =
        run_pipeline(source, FileProvider::new(reloaded), &pcfg, &tcfg, &mut sink).unwrap();
    assert_eq!(summary.frames, 48);
    let ids: std::collections::BTreeSet<u64> = sink.events().iter().map(|e| e.id).collect();
    assert_eq!(ids.len(), 1, "one steady agent, one id");
}

#[test]
fn native_resolution_sources_are_downscaled() {
    // 256x192 source frames, 128x96 processing raster: detections arrive
    // in the native raster and get scaled down.
    let spec = SceneSpec {
        width: 256,
        height: 192,
        frame_count: 24,
        agents: vec![AgentSpec {
            name: "a".into(),
            waypoints: vec![(0, 80.0, 96.0), (23, 120.0, 96.0)],
            width: 60.0,
            height: 120.0,
            texture_seed: 5,
        }],
        ..SceneSpec::default()
    };
    let scene = generate_scene(&spec).unwrap();
    let (mut pcfg, tcfg) = small_cfg();
    pcfg.provider_resolution = Some((256.0, 192.0));
    let provider = ScriptedProvider::new(scene.truth.clone(), DropPlan::default());
    let mut sink = CollectSink::default();
    let summary = run_sequential(
        MemorySource::new(scene.frames.clone()),
        provider,
        &pcfg,
        &tcfg,
        &mut sink,
    )
    .unwrap();
    assert_eq!(summary.frames, 24);
    // Track boxes live in the processing raster: half the native size.
    let first_box = sink.outputs.iter().find(|o| !o.tracks.is_empty()).unwrap().tracks[0].bbox;
    assert!((first_box.w - 30.0).abs() < 1e-3, "scaled width {}", first_box.w);
    assert!((first_box.h - 60.0).abs() < 1e-3, "scaled height {}", first_box.h);
}

#[test]
fn scale_detections_round_trips() {
    let dets = vec![personflow::detect::Detection::new(
        personflow::geom::BBox::new(640.0, 360.0, 100.0, 50.0),
        0.5,
    )
    .unwrap()];
    let down = scale_detections(&dets, (1280.0, 720.0), (512.0, 288.0));
    let b = down[0].bbox;
    assert_eq!((b.x, b.y, b.w, b.h), (256.0, 144.0, 40.0, 20.0));
    let up = scale_detections(&down, (512.0, 288.0), (1280.0, 720.0));
    let b = up[0].bbox;
    assert!((b.x - 640.0).abs() < 1e-9 && (b.w - 100.0).abs() < 1e-9);
}
