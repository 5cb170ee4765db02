//! The two execution modes: a single-threaded reference loop and the
//! concurrent pipeline with ingest, detector, and tracker roles. Hand-offs
//! use bounded blocking queues; frames are immutable after ingestion, so
//! both modes produce byte-identical event logs for deterministic
//! providers.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc::sync_channel;
use std::time::{Duration, Instant};

use super::batch::{BatchFrame, Batcher, FrameBatch};
use super::source::FrameSource;
use super::{PipelineConfig, PipelineError};
use crate::detect::{
    confidence_gate, Detection, DetectionBatchResult, DetectionProvider, ProviderFrame,
};
use crate::geom::BBox;
use crate::imgproc::{build_pyramid, downscale, Pyramid};
use crate::track::{TrackEvent, TrackSnapshot, Tracker, TrackerConfig};

/// Per-frame pipeline output: the active track set after this frame plus
/// the lifecycle events it fired.
#[derive(Debug, Clone)]
pub struct FrameOutput {
    pub frame: u64,
    pub tracks: Vec<TrackSnapshot>,
    pub events: Vec<TrackEvent>,
}

/// Consumes per-frame outputs on the tracker thread, in frame order.
pub trait PipelineSink {
    fn on_frame(&mut self, out: FrameOutput);
}

/// Buffers every output in memory.
#[derive(Default)]
pub struct CollectSink {
    pub outputs: Vec<FrameOutput>,
}

impl PipelineSink for CollectSink {
    fn on_frame(&mut self, out: FrameOutput) {
        self.outputs.push(out);
    }
}

impl CollectSink {
    pub fn events(&self) -> Vec<TrackEvent> {
        self.outputs.iter().flat_map(|o| o.events.iter().copied()).collect()
    }

    pub fn event_log(&self) -> String {
        crate::track::format_event_log(&self.events())
    }

    pub fn tracks_per_frame(&self) -> Vec<(u64, Vec<TrackSnapshot>)> {
        self.outputs.iter().map(|o| (o.frame, o.tracks.clone())).collect()
    }
}

/// Run statistics. Effective FPS is frames over wall time; busy times
/// come from the two units' own clocks.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub frames: u64,
    pub batches: u64,
    pub wall: Duration,
    pub fps: f64,
    pub detector_busy: Duration,
    pub tracker_busy: Duration,
    /// Peak frames held by the ingest buffer and its outbound queue.
    pub peak_buffered_frames: usize,
}

impl RunSummary {
    pub fn report(&self) -> String {
        format!(
            "processed {} frames in {} batches over {:.3} s ({:.2} FPS)\n\
             detector busy {:.3} s, tracker busy {:.3} s, peak buffered frames {}\n",
            self.frames,
            self.batches,
            self.wall.as_secs_f64(),
            self.fps,
            self.detector_busy.as_secs_f64(),
            self.tracker_busy.as_secs_f64(),
            self.peak_buffered_frames,
        )
    }

    pub fn machine_block(&self) -> String {
        format!(
            "frames={}\nbatches={}\nwall_ms={:.3}\nfps={:.3}\ndetector_busy_ms={:.3}\ntracker_busy_ms={:.3}\npeak_buffered_frames={}\n",
            self.frames,
            self.batches,
            self.wall.as_secs_f64() * 1e3,
            self.fps,
            self.detector_busy.as_secs_f64() * 1e3,
            self.tracker_busy.as_secs_f64() * 1e3,
            self.peak_buffered_frames,
        )
    }
}

/// Linearly rescale detection boxes between rasters.
pub fn scale_detections(dets: &[Detection], from: (f32, f32), to: (f32, f32)) -> Vec<Detection> {
    assert!(from.0 > 0.0 && from.1 > 0.0 && to.0 > 0.0 && to.1 > 0.0);
    let rx = to.0 / from.0;
    let ry = to.1 / from.1;
    dets.iter()
        .map(|d| Detection {
            bbox: BBox::new(d.bbox.x * rx, d.bbox.y * ry, d.bbox.w * rx, d.bbox.h * ry),
            confidence: d.confidence,
        })
        .collect()
}

/// The tracker unit: identical batch-processing logic for both execution
/// modes, which is what makes their event logs comparable byte for byte.
struct TrackerUnit {
    tracker: Tracker,
    prev: Option<Pyramid>,
    levels: usize,
    confidence_threshold: f32,
    provider_scale: Option<((f32, f32), (f32, f32))>,
    tracker_load: Duration,
    busy: Duration,
}

impl TrackerUnit {
    fn new(pcfg: &PipelineConfig, tcfg: &TrackerConfig) -> Result<Self, PipelineError> {
        let radius_scale = pcfg.proc_width as f32 / tcfg.native_width;
        let tracker = Tracker::new(tcfg.clone(), radius_scale)?;
        let provider_scale = pcfg.provider_resolution.map(|from| {
            (from, (pcfg.proc_width as f32, pcfg.proc_height as f32))
        });
        Ok(Self {
            tracker,
            prev: None,
            levels: tcfg.pyramid_levels,
            confidence_threshold: tcfg.confidence_threshold,
            provider_scale,
            tracker_load: pcfg.tracker_load,
            busy: Duration::ZERO,
        })
    }

    fn process_batch(
        &mut self,
        batch: &FrameBatch,
        dets: &DetectionBatchResult,
        sink: &mut dyn PipelineSink,
    ) -> Result<(), PipelineError> {
        let t0 = Instant::now();
        if !self.tracker_load.is_zero() {
            std::thread::sleep(self.tracker_load);
        }
        for (pos, bf) in batch.frames.iter().enumerate() {
            let pyr = build_pyramid(&bf.image, self.levels)?;
            let mut events = Vec::new();
            if let Some(prev) = &self.prev {
                self.tracker.propagate(prev, &pyr)?;
            }
            events.extend(self.tracker.purge_expired(bf.index));
            if batch.detection_positions.binary_search(&pos).is_ok() {
                if !dets.covers(bf.index) {
                    return Err(PipelineError::ProviderContract { frame: bf.index });
                }
                let raw = dets.get(bf.index);
                let scaled;
                let raw = match self.provider_scale {
                    Some((from, to)) => {
                        scaled = scale_detections(raw, from, to);
                        &scaled[..]
                    }
                    None => raw,
                };
                let gated = confidence_gate(raw, self.confidence_threshold);
                events.extend(self.tracker.on_detection_frame(bf.index, &gated, &bf.image));
            }
            sink.on_frame(FrameOutput {
                frame: bf.index,
                tracks: self.tracker.snapshots(),
                events,
            });
            self.prev = Some(pyr);
        }
        self.busy += t0.elapsed();
        Ok(())
    }
}

fn ingest_frame(
    source_frame: super::source::SourceFrame,
    pcfg: &PipelineConfig,
) -> Result<BatchFrame, PipelineError> {
    let image = if source_frame.image.width() == pcfg.proc_width
        && source_frame.image.height() == pcfg.proc_height
    {
        source_frame.image
    } else {
        downscale(&source_frame.image, pcfg.proc_width, pcfg.proc_height)?
    };
    Ok(BatchFrame { index: source_frame.index, image })
}

/// Single-threaded reference execution: detect then track, batch by
/// batch. Serves as the determinism oracle for the concurrent pipeline.
pub fn run_sequential<S, P>(
    mut source: S,
    mut provider: P,
    pcfg: &PipelineConfig,
    tcfg: &TrackerConfig,
    sink: &mut dyn PipelineSink,
) -> Result<RunSummary, PipelineError>
where
    S: FrameSource,
    P: DetectionProvider,
{
    pcfg.validate()?;
    let mut unit = TrackerUnit::new(pcfg, tcfg)?;
    let start = Instant::now();
    let mut batcher = Batcher::new(pcfg.buffer_size, pcfg.detections_per_batch);
    let mut detector_busy = Duration::ZERO;
    let mut frames = 0u64;
    let mut batches = 0u64;
    let mut peak = 0usize;
    let mut pending = 0usize;

    let mut handle_batch = |batch: FrameBatch,
                            unit: &mut TrackerUnit,
                            detector_busy: &mut Duration,
                            frames: &mut u64,
                            batches: &mut u64|
     -> Result<(), PipelineError> {
        let det_frames: Vec<ProviderFrame> = batch
            .detection_positions
            .iter()
            .map(|&p| ProviderFrame { index: batch.frames[p].index, image: &batch.frames[p].image })
            .collect();
        let t0 = Instant::now();
        let result = provider.detect(&det_frames)?;
        *detector_busy += t0.elapsed();
        drop(det_frames);
        unit.process_batch(&batch, &result, sink)?;
        *frames += batch.len() as u64;
        *batches += 1;
        Ok(())
    };

    while let Some(sf) = source.next_frame()? {
        pending += 1;
        peak = peak.max(pending);
        if let Some(batch) = batcher.push(ingest_frame(sf, pcfg)?)? {
            pending -= batch.len();
            handle_batch(batch, &mut unit, &mut detector_busy, &mut frames, &mut batches)?;
        }
    }
    for batch in batcher.finish()? {
        handle_batch(batch, &mut unit, &mut detector_busy, &mut frames, &mut batches)?;
    }

    let wall = start.elapsed();
    Ok(RunSummary {
        frames,
        batches,
        wall,
        fps: if wall.is_zero() { 0.0 } else { frames as f64 / wall.as_secs_f64() },
        detector_busy,
        tracker_busy: unit.busy,
        peak_buffered_frames: peak,
    })
}

/// Concurrent execution: an ingest thread fills batches, the detector
/// thread runs the provider one batch ahead, and the tracker unit runs on
/// the calling thread with the caller's sink. Shutdown propagates by
/// closing the queues in topological order; any stage error aborts the
/// run with its diagnostic.
pub fn run_pipeline<S, P>(
    mut source: S,
    mut provider: P,
    pcfg: &PipelineConfig,
    tcfg: &TrackerConfig,
    sink: &mut dyn PipelineSink,
) -> Result<RunSummary, PipelineError>
where
    S: FrameSource,
    P: DetectionProvider,
{
    pcfg.validate()?;
    let mut unit = TrackerUnit::new(pcfg, tcfg)?;
    let start = Instant::now();

    // Frames currently held by ingest: the partial batch plus batches
    // not yet consumed downstream. queue_capacity counts the consumer's
    // in-hand batch, so the channel itself holds capacity - 1 (a
    // rendezvous hand-off at capacity 1); the gauge is then bounded by
    // buffer_size + queue_capacity * buffer_size.
    let held = AtomicUsize::new(0);
    let peak = AtomicUsize::new(0);

    let (batch_tx, batch_rx) =
        sync_channel::<Result<FrameBatch, PipelineError>>(pcfg.queue_capacity - 1);
    let (det_tx, det_rx) = sync_channel::<Result<(FrameBatch, DetectionBatchResult), PipelineError>>(
        pcfg.queue_capacity - 1,
    );

    let mut frames = 0u64;
    let mut batches = 0u64;
    let mut tracker_err: Option<PipelineError> = None;
    let mut detector_busy = Duration::ZERO;

    std::thread::scope(|scope| {
        let held_ref = &held;
        let peak_ref = &peak;

        let ingest = scope.spawn(move || {
            let mut batcher = Batcher::new(pcfg.buffer_size, pcfg.detections_per_batch);
            loop {
                match source.next_frame() {
                    Ok(Some(sf)) => {
                        let bf = match ingest_frame(sf, pcfg) {
                            Ok(bf) => bf,
                            Err(e) => {
                                let _ = batch_tx.send(Err(e));
                                return;
                            }
                        };
                        let h = held_ref.fetch_add(1, Ordering::Relaxed) + 1;
                        peak_ref.fetch_max(h, Ordering::Relaxed);
                        match batcher.push(bf) {
                            Ok(Some(batch)) => {
                                if batch_tx.send(Ok(batch)).is_err() {
                                    return; // downstream gone
                                }
                            }
                            Ok(None) => {}
                            Err(e) => {
                                let _ = batch_tx.send(Err(e));
                                return;
                            }
                        }
                    }
                    Ok(None) => break,
                    Err(e) => {
                        let _ = batch_tx.send(Err(e.into()));
                        return;
                    }
                }
            }
            match batcher.finish() {
                Ok(finals) => {
                    for batch in finals {
                        if batch_tx.send(Ok(batch)).is_err() {
                            return;
                        }
                    }
                }
                Err(e) => {
                    let _ = batch_tx.send(Err(e));
                }
            }
        });

        let detector = scope.spawn(move || {
            let mut busy = Duration::ZERO;
            while let Ok(msg) = batch_rx.recv() {
                match msg {
                    Ok(batch) => {
                        held_ref.fetch_sub(batch.len(), Ordering::Relaxed);
                        let det_frames: Vec<ProviderFrame> = batch
                            .detection_positions
                            .iter()
                            .map(|&p| ProviderFrame {
                                index: batch.frames[p].index,
                                image: &batch.frames[p].image,
                            })
                            .collect();
                        let t0 = Instant::now();
                        let result = provider.detect(&det_frames);
                        busy += t0.elapsed();
                        drop(det_frames);
                        match result {
                            Ok(dets) => {
                                if det_tx.send(Ok((batch, dets))).is_err() {
                                    return busy;
                                }
                            }
                            Err(e) => {
                                let _ = det_tx.send(Err(e.into()));
                                return busy;
                            }
                        }
                    }
                    Err(e) => {
                        let _ = det_tx.send(Err(e));
                        return busy;
                    }
                }
            }
            busy
        });

        // Tracker unit on the calling thread: blocks until the detector
        // has finished the batch ahead of it.
        while let Ok(msg) = det_rx.recv() {
            match msg {
                Ok((batch, dets)) => match unit.process_batch(&batch, &dets, sink) {
                    Ok(()) => {
                        frames += batch.len() as u64;
                        batches += 1;
                    }
                    Err(e) => {
                        tracker_err = Some(e);
                        break;
                    }
                },
                Err(e) => {
                    tracker_err = Some(e);
                    break;
                }
            }
        }
        drop(det_rx); // lets the detector drain out on early abort

        detector_busy = detector.join().expect("detector thread panicked");
        ingest.join().expect("ingest thread panicked");
    });

    if let Some(e) = tracker_err {
        return Err(e);
    }
    let wall = start.elapsed();
    Ok(RunSummary {
        frames,
        batches,
        wall,
        fps: if wall.is_zero() { 0.0 } else { frames as f64 / wall.as_secs_f64() },
        detector_busy,
        tracker_busy: unit.busy,
        peak_buffered_frames: peak.load(Ordering::Relaxed),
    })
}
