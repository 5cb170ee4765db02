//! The tracker engine: owns all track state, applies detection-frame
//! updates, flow propagation, lost-track recovery, and expiry. All
//! mutations are serialized on the owning thread; snapshots are
//! immutable copies safe to hand across threads.

use super::event::{EventKind, TrackEvent};
use super::matching::match_detections;
use super::recovery::{motion_direction, select_lost_candidate, LostCandidate};
use super::{Track, TrackError, TrackId, TrackState, TrackerConfig};
use crate::detect::Detection;
use crate::flow::{lk_track, median_displacement, FlowError, PointStatus};
use crate::geom::{BBox, Point2f};
use crate::imgproc::{shi_tomasi_corners, GrayImage, ImageError, Pyramid};

/// Immutable per-frame view of a track, for sinks and analytics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSnapshot {
    pub id: TrackId,
    pub bbox: BBox,
    pub confidence: f32,
}

/// Track state machine owner. IDs start at 1 and grow monotonically.
pub struct Tracker {
    cfg: TrackerConfig,
    /// Processing pixels per native pixel, applied to the recovery radius.
    radius_scale: f32,
    tracks: Vec<Track>,
    dead: Vec<Track>,
    next_id: TrackId,
}

impl Tracker {
    /// `radius_scale` converts the configured native-raster recovery
    /// radius into processing-raster pixels (e.g. 512/1280 = 0.4).
    pub fn new(cfg: TrackerConfig, radius_scale: f32) -> Result<Self, TrackError> {
        cfg.validate()?;
        if !(radius_scale > 0.0 && radius_scale.is_finite()) {
            return Err(TrackError::BadConfig(format!("radius scale {radius_scale} must be > 0")));
        }
        Ok(Self { cfg, radius_scale, tracks: Vec::new(), dead: Vec::new(), next_id: 1 })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    /// Recovery radius in processing-raster pixels.
    pub fn effective_recovery_radius(&self) -> f32 {
        self.cfg.recovery_radius * self.radius_scale
    }

    /// Number of ids ever assigned.
    pub fn ids_assigned(&self) -> u64 {
        self.next_id - 1
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn dead_tracks(&self) -> &[Track] {
        &self.dead
    }

    /// Active tracks, ascending id.
    pub fn snapshots(&self) -> Vec<TrackSnapshot> {
        self.tracks
            .iter()
            .filter(|t| t.state == TrackState::Active)
            .map(|t| TrackSnapshot { id: t.id, bbox: t.bbox, confidence: t.confidence })
            .collect()
    }

    /// Advance every active track's points from `prev` to `next` and
    /// translate its box by the median point displacement. Tracks whose
    /// surviving points fall under the minimum keep their box and get
    /// flagged for re-seeding at the next detection frame.
    pub fn propagate(&mut self, prev: &Pyramid, next: &Pyramid) -> Result<(), FlowError> {
        for t in self.tracks.iter_mut().filter(|t| t.state == TrackState::Active) {
            if t.points.is_empty() {
                t.needs_reseed = true;
                continue;
            }
            let res = lk_track(prev, next, &t.points, &self.cfg.flow)?;
            let shift = median_displacement(&t.points, &res, self.cfg.min_survivors);
            let survivors: Vec<Point2f> = res
                .points_next
                .iter()
                .zip(res.status.iter())
                .filter(|(_, s)| **s == PointStatus::Tracked)
                .map(|(p, _)| *p)
                .collect();
            match shift {
                Some((dx, dy)) => {
                    t.bbox = t.bbox.translated(dx, dy);
                    t.points = survivors;
                }
                None => {
                    t.needs_reseed = true;
                    t.points = survivors;
                }
            }
        }
        Ok(())
    }

    /// Apply one detection frame: match gated detections against the
    /// flow-propagated predictions, count misses, transition exhausted
    /// tracks to Lost, then route unmatched detections through lost-track
    /// recovery before spawning fresh ids.
    ///
    /// `dets` must already be confidence-gated; `image` is the current
    /// processing-resolution frame used to re-seed feature points.
    pub fn on_detection_frame(
        &mut self,
        frame: u64,
        dets: &[Detection],
        image: &GrayImage,
    ) -> Vec<TrackEvent> {
        let mut events = Vec::new();
        let predictions: Vec<(TrackId, BBox)> = self
            .tracks
            .iter()
            .filter(|t| t.state == TrackState::Active)
            .map(|t| (t.id, t.bbox))
            .collect();
        let assign = match_detections(&predictions, dets, self.cfg.iou_match_threshold);

        for (tid, di) in &assign.pairs {
            let det = &dets[*di];
            let points = seed_points(image, &det.bbox, &self.cfg);
            let t = self.track_mut(*tid);
            t.bbox = det.bbox;
            t.miss_count = 0;
            t.confidence = det.confidence;
            t.needs_reseed = points.is_empty();
            t.points = points;
            t.history.push((frame, t.bbox.center()));
            events.push(TrackEvent { frame, kind: EventKind::Match, id: *tid, bbox: t.bbox });
        }

        for tid in &assign.unmatched_tracks {
            // Flow points dried up mid-batch: refresh them from the
            // proposal box, which stands in for the missing detection.
            let reseed_box = {
                let t = self.track(*tid);
                t.needs_reseed.then_some(t.bbox)
            };
            let points = reseed_box.map(|b| seed_points(image, &b, &self.cfg));
            let miss_threshold = self.cfg.miss_threshold;
            let t = self.track_mut(*tid);
            t.miss_count += 1;
            if let Some(points) = points {
                t.needs_reseed = points.is_empty();
                t.points = points;
            }
            t.history.push((frame, t.bbox.center()));
            events.push(TrackEvent { frame, kind: EventKind::Miss, id: *tid, bbox: t.bbox });
            if t.miss_count >= miss_threshold {
                t.state = TrackState::Lost;
                t.lost_since = Some(frame);
                events.push(TrackEvent { frame, kind: EventKind::Lost, id: *tid, bbox: t.bbox });
            }
        }

        for di in &assign.unmatched_detections {
            let det = &dets[*di];
            match self.try_recover_lost(det, frame, image) {
                Some(ev) => events.push(ev),
                None => events.push(self.spawn(frame, det, image)),
            }
        }
        events
    }

    /// Offer an unmatched detection to the lost-track memory. On success
    /// the track resumes Active under its old id with the detection box;
    /// `None` tells the caller to spawn a new track.
    fn try_recover_lost(
        &mut self,
        det: &Detection,
        frame: u64,
        image: &GrayImage,
    ) -> Option<TrackEvent> {
        let window = self.cfg.gradient_window;
        let lost: Vec<(usize, LostCandidate)> = self
            .tracks
            .iter()
            .enumerate()
            .filter(|(_, t)| t.state == TrackState::Lost)
            .map(|(i, t)| {
                (
                    i,
                    LostCandidate {
                        last_center: t.bbox.center(),
                        gradient: motion_direction(&t.history, window),
                    },
                )
            })
            .collect();
        let cands: Vec<LostCandidate> = lost.iter().map(|(_, c)| *c).collect();
        let center = det.bbox.center();
        let sel = select_lost_candidate(&cands, center, self.effective_recovery_radius())?;
        let idx = lost[sel].0;
        let points = seed_points(image, &det.bbox, &self.cfg);
        let t = &mut self.tracks[idx];
        t.state = TrackState::Active;
        t.bbox = det.bbox;
        t.miss_count = 0;
        t.lost_since = None;
        t.confidence = det.confidence;
        t.needs_reseed = points.is_empty();
        t.points = points;
        // History restarts at recovery; the old motion estimate no longer
        // describes the re-acquired path.
        t.history = vec![(frame, t.bbox.center())];
        Some(TrackEvent { frame, kind: EventKind::Recover, id: t.id, bbox: t.bbox })
    }

    fn spawn(&mut self, frame: u64, det: &Detection, image: &GrayImage) -> TrackEvent {
        let id = self.next_id;
        self.next_id += 1;
        let points = seed_points(image, &det.bbox, &self.cfg);
        let track = Track {
            id,
            state: TrackState::Active,
            bbox: det.bbox,
            needs_reseed: points.is_empty(),
            points,
            history: vec![(frame, det.bbox.center())],
            miss_count: 0,
            lost_since: None,
            confidence: det.confidence,
            spawn_frame: frame,
        };
        let bbox = track.bbox;
        self.tracks.push(track);
        TrackEvent { frame, kind: EventKind::Spawn, id, bbox }
    }

    /// Move lost tracks past the memory horizon to Dead. Dead tracks are
    /// retained only in the statistics ledger and never revived.
    pub fn purge_expired(&mut self, frame: u64) -> Vec<TrackEvent> {
        let horizon = self.cfg.lost_memory_frames();
        let mut events = Vec::new();
        for t in &mut self.tracks {
            if t.state == TrackState::Lost {
                let since = t.lost_since.expect("lost tracks carry lost_since");
                if frame.saturating_sub(since) > horizon {
                    t.state = TrackState::Dead;
                    events.push(TrackEvent { frame, kind: EventKind::Dead, id: t.id, bbox: t.bbox });
                }
            }
        }
        if !events.is_empty() {
            let mut keep = Vec::with_capacity(self.tracks.len());
            for t in self.tracks.drain(..) {
                if t.state == TrackState::Dead {
                    self.dead.push(t);
                } else {
                    keep.push(t);
                }
            }
            self.tracks = keep;
        }
        events
    }

    fn track(&self, id: TrackId) -> &Track {
        self.tracks.iter().find(|t| t.id == id).expect("id refers to a live track")
    }

    fn track_mut(&mut self, id: TrackId) -> &mut Track {
        self.tracks.iter_mut().find(|t| t.id == id).expect("id refers to a live track")
    }
}

fn seed_points(image: &GrayImage, bbox: &BBox, cfg: &TrackerConfig) -> Vec<Point2f> {
    match shi_tomasi_corners(image, bbox, &cfg.corner) {
        Ok(points) => points,
        // A box fully off-image (drifted out of view) simply has no seeds.
        Err(ImageError::EmptyRoi) => Vec::new(),
        Err(e) => unreachable!("corner params validated at construction: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::confidence_gate;
    use crate::evalkit::texture::textured_image;
    use crate::imgproc::build_pyramid;

    fn cfg() -> TrackerConfig {
        TrackerConfig::default()
    }

    fn det(x: f32, y: f32, w: f32, h: f32, conf: f32) -> Detection {
        Detection::new(BBox::new(x, y, w, h), conf).unwrap()
    }

    fn image() -> GrayImage {
        textured_image(512, 288, 99)
    }

    #[test]
    fn steady_agent_keeps_one_track_with_zero_misses() {
        let img = image();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        for k in 0..10u64 {
            let frame = k * 3;
            let d = det(100.0 + k as f32, 80.0, 40.0, 90.0, 0.9);
            tr.on_detection_frame(frame, &[d], &img);
            assert_eq!(tr.tracks().len(), 1);
            assert_eq!(tr.tracks()[0].miss_count, 0);
        }
        assert_eq!(tr.ids_assigned(), 1);
    }

    #[test]
    fn four_misses_keep_the_id_five_losses_transition() {
        let img = image();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        tr.on_detection_frame(0, &[det(100.0, 80.0, 40.0, 90.0, 0.9)], &img);

        // 4 consecutive misses: still Active, same id on re-detection.
        for k in 1..=4u64 {
            let ev = tr.on_detection_frame(k * 3, &[], &img);
            assert!(ev.iter().all(|e| e.kind == EventKind::Miss));
        }
        assert_eq!(tr.tracks()[0].state, TrackState::Active);
        let ev = tr.on_detection_frame(15, &[det(101.0, 80.0, 40.0, 90.0, 0.9)], &img);
        assert_eq!(ev[0].kind, EventKind::Match);
        assert_eq!(ev[0].id, 1);
        assert_eq!(tr.ids_assigned(), 1);

        // Now 5 consecutive misses: Lost on the 5th.
        for k in 6..=9u64 {
            tr.on_detection_frame(k * 3, &[], &img);
            assert_eq!(tr.tracks()[0].state, TrackState::Active);
        }
        let ev = tr.on_detection_frame(30, &[], &img);
        assert_eq!(tr.tracks()[0].state, TrackState::Lost);
        assert!(ev.iter().any(|e| e.kind == EventKind::Lost));
    }

    #[test]
    fn purge_kills_strictly_after_memory_horizon() {
        let img = image();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        tr.on_detection_frame(85, &[det(100.0, 80.0, 40.0, 90.0, 0.9)], &img);
        for (i, frame) in [88u64, 91, 94, 97, 100].iter().enumerate() {
            tr.on_detection_frame(*frame, &[], &img);
            let _ = i;
        }
        assert_eq!(tr.tracks()[0].state, TrackState::Lost);
        assert_eq!(tr.tracks()[0].lost_since, Some(100));
        // 5 s x 25 fps = 125 frames: still remembered at frame 225.
        assert!(tr.purge_expired(225).is_empty());
        assert_eq!(tr.tracks()[0].state, TrackState::Lost);
        let ev = tr.purge_expired(226);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, EventKind::Dead);
        assert!(tr.tracks().is_empty());
        assert_eq!(tr.dead_tracks().len(), 1);
    }

    #[test]
    fn zero_memory_dies_on_next_purge() {
        let img = image();
        let mut tr = Tracker::new(
            TrackerConfig { lost_memory_s: 0.0, ..cfg() },
            0.4,
        )
        .unwrap();
        tr.on_detection_frame(0, &[det(100.0, 80.0, 40.0, 90.0, 0.9)], &img);
        for k in 1..=5u64 {
            tr.on_detection_frame(k * 3, &[], &img);
        }
        assert_eq!(tr.tracks()[0].state, TrackState::Lost);
        let ev = tr.purge_expired(16);
        assert_eq!(ev.len(), 1);
    }

    #[test]
    fn active_tracks_are_never_purged() {
        let img = image();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        tr.on_detection_frame(0, &[det(100.0, 80.0, 40.0, 90.0, 0.9)], &img);
        assert!(tr.purge_expired(1_000_000).is_empty());
        assert_eq!(tr.tracks()[0].state, TrackState::Active);
    }

    #[test]
    fn recovery_restores_the_old_id() {
        let img = image();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        tr.on_detection_frame(0, &[det(100.0, 80.0, 40.0, 90.0, 0.9)], &img);
        for k in 1..=5u64 {
            tr.on_detection_frame(k * 3, &[], &img);
        }
        assert_eq!(tr.tracks()[0].state, TrackState::Lost);
        // Reappears 30 px away: inside the scaled radius (200 * 0.4 = 80).
        let ev = tr.on_detection_frame(30, &[det(130.0, 80.0, 40.0, 90.0, 0.8)], &img);
        assert_eq!(ev[0].kind, EventKind::Recover);
        assert_eq!(ev[0].id, 1);
        let t = &tr.tracks()[0];
        assert_eq!(t.state, TrackState::Active);
        assert_eq!(t.miss_count, 0);
        assert_eq!(t.bbox, BBox::new(130.0, 80.0, 40.0, 90.0));
        assert_eq!(tr.ids_assigned(), 1);
    }

    #[test]
    fn far_reappearance_spawns_a_new_id() {
        let img = image();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        tr.on_detection_frame(0, &[det(100.0, 80.0, 40.0, 90.0, 0.9)], &img);
        for k in 1..=5u64 {
            tr.on_detection_frame(k * 3, &[], &img);
        }
        // 300 px away, stationary track (no gradient): outside radius 80.
        let ev = tr.on_detection_frame(30, &[det(400.0, 80.0, 40.0, 90.0, 0.8)], &img);
        assert_eq!(ev[0].kind, EventKind::Spawn);
        assert_eq!(ev[0].id, 2);
        assert_eq!(tr.ids_assigned(), 2);
    }

    #[test]
    fn dead_tracks_stay_dead() {
        let img = image();
        let mut tr = Tracker::new(TrackerConfig { lost_memory_s: 0.0, ..cfg() }, 0.4).unwrap();
        tr.on_detection_frame(0, &[det(100.0, 80.0, 40.0, 90.0, 0.9)], &img);
        for k in 1..=5u64 {
            tr.on_detection_frame(k * 3, &[], &img);
        }
        tr.purge_expired(16);
        assert!(tr.tracks().is_empty());
        // The same location detection now spawns a fresh id.
        let ev = tr.on_detection_frame(18, &[det(100.0, 80.0, 40.0, 90.0, 0.9)], &img);
        assert_eq!(ev[0].kind, EventKind::Spawn);
        assert_eq!(ev[0].id, 2);
    }

    #[test]
    fn propagation_static_scene_keeps_boxes() {
        let img = image();
        let pyr = build_pyramid(&img, 3).unwrap();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        tr.on_detection_frame(0, &[det(200.0, 100.0, 50.0, 100.0, 0.9)], &img);
        let before = tr.tracks()[0].bbox;
        tr.propagate(&pyr, &pyr).unwrap();
        let after = tr.tracks()[0].bbox;
        assert!(before.center().distance(&after.center()) < 0.05);
        assert_eq!((before.w, before.h), (after.w, after.h));
    }

    #[test]
    fn propagation_translated_scene_moves_boxes() {
        use crate::evalkit::texture::translated_pair;
        let (a, b) = translated_pair(512, 288, 31, 3.0, -2.0);
        let pa = build_pyramid(&a, 3).unwrap();
        let pb = build_pyramid(&b, 3).unwrap();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        tr.on_detection_frame(0, &[det(200.0, 100.0, 50.0, 100.0, 0.9)], &a);
        let before = tr.tracks()[0].bbox.center();
        tr.propagate(&pa, &pb).unwrap();
        let after = tr.tracks()[0].bbox.center();
        assert!((after.x - before.x - 3.0).abs() < 0.5, "dx {}", after.x - before.x);
        assert!((after.y - before.y + 2.0).abs() < 0.5, "dy {}", after.y - before.y);
    }

    #[test]
    fn textureless_track_freezes_and_flags_reseed() {
        let flat = GrayImage::filled(512, 288, 128);
        let pyr = build_pyramid(&flat, 3).unwrap();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        tr.on_detection_frame(0, &[det(200.0, 100.0, 50.0, 100.0, 0.9)], &flat);
        // No texture: seeding found nothing.
        assert!(tr.tracks()[0].points.is_empty());
        let before = tr.tracks()[0].bbox;
        tr.propagate(&pyr, &pyr).unwrap();
        assert_eq!(tr.tracks()[0].bbox, before);
        assert!(tr.tracks()[0].needs_reseed);
    }

    #[test]
    fn gated_detections_are_ignored() {
        let img = image();
        let mut tr = Tracker::new(cfg(), 0.4).unwrap();
        let dets = vec![
            det(100.0, 80.0, 40.0, 90.0, 0.05),
            det(300.0, 80.0, 40.0, 90.0, 0.10),
            det(200.0, 80.0, 40.0, 90.0, 0.11),
        ];
        let gated = confidence_gate(&dets, tr.config().confidence_threshold);
        tr.on_detection_frame(0, &gated, &img);
        // Strictly-greater gate: only the 0.11 detection survives.
        assert_eq!(tr.ids_assigned(), 1);
        assert_eq!(tr.tracks()[0].bbox.x, 200.0);
    }
}
