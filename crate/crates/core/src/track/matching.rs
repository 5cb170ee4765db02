//! Greedy one-to-one IoU matching between track predictions and gated
//! detections. Pairs below the IoU threshold never match; ties break by
//! lower track id, then lower detection index, making results
//! deterministic.

use super::TrackId;
use crate::detect::{iou, Detection};
use crate::geom::BBox;

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Matched (track id, detection index), sorted by track id.
    pub pairs: Vec<(TrackId, usize)>,
    /// Unmatched track ids, ascending.
    pub unmatched_tracks: Vec<TrackId>,
    /// Unmatched detection indices, ascending.
    pub unmatched_detections: Vec<usize>,
}

pub fn match_detections(
    predictions: &[(TrackId, BBox)],
    detections: &[Detection],
    iou_threshold: f32,
) -> Assignment {
    let mut candidates: Vec<(f32, TrackId, usize)> = Vec::new();
    for (tid, pbox) in predictions {
        for (di, det) in detections.iter().enumerate() {
            let overlap = iou(pbox, &det.bbox);
            if overlap >= iou_threshold {
                candidates.push((overlap, *tid, di));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut track_taken: Vec<TrackId> = Vec::new();
    let mut det_taken = vec![false; detections.len()];
    let mut pairs = Vec::new();
    for (_, tid, di) in candidates {
        if det_taken[di] || track_taken.contains(&tid) {
            continue;
        }
        det_taken[di] = true;
        track_taken.push(tid);
        pairs.push((tid, di));
    }
    pairs.sort_by_key(|p| p.0);

    let unmatched_tracks = predictions
        .iter()
        .map(|(tid, _)| *tid)
        .filter(|tid| !track_taken.contains(tid))
        .collect();
    let unmatched_detections = (0..detections.len()).filter(|&i| !det_taken[i]).collect();
    Assignment { pairs, unmatched_tracks, unmatched_detections }
}
