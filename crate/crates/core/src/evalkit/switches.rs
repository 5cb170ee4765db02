//! Identity-switch counting: how often a ground-truth agent's
//! best-overlapping track id changes across the run.

use std::collections::BTreeMap;

use crate::detect::{iou, GroundTruth};
use crate::track::{TrackId, TrackSnapshot};

/// Count id switches over per-frame track outputs. For every frame and
/// agent, the best-overlapping track (highest IoU > 0, ties to the lower
/// id) becomes the agent's association; a change from the previous
/// association counts as one switch. Frames where no track overlaps
/// leave the association untouched.
pub fn id_switches(
    tracks_per_frame: &[(u64, Vec<TrackSnapshot>)],
    truth: &GroundTruth,
) -> usize {
    let mut assoc: BTreeMap<usize, TrackId> = BTreeMap::new();
    let mut switches = 0usize;
    for (frame, tracks) in tracks_per_frame {
        for tb in truth.boxes(*frame) {
            let mut best: Option<(TrackId, f32)> = None;
            for t in tracks {
                let overlap = iou(&tb.bbox, &t.bbox);
                if overlap <= 0.0 {
                    continue;
                }
                match best {
                    Some((bid, bo)) => {
                        if overlap > bo || (overlap == bo && t.id < bid) {
                            best = Some((t.id, overlap));
                        }
                    }
                    None => best = Some((t.id, overlap)),
                }
            }
            if let Some((tid, _)) = best {
                match assoc.insert(tb.agent, tid) {
                    Some(prev) if prev != tid => switches += 1,
                    _ => {}
                }
            }
        }
    }
    switches
}
