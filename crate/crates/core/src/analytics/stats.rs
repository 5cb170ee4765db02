//! Visit statistics derived from the track event log: per-id dwell and
//! path length, plus visitor totals.

use std::collections::BTreeMap;

use super::AnalyticsError;
use crate::track::{parse_event_log, TrackEvent, TrackId};

/// One track's visit record. Dwell spans first to last observation;
/// path length sums consecutive event-box center distances.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackVisit {
    pub id: TrackId,
    pub first_seen: u64,
    pub last_seen: u64,
    pub dwell_s: f64,
    pub path_length: f64,
}

/// Aggregate visit statistics over an event log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VisitStats {
    pub per_track: Vec<TrackVisit>,
    pub visitors: usize,
    pub mean_dwell_s: f64,
}

impl VisitStats {
    /// Aligned text table plus aggregates.
    pub fn table(&self) -> String {
        let mut out = String::from("id first_seen last_seen dwell_s path_px\n");
        for t in &self.per_track {
            out.push_str(&format!(
                "{} {} {} {:.3} {:.2}\n",
                t.id, t.first_seen, t.last_seen, t.dwell_s, t.path_length
            ));
        }
        out.push_str(&format!(
            "visitors {} mean_dwell_s {:.3}\n",
            self.visitors, self.mean_dwell_s
        ));
        out
    }

    /// Machine-readable key=value block.
    pub fn machine_block(&self) -> String {
        let mut out = format!("visitors={}\nmean_dwell_s={:.3}\n", self.visitors, self.mean_dwell_s);
        for t in &self.per_track {
            out.push_str(&format!(
                "track.{}.first_seen={}\ntrack.{}.last_seen={}\ntrack.{}.dwell_s={:.3}\ntrack.{}.path_px={:.2}\n",
                t.id, t.first_seen, t.id, t.last_seen, t.id, t.dwell_s, t.id, t.path_length
            ));
        }
        out
    }
}

/// Parse a text event log and fold it into visit statistics. Malformed
/// lines surface with their line number.
pub fn collect_stats(log_text: &str, fps: f32) -> Result<VisitStats, AnalyticsError> {
    let events = parse_event_log(log_text)?;
    Ok(stats_from_events(&events, fps))
}

/// Fold already-parsed events. Every id ever seen is reported, including
/// tracks that later died.
pub fn stats_from_events(events: &[TrackEvent], fps: f32) -> VisitStats {
    assert!(fps > 0.0);
    struct Acc {
        first: u64,
        last: u64,
        path: f64,
        last_center: (f64, f64),
    }
    let mut by_id: BTreeMap<TrackId, Acc> = BTreeMap::new();
    for e in events {
        let c = e.bbox.center();
        let c = (c.x as f64, c.y as f64);
        by_id
            .entry(e.id)
            .and_modify(|a| {
                a.last = a.last.max(e.frame);
                let dx = c.0 - a.last_center.0;
                let dy = c.1 - a.last_center.1;
                a.path += (dx * dx + dy * dy).sqrt();
                a.last_center = c;
            })
            .or_insert(Acc { first: e.frame, last: e.frame, path: 0.0, last_center: c });
    }
    let per_track: Vec<TrackVisit> = by_id
        .into_iter()
        .map(|(id, a)| TrackVisit {
            id,
            first_seen: a.first,
            last_seen: a.last,
            dwell_s: (a.last - a.first) as f64 / fps as f64,
            path_length: a.path,
        })
        .collect();
    let visitors = per_track.len();
    let mean_dwell_s = if visitors == 0 {
        0.0
    } else {
        per_track.iter().map(|t| t.dwell_s).sum::<f64>() / visitors as f64
    };
    VisitStats { per_track, visitors, mean_dwell_s }
}
