//! Track lifecycle events and their text log format: one line per event,
//! `frame kind id x y w h`. Floats use Rust's shortest round-trip form,
//! so logs are byte-stable and parse back exactly.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::TrackId;
use crate::geom::BBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Spawn,
    Match,
    Miss,
    Lost,
    Recover,
    Dead,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Spawn => "spawn",
            EventKind::Match => "match",
            EventKind::Miss => "miss",
            EventKind::Lost => "lost",
            EventKind::Recover => "recover",
            EventKind::Dead => "dead",
        }
    }
}

impl FromStr for EventKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "spawn" => EventKind::Spawn,
            "match" => EventKind::Match,
            "miss" => EventKind::Miss,
            "lost" => EventKind::Lost,
            "recover" => EventKind::Recover,
            "dead" => EventKind::Dead,
            _ => return Err(()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackEvent {
    pub frame: u64,
    pub kind: EventKind,
    pub id: TrackId,
    pub bbox: BBox,
}

impl fmt::Display for TrackEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {} {}",
            self.frame,
            self.kind.as_str(),
            self.id,
            self.bbox.x,
            self.bbox.y,
            self.bbox.w,
            self.bbox.h
        )
    }
}

#[derive(Debug, Error)]
#[error("line {line}: {msg}")]
pub struct EventParseError {
    pub line: usize,
    pub msg: String,
}

/// Render events as the canonical text log (one line each, LF endings).
pub fn format_event_log(events: &[TrackEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

/// Parse a text event log; malformed lines are reported by number.
pub fn parse_event_log(text: &str) -> Result<Vec<TrackEvent>, EventParseError> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        events.push(parse_line(line, line_no)?);
    }
    Ok(events)
}

fn parse_line(line: &str, line_no: usize) -> Result<TrackEvent, EventParseError> {
    let err = |msg: String| EventParseError { line: line_no, msg };
    let fields: Vec<&str> = line.split_ascii_whitespace().collect();
    if fields.len() != 7 {
        return Err(err(format!("expected 7 fields, got {}", fields.len())));
    }
    let frame: u64 = fields[0].parse().map_err(|_| err(format!("bad frame {:?}", fields[0])))?;
    let kind = EventKind::from_str(fields[1]).map_err(|_| err(format!("bad kind {:?}", fields[1])))?;
    let id: TrackId = fields[2].parse().map_err(|_| err(format!("bad id {:?}", fields[2])))?;
    let mut nums = [0f32; 4];
    for (i, f) in fields[3..].iter().enumerate() {
        nums[i] = f.parse().map_err(|_| err(format!("bad box field {f:?}")))?;
    }
    if !(nums[2] > 0.0 && nums[3] > 0.0) {
        return Err(err(format!("non-positive box size {} {}", nums[2], nums[3])));
    }
    Ok(TrackEvent { frame, kind, id, bbox: BBox::new(nums[0], nums[1], nums[2], nums[3]) })
}
