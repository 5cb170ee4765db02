//! Detection text files: one line per frame,
//! `frame_index n_boxes x y w h conf [x y w h conf ...]`,
//! space-separated decimals, LF line endings. Coordinates are in the
//! processing raster. Missing frames mean "no detections".

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{Detection, FrameDetections};
use crate::geom::BBox;

#[derive(Debug, Error)]
pub enum DetectionFileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: frame index {frame} out of range (frame_count {frame_count})")]
    FrameOutOfRange { line: usize, frame: u64, frame_count: u64 },
    #[error("line {line}: box {index}: {msg}")]
    BadBox { line: usize, index: usize, msg: String },
}

/// Load a detection file, validating every record. Frame indices must be
/// below `frame_count`; boxes must have positive finite dimensions and
/// confidences in `[0, 1]`.
pub fn load_detection_file(path: &Path, frame_count: u64) -> Result<FrameDetections, DetectionFileError> {
    parse_detection_text(&fs::read_to_string(path)?, frame_count)
}

pub(crate) fn parse_detection_text(
    text: &str,
    frame_count: u64,
) -> Result<FrameDetections, DetectionFileError> {
    let mut table = FrameDetections::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_ascii_whitespace();
        let frame: u64 = next_num(&mut tok, line_no, "frame_index")?;
        if frame >= frame_count {
            return Err(DetectionFileError::FrameOutOfRange { line: line_no, frame, frame_count });
        }
        let n_boxes: usize = next_num(&mut tok, line_no, "n_boxes")?;
        let mut dets = Vec::with_capacity(n_boxes);
        for b in 0..n_boxes {
            let x: f32 = next_num(&mut tok, line_no, "x")?;
            let y: f32 = next_num(&mut tok, line_no, "y")?;
            let w: f32 = next_num(&mut tok, line_no, "w")?;
            let h: f32 = next_num(&mut tok, line_no, "h")?;
            let conf: f32 = next_num(&mut tok, line_no, "conf")?;
            if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite() && x.is_finite() && y.is_finite()) {
                return Err(DetectionFileError::BadBox {
                    line: line_no,
                    index: b,
                    msg: format!("non-positive or non-finite dimensions ({x} {y} {w} {h})"),
                });
            }
            let det = Detection::new(BBox::new(x, y, w, h), conf).map_err(|e| {
                DetectionFileError::BadBox { line: line_no, index: b, msg: e.to_string() }
            })?;
            dets.push(det);
        }
        if let Some(extra) = tok.next() {
            return Err(DetectionFileError::Parse {
                line: line_no,
                msg: format!("trailing token {extra:?} after {n_boxes} boxes"),
            });
        }
        if table.insert(frame, dets).is_some() {
            return Err(DetectionFileError::Parse {
                line: line_no,
                msg: format!("duplicate record for frame {frame}"),
            });
        }
    }
    Ok(table)
}

fn next_num<T: std::str::FromStr>(
    tok: &mut std::str::SplitAsciiWhitespace<'_>,
    line: usize,
    what: &str,
) -> Result<T, DetectionFileError> {
    let t = tok
        .next()
        .ok_or_else(|| DetectionFileError::Parse { line, msg: format!("missing {what}") })?;
    t.parse().map_err(|_| DetectionFileError::Parse {
        line,
        msg: format!("invalid {what} {t:?}"),
    })
}

/// Serialize a detection table. Float formatting is Rust's shortest
/// round-trip form, so save-then-load reproduces the table exactly.
pub fn save_detection_file(path: &Path, table: &FrameDetections) -> Result<(), DetectionFileError> {
    let mut out = String::new();
    for (frame, dets) in table {
        out.push_str(&format!("{frame} {}", dets.len()));
        for d in dets {
            out.push_str(&format!(
                " {} {} {} {} {}",
                d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h, d.confidence
            ));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_record_parses() {
        let table = parse_detection_text("0 1 10 20 30 40 0.9\n", 10).unwrap();
        assert_eq!(table.len(), 1);
        let d = &table[&0][0];
        assert_eq!((d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h), (10.0, 20.0, 30.0, 40.0));
        assert_eq!(d.confidence, 0.9);
    }

    #[test]
    fn zero_width_box_is_rejected_with_line_number() {
        let err = parse_detection_text("0 1 10 20 0 40 0.9\n", 10).unwrap_err();
        match err {
            DetectionFileError::BadBox { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn out_of_range_frame_is_rejected() {
        let err = parse_detection_text("7 0\n", 5).unwrap_err();
        assert!(matches!(err, DetectionFileError::FrameOutOfRange { frame: 7, .. }));
    }

    #[test]
    fn round_trip_is_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut table = FrameDetections::new();
        for frame in (0..1000).step_by(3) {
            let n = rng.gen_range(0..4);
            let dets: Vec<Detection> = (0..n)
                .map(|_| {
                    Detection::new(
                        BBox::new(
                            rng.gen_range(0.0f32..500.0),
                            rng.gen_range(0.0f32..280.0),
                            rng.gen_range(0.1f32..60.0),
                            rng.gen_range(0.1f32..120.0),
                        ),
                        rng.gen_range(0.0f32..=1.0),
                    )
                    .unwrap()
                })
                .collect();
            table.insert(frame, dets);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dets.txt");
        save_detection_file(&path, &table).unwrap();
        let reloaded = load_detection_file(&path, 1000).unwrap();
        assert_eq!(table, reloaded);
    }

    #[test]
    fn fuzzed_lines_reject_exactly_the_invalid_boxes() {
        // Valid except for the flagged coordinate field.
        let good = "3 2 1 2 3 4 0.5 5 6 7 8 0.25\n";
        assert!(parse_detection_text(good, 10).is_ok());
        for bad in [
            "3 2 1 2 3 4 0.5 5 6 -7 8 0.25\n", // negative width
            "3 1 1 2 3 4 1.5\n",               // confidence > 1
            "3 1 1 2 3 nan 0.5\n",             // non-finite height
        ] {
            assert!(parse_detection_text(bad, 10).is_err(), "{bad:?}");
        }
    }
}
