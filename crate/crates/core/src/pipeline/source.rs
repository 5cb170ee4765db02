//! Frame sources: in-memory frame lists and directories of Netpbm files
//! named `frame_%06d.pgm` / `.ppm`.

use std::path::PathBuf;

use thiserror::Error;

use crate::imgproc::{read_netpbm, GrayImage, ImageError};

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("frame {index}: {err}")]
    Decode { index: u64, err: ImageError },
    #[error("frame directory {0} does not exist")]
    MissingDirectory(PathBuf),
}

/// One source frame in its native resolution; the pipeline downscales to
/// the processing raster at ingest.
pub struct SourceFrame {
    pub index: u64,
    pub image: GrayImage,
}

/// Ordered frame supplier. `None` ends the stream.
pub trait FrameSource: Send {
    fn next_frame(&mut self) -> Result<Option<SourceFrame>, SourceError>;
}

/// Serves pre-rendered frames, e.g. from the synthetic scene generator.
pub struct MemorySource {
    frames: std::vec::IntoIter<GrayImage>,
    next_index: u64,
}

impl MemorySource {
    pub fn new(frames: Vec<GrayImage>) -> Self {
        Self { frames: frames.into_iter(), next_index: 0 }
    }
}

impl FrameSource for MemorySource {
    fn next_frame(&mut self) -> Result<Option<SourceFrame>, SourceError> {
        match self.frames.next() {
            Some(image) => {
                let index = self.next_index;
                self.next_index += 1;
                Ok(Some(SourceFrame { index, image }))
            }
            None => Ok(None),
        }
    }
}

/// Reads `frame_000000.pgm` (or `.ppm`, converted to luminance) upward
/// until the first missing index.
pub struct DirectorySource {
    dir: PathBuf,
    next_index: u64,
}

impl DirectorySource {
    pub fn new(dir: PathBuf) -> Result<Self, SourceError> {
        if !dir.is_dir() {
            return Err(SourceError::MissingDirectory(dir));
        }
        Ok(Self { dir, next_index: 0 })
    }
}

impl FrameSource for DirectorySource {
    fn next_frame(&mut self) -> Result<Option<SourceFrame>, SourceError> {
        let index = self.next_index;
        let stem = format!("frame_{index:06}");
        let pgm = self.dir.join(format!("{stem}.pgm"));
        let ppm = self.dir.join(format!("{stem}.ppm"));
        let path = if pgm.is_file() {
            pgm
        } else if ppm.is_file() {
            ppm
        } else {
            return Ok(None);
        };
        let image = read_netpbm(&path)
            .map_err(|err| SourceError::Decode { index, err })?
            .into_luma();
        self.next_index += 1;
        Ok(Some(SourceFrame { index, image }))
    }
}
