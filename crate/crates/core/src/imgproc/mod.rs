//! Grayscale image container, Netpbm IO, resampling, image pyramids,
//! spatial gradients, and Shi-Tomasi corner extraction.
//!
//! All operations are pure functions of their inputs; images are immutable
//! after construction and safe to share across threads.

mod corners;
mod gradient;
mod image;
mod netpbm;
mod pyramid;
mod resize;

pub use corners::{shi_tomasi_corners, CornerParams};
pub use gradient::gradients;
pub use image::{GrayImage, RgbImage};
pub use netpbm::{read_netpbm, write_pgm, write_ppm, NetpbmImage};
pub use pyramid::{build_pyramid, Pyramid};
pub use resize::{downscale, resize_field};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("data length {len} does not match {width}x{height}")]
    DataSizeMismatch { len: usize, width: usize, height: usize },
    #[error("target {target_w}x{target_h} exceeds source {src_w}x{src_h}: this pipeline only shrinks")]
    UpscaleRejected { src_w: usize, src_h: usize, target_w: usize, target_h: usize },
    #[error("target dimensions must be at least 1x1")]
    ZeroTarget,
    #[error("{levels} pyramid levels would shrink a {width}x{height} image below 1 pixel")]
    TooManyLevels { levels: usize, width: usize, height: usize },
    #[error("pyramid needs at least 1 level")]
    NoLevels,
    #[error("image {width}x{height} is smaller than the 3x3 gradient kernel")]
    KernelTooLarge { width: usize, height: usize },
    #[error("roi does not intersect the image")]
    EmptyRoi,
    #[error("invalid corner parameters: {0}")]
    BadCornerParams(String),
    #[error("netpbm read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("netpbm parse error: {0}")]
    Format(String),
}
