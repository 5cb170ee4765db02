//! Binary Netpbm reader/writer: 8-bit P5 (grayscale) and P6 (RGB).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::image::{GrayImage, RgbImage};
use super::ImageError;

/// A decoded Netpbm frame.
pub enum NetpbmImage {
    Gray(GrayImage),
    Color(RgbImage),
}

impl NetpbmImage {
    /// Luminance view: P5 passes through, P6 converts via BT.601.
    pub fn into_luma(self) -> GrayImage {
        match self {
            NetpbmImage::Gray(g) => g,
            NetpbmImage::Color(c) => c.to_luma(),
        }
    }
}

/// Read a binary P5 or P6 file with maxval 255.
pub fn read_netpbm(path: &Path) -> Result<NetpbmImage, ImageError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    parse_netpbm(&bytes)
}

fn parse_netpbm(bytes: &[u8]) -> Result<NetpbmImage, ImageError> {
    let mut pos = 0usize;
    let magic = next_token(bytes, &mut pos).ok_or_else(|| err("missing magic number"))?;
    let channels = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        other => return Err(err(&format!("unsupported magic {other:?}, want P5 or P6"))),
    };
    let width: usize = parse_header_int(bytes, &mut pos, "width")?;
    let height: usize = parse_header_int(bytes, &mut pos, "height")?;
    let maxval: usize = parse_header_int(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(err(&format!("maxval {maxval} unsupported, want 255")));
    }
    // Exactly one whitespace byte separates the header from raster data.
    pos += 1;
    let n = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(channels))
        .ok_or_else(|| err("raster size overflow"))?;
    let raster = bytes
        .get(pos..pos + n)
        .ok_or_else(|| err("truncated raster data"))?
        .to_vec();
    match channels {
        1 => Ok(NetpbmImage::Gray(GrayImage::new(width, height, raster)?)),
        _ => Ok(NetpbmImage::Color(RgbImage::new(width, height, raster)?)),
    }
}

fn parse_header_int(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize, ImageError> {
    let tok = next_token(bytes, pos).ok_or_else(|| err(&format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| err(&format!("invalid {what} {tok:?}")))
}

/// Next whitespace-delimited header token, skipping `#` comment lines.
/// Leaves `pos` on the delimiter that terminated the token.
fn next_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if *pos > start {
        Some(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    } else {
        None
    }
}

/// Write a binary P5 file.
pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<(), ImageError> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{} {}\n255\n", img.width(), img.height())?;
    w.write_all(img.data())?;
    Ok(())
}

/// Write a binary P6 file.
pub fn write_ppm(path: &Path, img: &RgbImage) -> Result<(), ImageError> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P6\n{} {}\n255\n", img.width(), img.height())?;
    w.write_all(img.data())?;
    Ok(())
}

fn err(msg: &str) -> ImageError {
    ImageError::Format(msg.to_string())
}
