//! Binary portable graymap/pixmap images (P5/P6, 8-bit).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pixel values in `[0, 1]`, row-major with interleaved channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagePatch {
    width: usize,
    height: usize,
    channels: usize,
    values: Vec<f64>,
}

impl ImagePatch {
    pub fn new(width: usize, height: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::Image(format!("{channels} channels (expected 1 or 3)")));
        }
        if width == 0 || height == 0 {
            return Err(Error::Image(format!("empty image {width}x{height}")));
        }
        let expected = width * height * channels;
        if values.len() != expected {
            return Err(Error::Image(format!(
                "{width}x{height}x{channels} image needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Image(format!("value {v} at index {i} outside [0, 1]")));
        }
        Ok(Self { width, height, channels, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn skip_space_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() {
        match bytes[pos] {
            b'#' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            b if b.is_ascii_whitespace() => pos += 1,
            _ => break,
        }
    }
    pos
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    *pos = skip_space_and_comments(bytes, *pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Image(format!("missing or malformed {what} in header")))
}

/// Decodes a P5 (grayscale) or P6 (RGB) image with maximum value 255.
pub fn parse_ppm(bytes: &[u8]) -> Result<ImagePatch> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => {
            let magic = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
            return Err(Error::Image(format!("bad magic {magic:?} (expected P5 or P6)")));
        }
    };
    let mut pos = 2;
    let width = header_number(bytes, &mut pos, "width")?;
    let height = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maximum value")?;
    if maxval != 255 {
        return Err(Error::Image(format!("maximum value {maxval} is not supported (expected 255)")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Image("header is not terminated by whitespace".into())),
    }
    let expected = width * height * channels;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(Error::Image(format!("truncated payload: expected {expected} bytes, found {}", raster.len())));
    }
    let values = raster[..expected].iter().map(|&b| b as f64 / 255.0).collect();
    ImagePatch::new(width, height, channels, values)
}

pub fn load_ppm(path: &Path) -> Result<ImagePatch> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_ppm(&bytes).map_err(|e| match e {
        Error::Image(reason) => Error::Image(format!("{}: {reason}", path.display())),
        other => other,
    })
}

/// Encodes `image` as P5/P6, rounding values to the nearest byte.
pub fn encode_ppm(image: &ImagePatch) -> Vec<u8> {
    let magic = if image.channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(image.values.iter().map(|v| (v * 255.0).round() as u8));
    out
}

const BUNDLED: [&[u8]; 3] = [
    include_bytes!("../../assets/patch0.pgm"),
    include_bytes!("../../assets/patch1.pgm"),
    include_bytes!("../../assets/patch2.pgm"),
];

/// The three 16×16 grayscale test patches shipped with the crate.
pub fn bundled_patches() -> Vec<ImagePatch> {
    BUNDLED.iter().map(|b| parse_ppm(b).expect("bundled patch is a valid P5 image")).collect()
}
