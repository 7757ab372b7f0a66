use std::io::Cursor;
use std::path::Path;

use image::codecs::jpeg::JpegEncoder;
use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};

use super::raster::RasterImage;
use crate::error::{Error, Result};

const JPEG_QUALITY: u8 = 92;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Jpeg,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Jpeg => "jpg",
        }
    }

    pub fn mime(self) -> &'static str {
        match self {
            ImageFormat::Png => "image/png",
            ImageFormat::Jpeg => "image/jpeg",
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::Png),
            "jpg" | "jpeg" => Some(ImageFormat::Jpeg),
            _ => None,
        }
    }

    /// Sniffs the container from magic bytes.
    pub fn detect(bytes: &[u8]) -> Option<Self> {
        match image::guess_format(bytes).ok()? {
            image::ImageFormat::Png => Some(ImageFormat::Png),
            image::ImageFormat::Jpeg => Some(ImageFormat::Jpeg),
            _ => None,
        }
    }

    fn to_image(self) -> image::ImageFormat {
        match self {
            ImageFormat::Png => image::ImageFormat::Png,
            ImageFormat::Jpeg => image::ImageFormat::Jpeg,
        }
    }
}

/// Decodes PNG or baseline JPEG bytes into an RGB raster.
pub fn decode(bytes: &[u8]) -> Result<RasterImage> {
    let format = ImageFormat::detect(bytes)
        .ok_or_else(|| Error::InvalidImage("not a PNG or JPEG stream".into()))?;
    let decoded = image::load_from_memory_with_format(bytes, format.to_image())
        .map_err(|e| Error::InvalidImage(e.to_string()))?
        .into_rgb8();
    let (w, h) = decoded.dimensions();
    let pixels = decoded
        .into_raw()
        .chunks_exact(3)
        .map(|p| [p[0], p[1], p[2]])
        .collect();
    RasterImage::new(w, h, pixels).map_err(|e| Error::InvalidImage(e.to_string()))
}

pub fn encode(img: &RasterImage, format: ImageFormat) -> Result<Vec<u8>> {
    let raw: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    let mut out = Cursor::new(Vec::new());
    let res = match format {
        ImageFormat::Png => PngEncoder::new(&mut out).write_image(
            &raw,
            img.width(),
            img.height(),
            ExtendedColorType::Rgb8,
        ),
        ImageFormat::Jpeg => JpegEncoder::new_with_quality(&mut out, JPEG_QUALITY).write_image(
            &raw,
            img.width(),
            img.height(),
            ExtendedColorType::Rgb8,
        ),
    };
    res.map_err(|e| Error::InvalidImage(e.to_string()))?;
    Ok(out.into_inner())
}

pub fn load(path: impl AsRef<Path>) -> Result<RasterImage> {
    let bytes = std::fs::read(path.as_ref())?;
    decode(&bytes)
}

/// Writes `img` in the format implied by the file extension.
pub fn save(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = ImageFormat::from_path(path).ok_or_else(|| {
        Error::invalid(format!("unsupported image extension: {}", path.display()))
    })?;
    std::fs::write(path, encode(img, format)?)?;
    Ok(())
}
