//! Pixel-level primitives: the RGB raster type, color-space conversions,
//! blue-channel enhancement, bilinear resizing, pasting and codecs.

mod codec;
pub(crate) mod color;
mod raster;
mod transform;

pub use codec::{decode, encode, load, save, ImageFormat};
pub use color::{enhance_blue, hsv_to_rgb, rgb_to_gray, rgb_to_hsv, HsvPixel};
pub use raster::{GrayImage, RasterImage, Rgb};
pub use transform::{crop, paste, resize};
