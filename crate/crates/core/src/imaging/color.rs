use serde::{Deserialize, Serialize};

use super::raster::{GrayImage, RasterImage, Rgb};
use crate::error::{Error, Result};

/// Cylindrical HSV color: hue in degrees `[0, 360)`, saturation and value
/// on the 8-bit scale `[0, 255]`. Achromatic colors carry hue 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl HsvPixel {
    pub const fn new(h: f64, s: f64, v: f64) -> Self {
        Self { h, s, v }
    }

    /// Converts a hue from the half-degree 8-bit encoding (`[0, 180)`).
    pub fn from_half_degree(h: u8, s: u8, v: u8) -> Self {
        Self::new(f64::from(h) * 2.0, f64::from(s), f64::from(v))
    }
}

pub fn rgb_to_hsv([r, g, b]: Rgb) -> HsvPixel {
    let (r, g, b) = (f64::from(r), f64::from(g), f64::from(b));
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    if delta == 0.0 {
        return HsvPixel::new(0.0, 0.0, max);
    }

    let sector = if max == r {
        (g - b) / delta
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = 60.0 * sector;
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h -= 360.0;
    }

    HsvPixel::new(h, delta / max * 255.0, max)
}

/// Inverse of [`rgb_to_hsv`]; channels are rounded half away from zero.
pub fn hsv_to_rgb(hsv: HsvPixel) -> Rgb {
    let h = hsv.h.rem_euclid(360.0);
    let v = hsv.v;
    let chroma = v * hsv.s / 255.0;
    let min = v - chroma;
    let sector = h / 60.0;
    let frac = sector - sector.floor();
    let rising = min + chroma * frac;
    let falling = v - chroma * frac;

    let (r, g, b) = match sector as u32 {
        0 => (v, rising, min),
        1 => (falling, v, min),
        2 => (min, v, rising),
        3 => (min, falling, v),
        4 => (rising, min, v),
        _ => (v, min, falling),
    };
    [to_channel(r), to_channel(g), to_channel(b)]
}

pub(crate) fn to_channel(x: f64) -> u8 {
    x.round().clamp(0.0, 255.0) as u8
}

/// Luma = round(0.299 R + 0.587 G + 0.114 B), in exact integer arithmetic.
pub fn rgb_to_gray(img: &RasterImage) -> GrayImage {
    let pixels = img.pixels().iter().map(|&p| luma(p)).collect();
    GrayImage::new(img.width(), img.height(), pixels).expect("dimensions come from a valid image")
}

pub(crate) fn luma([r, g, b]: Rgb) -> u8 {
    let weighted = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
    ((weighted + 500) / 1000).min(255) as u8
}

/// Scales the blue channel by `factor`, rounding and clamping to 8 bits.
pub fn enhance_blue(img: &RasterImage, factor: f64) -> Result<RasterImage> {
    check_blue_factor(factor)?;
    Ok(img.map_pixels(|p| enhance_blue_pixel(p, factor)))
}

pub(crate) fn check_blue_factor(factor: f64) -> Result<()> {
    if !factor.is_finite() || factor < 0.0 {
        return Err(Error::invalid(format!(
            "blue factor must be finite and non-negative, got {factor}"
        )));
    }
    Ok(())
}

pub(crate) fn enhance_blue_pixel([r, g, b]: Rgb, factor: f64) -> Rgb {
    [r, g, to_channel(f64::from(b) * factor)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_hsv(rgb: Rgb, h: f64, s: f64, v: f64) {
        let got = rgb_to_hsv(rgb);
        assert!(
            (got.h - h).abs() < 1e-9 && (got.s - s).abs() < 1e-9 && (got.v - v).abs() < 1e-9,
            "{rgb:?} -> {got:?}, expected ({h},{s},{v})"
        );
    }

    #[test]
    fn primaries_and_gray() {
        assert_hsv([255, 0, 0], 0.0, 255.0, 255.0);
        assert_hsv([128, 128, 128], 0.0, 0.0, 128.0);
        assert_hsv([0, 255, 0], 120.0, 255.0, 255.0);
        assert_hsv([0, 0, 255], 240.0, 255.0, 255.0);
        assert_hsv([0, 0, 0], 0.0, 0.0, 0.0);
    }

    #[test]
    fn roundtrip_on_lattice() {
        for r in (0..=255u16).step_by(5) {
            for g in (0..=255u16).step_by(5) {
                for b in (0..=255u16).step_by(5) {
                    let rgb = [r as u8, g as u8, b as u8];
                    let hsv = rgb_to_hsv(rgb);
                    assert!((0.0..360.0).contains(&hsv.h));
                    assert!((0.0..=255.0).contains(&hsv.s));
                    let back = hsv_to_rgb(hsv);
                    for c in 0..3 {
                        assert!(
                            (i16::from(back[c]) - i16::from(rgb[c])).abs() <= 1,
                            "{rgb:?} -> {hsv:?} -> {back:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn half_degree_hue() {
        assert_eq!(HsvPixel::from_half_degree(165, 10, 20).h, 330.0);
    }

    #[test]
    fn gray_values() {
        let white = RasterImage::filled(3, 2, [255, 255, 255]).unwrap();
        assert!(rgb_to_gray(&white).pixels().iter().all(|&v| v == 255));
        let black = RasterImage::filled(3, 2, [0, 0, 0]).unwrap();
        assert!(rgb_to_gray(&black).pixels().iter().all(|&v| v == 0));
        // 29.9 + 117.4 + 5.7 = 153.0
        let one = RasterImage::filled(1, 1, [100, 200, 50]).unwrap();
        assert_eq!(rgb_to_gray(&one).pixels(), &[153]);
        // 7.044 + 0.456 = 7.5 exactly: half rounds up
        assert_eq!(luma([0, 12, 4]), 8);
        assert_eq!(luma([5, 0, 0]), 1);
    }

    #[test]
    fn blue_enhancement() {
        let img = RasterImage::new(2, 1, vec![[10, 20, 100], [0, 0, 200]]).unwrap();
        let out = enhance_blue(&img, 1.5).unwrap();
        assert_eq!(out.pixels(), &[[10, 20, 150], [0, 0, 255]]);
        assert_eq!(enhance_blue(&img, 1.0).unwrap(), img);
        assert!(enhance_blue(&img, f64::NAN).is_err());
        assert!(enhance_blue(&img, f64::INFINITY).is_err());
        assert!(enhance_blue(&img, -0.5).is_err());
    }

    #[test]
    fn blue_enhancement_is_monotone() {
        for b in 0..=255u8 {
            let mut last = 0;
            for step in 0..40 {
                let [_, _, out] = enhance_blue_pixel([0, 0, b], f64::from(step) * 0.1);
                assert!(out >= last);
                last = out;
            }
        }
    }
}
