use super::{segment_paint, PaintClass, ResidueMask};
use crate::config::Config;
use crate::error::Result;
use crate::imaging::{RasterImage, Rgb};

pub const BACKGROUND: Rgb = [255, 255, 255];
/// Detected black paint.
pub const BLACK_PAINT_COLOR: Rgb = [0, 0, 255];
/// Detected pink paint.
pub const PINK_PAINT_COLOR: Rgb = [255, 0, 0];
/// Pixels detected as both.
pub const OVERLAP_COLOR: Rgb = [255, 105, 180];

#[derive(Debug, Clone, PartialEq)]
pub struct HsvUvRendering {
    pub black_vis: RasterImage,
    pub pink_vis: RasterImage,
    pub combined: RasterImage,
    pub black: ResidueMask,
    pub pink: ResidueMask,
}

/// Segments both paint classes and renders them as single-color images on
/// a white background, plus a combined view where each pixel's color
/// depends only on its (black, pink) membership.
pub fn hsv_uv_simulate(img: &RasterImage, cfg: &Config) -> Result<HsvUvRendering> {
    let black = segment_paint(img, &cfg.black, cfg.blue_factor)?;
    let pink = segment_paint(img, &cfg.pink, cfg.blue_factor)?;
    let (w, h) = img.dims();

    let single = |color: Rgb, mask: &crate::geometry::BinaryMask| {
        RasterImage::from_fn(w, h, |x, y| if mask.get(x, y) { color } else { BACKGROUND })
    };
    let black_vis = single(BLACK_PAINT_COLOR, &black)?;
    let pink_vis = single(PINK_PAINT_COLOR, &pink)?;
    let combined = RasterImage::from_fn(w, h, |x, y| {
        combined_color(black.get(x, y), pink.get(x, y))
    })?;

    Ok(HsvUvRendering {
        black_vis,
        pink_vis,
        combined,
        black: ResidueMask::new(PaintClass::Black, black)?,
        pink: ResidueMask::new(PaintClass::Pink, pink)?,
    })
}

pub fn combined_color(in_black: bool, in_pink: bool) -> Rgb {
    match (in_black, in_pink) {
        (false, false) => BACKGROUND,
        (true, false) => BLACK_PAINT_COLOR,
        (false, true) => PINK_PAINT_COLOR,
        (true, true) => OVERLAP_COLOR,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{hsv_to_rgb, HsvPixel};
    use crate::residue::HsvRange;

    fn pink_rgb() -> Rgb {
        hsv_to_rgb(HsvPixel::new(330.0, 200.0, 200.0))
    }

    #[test]
    fn disjoint_patches() {
        let img = RasterImage::from_fn(10, 4, |x, _| match x {
            0..=2 => [0, 0, 0],
            7..=9 => pink_rgb(),
            _ => [255, 255, 255],
        })
        .unwrap();
        let out = hsv_uv_simulate(&img, &Config::default()).unwrap();
        assert_eq!(out.combined.get(1, 1), BLACK_PAINT_COLOR);
        assert_eq!(out.combined.get(8, 2), PINK_PAINT_COLOR);
        assert_eq!(out.combined.get(5, 0), BACKGROUND);
        assert!(!out.combined.pixels().contains(&OVERLAP_COLOR));
        assert_eq!(out.black_vis.get(0, 0), BLACK_PAINT_COLOR);
        assert_eq!(out.black_vis.get(8, 0), BACKGROUND);
        assert_eq!(out.pink_vis.get(8, 0), PINK_PAINT_COLOR);
        assert_eq!(out.black.ratio, 0.3);
        assert_eq!(out.pink.ratio, 0.3);
    }

    #[test]
    fn intersection_is_overlap_color() {
        // widen black to cover the pink patch as well
        let cfg = Config {
            black: HsvRange { v_hi: 255.0, s_lo: 80.0, h_lo: 300.0, h_hi: 20.0, ..HsvRange::BLACK },
            ..Config::default()
        };
        let img = RasterImage::from_fn(4, 4, |x, _| if x < 2 { pink_rgb() } else { [255; 3] }).unwrap();
        let out = hsv_uv_simulate(&img, &cfg).unwrap();
        assert_eq!(out.combined.get(0, 0), OVERLAP_COLOR);
        assert_eq!(out.combined.get(3, 0), BACKGROUND);
    }

    #[test]
    fn empty_masks_give_background() {
        let img = RasterImage::filled(5, 5, [255; 3]).unwrap();
        let out = hsv_uv_simulate(&img, &Config::default()).unwrap();
        assert!(out.combined.pixels().iter().all(|&p| p == BACKGROUND));
        assert_eq!((out.black.ratio, out.pink.ratio), (0.0, 0.0));
    }

    #[test]
    fn four_colors_at_most() {
        let img = RasterImage::from_fn(16, 16, |x, y| [(x * 16) as u8, (y * 16) as u8, ((x + y) * 8) as u8]).unwrap();
        let out = hsv_uv_simulate(&img, &Config::default()).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                assert_eq!(
                    out.combined.get(x, y),
                    combined_color(out.black.mask.get(x, y), out.pink.mask.get(x, y))
                );
            }
        }
    }
}
