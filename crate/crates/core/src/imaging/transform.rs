use super::color::to_channel;
use super::raster::{RasterImage, Rgb};
use crate::error::{Error, Result};
use crate::geometry::Rect;

/// Bilinear resize with pixel-center alignment and edge clamping.
pub fn resize(img: &RasterImage, width: u32, height: u32) -> Result<RasterImage> {
    if width == 0 || height == 0 {
        return Err(Error::invalid(format!(
            "resize target must be positive, got {width}x{height}"
        )));
    }
    if img.dims() == (width, height) {
        return Ok(img.clone());
    }

    let xs = sample_positions(img.width(), width);
    let ys = sample_positions(img.height(), height);

    RasterImage::from_fn(width, height, |x, y| {
        let (x0, x1, tx) = xs[x as usize];
        let (y0, y1, ty) = ys[y as usize];
        let top = lerp_px(img.get(x0, y0), img.get(x1, y0), tx);
        let bottom = lerp_px(img.get(x0, y1), img.get(x1, y1), tx);
        let mut out = [0u8; 3];
        for c in 0..3 {
            out[c] = to_channel(top[c] + (bottom[c] - top[c]) * ty);
        }
        out
    })
}

/// For each destination index: the two source neighbours and the weight of
/// the second one.
fn sample_positions(src: u32, dst: u32) -> Vec<(u32, u32, f64)> {
    let scale = f64::from(src) / f64::from(dst);
    let last = f64::from(src - 1);
    (0..dst)
        .map(|i| {
            let pos = ((f64::from(i) + 0.5) * scale - 0.5).clamp(0.0, last);
            let lo = pos.floor();
            let hi = (lo + 1.0).min(last);
            (lo as u32, hi as u32, pos - lo)
        })
        .collect()
}

fn lerp_px(a: Rgb, b: Rgb, t: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for c in 0..3 {
        let (a, b) = (f64::from(a[c]), f64::from(b[c]));
        out[c] = a + (b - a) * t;
    }
    out
}

/// Copies `patch` over `region` of `base`.
pub fn paste(base: &RasterImage, region: Rect, patch: &RasterImage) -> Result<RasterImage> {
    if (region.width(), region.height()) != patch.dims() {
        return Err(Error::invalid(format!(
            "patch is {}x{} but region is {}x{}",
            patch.width(),
            patch.height(),
            region.width(),
            region.height()
        )));
    }
    if !region.fits_within(base.width(), base.height()) {
        return Err(Error::invalid(format!(
            "region {region:?} exceeds {}x{} image",
            base.width(),
            base.height()
        )));
    }
    let mut out = base.clone();
    for y in 0..patch.height() {
        for x in 0..patch.width() {
            out.put(region.x0 + x, region.y0 + y, patch.get(x, y));
        }
    }
    Ok(out)
}

pub fn crop(img: &RasterImage, region: Rect) -> Result<RasterImage> {
    if !region.fits_within(img.width(), img.height()) {
        return Err(Error::invalid(format!(
            "region {region:?} exceeds {}x{} image",
            img.width(),
            img.height()
        )));
    }
    RasterImage::from_fn(region.width(), region.height(), |x, y| {
        img.get(region.x0 + x, region.y0 + y)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_images_stay_constant() {
        let img = RasterImage::filled(2, 2, [17, 99, 230]).unwrap();
        let out = resize(&img, 4, 4).unwrap();
        assert_eq!(out.dims(), (4, 4));
        assert!(out.pixels().iter().all(|&p| p == [17, 99, 230]));
    }

    #[test]
    fn same_size_is_identity() {
        let img = RasterImage::from_fn(5, 3, |x, y| [x as u8 * 40, y as u8 * 70, 3]).unwrap();
        assert_eq!(resize(&img, 5, 3).unwrap(), img);
    }

    #[test]
    fn bilinear_midpoint() {
        // destination center 1.5 maps to source 0.5: halfway between the two pixels
        let img = RasterImage::new(2, 1, vec![[0, 0, 0], [255, 255, 255]]).unwrap();
        let out = resize(&img, 3, 1).unwrap();
        assert_eq!(out.get(1, 0), [128, 128, 128]);
        assert_eq!(out.get(0, 0), [0, 0, 0]);
        assert_eq!(out.get(2, 0), [255, 255, 255]);
    }

    #[test]
    fn resize_rejects_zero() {
        let img = RasterImage::filled(2, 2, [0; 3]).unwrap();
        assert!(resize(&img, 0, 2).is_err());
        assert!(resize(&img, 2, 0).is_err());
    }

    #[test]
    fn paste_cases() {
        let base = RasterImage::filled(4, 3, [255; 3]).unwrap();
        let full = RasterImage::filled(4, 3, [9; 3]).unwrap();
        assert_eq!(paste(&base, base.bounds(), &full).unwrap(), full);

        let dot = RasterImage::filled(1, 1, [0; 3]).unwrap();
        let out = paste(&base, Rect::new(2, 1, 3, 2).unwrap(), &dot).unwrap();
        assert_eq!(out.pixels().iter().filter(|&&p| p == [0; 3]).count(), 1);
        assert_eq!(out.get(2, 1), [0; 3]);

        assert!(paste(&base, Rect::new(0, 0, 2, 2).unwrap(), &dot).is_err());
        assert!(paste(&base, Rect::new(4, 0, 5, 1).unwrap(), &dot).is_err());
        assert!(crop(&base, Rect::new(0, 0, 5, 1).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn paste_then_crop_roundtrips(
            bw in 1u32..20, bh in 1u32..20,
            fx in 0.0f64..1.0, fy in 0.0f64..1.0, fw in 0.0f64..1.0, fh in 0.0f64..1.0,
            seed in any::<u64>(),
        ) {
            let x0 = ((bw - 1) as f64 * fx) as u32;
            let y0 = ((bh - 1) as f64 * fy) as u32;
            let w = 1 + ((bw - x0 - 1) as f64 * fw) as u32;
            let h = 1 + ((bh - y0 - 1) as f64 * fh) as u32;
            let region = Rect::from_size(x0, y0, w, h).unwrap();
            let base = RasterImage::filled(bw, bh, [200, 100, 50]).unwrap();
            let patch = RasterImage::from_fn(w, h, |x, y| {
                let v = seed.wrapping_mul(u64::from(x * 31 + y * 17 + 1));
                [v as u8, (v >> 8) as u8, (v >> 16) as u8]
            }).unwrap();
            let out = paste(&base, region, &patch).unwrap();
            prop_assert_eq!(crop(&out, region).unwrap(), patch);
            for y in 0..bh {
                for x in 0..bw {
                    if !(x >= region.x0 && x < region.x1 && y >= region.y0 && y < region.y1) {
                        prop_assert_eq!(out.get(x, y), [200, 100, 50]);
                    }
                }
            }
        }

        #[test]
        fn resize_keeps_constants(w in 1u32..12, h in 1u32..12, tw in 1u32..30, th in 1u32..30, c in any::<[u8; 3]>()) {
            let img = RasterImage::filled(w, h, c).unwrap();
            let out = resize(&img, tw, th).unwrap();
            prop_assert_eq!(out.dims(), (tw, th));
            prop_assert!(out.pixels().iter().all(|&p| p == c));
        }
    }
}
