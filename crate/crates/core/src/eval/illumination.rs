use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{rgb_to_hsv, HsvPixel, RasterImage};

/// Per-pixel HSV distance and its components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelDistance {
    pub d: f64,
    pub d_h: f64,
    pub d_s: f64,
    pub d_v: f64,
}

/// Distance between two HSV colors.
///
/// Hue difference is taken around the circle and divided by 180, value
/// difference is divided by 255, and the saturation difference stays on
/// the raw 8-bit scale.
pub fn pixel_distance(a: HsvPixel, b: HsvPixel) -> PixelDistance {
    let dh_raw = (b.h.rem_euclid(360.0) - a.h.rem_euclid(360.0)).abs();
    let d_h = dh_raw.min(360.0 - dh_raw) / 180.0;
    let d_s = (b.s - a.s).abs();
    let d_v = (b.v - a.v).abs() / 255.0;
    PixelDistance {
        d: (d_h * d_h + d_s * d_s + d_v * d_v).sqrt(),
        d_h,
        d_s,
        d_v,
    }
}

/// Mean per-pixel distance between two captures of the same scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IlluminationReport {
    pub d: f64,
    pub d_h: f64,
    pub d_s: f64,
    pub d_v: f64,
    pub pixels: usize,
}

pub fn hsv_distance(img0: &RasterImage, img1: &RasterImage) -> Result<IlluminationReport> {
    if img0.dims() != img1.dims() {
        return Err(Error::invalid(format!(
            "images differ in size: {:?} vs {:?}",
            img0.dims(),
            img1.dims()
        )));
    }
    let (mut d, mut d_h, mut d_s, mut d_v) = (0.0, 0.0, 0.0, 0.0);
    for (&p0, &p1) in img0.pixels().iter().zip(img1.pixels()) {
        let px = pixel_distance(rgb_to_hsv(p0), rgb_to_hsv(p1));
        d += px.d;
        d_h += px.d_h;
        d_s += px.d_s;
        d_v += px.d_v;
    }
    let n = img0.pixels().len();
    let nf = n as f64;
    Ok(IlluminationReport {
        d: d / nf,
        d_h: d_h / nf,
        d_s: d_s / nf,
        d_v: d_v / nf,
        pixels: n,
    })
}

/// One group of three captures (conditions a, b, c) reduced to the three
/// pairwise mean distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlluminationRow {
    pub group: String,
    pub d_ab: f64,
    pub d_ac: f64,
    pub d_bc: f64,
}

/// Pairwise distances per group, plus a trailing `"average"` row when
/// there is at least one group.
pub fn illumination_table(groups: &[(String, [RasterImage; 3])]) -> Result<Vec<IlluminationRow>> {
    let mut rows = Vec::with_capacity(groups.len() + 1);
    for (name, [a, b, c]) in groups {
        rows.push(IlluminationRow {
            group: name.clone(),
            d_ab: hsv_distance(a, b)?.d,
            d_ac: hsv_distance(a, c)?.d,
            d_bc: hsv_distance(b, c)?.d,
        });
    }
    if !rows.is_empty() {
        let n = rows.len() as f64;
        let avg = |f: fn(&IlluminationRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
        rows.push(IlluminationRow {
            group: "average".into(),
            d_ab: avg(|r| r.d_ab),
            d_ac: avg(|r| r.d_ac),
            d_bc: avg(|r| r.d_bc),
        });
    }
    Ok(rows)
}
