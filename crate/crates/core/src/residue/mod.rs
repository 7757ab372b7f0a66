//! Paint-residue segmentation and the two visualizations shown to the
//! user: the HSV-UV simulation and the binary threshold.

mod check;
mod hsv_uv;
mod threshold;

use serde::{Deserialize, Serialize};

pub use check::{removal_check, visualize, RemovalCheck, Visualization, VisualizationSet};
pub use hsv_uv::{
    hsv_uv_simulate, HsvUvRendering, BACKGROUND, BLACK_PAINT_COLOR, OVERLAP_COLOR,
    PINK_PAINT_COLOR,
};
pub use threshold::{binary_threshold_vis, threshold_edges, ThresholdRendering};

use crate::error::{Error, Result};
use crate::geometry::BinaryMask;
use crate::imaging::{color, HsvPixel, RasterImage};

/// Inclusive HSV box. Hue is in degrees; `h_lo > h_hi` selects the range
/// that wraps through 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsvRange {
    pub h_lo: f64,
    pub h_hi: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl HsvRange {
    /// Any hue and saturation, value up to 60.
    pub const BLACK: HsvRange = HsvRange {
        h_lo: 0.0,
        h_hi: 360.0,
        s_lo: 0.0,
        s_hi: 255.0,
        v_lo: 0.0,
        v_hi: 60.0,
    };

    /// Magenta through red (300° wrapping to 15°), saturated, not dark.
    pub const PINK: HsvRange = HsvRange {
        h_lo: 300.0,
        h_hi: 15.0,
        s_lo: 80.0,
        s_hi: 255.0,
        v_lo: 60.0,
        v_hi: 255.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.h_lo, self.h_hi, self.s_lo, self.s_hi, self.v_lo, self.v_hi];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("HSV bounds must be finite"));
        }
        if !(0.0..=360.0).contains(&self.h_lo) || !(0.0..=360.0).contains(&self.h_hi) {
            return Err(Error::invalid("hue bounds must lie in [0,360]"));
        }
        for (lo, hi, name) in [(self.s_lo, self.s_hi, "saturation"), (self.v_lo, self.v_hi, "value")] {
            if !(0.0..=255.0).contains(&lo) || !(0.0..=255.0).contains(&hi) {
                return Err(Error::invalid(format!("{name} bounds must lie in [0,255]")));
            }
            if lo > hi {
                return Err(Error::invalid(format!("{name} lower bound exceeds upper bound")));
            }
        }
        Ok(())
    }

    pub fn contains_hue(&self, h: f64) -> bool {
        if self.h_lo <= self.h_hi {
            self.h_lo <= h && h <= self.h_hi
        } else {
            h >= self.h_lo || h <= self.h_hi
        }
    }

    pub fn contains(&self, p: HsvPixel) -> bool {
        self.contains_hue(p.h)
            && self.s_lo <= p.s
            && p.s <= self.s_hi
            && self.v_lo <= p.v
            && p.v <= self.v_hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaintClass {
    Black,
    Pink,
}

/// Segmentation of one paint class with its area ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueMask {
    pub class: PaintClass,
    pub mask: BinaryMask,
    pub ratio: f64,
}

impl ResidueMask {
    pub fn new(class: PaintClass, mask: BinaryMask) -> Result<Self> {
        let ratio = residue_ratio(&mask)?;
        Ok(Self { class, mask, ratio })
    }
}

/// Pixels whose blue-enhanced HSV color falls inside `range`.
pub fn segment_paint(img: &RasterImage, range: &HsvRange, blue_factor: f64) -> Result<BinaryMask> {
    range.validate()?;
    color::check_blue_factor(blue_factor)?;
    let bits = img
        .pixels()
        .iter()
        .map(|&p| range.contains(color::rgb_to_hsv(color::enhance_blue_pixel(p, blue_factor))))
        .collect();
    BinaryMask::from_bits(img.width(), img.height(), bits)
}

/// Fraction of set cells.
pub fn residue_ratio(mask: &BinaryMask) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::invalid("residue ratio of an empty grid"));
    }
    Ok(mask.count() as f64 / mask.len() as f64)
}
