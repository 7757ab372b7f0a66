//! Tunable parameters of the vision pipeline.
//!
//! Every field has an embedded default. A TOML file overrides fields
//! individually, including single bounds inside a color range.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::colormap::ColormapName;
use crate::error::{Error, Result};
use crate::imaging::Rgb;
use crate::landmarks::EyeContourIndices;
use crate::residue::HsvRange;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Black face paint.
    pub black: HsvRange,
    /// Pink face paint.
    pub pink: HsvRange,
    /// Blue-channel gain applied before the HSV conversion.
    pub blue_factor: f64,
    /// Luma bounds of the binary threshold; inside is drawn black.
    pub threshold_lo: u8,
    pub threshold_hi: u8,
    /// Mean eye aspect ratio at or above which eyes count as open.
    pub openness_threshold: f64,
    /// Eye box margin as a fraction of the box extent, per side.
    pub pad_frac: f64,
    pub colormap: ColormapName,
    /// Color of the threshold-boundary contours.
    pub edge_color: Rgb,
    pub eye_indices: EyeContourIndices,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            black: HsvRange::BLACK,
            pink: HsvRange::PINK,
            blue_factor: 1.2,
            threshold_lo: 0,
            threshold_hi: 100,
            openness_threshold: 0.18,
            pad_frac: 0.25,
            colormap: ColormapName::Viridis,
            edge_color: [255, 0, 0],
            eye_indices: EyeContourIndices::default(),
        }
    }
}

impl Config {
    /// Parses TOML overrides on top of the defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let overrides: toml::Table =
            toml::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))?;
        Self::default().merged(overrides)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    /// Applies a table of overrides, recursing into nested tables.
    pub fn merged(&self, overrides: toml::Table) -> Result<Self> {
        let mut base = toml::Table::try_from(self)
            .map_err(|e| Error::Format(format!("config: {e}")))?;
        merge_tables(&mut base, overrides);
        let cfg: Config = toml::Value::Table(base)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Format(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.black.validate()?;
        self.pink.validate()?;
        if !self.blue_factor.is_finite() || self.blue_factor < 0.0 {
            return Err(Error::invalid("blue_factor must be finite and non-negative"));
        }
        if self.threshold_lo > self.threshold_hi {
            return Err(Error::invalid("threshold_lo exceeds threshold_hi"));
        }
        if !self.openness_threshold.is_finite() || self.openness_threshold < 0.0 {
            return Err(Error::invalid("openness_threshold must be non-negative"));
        }
        if !self.pad_frac.is_finite() || self.pad_frac < 0.0 {
            return Err(Error::invalid("pad_frac must be non-negative"));
        }
        Ok(())
    }
}

fn merge_tables(base: &mut toml::Table, overrides: toml::Table) {
    for (key, value) in overrides {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}
