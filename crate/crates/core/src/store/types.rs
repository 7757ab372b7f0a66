use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::EyeClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaptureKind {
    BaselineFace,
    BaselineEyeOpen,
    BaselineEyeClosed,
    RemovalCheck,
}

impl CaptureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CaptureKind::BaselineFace => "baseline-face",
            CaptureKind::BaselineEyeOpen => "baseline-eye-open",
            CaptureKind::BaselineEyeClosed => "baseline-eye-closed",
            CaptureKind::RemovalCheck => "removal-check",
        }
    }
}

impl FromStr for CaptureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline-face" => Ok(CaptureKind::BaselineFace),
            "baseline-eye-open" => Ok(CaptureKind::BaselineEyeOpen),
            "baseline-eye-closed" => Ok(CaptureKind::BaselineEyeClosed),
            "removal-check" => Ok(CaptureKind::RemovalCheck),
            other => Err(Error::invalid(format!("unknown capture kind '{other}'"))),
        }
    }
}

/// Exposure time as a fraction of a second, written `"1/50"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shutter {
    pub num: u32,
    pub den: u32,
}

impl Shutter {
    pub fn seconds(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

impl fmt::Display for Shutter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Shutter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("shutter '{s}' is not a positive fraction"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        if num == 0 || den == 0 {
            return Err(bad());
        }
        Ok(Shutter { num, den })
    }
}

impl Serialize for Shutter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Shutter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Camera settings reported alongside a capture. Recorded, never enforced.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptureMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shutter: Option<Shutter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focal_length_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aperture: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub white_balance_k: Option<u32>,
}

impl CaptureMetadata {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: Option<f64>, name: &str| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => {
                Err(Error::invalid(format!("{name} must be positive")))
            }
            _ => Ok(()),
        };
        positive(self.iso.map(f64::from), "iso")?;
        positive(self.focal_length_mm, "focal_length_mm")?;
        positive(self.aperture, "aperture")?;
        positive(self.white_balance_k.map(f64::from), "white_balance_k")?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureRecord {
    pub capture_id: String,
    pub user_id: String,
    pub kind: CaptureKind,
    /// Path of the stored image relative to the data directory.
    pub image: String,
    pub timestamp: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<CaptureMetadata>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    pub created_at: i64,
    pub face_ref: Option<String>,
    pub baseline_open: Option<String>,
    pub baseline_closed: Option<String>,
}

impl UserProfile {
    pub fn baselines_complete(&self) -> bool {
        self.face_ref.is_some() && self.baseline_open.is_some() && self.baseline_closed.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryMode {
    Clock,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WearSession {
    pub session_id: String,
    pub user_id: String,
    pub mode: EntryMode,
    /// Clock mode only.
    pub start: Option<i64>,
    /// Clock mode only; `None` while the timer runs.
    pub end: Option<i64>,
    /// Manual mode only.
    pub manual_minutes: Option<f64>,
    pub recorded_at: i64,
    pub capture_ids: Vec<String>,
    /// Span between the first and last removal-check captures.
    pub removal_duration_s: Option<i64>,
}

impl WearSession {
    pub fn is_completed(&self) -> bool {
        match self.mode {
            EntryMode::Clock => self.end.is_some(),
            EntryMode::Manual => true,
        }
    }

    pub fn duration_minutes(&self) -> Option<f64> {
        match self.mode {
            EntryMode::Clock => Some((self.end? - self.start?) as f64 / 60.0),
            EntryMode::Manual => self.manual_minutes,
        }
    }

    /// Chronological ordering key.
    pub fn started_at(&self) -> i64 {
        self.start.unwrap_or(self.recorded_at)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub session_id: String,
    pub minutes: f64,
    pub started_at: i64,
}

/// Wearing durations of the most recent completed sessions, oldest first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrendSeries {
    pub points: Vec<TrendPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub original: String,
    pub hsv_uv: String,
    pub binary: String,
}

/// Artifact paths of the 2×3 comparison: capture row and matched
/// baseline row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonGrid {
    pub capture: GridRow,
    pub baseline: GridRow,
}

impl ComparisonGrid {
    pub fn paths(&self) -> [&str; 6] {
        [
            &self.capture.original,
            &self.capture.hsv_uv,
            &self.capture.binary,
            &self.baseline.original,
            &self.baseline.hsv_uv,
            &self.baseline.binary,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueRatios {
    pub black: f64,
    pub pink: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalCheckRecord {
    pub check_id: String,
    pub capture_id: String,
    pub user_id: String,
    pub session_id: Option<String>,
    pub baseline_capture_id: String,
    pub matched: EyeClass,
    pub openness: f64,
    pub grid: ComparisonGrid,
    pub ratios: ResidueRatios,
    pub baseline_ratios: ResidueRatios,
    pub at: i64,
}

/// A session with everything needed to re-display it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDetail {
    pub session: WearSession,
    pub captures: Vec<CaptureRecord>,
    pub checks: Vec<RemovalCheckRecord>,
}
