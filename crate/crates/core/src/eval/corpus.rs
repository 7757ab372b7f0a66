//! Batch evaluation over a directory of annotated captures.
//!
//! An item is any `<stem>.annotations.json`; its `image` field names the
//! capture (relative to the corpus directory). Eye rings come from the
//! landmark provider run on the capture itself.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::annotation::{AnnotationSet, ANNOTATION_SUFFIX};
use super::overlap::{binary_success_rate, overlap_rate_eye, overlap_rate_paint, OverlapReport, Rate};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::imaging::{self, RasterImage};
use crate::landmarks::LandmarkProvider;
use crate::localization::contour_points;
use crate::residue::{binary_threshold_vis, segment_paint, PaintClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub item: String,
    pub image: Option<String>,
    pub status: ItemStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(flatten)]
    pub overlap: OverlapReport,
}

/// Mean of each rate over the items where it is defined.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RateAverages {
    pub r_eye: Option<f64>,
    pub r_pink: Option<f64>,
    pub r_black: Option<f64>,
    pub r_bin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub corpus: String,
    pub items: Vec<ItemReport>,
    pub averages: RateAverages,
    pub failed: usize,
    pub warnings: Vec<String>,
}

impl CorpusReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

fn optional(rate: Result<Rate>) -> Result<Option<Rate>> {
    match rate {
        Ok(r) => Ok(Some(r)),
        Err(Error::MissingAnnotation(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// All four overlap measurements for one capture. Rates whose label is
/// missing from the annotation stay undefined.
pub fn evaluate_item(
    img: &RasterImage,
    ann: &AnnotationSet,
    provider: &dyn LandmarkProvider,
    cfg: &Config,
) -> Result<OverlapReport> {
    let dims = img.dims();
    ann.validate_bounds(dims)?;
    let mut report = OverlapReport::default();

    let landmarks = provider.detect(img)?;
    let contours = contour_points(&landmarks, &cfg.eye_indices, dims);
    let rings = [contours.left, contours.right];
    if let Some(rate) = optional(overlap_rate_eye(&rings, ann, dims))? {
        report.set_eye(rate);
    }

    let pink = segment_paint(img, &cfg.pink, cfg.blue_factor)?;
    if let Some(rate) = optional(overlap_rate_paint(&pink, ann, PaintClass::Pink))? {
        report.set_pink(rate);
    }
    let black = segment_paint(img, &cfg.black, cfg.blue_factor)?;
    if let Some(rate) = optional(overlap_rate_paint(&black, ann, PaintClass::Black))? {
        report.set_black(rate);
    }

    let threshold = binary_threshold_vis(img, cfg.threshold_lo, cfg.threshold_hi, cfg)?;
    if let Some(rate) = optional(binary_success_rate(&threshold.inside, ann))? {
        report.set_bin(rate);
    }
    Ok(report)
}

fn annotation_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(ANNOTATION_SUFFIX))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Evaluates every annotated item in `dir`. Per-item failures are recorded
/// in the report; only an unreadable directory is an error.
pub fn run_corpus_eval(
    dir: impl AsRef<Path>,
    provider: &dyn LandmarkProvider,
    cfg: &Config,
) -> Result<CorpusReport> {
    let dir = dir.as_ref();
    let mut items = Vec::new();
    for path in annotation_files(dir)? {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let item = name[..name.len() - ANNOTATION_SUFFIX.len()].to_string();

        let outcome = AnnotationSet::read(&path).and_then(|ann| {
            let img = imaging::load(dir.join(&ann.image))?;
            let report = evaluate_item(&img, &ann, provider, cfg)?;
            Ok((ann.image, report))
        });
        items.push(match outcome {
            Ok((image, overlap)) => ItemReport {
                item,
                image: Some(image),
                status: ItemStatus::Ok,
                error: None,
                overlap,
            },
            Err(e) => ItemReport {
                item,
                image: None,
                status: ItemStatus::Failed,
                error: Some(e.to_string()),
                overlap: OverlapReport::default(),
            },
        });
    }

    let mean = |f: fn(&OverlapReport) -> Option<f64>| {
        let vals: Vec<f64> = items.iter().filter_map(|i| f(&i.overlap)).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    let averages = RateAverages {
        r_eye: mean(|o| o.r_eye),
        r_pink: mean(|o| o.r_pink),
        r_black: mean(|o| o.r_black),
        r_bin: mean(|o| o.r_bin),
    };

    let failed = items.iter().filter(|i| i.status == ItemStatus::Failed).count();
    let mut warnings = Vec::new();
    if items.is_empty() {
        warnings.push(format!("no *{ANNOTATION_SUFFIX} items in {}", dir.display()));
    }
    for i in items.iter().filter(|i| i.status == ItemStatus::Failed) {
        warnings.push(format!(
            "{}: {}",
            i.item,
            i.error.as_deref().unwrap_or("failed")
        ));
    }

    Ok(CorpusReport {
        corpus: dir.display().to_string(),
        items,
        averages,
        failed,
        warnings,
    })
}
