//! Quantitative evaluation: illumination stability, overlap of algorithm
//! output with manual polygon annotations, and residue-ratio statistics.

mod annotation;
mod corpus;
mod illumination;
mod overlap;
mod raster;
mod stats;

pub use annotation::{AnnotationLabel, AnnotationSet, PolygonAnnotation, ANNOTATION_SUFFIX};
pub use corpus::{evaluate_item, run_corpus_eval, CorpusReport, ItemReport, ItemStatus, RateAverages};
pub use illumination::{
    hsv_distance, illumination_table, pixel_distance, IlluminationReport, IlluminationRow,
    PixelDistance,
};
pub use overlap::{
    binary_success_rate, overlap_rate_eye, overlap_rate_paint, OverlapReport, Rate,
};
pub use raster::{point_in_polygon, rasterize_polygon, rasterize_union};
pub use stats::{
    aggregate_ratios, trial_mean, AggregateStats, ParticipantRatios, ParticipantTable,
    RatioColumn, TRIALS,
};
