use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::residue::PaintClass;

/// Suffix of annotation documents inside a corpus directory.
pub const ANNOTATION_SUFFIX: &str = ".annotations.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationLabel {
    Eye,
    Pink,
    Black,
}

impl From<PaintClass> for AnnotationLabel {
    fn from(class: PaintClass) -> Self {
        match class {
            PaintClass::Black => AnnotationLabel::Black,
            PaintClass::Pink => AnnotationLabel::Pink,
        }
    }
}

impl AnnotationLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationLabel::Eye => "eye",
            AnnotationLabel::Pink => "pink",
            AnnotationLabel::Black => "black",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonAnnotation {
    pub label: AnnotationLabel,
    #[serde(with = "point_pairs")]
    pub points: Vec<Point>,
}

impl PolygonAnnotation {
    pub fn new(label: AnnotationLabel, points: Vec<Point>) -> Result<Self> {
        let poly = Self { label, points };
        poly.check_vertices()?;
        Ok(poly)
    }

    fn check_vertices(&self) -> Result<()> {
        if self.points.len() < 3 {
            return Err(Error::invalid(format!(
                "{} polygon has {} vertices, need at least 3",
                self.label.as_str(),
                self.points.len()
            )));
        }
        if self.points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::invalid("polygon vertex is not finite"));
        }
        Ok(())
    }
}

/// All manual labels for one image. A label may carry several polygons;
/// they are unioned before any area is measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub image: String,
    pub shapes: Vec<PolygonAnnotation>,
}

impl AnnotationSet {
    pub fn parse(text: &str) -> Result<Self> {
        let set: AnnotationSet = serde_json::from_str(text)?;
        for shape in &set.shapes {
            shape.check_vertices()?;
        }
        Ok(set)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("annotation sets always serialize")
    }

    pub fn polygons(&self, label: AnnotationLabel) -> impl Iterator<Item = &PolygonAnnotation> {
        self.shapes.iter().filter(move |s| s.label == label)
    }

    pub fn has(&self, label: AnnotationLabel) -> bool {
        self.polygons(label).next().is_some()
    }

    /// Every vertex must lie within `[0,width]×[0,height]`.
    pub fn validate_bounds(&self, (width, height): (u32, u32)) -> Result<()> {
        let (w, h) = (f64::from(width), f64::from(height));
        for shape in &self.shapes {
            if let Some(p) = shape
                .points
                .iter()
                .find(|p| p.x < 0.0 || p.y < 0.0 || p.x > w || p.y > h)
            {
                return Err(Error::invalid(format!(
                    "{} polygon vertex ({}, {}) outside {width}x{height} image",
                    shape.label.as_str(),
                    p.x,
                    p.y
                )));
            }
        }
        Ok(())
    }
}

mod point_pairs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::geometry::Point;

    pub fn serialize<S: Serializer>(points: &[Point], s: S) -> Result<S::Ok, S::Error> {
        points
            .iter()
            .map(|p| [p.x, p.y])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Point>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(Point::from).collect())
    }
}
