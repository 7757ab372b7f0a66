use serde::{Deserialize, Serialize};

use super::annotation::{AnnotationLabel, AnnotationSet};
use super::raster::rasterize_union;
use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, Point};
use crate::residue::PaintClass;

/// A pixel-count quotient. Undefined when the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub hits: usize,
    pub total: usize,
}

impl Rate {
    pub fn value(&self) -> Option<f64> {
        (self.total > 0).then(|| self.hits as f64 / self.total as f64)
    }
}

fn label_mask(ann: &AnnotationSet, label: AnnotationLabel, dims: (u32, u32)) -> Result<BinaryMask> {
    if !ann.has(label) {
        return Err(Error::MissingAnnotation(format!(
            "{} has no '{}' polygon",
            ann.image,
            label.as_str()
        )));
    }
    rasterize_union(ann.polygons(label).map(|p| p.points.as_slice()), dims)
}

/// Share of the manual eye area covered by the algorithm's eye rings.
pub fn overlap_rate_eye(
    algo_contours: &[Vec<Point>],
    ann: &AnnotationSet,
    dims: (u32, u32),
) -> Result<Rate> {
    let manual = label_mask(ann, AnnotationLabel::Eye, dims)?;
    let algo = rasterize_union(algo_contours.iter().map(Vec::as_slice), dims)?;
    Ok(Rate {
        hits: algo.intersection_count(&manual)?,
        total: manual.count(),
    })
}

/// Share of the manual paint area of `class` covered by `mask`.
pub fn overlap_rate_paint(mask: &BinaryMask, ann: &AnnotationSet, class: PaintClass) -> Result<Rate> {
    let manual = label_mask(ann, class.into(), mask.dims())?;
    Ok(Rate {
        hits: mask.intersection_count(&manual)?,
        total: manual.count(),
    })
}

/// Among in-threshold pixels outside the manual eye area, the share that
/// falls inside the manual black-paint area.
pub fn binary_success_rate(threshold_mask: &BinaryMask, ann: &AnnotationSet) -> Result<Rate> {
    let dims = threshold_mask.dims();
    let eye = label_mask(ann, AnnotationLabel::Eye, dims)?;
    let black = label_mask(ann, AnnotationLabel::Black, dims)?;
    let outside_eye = threshold_mask.and_not(&eye)?;
    Ok(Rate {
        hits: outside_eye.intersection_count(&black)?,
        total: outside_eye.count(),
    })
}

/// Areas, counts and the four overlap rates of one image. A rate is
/// `None` when its denominator is zero or its label is absent.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OverlapReport {
    pub a1: Option<usize>,
    pub a2: Option<usize>,
    pub a3: Option<usize>,
    pub a4: Option<usize>,
    pub a5: Option<usize>,
    pub a6: Option<usize>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub r_eye: Option<f64>,
    pub r_pink: Option<f64>,
    pub r_black: Option<f64>,
    pub r_bin: Option<f64>,
}

impl OverlapReport {
    pub fn set_eye(&mut self, rate: Rate) {
        (self.a1, self.a2, self.r_eye) = (Some(rate.hits), Some(rate.total), rate.value());
    }

    pub fn set_pink(&mut self, rate: Rate) {
        (self.a3, self.a4, self.r_pink) = (Some(rate.hits), Some(rate.total), rate.value());
    }

    pub fn set_black(&mut self, rate: Rate) {
        (self.a5, self.a6, self.r_black) = (Some(rate.hits), Some(rate.total), rate.value());
    }

    pub fn set_bin(&mut self, rate: Rate) {
        (self.n1, self.n2, self.r_bin) = (Some(rate.hits), Some(rate.total), rate.value());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::annotation::PolygonAnnotation;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
        vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ]
    }

    fn ann(shapes: Vec<(AnnotationLabel, Vec<Point>)>) -> AnnotationSet {
        AnnotationSet {
            image: "t.png".into(),
            shapes: shapes
                .into_iter()
                .map(|(l, p)| PolygonAnnotation::new(l, p).unwrap())
                .collect(),
        }
    }

    #[test]
    fn eye_rate_cases() {
        let dims = (64, 64);
        let manual = rect(10.0, 10.0, 30.0, 30.0);
        let set = ann(vec![(AnnotationLabel::Eye, manual.clone())]);

        let same = overlap_rate_eye(std::slice::from_ref(&manual), &set, dims).unwrap();
        assert_eq!(same.value(), Some(1.0));

        let far = overlap_rate_eye(&[rect(40.0, 40.0, 60.0, 60.0)], &set, dims).unwrap();
        assert_eq!(far.value(), Some(0.0));

        // brute force: left half is 10 columns of 20 rows out of 400
        let half = overlap_rate_eye(&[rect(0.0, 0.0, 20.0, 64.0)], &set, dims).unwrap();
        assert_eq!((half.hits, half.total), (200, 400));
        assert_eq!(half.value(), Some(0.5));

        let no_eye = ann(vec![(AnnotationLabel::Pink, manual)]);
        assert!(matches!(
            overlap_rate_eye(&[], &no_eye, dims),
            Err(Error::MissingAnnotation(_))
        ));
    }

    #[test]
    fn paint_rate_cases() {
        let set = ann(vec![(AnnotationLabel::Pink, rect(4.0, 4.0, 12.0, 12.0))]);
        let full = BinaryMask::full(16, 16);
        assert_eq!(overlap_rate_paint(&full, &set, PaintClass::Pink).unwrap().value(), Some(1.0));
        let none = BinaryMask::empty(16, 16);
        assert_eq!(overlap_rate_paint(&none, &set, PaintClass::Pink).unwrap().value(), Some(0.0));
        let half = BinaryMask::from_fn(16, 16, |x, _| x < 8);
        assert_eq!(overlap_rate_paint(&half, &set, PaintClass::Pink).unwrap().value(), Some(0.5));
        assert!(overlap_rate_paint(&half, &set, PaintClass::Black).is_err());
    }

    #[test]
    fn binary_rate_cases() {
        // eye in the middle band, black paint on the left strip
        let set = ann(vec![
            (AnnotationLabel::Eye, rect(0.0, 10.0, 20.0, 14.0)),
            (AnnotationLabel::Black, rect(0.0, 0.0, 10.0, 10.0)),
        ]);
        let dims = (20, 20);
        let inside_black = BinaryMask::from_fn(dims.0, dims.1, |x, y| x < 10 && y < 10 || (10..14).contains(&y));
        assert_eq!(binary_success_rate(&inside_black, &set).unwrap().value(), Some(1.0));

        let outside = BinaryMask::from_fn(dims.0, dims.1, |x, y| x >= 10 && y < 10);
        assert_eq!(binary_success_rate(&outside, &set).unwrap().value(), Some(0.0));

        // 30 qualifying pixels in black, 30 outside it, 20 in the eye band (ignored)
        let mixed = BinaryMask::from_fn(dims.0, dims.1, |x, y| {
            (y < 3 && x < 10) || (y < 3 && x >= 10) || ((10..11).contains(&y))
        });
        let r = binary_success_rate(&mixed, &set).unwrap();
        assert_eq!((r.hits, r.total), (30, 60));
        assert_eq!(r.value(), Some(0.5));

        let only_eye = BinaryMask::from_fn(dims.0, dims.1, |_, y| (10..14).contains(&y));
        assert_eq!(binary_success_rate(&only_eye, &set).unwrap().value(), None);

        let no_black = ann(vec![(AnnotationLabel::Eye, rect(0.0, 0.0, 5.0, 5.0))]);
        assert!(binary_success_rate(&only_eye, &no_black).is_err());
    }

    #[test]
    fn report_setters() {
        let mut r = OverlapReport::default();
        r.set_bin(Rate { hits: 0, total: 0 });
        r.set_eye(Rate { hits: 3, total: 4 });
        assert_eq!(r.r_bin, None);
        assert_eq!(r.n2, Some(0));
        assert_eq!(r.r_eye, Some(0.75));
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["r_bin"].is_null());
        assert_eq!(json["r_eye"], 0.75);
    }
}
