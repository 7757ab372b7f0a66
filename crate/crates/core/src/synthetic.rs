//! Procedurally painted eye scenes with exact landmarks and annotations.
//!
//! Used for demos and for corpora whose ground truth is known by
//! construction: the annotation polygons are exactly the regions painted.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::eval::{rasterize_polygon, AnnotationLabel, AnnotationSet, PolygonAnnotation};
use crate::geometry::{Point, Rect};
use crate::imaging::{RasterImage, Rgb};
use crate::landmarks::{EyeContourIndices, FaceLandmarks, EYE_RING_LEN, LANDMARK_COUNT};
use crate::localization::contour_points;

pub const SKIN: Rgb = [235, 215, 200];
pub const EYE_WHITE: Rgb = [200, 200, 200];
pub const BLACK_PAINT: Rgb = [20, 20, 20];
pub const PINK_PAINT: Rgb = [230, 40, 140];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeSpec {
    pub center: Point,
    pub rx: f64,
    pub ry: f64,
}

impl EyeSpec {
    pub fn new(cx: f64, cy: f64, rx: f64, ry: f64) -> Self {
        Self {
            center: Point::new(cx, cy),
            rx,
            ry,
        }
    }

    /// 16 points around the ellipse, counter-clockwise from the outer corner.
    pub fn ring(&self) -> Vec<Point> {
        (0..EYE_RING_LEN)
            .map(|k| {
                let t = TAU * k as f64 / EYE_RING_LEN as f64;
                Point::new(self.center.x + self.rx * t.cos(), self.center.y + self.ry * t.sin())
            })
            .collect()
    }
}

/// Paint patches should not overlap the eyes; where they do, the eyes are
/// drawn on top.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: u32,
    pub height: u32,
    pub eyes: [EyeSpec; 2],
    pub black: Option<Rect>,
    pub pink: Option<Rect>,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub image: RasterImage,
    pub landmarks: FaceLandmarks,
    pub annotations: AnnotationSet,
}

/// Landmarks with the eye rings at `eyes` and every other point at the
/// image centre.
pub fn face_landmarks(
    eyes: &[EyeSpec; 2],
    (width, height): (u32, u32),
    indices: &EyeContourIndices,
) -> Result<FaceLandmarks> {
    let (w, h) = (f64::from(width), f64::from(height));
    let mut points = vec![Point::new(0.5, 0.5); LANDMARK_COUNT];
    for (eye, ring_idx) in eyes.iter().zip([indices.left(), indices.right()]) {
        for (&i, p) in ring_idx.iter().zip(eye.ring()) {
            if !(0.0..=w).contains(&p.x) || !(0.0..=h).contains(&p.y) {
                return Err(Error::invalid(format!(
                    "eye ring point ({:.1}, {:.1}) is outside the {width}x{height} image",
                    p.x, p.y
                )));
            }
            points[i] = Point::new(p.x / w, p.y / h);
        }
    }
    FaceLandmarks::new(points)
}

fn rect_polygon(r: &Rect) -> Vec<Point> {
    let (x0, y0, x1, y1) = (
        f64::from(r.x0),
        f64::from(r.y0),
        f64::from(r.x1),
        f64::from(r.y1),
    );
    vec![
        Point::new(x0, y0),
        Point::new(x1, y0),
        Point::new(x1, y1),
        Point::new(x0, y1),
    ]
}

pub fn render(spec: &SceneSpec, indices: &EyeContourIndices, image_name: &str) -> Result<Scene> {
    let dims = (spec.width, spec.height);
    let landmarks = face_landmarks(&spec.eyes, dims, indices)?;
    let mut image = RasterImage::filled(spec.width, spec.height, SKIN)?;
    let mut shapes = Vec::new();

    for (rect, color, label) in [
        (spec.black, BLACK_PAINT, AnnotationLabel::Black),
        (spec.pink, PINK_PAINT, AnnotationLabel::Pink),
    ] {
        let Some(rect) = rect else { continue };
        if !rect.fits_within(spec.width, spec.height) {
            return Err(Error::invalid(format!("{rect:?} exceeds the image")));
        }
        for y in rect.y0..rect.y1 {
            for x in rect.x0..rect.x1 {
                image.put(x, y, color);
            }
        }
        shapes.push(PolygonAnnotation::new(label, rect_polygon(&rect))?);
    }

    // annotate with the same coordinates the evaluator derives from landmarks
    let contours = contour_points(&landmarks, indices, dims);
    for ring in contours.rings() {
        let mask = rasterize_polygon(ring, dims)?;
        for y in 0..spec.height {
            for x in 0..spec.width {
                if mask.get(x, y) {
                    image.put(x, y, EYE_WHITE);
                }
            }
        }
        shapes.push(PolygonAnnotation::new(AnnotationLabel::Eye, ring.to_vec())?);
    }

    Ok(Scene {
        image,
        landmarks,
        annotations: AnnotationSet {
            image: image_name.to_string(),
            shapes,
        },
    })
}
