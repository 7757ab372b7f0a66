//! Two-pass eye localization and the open/closed classifier.
//!
//! The first pass runs the landmark provider on the user's whole-face
//! reference to find where the eyes sit. The close-up eye capture is then
//! resized into that box and pasted over the face, the provider runs again
//! on the composite, and the eye rings it finds are mapped back onto the
//! close-up's own pixel grid.

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result, Stage};
use crate::geometry::{Point, Rect};
use crate::imaging::{self, RasterImage};
use crate::landmarks::{EyeContourIndices, FaceLandmarks, LandmarkProvider};

/// Pixel-space eye rings. `left` is the subject's left eye.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EyeContours {
    pub left: Vec<Point>,
    pub right: Vec<Point>,
}

impl EyeContours {
    pub fn rings(&self) -> [&[Point]; 2] {
        [&self.left, &self.right]
    }

    fn map(&self, f: impl Fn(Point) -> Point) -> EyeContours {
        EyeContours {
            left: self.left.iter().copied().map(&f).collect(),
            right: self.right.iter().copied().map(&f).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EyeLocalization {
    /// Eye box in whole-face pixels, padding included.
    pub bbox: Rect,
    /// Rings in close-up pixel coordinates.
    pub contours: EyeContours,
    /// Per-eye openness, `[left, right]`.
    pub openness: [f64; 2],
}

impl EyeLocalization {
    pub fn mean_openness(&self) -> f64 {
        (self.openness[0] + self.openness[1]) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EyeClass {
    Open,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeState {
    pub class: EyeClass,
    pub openness: f64,
}

impl EyeState {
    /// Open iff `openness >= threshold`.
    pub fn classify(openness: f64, threshold: f64) -> Self {
        let class = if openness >= threshold {
            EyeClass::Open
        } else {
            EyeClass::Closed
        };
        Self { class, openness }
    }
}

/// The no-makeup reference captures of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct Baselines<T> {
    pub open: Option<T>,
    pub closed: Option<T>,
}

impl<T> Default for Baselines<T> {
    fn default() -> Self {
        Self {
            open: None,
            closed: None,
        }
    }
}

/// Picks the baseline whose eye state matches the capture.
pub fn match_baseline<'a, T>(
    state: &EyeState,
    baselines: &'a Baselines<T>,
) -> Result<(EyeClass, &'a T)> {
    match (&baselines.open, &baselines.closed) {
        (Some(open), Some(closed)) => Ok(match state.class {
            EyeClass::Open => (EyeClass::Open, open),
            EyeClass::Closed => (EyeClass::Closed, closed),
        }),
        (open, _) => Err(Error::MissingBaseline(format!(
            "eyes-{} baseline has not been captured; complete the baseline captures first",
            if open.is_none() { "open" } else { "closed" }
        ))),
    }
}

/// Denormalizes the two eye rings onto a `width`×`height` grid.
pub fn contour_points(
    landmarks: &FaceLandmarks,
    indices: &EyeContourIndices,
    (width, height): (u32, u32),
) -> EyeContours {
    let (w, h) = (f64::from(width), f64::from(height));
    let ring = |idx: &[usize]| -> Vec<Point> {
        idx.iter()
            .map(|&i| {
                let p = landmarks.get(i);
                Point::new(p.x * w, p.y * h)
            })
            .collect()
    };
    EyeContours {
        left: ring(indices.left()),
        right: ring(indices.right()),
    }
}

/// Box around both eye rings, grown by `pad_frac` of its extent on every
/// side and clamped to the image.
pub fn eye_bounding_box(
    landmarks: &FaceLandmarks,
    indices: &EyeContourIndices,
    dims: (u32, u32),
    pad_frac: f64,
) -> Result<Rect> {
    if !pad_frac.is_finite() || pad_frac < 0.0 {
        return Err(Error::invalid(format!(
            "padding fraction must be non-negative, got {pad_frac}"
        )));
    }
    let contours = contour_points(landmarks, indices, dims);
    let pts = contours.left.iter().chain(&contours.right);
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let (spread_x, spread_y) = (max_x - min_x, max_y - min_y);
    if spread_x <= 0.0 || spread_y <= 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "eye landmarks span {spread_x}x{spread_y} px"
        )));
    }

    let (pad_x, pad_y) = (spread_x * pad_frac, spread_y * pad_frac);
    // rounded padded edge, widened if needed so every point stays covered
    let lo = |v: f64, pad: f64| (v - pad).round().min(v.floor());
    let hi = |v: f64, pad: f64| (v + pad).round().max(v.ceil());
    let (w, h) = (f64::from(dims.0), f64::from(dims.1));
    let x0 = lo(min_x, pad_x).clamp(0.0, w) as u32;
    let y0 = lo(min_y, pad_y).clamp(0.0, h) as u32;
    let x1 = hi(max_x, pad_x).clamp(0.0, w) as u32;
    let y1 = hi(max_y, pad_y).clamp(0.0, h) as u32;
    Rect::new(x0, y0, x1, y1).map_err(|_| {
        Error::DegenerateGeometry(format!("eye box ({x0},{y0})-({x1},{y1}) has no area"))
    })
}

/// Affine correspondence between the eye box inside the composite and the
/// close-up eye image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxMapping {
    pub bbox: Rect,
    pub eye_dims: (u32, u32),
}

impl BoxMapping {
    fn scale(&self) -> (f64, f64) {
        (
            f64::from(self.eye_dims.0) / f64::from(self.bbox.width()),
            f64::from(self.eye_dims.1) / f64::from(self.bbox.height()),
        )
    }

    /// Composite pixel → close-up pixel.
    pub fn to_eye(&self, p: Point) -> Point {
        let (sx, sy) = self.scale();
        Point::new(
            (p.x - f64::from(self.bbox.x0)) * sx,
            (p.y - f64::from(self.bbox.y0)) * sy,
        )
    }

    /// Close-up pixel → composite pixel.
    pub fn to_composite(&self, p: Point) -> Point {
        let (sx, sy) = self.scale();
        Point::new(
            p.x / sx + f64::from(self.bbox.x0),
            p.y / sy + f64::from(self.bbox.y0),
        )
    }
}

/// Runs the two-pass pipeline and returns eye rings on `eye_img`'s grid.
pub fn localize_eye_features(
    provider: &dyn LandmarkProvider,
    face_img: &RasterImage,
    eye_img: &RasterImage,
    cfg: &Config,
) -> Result<EyeLocalization> {
    let first = provider
        .detect(face_img)
        .map_err(|e| e.at_stage(Stage::FirstPass))?;
    let bbox = eye_bounding_box(&first, &cfg.eye_indices, face_img.dims(), cfg.pad_frac)?;

    let fitted = imaging::resize(eye_img, bbox.width(), bbox.height())?;
    let composite = imaging::paste(face_img, bbox, &fitted)?;

    let second = provider
        .detect(&composite)
        .map_err(|e| e.at_stage(Stage::SecondPass))?;

    let mapping = BoxMapping {
        bbox,
        eye_dims: eye_img.dims(),
    };
    let (ew, eh) = (f64::from(eye_img.width()), f64::from(eye_img.height()));
    let contours = contour_points(&second, &cfg.eye_indices, composite.dims()).map(|p| {
        let q = mapping.to_eye(p);
        Point::new(q.x.clamp(0.0, ew), q.y.clamp(0.0, eh))
    });
    let openness = [ring_openness(&contours.left)?, ring_openness(&contours.right)?];

    Ok(EyeLocalization {
        bbox,
        contours,
        openness,
    })
}

/// Vertical over horizontal extent of one ring.
pub fn ring_openness(ring: &[Point]) -> Result<f64> {
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in ring {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let width = max_x - min_x;
    if !(width > 0.0) {
        return Err(Error::DegenerateGeometry(
            "eye ring has no horizontal extent".into(),
        ));
    }
    Ok((max_y - min_y) / width)
}

/// Openness averaged over both eyes.
pub fn eye_openness(contours: &EyeContours) -> Result<f64> {
    Ok((ring_openness(&contours.left)? + ring_openness(&contours.right)?) / 2.0)
}
