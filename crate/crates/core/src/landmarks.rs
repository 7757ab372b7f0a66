//! Face landmark data, the eye-ring index configuration, and the providers
//! that produce landmarks for an image.
//!
//! Providers return coordinates normalized to `[0, 1]` relative to the image
//! they were handed; every conversion to pixels happens in
//! [`crate::localization`].

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::imaging::{self, ImageFormat, RasterImage};

pub const LANDMARK_COUNT: usize = 468;
pub const EYE_RING_LEN: usize = 16;

/// Suffix identifying landmark documents inside a fixture directory.
pub const LANDMARK_SUFFIX: &str = ".landmarks.json";

/// The 468-point face mesh for one image, normalized coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceLandmarks {
    points: Vec<Point>,
}

impl FaceLandmarks {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() != LANDMARK_COUNT {
            return Err(Error::Format(format!(
                "expected {LANDMARK_COUNT} landmarks, got {}",
                points.len()
            )));
        }
        if let Some((i, p)) = points
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y))
        {
            return Err(Error::Format(format!(
                "landmark {i} at ({}, {}) is outside [0,1]",
                p.x, p.y
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn get(&self, index: usize) -> Point {
        self.points[index]
    }
}

/// On-disk landmark document: either a bare array of `[x, y]` (or
/// `[x, y, z]`) pairs or an object carrying the pairs plus an image name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LandmarkFile {
    Document {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        image: Option<String>,
        points: Vec<Vec<f64>>,
    },
    Bare(Vec<Vec<f64>>),
}

impl LandmarkFile {
    pub fn new(image: Option<String>, landmarks: &FaceLandmarks) -> Self {
        LandmarkFile::Document {
            image,
            points: landmarks.points().iter().map(|p| vec![p.x, p.y]).collect(),
        }
    }

    pub fn image(&self) -> Option<&str> {
        match self {
            LandmarkFile::Document { image, .. } => image.as_deref(),
            LandmarkFile::Bare(_) => None,
        }
    }

    pub fn landmarks(&self) -> Result<FaceLandmarks> {
        let raw = match self {
            LandmarkFile::Document { points, .. } | LandmarkFile::Bare(points) => points,
        };
        let points = raw
            .iter()
            .enumerate()
            .map(|(i, pair)| match pair.as_slice() {
                // a depth coordinate, when present, is ignored
                [x, y] | [x, y, _] => Ok(Point::new(*x, *y)),
                _ => Err(Error::Format(format!(
                    "landmark {i} has {} coordinates",
                    pair.len()
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        FaceLandmarks::new(points)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("landmark documents always serialize")
    }
}

/// The two 16-point eye rings within the 468-point topology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIndices", into = "RawIndices")]
pub struct EyeContourIndices {
    left: [usize; EYE_RING_LEN],
    right: [usize; EYE_RING_LEN],
}

#[derive(Serialize, Deserialize)]
struct RawIndices {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl TryFrom<RawIndices> for EyeContourIndices {
    type Error = Error;

    fn try_from(raw: RawIndices) -> Result<Self> {
        let ring = |v: Vec<usize>, side: &str| -> Result<[usize; EYE_RING_LEN]> {
            v.try_into().map_err(|v: Vec<usize>| {
                Error::invalid(format!(
                    "{side} eye ring needs {EYE_RING_LEN} indices, got {}",
                    v.len()
                ))
            })
        };
        Self::new(ring(raw.left, "left")?, ring(raw.right, "right")?)
    }
}

impl From<EyeContourIndices> for RawIndices {
    fn from(idx: EyeContourIndices) -> Self {
        RawIndices {
            left: idx.left.to_vec(),
            right: idx.right.to_vec(),
        }
    }
}

impl EyeContourIndices {
    pub fn new(left: [usize; EYE_RING_LEN], right: [usize; EYE_RING_LEN]) -> Result<Self> {
        let mut seen = HashSet::new();
        for &i in left.iter().chain(right.iter()) {
            if i >= LANDMARK_COUNT {
                return Err(Error::invalid(format!(
                    "landmark index {i} outside [0,{}]",
                    LANDMARK_COUNT - 1
                )));
            }
            if !seen.insert(i) {
                return Err(Error::invalid(format!(
                    "landmark index {i} repeats across the eye rings"
                )));
            }
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &[usize; EYE_RING_LEN] {
        &self.left
    }

    pub fn right(&self) -> &[usize; EYE_RING_LEN] {
        &self.right
    }
}

impl Default for EyeContourIndices {
    /// Face-mesh eyelid rings, ordered around each eye. `left` is the
    /// subject's left eye (image right).
    fn default() -> Self {
        Self::new(
            [
                263, 249, 390, 373, 374, 380, 381, 382, 362, 398, 384, 385, 386, 387, 388, 466,
            ],
            [
                33, 7, 163, 144, 145, 153, 154, 155, 133, 173, 157, 158, 159, 160, 161, 246,
            ],
        )
        .expect("default rings are valid")
    }
}

/// Anything that can place the 468-point mesh on an image.
///
/// Implementations must be deterministic for identical input pixels.
pub trait LandmarkProvider: Send + Sync {
    fn detect(&self, img: &RasterImage) -> Result<FaceLandmarks>;
}

impl<P: LandmarkProvider + ?Sized> LandmarkProvider for &P {
    fn detect(&self, img: &RasterImage) -> Result<FaceLandmarks> {
        (**self).detect(img)
    }
}

impl<P: LandmarkProvider + ?Sized> LandmarkProvider for Box<P> {
    fn detect(&self, img: &RasterImage) -> Result<FaceLandmarks> {
        (**self).detect(img)
    }
}

impl<P: LandmarkProvider + ?Sized> LandmarkProvider for std::sync::Arc<P> {
    fn detect(&self, img: &RasterImage) -> Result<FaceLandmarks> {
        (**self).detect(img)
    }
}

/// Serves landmarks from files, keyed by the pixel content of the image
/// they were recorded for. An optional fallback answers every other image.
#[derive(Debug, Clone, Default)]
pub struct FixtureProvider {
    by_digest: HashMap<String, FaceLandmarks>,
    fallback: Option<FaceLandmarks>,
}

impl FixtureProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_image(mut self, img: &RasterImage, landmarks: FaceLandmarks) -> Self {
        self.insert(img, landmarks);
        self
    }

    pub fn with_fallback(mut self, landmarks: FaceLandmarks) -> Self {
        self.fallback = Some(landmarks);
        self
    }

    pub fn insert(&mut self, img: &RasterImage, landmarks: FaceLandmarks) {
        self.by_digest.insert(img.pixel_digest(), landmarks);
    }

    pub fn len(&self) -> usize {
        self.by_digest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_digest.is_empty() && self.fallback.is_none()
    }

    /// Loads every `*.landmarks.json` in `dir`.
    ///
    /// A document is bound to the image named by its `image` field, or else
    /// to the image sharing its stem (`<stem>.png|jpg|jpeg`). The document
    /// `default.landmarks.json` becomes the fallback.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut provider = Self::new();
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(LANDMARK_SUFFIX))
            })
            .collect();
        entries.sort();

        for path in entries {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            let stem = &name[..name.len() - LANDMARK_SUFFIX.len()];
            let doc = LandmarkFile::read(&path)?;
            let landmarks = doc.landmarks()?;

            if stem == "default" && doc.image().is_none() {
                provider.fallback = Some(landmarks);
                continue;
            }
            let image_path = match doc.image() {
                Some(image) => dir.join(image),
                None => find_image_for_stem(dir, stem).ok_or_else(|| {
                    Error::Format(format!("{}: no image found for landmarks", path.display()))
                })?,
            };
            let img = imaging::load(&image_path)?;
            provider.insert(&img, landmarks);
        }
        Ok(provider)
    }
}

pub(crate) fn find_image_for_stem(dir: &Path, stem: &str) -> Option<PathBuf> {
    ["png", "jpg", "jpeg", "PNG", "JPG", "JPEG"]
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
}

impl LandmarkProvider for FixtureProvider {
    fn detect(&self, img: &RasterImage) -> Result<FaceLandmarks> {
        self.by_digest
            .get(&img.pixel_digest())
            .or(self.fallback.as_ref())
            .cloned()
            .ok_or_else(|| Error::detection("no face found in image"))
    }
}

/// Runs an external landmark detector once per image.
///
/// The image is written to the process's stdin as PNG; the process must
/// print a landmark document on stdout and exit 0. Any other outcome is a
/// detection failure.
#[derive(Debug, Clone)]
pub struct ExternalProvider {
    program: PathBuf,
    args: Vec<String>,
}

impl ExternalProvider {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        Self {
            program: program.into(),
            args,
        }
    }
}

impl LandmarkProvider for ExternalProvider {
    fn detect(&self, img: &RasterImage) -> Result<FaceLandmarks> {
        let png = imaging::encode(img, ImageFormat::Png)?;
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| {
                Error::detection(format!("cannot start {}: {e}", self.program.display()))
            })?;

        let mut stdin = child.stdin.take().expect("stdin is piped");
        let writer = std::thread::spawn(move || {
            // a detector may exit without reading its input; ignore EPIPE
            let _ = stdin.write_all(&png);
        });
        let output = child
            .wait_with_output()
            .map_err(|e| Error::detection(format!("detector i/o: {e}")))?;
        let _ = writer.join();

        if !output.status.success() {
            let stderr = String::from_utf8_lossy(&output.stderr);
            return Err(Error::detection(format!(
                "detector exited with {}: {}",
                output.status,
                stderr.trim()
            )));
        }
        let text = String::from_utf8_lossy(&output.stdout);
        LandmarkFile::parse(&text)
            .and_then(|doc| doc.landmarks())
            .map_err(|e| Error::detection(format!("detector output: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn grid_landmarks(offset: f64) -> FaceLandmarks {
        let points = (0..LANDMARK_COUNT)
            .map(|i| {
                Point::new(
                    ((i % 26) as f64 / 26.0 + offset).min(1.0),
                    ((i / 26) as f64 / 18.0).min(1.0),
                )
            })
            .collect();
        FaceLandmarks::new(points).unwrap()
    }

    #[test]
    fn landmark_count_and_range() {
        assert!(FaceLandmarks::new(vec![Point::new(0.5, 0.5); 467]).is_err());
        let mut pts = vec![Point::new(0.5, 0.5); LANDMARK_COUNT];
        pts[10] = Point::new(1.01, 0.5);
        assert!(FaceLandmarks::new(pts).is_err());
    }

    #[test]
    fn document_forms_parse() {
        let lm = grid_landmarks(0.0);
        let doc = LandmarkFile::new(Some("face.png".into()), &lm);
        let parsed = LandmarkFile::parse(&doc.to_json()).unwrap();
        assert_eq!(parsed.image(), Some("face.png"));
        assert_eq!(parsed.landmarks().unwrap(), lm);

        let bare: Vec<[f64; 3]> = lm.points().iter().map(|p| [p.x, p.y, -0.3]).collect();
        let parsed = LandmarkFile::parse(&serde_json::to_string(&bare).unwrap()).unwrap();
        assert_eq!(parsed.image(), None);
        assert_eq!(parsed.landmarks().unwrap(), lm);

        assert!(LandmarkFile::parse("[[0.1]]").unwrap().landmarks().is_err());
    }

    #[test]
    fn index_validation() {
        let d = EyeContourIndices::default();
        assert_eq!(d.left().len(), 16);
        let mut right = *d.right();
        right[0] = d.left()[3];
        assert!(EyeContourIndices::new(*d.left(), right).is_err());
        let mut left = *d.left();
        left[0] = 468;
        assert!(EyeContourIndices::new(left, *d.right()).is_err());
        let mut left = *d.left();
        left[1] = left[0];
        assert!(EyeContourIndices::new(left, *d.right()).is_err());

        let json = serde_json::to_string(&d).unwrap();
        let back: EyeContourIndices = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<EyeContourIndices>(r#"{"left":[1,2],"right":[3]}"#).is_err());
    }

    #[test]
    fn fixture_passthrough_and_determinism() {
        let img = RasterImage::filled(4, 4, [10, 20, 30]).unwrap();
        let other = RasterImage::filled(4, 4, [11, 20, 30]).unwrap();
        let lm = grid_landmarks(0.0);
        let provider = FixtureProvider::new().with_image(&img, lm.clone());
        assert_eq!(provider.detect(&img).unwrap(), lm);
        assert_eq!(provider.detect(&img).unwrap(), provider.detect(&img).unwrap());
        assert!(matches!(
            provider.detect(&other),
            Err(Error::DetectionFailure { .. })
        ));

        let fallback = grid_landmarks(0.01);
        let provider = provider.with_fallback(fallback.clone());
        assert_eq!(provider.detect(&other).unwrap(), fallback);
        assert_eq!(provider.detect(&img).unwrap(), lm);
    }

    #[test]
    fn fixture_directory() {
        let dir = tempfile::tempdir().unwrap();
        let a = RasterImage::filled(3, 3, [1, 2, 3]).unwrap();
        let b = RasterImage::filled(3, 3, [4, 5, 6]).unwrap();
        imaging::save(&a, dir.path().join("a.png")).unwrap();
        imaging::save(&b, dir.path().join("other-name.png")).unwrap();
        let (la, lb, ld) = (grid_landmarks(0.0), grid_landmarks(0.02), grid_landmarks(0.04));
        std::fs::write(
            dir.path().join("a.landmarks.json"),
            LandmarkFile::new(None, &la).to_json(),
        )
        .unwrap();
        std::fs::write(
            dir.path().join("b.landmarks.json"),
            LandmarkFile::new(Some("other-name.png".into()), &lb).to_json(),
        )
        .unwrap();
        std::fs::write(
            dir.path().join("default.landmarks.json"),
            LandmarkFile::new(None, &ld).to_json(),
        )
        .unwrap();

        let provider = FixtureProvider::from_dir(dir.path()).unwrap();
        assert_eq!(provider.len(), 2);
        assert_eq!(provider.detect(&a).unwrap(), la);
        assert_eq!(provider.detect(&b).unwrap(), lb);
        let c = RasterImage::filled(3, 3, [0, 0, 0]).unwrap();
        assert_eq!(provider.detect(&c).unwrap(), ld);
    }

    #[cfg(unix)]
    #[test]
    fn external_process_provider() {
        let dir = tempfile::tempdir().unwrap();
        let lm = grid_landmarks(0.0);
        let doc = dir.path().join("out.json");
        std::fs::write(&doc, LandmarkFile::new(None, &lm).to_json()).unwrap();
        let img = RasterImage::filled(2, 2, [0; 3]).unwrap();

        let ok = ExternalProvider::new(
            "sh",
            vec!["-c".into(), format!("cat >/dev/null; cat {}", doc.display())],
        );
        assert_eq!(ok.detect(&img).unwrap(), lm);

        let fail = ExternalProvider::new("sh", vec!["-c".into(), "echo no face >&2; exit 3".into()]);
        match fail.detect(&img) {
            Err(Error::DetectionFailure { message, .. }) => assert!(message.contains("no face")),
            other => panic!("unexpected {other:?}"),
        }

        let missing = ExternalProvider::new("/nonexistent/detector", vec![]);
        assert!(matches!(
            missing.detect(&img),
            Err(Error::DetectionFailure { .. })
        ));
    }
}
