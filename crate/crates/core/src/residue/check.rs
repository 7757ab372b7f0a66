use super::{binary_threshold_vis, hsv_uv_simulate, ResidueMask};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::geometry::BinaryMask;
use crate::imaging::RasterImage;
use crate::landmarks::LandmarkProvider;
use crate::localization::{
    localize_eye_features, match_baseline, Baselines, EyeClass, EyeLocalization, EyeState,
};

/// Every rendering of one capture, all at the capture's dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualizationSet {
    pub original: RasterImage,
    pub black_vis: RasterImage,
    pub pink_vis: RasterImage,
    pub combined: RasterImage,
    pub contour_vis: RasterImage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Visualization {
    pub images: VisualizationSet,
    pub black: ResidueMask,
    pub pink: ResidueMask,
    /// In-bound pixels of the luma threshold.
    pub threshold: BinaryMask,
}

pub fn visualize(img: &RasterImage, cfg: &Config) -> Result<Visualization> {
    let uv = hsv_uv_simulate(img, cfg)?;
    let th = binary_threshold_vis(img, cfg.threshold_lo, cfg.threshold_hi, cfg)?;
    Ok(Visualization {
        images: VisualizationSet {
            original: img.clone(),
            black_vis: uv.black_vis,
            pink_vis: uv.pink_vis,
            combined: uv.combined,
            contour_vis: th.image,
        },
        black: uv.black,
        pink: uv.pink,
        threshold: th.inside,
    })
}

/// The with-makeup row and the matched no-makeup row of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalCheck {
    pub localization: EyeLocalization,
    pub state: EyeState,
    pub matched: EyeClass,
    pub capture: Visualization,
    pub baseline: Visualization,
}

/// Localizes the eyes in a new capture, picks the baseline with the same
/// eye state, and visualizes both.
pub fn removal_check(
    provider: &dyn LandmarkProvider,
    face_img: &RasterImage,
    eye_img: &RasterImage,
    baselines: &Baselines<RasterImage>,
    cfg: &Config,
) -> Result<RemovalCheck> {
    if baselines.open.is_none() || baselines.closed.is_none() {
        return Err(Error::MissingBaseline(
            "both eyes-open and eyes-closed baselines are required".into(),
        ));
    }
    let localization = localize_eye_features(provider, face_img, eye_img, cfg)?;
    let state = EyeState::classify(localization.mean_openness(), cfg.openness_threshold);
    let (matched, baseline_img) = match_baseline(&state, baselines)?;

    Ok(RemovalCheck {
        capture: visualize(eye_img, cfg)?,
        baseline: visualize(baseline_img, cfg)?,
        localization,
        state,
        matched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::imaging::{hsv_to_rgb, HsvPixel};
    use crate::landmarks::{EyeContourIndices, FaceLandmarks, FixtureProvider, LANDMARK_COUNT};

    fn open_eye_landmarks() -> FaceLandmarks {
        let idx = EyeContourIndices::default();
        let mut pts = vec![Point::new(0.5, 0.5); LANDMARK_COUNT];
        for (ring, cx) in [(idx.left(), 0.65), (idx.right(), 0.35)] {
            for (k, &i) in ring.iter().enumerate() {
                let a = k as f64 / 16.0 * std::f64::consts::TAU;
                pts[i] = Point::new(cx + 0.1 * a.cos(), 0.4 + 0.05 * a.sin());
            }
        }
        FaceLandmarks::new(pts).unwrap()
    }

    fn setup() -> (FixtureProvider, RasterImage, Baselines<RasterImage>) {
        let provider = FixtureProvider::new().with_fallback(open_eye_landmarks());
        let face = RasterImage::filled(120, 90, [200, 170, 150]).unwrap();
        let open = RasterImage::from_fn(60, 30, |x, _| if x < 6 { [0; 3] } else { [230, 200, 190] }).unwrap();
        let closed = RasterImage::filled(60, 30, [10, 10, 10]).unwrap();
        (
            provider,
            face,
            Baselines {
                open: Some(open),
                closed: Some(closed),
            },
        )
    }

    #[test]
    fn identical_capture_matches_baseline_ratios() {
        let (provider, face, baselines) = setup();
        let capture = baselines.open.clone().unwrap();
        let check = removal_check(&provider, &face, &capture, &baselines, &Config::default()).unwrap();
        assert_eq!(check.matched, EyeClass::Open);
        assert_eq!(check.capture.black.ratio, check.baseline.black.ratio);
        assert_eq!(check.capture.pink.ratio, check.baseline.pink.ratio);
        assert_eq!(check.capture.black.ratio, 0.1);
    }

    #[test]
    fn painted_patch_raises_pink_ratio() {
        let (provider, face, baselines) = setup();
        let pink = hsv_to_rgb(HsvPixel::new(330.0, 200.0, 200.0));
        let mut capture = baselines.open.clone().unwrap();
        for y in 10..20 {
            for x in 20..40 {
                capture.put(x, y, pink);
            }
        }
        let check = removal_check(&provider, &face, &capture, &baselines, &Config::default()).unwrap();
        assert!(check.capture.pink.ratio > check.baseline.pink.ratio);
    }

    #[test]
    fn missing_baselines() {
        let (provider, face, _) = setup();
        let capture = RasterImage::filled(10, 10, [0; 3]).unwrap();
        let err = removal_check(&provider, &face, &capture, &Baselines::default(), &Config::default())
            .unwrap_err();
        assert!(matches!(err, Error::MissingBaseline(_)));
    }

    #[test]
    fn visualization_shapes_match() {
        let img = RasterImage::filled(13, 7, [120, 60, 90]).unwrap();
        let v = visualize(&img, &Config::default()).unwrap();
        for im in [
            &v.images.original,
            &v.images.black_vis,
            &v.images.pink_vis,
            &v.images.combined,
            &v.images.contour_vis,
        ] {
            assert_eq!(im.dims(), (13, 7));
        }
    }
}
