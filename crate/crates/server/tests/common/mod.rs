#![allow(dead_code)]

use std::sync::Arc;

use eyevis_core::imaging::{crop, encode, paste, resize, ImageFormat, RasterImage};
use eyevis_core::landmarks::{EyeContourIndices, FaceLandmarks, FixtureProvider, LandmarkProvider};
use eyevis_core::localization::eye_bounding_box;
use eyevis_core::store::{Clock, SessionStore, SystemClock};
use eyevis_core::synthetic::{render, EyeSpec, SceneSpec};
use eyevis_core::{Config, Rect};
use eyevis_server::AppState;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

pub struct TestServer {
    pub base: String,
    pub dir: tempfile::TempDir,
    shutdown: Option<oneshot::Sender<()>>,
    handle: Option<JoinHandle<anyhow::Result<()>>>,
}

impl TestServer {
    pub async fn start(provider: Arc<dyn LandmarkProvider>) -> Self {
        Self::start_with_clock(provider, Arc::new(SystemClock)).await
    }

    pub async fn start_with_clock(provider: Arc<dyn LandmarkProvider>, clock: Arc<dyn Clock>) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open_with_clock(dir.path(), clock).unwrap();
        let app = AppState::new(store, provider, Config::default(), 2);
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel::<()>();
        let handle = tokio::spawn(eyevis_server::serve(listener, app, async {
            let _ = rx.await;
        }));
        Self {
            base,
            dir,
            shutdown: Some(tx),
            handle: Some(handle),
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub async fn stop(mut self) -> tempfile::TempDir {
        let _ = self.shutdown.take().unwrap().send(());
        self.handle.take().unwrap().await.unwrap().unwrap();
        self.dir
    }
}

pub fn png(img: &RasterImage) -> Vec<u8> {
    encode(img, ImageFormat::Png).unwrap()
}

pub fn image_form(bytes: Vec<u8>) -> reqwest::multipart::Form {
    let part = reqwest::multipart::Part::bytes(bytes)
        .file_name("capture.png")
        .mime_str("image/png")
        .unwrap();
    reqwest::multipart::Form::new().part("image", part)
}

/// A synthetic performer: a face, clean open/closed eye close-ups and a
/// painted close-up, all cut from the same eye box.
pub struct Persona {
    pub face: RasterImage,
    pub face_landmarks: FaceLandmarks,
    pub bbox: Rect,
    pub eye_open: RasterImage,
    pub eye_closed: RasterImage,
    pub closed_landmarks: FaceLandmarks,
    pub painted: RasterImage,
}

const W: u32 = 200;
const H: u32 = 150;

fn scene(ry: f64, paint: bool) -> SceneSpec {
    SceneSpec {
        width: W,
        height: H,
        eyes: [EyeSpec::new(130.0, 70.0, 18.0, ry), EyeSpec::new(70.0, 70.0, 18.0, ry)],
        black: paint.then(|| Rect::new(55, 80, 145, 86).unwrap()),
        pink: paint.then(|| Rect::new(55, 54, 145, 60).unwrap()),
    }
}

pub fn persona() -> Persona {
    let idx = EyeContourIndices::default();
    let cfg = Config::default();
    let open = render(&scene(8.0, false), &idx, "face.png").unwrap();
    let closed = render(&scene(1.5, false), &idx, "closed.png").unwrap();
    let painted = render(&scene(8.0, true), &idx, "painted.png").unwrap();
    let bbox = eye_bounding_box(&open.landmarks, &idx, (W, H), cfg.pad_frac).unwrap();
    Persona {
        eye_open: crop(&open.image, bbox).unwrap(),
        eye_closed: crop(&closed.image, bbox).unwrap(),
        painted: crop(&painted.image, bbox).unwrap(),
        closed_landmarks: closed.landmarks,
        face: open.image,
        face_landmarks: open.landmarks,
        bbox,
    }
}

impl Persona {
    /// The image the second detection pass sees for `eye`.
    pub fn composite(&self, eye: &RasterImage) -> RasterImage {
        let fitted = resize(eye, self.bbox.width(), self.bbox.height()).unwrap();
        paste(&self.face, self.bbox, &fitted).unwrap()
    }

    /// Knows the face, recognises closed-eye composites, and answers
    /// open-eye landmarks for anything else.
    pub fn provider(&self) -> FixtureProvider {
        FixtureProvider::new()
            .with_image(&self.face, self.face_landmarks.clone())
            .with_image(&self.composite(&self.eye_closed), self.closed_landmarks.clone())
            .with_fallback(self.face_landmarks.clone())
    }
}
