//! HTTP endpoints. Vision work runs on a bounded blocking pool; mutations
//! for one user are serialized.

use std::collections::HashMap;
use std::future::Future;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use anyhow::Context;
use axum::extract::multipart::MultipartRejection;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use eyevis_core::imaging::{self, encode, ImageFormat, RasterImage};
use eyevis_core::landmarks::LandmarkProvider;
use eyevis_core::localization::{Baselines, EyeClass};
use eyevis_core::residue::{removal_check, Visualization};
use eyevis_core::store::{
    CaptureKind, CaptureMetadata, CaptureRecord, ComparisonGrid, GridRow, NewRemovalCheck,
    RemovalCheckRecord, ResidueRatios, SessionDetail, SessionStore, TrendSeries, UserProfile,
    WearSession, ARTIFACTS_DIR, IMAGES_DIR,
};
use eyevis_core::{Config, Error, Stage};
use serde::{Deserialize, Serialize};
use tokio::sync::{OwnedMutexGuard, Semaphore};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::error::ApiError;
use crate::settings::Settings;

pub const MAX_UPLOAD_BYTES: usize = 32 * 1024 * 1024;

type ApiResult<T> = Result<T, ApiError>;

struct Shared {
    store: SessionStore,
    provider: Arc<dyn LandmarkProvider>,
    cfg: Config,
    workers: Arc<Semaphore>,
    user_locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Shared>);

impl AppState {
    pub fn new(
        store: SessionStore,
        provider: Arc<dyn LandmarkProvider>,
        cfg: Config,
        workers: usize,
    ) -> Self {
        Self(Arc::new(Shared {
            store,
            provider,
            cfg,
            workers: Arc::new(Semaphore::new(workers.max(1))),
            user_locks: Mutex::default(),
        }))
    }

    pub fn from_settings(settings: &Settings) -> anyhow::Result<Self> {
        settings.vision.validate()?;
        let store = SessionStore::open(&settings.data_dir).with_context(|| {
            format!("cannot open data directory {}", settings.data_dir.display())
        })?;
        let provider = settings.provider.build()?;
        Ok(Self::new(store, provider, settings.vision.clone(), settings.workers))
    }

    pub fn store(&self) -> &SessionStore {
        &self.0.store
    }

    async fn lock_user(&self, user_id: &str) -> OwnedMutexGuard<()> {
        let lock = {
            let mut locks = self.0.user_locks.lock().unwrap_or_else(|p| p.into_inner());
            locks.entry(user_id.to_string()).or_default().clone()
        };
        lock.lock_owned().await
    }

    /// Runs blocking store work off the async runtime.
    async fn blocking<T, F>(&self, f: F) -> ApiResult<T>
    where
        T: Send + 'static,
        F: FnOnce(&Shared) -> eyevis_core::Result<T> + Send + 'static,
    {
        let shared = self.0.clone();
        tokio::task::spawn_blocking(move || f(&shared))
            .await
            .map_err(|e| ApiError::internal(format!("worker panicked: {e}")))?
            .map_err(ApiError::from)
    }

    /// Like `blocking`, but waits for a slot in the vision pool first.
    async fn vision<T, F>(&self, f: F) -> ApiResult<T>
    where
        T: Send + 'static,
        F: FnOnce(&Shared) -> eyevis_core::Result<T> + Send + 'static,
    {
        let _permit = self
            .0
            .workers
            .clone()
            .acquire_owned()
            .await
            .map_err(|_| ApiError::internal("worker pool closed"))?;
        self.blocking(f).await
    }
}

pub fn router(app: AppState) -> Router {
    let root = app.store().root().to_path_buf();
    Router::new()
        .route("/health", get(health))
        .route("/users", post(create_user))
        .route("/users/{id}", get(get_user))
        .route("/users/{id}/captures", post(upload_capture))
        .route("/users/{id}/sessions/start", post(start_session))
        .route("/users/{id}/sessions/stop", post(stop_session))
        .route("/users/{id}/sessions/manual", post(manual_session))
        .route("/users/{id}/removal-check", post(handle_removal_check))
        .route("/users/{id}/trend", get(trend))
        .route("/users/{id}/sessions", get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .nest_service("/artifacts", ServeDir::new(root.join(ARTIFACTS_DIR)))
        .nest_service("/images", ServeDir::new(root.join(IMAGES_DIR)))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such endpoint") })
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .layer(CorsLayer::permissive())
        .with_state(app)
}

/// Serves until `shutdown` resolves, lets in-flight requests finish, then
/// flushes the event log.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> anyhow::Result<()> {
    axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(shutdown)
        .await?;
    app.store().flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok",
        version: env!("CARGO_PKG_VERSION"),
    })
}

#[derive(Debug, Serialize)]
pub struct UserView {
    #[serde(flatten)]
    pub profile: UserProfile,
    pub baselines_complete: bool,
}

impl From<UserProfile> for UserView {
    fn from(profile: UserProfile) -> Self {
        Self {
            baselines_complete: profile.baselines_complete(),
            profile,
        }
    }
}

async fn create_user(State(app): State<AppState>) -> ApiResult<(StatusCode, Json<UserView>)> {
    let user = app.blocking(|s| s.store.create_user()).await?;
    Ok((StatusCode::CREATED, Json(user.into())))
}

async fn get_user(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<UserView>> {
    let user = app.blocking(move |s| s.store.user(&id)).await?;
    Ok(Json(user.into()))
}

struct Upload {
    bytes: Vec<u8>,
    metadata: Option<CaptureMetadata>,
}

async fn read_upload(multipart: Result<Multipart, MultipartRejection>) -> ApiResult<Upload> {
    let mut multipart = multipart.map_err(|e| ApiError::invalid(e.body_text()))?;
    let mut bytes = None;
    let mut metadata = None;
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::invalid(e.body_text()))?
    {
        match field.name() {
            Some("image") => {
                let data = field.bytes().await.map_err(|e| ApiError::invalid(e.body_text()))?;
                bytes = Some(data.to_vec());
            }
            Some("metadata") => {
                let text = field.text().await.map_err(|e| ApiError::invalid(e.body_text()))?;
                let meta: CaptureMetadata = serde_json::from_str(&text)
                    .map_err(|e| ApiError::invalid(format!("metadata: {e}")))?;
                meta.validate()?;
                metadata = Some(meta);
            }
            _ => {}
        }
    }
    let bytes = bytes.ok_or_else(|| ApiError::invalid("multipart field 'image' is required"))?;
    Ok(Upload { bytes, metadata })
}

#[derive(Deserialize)]
struct KindQuery {
    kind: String,
}

#[derive(Debug, Serialize)]
struct CaptureView {
    capture: CaptureRecord,
    profile: UserView,
}

async fn upload_capture(
    State(app): State<AppState>,
    Path(user_id): Path<String>,
    query: Result<Query<KindQuery>, QueryRejection>,
    multipart: Result<Multipart, MultipartRejection>,
) -> ApiResult<(StatusCode, Json<CaptureView>)> {
    let Query(KindQuery { kind }) = query.map_err(|e| ApiError::invalid(e.body_text()))?;
    let kind = CaptureKind::from_str(&kind)?;
    if kind == CaptureKind::RemovalCheck {
        return Err(ApiError::invalid(
            "removal-check captures go through POST /users/{id}/removal-check",
        ));
    }
    let upload = read_upload(multipart).await?;
    let _guard = app.lock_user(&user_id).await;
    let view = app
        .vision(move |s| {
            s.store.user(&user_id)?;
            let img = imaging::decode(&upload.bytes)?;
            if kind == CaptureKind::BaselineFace {
                s.provider
                    .detect(&img)
                    .map_err(|e| e.at_stage(Stage::FirstPass))?;
            }
            let capture = s.store.record_capture(&user_id, kind, &upload.bytes, upload.metadata)?;
            Ok(CaptureView {
                capture,
                profile: s.store.user(&user_id)?.into(),
            })
        })
        .await?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn start_session(
    State(app): State<AppState>,
    Path(user_id): Path<String>,
) -> ApiResult<(StatusCode, Json<WearSession>)> {
    let _guard = app.lock_user(&user_id).await;
    let session = app.blocking(move |s| s.store.start_timer(&user_id)).await?;
    Ok((StatusCode::CREATED, Json(session)))
}

async fn stop_session(
    State(app): State<AppState>,
    Path(user_id): Path<String>,
) -> ApiResult<Json<WearSession>> {
    let _guard = app.lock_user(&user_id).await;
    let session = app.blocking(move |s| s.store.stop_timer(&user_id)).await?;
    Ok(Json(session))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManualBody {
    minutes: f64,
}

async fn manual_session(
    State(app): State<AppState>,
    Path(user_id): Path<String>,
    body: Result<Json<ManualBody>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<WearSession>)> {
    let Json(body) = body.map_err(|e| ApiError::invalid(e.body_text()))?;
    let _guard = app.lock_user(&user_id).await;
    let session = app
        .blocking(move |s| s.store.set_manual_duration(&user_id, body.minutes))
        .await?;
    Ok((StatusCode::CREATED, Json(session)))
}

fn load_capture(store: &SessionStore, id: &str) -> eyevis_core::Result<RasterImage> {
    store.load_capture_image(&store.capture(id)?)
}

fn write_row(
    store: &SessionStore,
    dir: &str,
    row: &str,
    vis: &Visualization,
) -> eyevis_core::Result<GridRow> {
    let write = |name: &str, img: &RasterImage| -> eyevis_core::Result<String> {
        let bytes = encode(img, ImageFormat::Png)?;
        Ok(format!("/{}", store.write_artifact(&format!("{dir}/{row}_{name}.png"), &bytes)?))
    };
    Ok(GridRow {
        original: write("original", &vis.images.original)?,
        hsv_uv: write("hsv_uv", &vis.images.combined)?,
        binary: write("binary", &vis.images.contour_vis)?,
    })
}

fn ratios(vis: &Visualization) -> ResidueRatios {
    ResidueRatios {
        black: vis.black.ratio,
        pink: vis.pink.ratio,
    }
}

async fn handle_removal_check(
    State(app): State<AppState>,
    Path(user_id): Path<String>,
    multipart: Result<Multipart, MultipartRejection>,
) -> ApiResult<(StatusCode, Json<RemovalCheckRecord>)> {
    let upload = read_upload(multipart).await?;
    let _guard = app.lock_user(&user_id).await;
    let record = app
        .vision(move |s| {
            let profile = s.store.user(&user_id)?;
            let (Some(face), Some(open), Some(closed)) = (
                profile.face_ref.clone(),
                profile.baseline_open.clone(),
                profile.baseline_closed.clone(),
            ) else {
                return Err(Error::MissingBaseline(
                    "capture the whole face, eyes open and eyes closed before checking".into(),
                ));
            };
            let eye = imaging::decode(&upload.bytes)?;
            let face_img = load_capture(&s.store, &face)?;
            let baselines = Baselines {
                open: Some(load_capture(&s.store, &open)?),
                closed: Some(load_capture(&s.store, &closed)?),
            };
            let check = removal_check(s.provider.as_ref(), &face_img, &eye, &baselines, &s.cfg)?;

            let capture = s.store.record_capture(
                &user_id,
                CaptureKind::RemovalCheck,
                &upload.bytes,
                upload.metadata,
            )?;
            let dir = capture.capture_id.as_str();
            let grid = ComparisonGrid {
                capture: write_row(&s.store, dir, "capture", &check.capture)?,
                baseline: write_row(&s.store, dir, "baseline", &check.baseline)?,
            };
            s.store.record_removal_check(NewRemovalCheck {
                capture_id: capture.capture_id.clone(),
                baseline_capture_id: match check.matched {
                    EyeClass::Open => open,
                    EyeClass::Closed => closed,
                },
                matched: check.matched,
                openness: check.state.openness,
                grid,
                ratios: ratios(&check.capture),
                baseline_ratios: ratios(&check.baseline),
            })
        })
        .await?;
    Ok((StatusCode::CREATED, Json(record)))
}

async fn trend(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<TrendSeries>> {
    Ok(Json(app.blocking(move |s| s.store.trend(&id)).await?))
}

#[derive(Debug, Serialize)]
struct SessionList {
    sessions: Vec<WearSession>,
    open: Option<WearSession>,
}

async fn list_sessions(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionList>> {
    let list = app
        .blocking(move |s| {
            Ok(SessionList {
                sessions: s.store.list_sessions(&id)?,
                open: s.store.open_session(&id)?,
            })
        })
        .await?;
    Ok(Json(list))
}

async fn get_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionDetail>> {
    Ok(Json(app.blocking(move |s| s.store.get_session(&id)).await?))
}
