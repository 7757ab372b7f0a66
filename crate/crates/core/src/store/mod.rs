//! Persistence for users, captures, wear sessions and removal checks.
//!
//! State lives in an append-only event log (`events.log`, one JSON record
//! per line) and is rebuilt by replaying it on open. Uploaded images go to
//! `images/` under their SHA-256; generated visualizations go to
//! `artifacts/`.

mod clock;
mod types;

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Component, Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use clock::{Clock, ManualClock, SystemClock};
pub use types::{
    CaptureKind, CaptureMetadata, CaptureRecord, ComparisonGrid, EntryMode, GridRow,
    RemovalCheckRecord, ResidueRatios, SessionDetail, Shutter, TrendPoint, TrendSeries,
    UserProfile, WearSession,
};

use crate::error::{Error, Result};
use crate::imaging::{self, ImageFormat, RasterImage};
use crate::localization::EyeClass;

pub const EVENTS_FILE: &str = "events.log";
pub const IMAGES_DIR: &str = "images";
pub const ARTIFACTS_DIR: &str = "artifacts";

/// Sessions shown in the wearing-time trend.
pub const TREND_LEN: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Event {
    UserCreated {
        user_id: String,
        at: i64,
    },
    CaptureRecorded(CaptureRecord),
    SessionStarted {
        session_id: String,
        user_id: String,
        at: i64,
    },
    SessionStopped {
        session_id: String,
        at: i64,
    },
    ManualSession {
        session_id: String,
        user_id: String,
        minutes: f64,
        at: i64,
    },
    RemovalCheckRecorded(RemovalCheckRecord),
}

#[derive(Debug, Default)]
struct State {
    users: BTreeMap<String, UserProfile>,
    captures: HashMap<String, CaptureRecord>,
    capture_order: Vec<String>,
    sessions: HashMap<String, WearSession>,
    /// Per user, sessions in creation order.
    user_sessions: HashMap<String, Vec<String>>,
    open_sessions: HashMap<String, String>,
    checks: Vec<RemovalCheckRecord>,
    counters: [u64; 4],
}

fn dangling(what: &str, id: &str) -> Error {
    Error::Format(format!("event log references unknown {what} {id}"))
}

impl State {
    fn next_id(&mut self, slot: usize, prefix: &str) -> String {
        self.counters[slot] += 1;
        format!("{prefix}-{}", self.counters[slot])
    }

    fn bump(&mut self, slot: usize, id: &str) {
        if let Some(n) = id.rsplit('-').next().and_then(|n| n.parse::<u64>().ok()) {
            self.counters[slot] = self.counters[slot].max(n);
        }
    }

    fn apply(&mut self, event: Event) -> Result<()> {
        match event {
            Event::UserCreated { user_id, at } => {
                self.bump(0, &user_id);
                self.users.insert(
                    user_id.clone(),
                    UserProfile {
                        user_id,
                        created_at: at,
                        face_ref: None,
                        baseline_open: None,
                        baseline_closed: None,
                    },
                );
            }
            Event::CaptureRecorded(record) => {
                self.bump(1, &record.capture_id);
                let user = self
                    .users
                    .get_mut(&record.user_id)
                    .ok_or_else(|| dangling("user", &record.user_id))?;
                let slot = match record.kind {
                    CaptureKind::BaselineFace => Some(&mut user.face_ref),
                    CaptureKind::BaselineEyeOpen => Some(&mut user.baseline_open),
                    CaptureKind::BaselineEyeClosed => Some(&mut user.baseline_closed),
                    CaptureKind::RemovalCheck => None,
                };
                if let Some(slot) = slot {
                    *slot = Some(record.capture_id.clone());
                }
                if let Some(sid) = &record.session_id {
                    let session = self
                        .sessions
                        .get_mut(sid)
                        .ok_or_else(|| dangling("session", sid))?;
                    session.capture_ids.push(record.capture_id.clone());
                }
                self.capture_order.push(record.capture_id.clone());
                self.captures.insert(record.capture_id.clone(), record.clone());
                if let Some(sid) = &record.session_id {
                    self.refresh_removal_duration(sid);
                }
            }
            Event::SessionStarted {
                session_id,
                user_id,
                at,
            } => {
                self.bump(2, &session_id);
                self.insert_session(WearSession {
                    session_id: session_id.clone(),
                    user_id: user_id.clone(),
                    mode: EntryMode::Clock,
                    start: Some(at),
                    end: None,
                    manual_minutes: None,
                    recorded_at: at,
                    capture_ids: Vec::new(),
                    removal_duration_s: None,
                })?;
                self.open_sessions.insert(user_id, session_id);
            }
            Event::SessionStopped { session_id, at } => {
                let session = self
                    .sessions
                    .get_mut(&session_id)
                    .ok_or_else(|| dangling("session", &session_id))?;
                session.end = Some(at);
                self.open_sessions.remove(&session.user_id);
            }
            Event::ManualSession {
                session_id,
                user_id,
                minutes,
                at,
            } => {
                self.bump(2, &session_id);
                self.insert_session(WearSession {
                    session_id,
                    user_id,
                    mode: EntryMode::Manual,
                    start: None,
                    end: None,
                    manual_minutes: Some(minutes),
                    recorded_at: at,
                    capture_ids: Vec::new(),
                    removal_duration_s: None,
                })?;
            }
            Event::RemovalCheckRecorded(record) => {
                self.bump(3, &record.check_id);
                self.checks.push(record);
            }
        }
        Ok(())
    }

    fn insert_session(&mut self, session: WearSession) -> Result<()> {
        if !self.users.contains_key(&session.user_id) {
            return Err(dangling("user", &session.user_id));
        }
        self.user_sessions
            .entry(session.user_id.clone())
            .or_default()
            .push(session.session_id.clone());
        self.sessions.insert(session.session_id.clone(), session);
        Ok(())
    }

    fn refresh_removal_duration(&mut self, session_id: &str) {
        let Some(session) = self.sessions.get(session_id) else {
            return;
        };
        let times: Vec<i64> = session
            .capture_ids
            .iter()
            .filter_map(|c| self.captures.get(c))
            .filter(|c| c.kind == CaptureKind::RemovalCheck)
            .map(|c| c.timestamp)
            .collect();
        let span = match (times.iter().min(), times.iter().max()) {
            (Some(lo), Some(hi)) if times.len() >= 2 => Some(hi - lo),
            _ => None,
        };
        if let Some(session) = self.sessions.get_mut(session_id) {
            session.removal_duration_s = span;
        }
    }

    fn user(&self, user_id: &str) -> Result<&UserProfile> {
        self.users
            .get(user_id)
            .ok_or_else(|| Error::NotFound(format!("user {user_id}")))
    }

    /// Completed sessions of a user, oldest first.
    fn completed_sessions(&self, user_id: &str) -> Vec<&WearSession> {
        let mut sessions: Vec<(usize, &WearSession)> = self
            .user_sessions
            .get(user_id)
            .map(|ids| {
                ids.iter()
                    .enumerate()
                    .filter_map(|(i, id)| self.sessions.get(id).map(|s| (i, s)))
                    .filter(|(_, s)| s.is_completed())
                    .collect()
            })
            .unwrap_or_default();
        sessions.sort_by_key(|(seq, s)| (s.started_at(), *seq));
        sessions.into_iter().map(|(_, s)| s).collect()
    }
}

struct Inner {
    log: File,
    state: State,
}

/// What a finished removal check contributes to the store.
#[derive(Debug, Clone)]
pub struct NewRemovalCheck {
    pub capture_id: String,
    pub baseline_capture_id: String,
    pub matched: EyeClass,
    pub openness: f64,
    pub grid: ComparisonGrid,
    pub ratios: ResidueRatios,
    pub baseline_ratios: ResidueRatios,
}

/// Single-writer store over one data directory.
pub struct SessionStore {
    root: PathBuf,
    inner: Mutex<Inner>,
    clock: Arc<dyn Clock>,
}

impl std::fmt::Debug for SessionStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SessionStore").field("root", &self.root).finish()
    }
}

impl SessionStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        Self::open_with_clock(root, Arc::new(SystemClock))
    }

    /// Opens (or creates) a data directory and replays its log. A torn
    /// final record is dropped and the file truncated to the last complete
    /// record.
    pub fn open_with_clock(root: impl Into<PathBuf>, clock: Arc<dyn Clock>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(root.join(IMAGES_DIR))?;
        std::fs::create_dir_all(root.join(ARTIFACTS_DIR))?;
        let log_path = root.join(EVENTS_FILE);

        let bytes = match std::fs::read(&log_path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let (state, good_len) = replay(&bytes)?;

        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)?;
        if good_len < bytes.len() {
            log.set_len(good_len as u64)?;
            log.sync_data()?;
        }

        Ok(Self {
            root,
            inner: Mutex::new(Inner { log, state }),
            clock,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn now(&self) -> i64 {
        self.clock.now()
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn commit(inner: &mut Inner, event: Event) -> Result<()> {
        let mut line = serde_json::to_string(&event)?;
        line.push('\n');
        inner.log.write_all(line.as_bytes())?;
        inner.log.sync_data()?;
        inner.state.apply(event)
    }

    /// Forces buffered log data to disk.
    pub fn flush(&self) -> Result<()> {
        let mut inner = self.lock();
        inner.log.flush()?;
        inner.log.sync_all()?;
        Ok(())
    }

    pub fn create_user(&self) -> Result<UserProfile> {
        let mut inner = self.lock();
        let user_id = inner.state.next_id(0, "user");
        let at = self.clock.now();
        Self::commit(
            &mut inner,
            Event::UserCreated {
                user_id: user_id.clone(),
                at,
            },
        )?;
        Ok(inner.state.user(&user_id)?.clone())
    }

    pub fn user(&self, user_id: &str) -> Result<UserProfile> {
        Ok(self.lock().state.user(user_id)?.clone())
    }

    /// Validates and stores an uploaded image, then appends its record.
    /// Removal-check captures attach to the user's open session, or else
    /// to their most recent one.
    pub fn record_capture(
        &self,
        user_id: &str,
        kind: CaptureKind,
        bytes: &[u8],
        metadata: Option<CaptureMetadata>,
    ) -> Result<CaptureRecord> {
        if let Some(m) = &metadata {
            m.validate()?;
        }
        imaging::decode(bytes)?;
        let format = ImageFormat::detect(bytes)
            .ok_or_else(|| Error::InvalidImage("not a PNG or JPEG stream".into()))?;

        let mut inner = self.lock();
        inner.state.user(user_id)?;
        let image = self.store_image(bytes, format)?;

        let session_id = (kind == CaptureKind::RemovalCheck)
            .then(|| {
                inner.state.open_sessions.get(user_id).cloned().or_else(|| {
                    inner
                        .state
                        .user_sessions
                        .get(user_id)
                        .and_then(|ids| ids.last().cloned())
                })
            })
            .flatten();
        let record = CaptureRecord {
            capture_id: inner.state.next_id(1, "cap"),
            user_id: user_id.to_string(),
            kind,
            image,
            timestamp: self.clock.now(),
            metadata,
            session_id,
        };
        Self::commit(&mut inner, Event::CaptureRecorded(record.clone()))?;
        Ok(record)
    }

    fn store_image(&self, bytes: &[u8], format: ImageFormat) -> Result<String> {
        let digest = hex::encode(Sha256::digest(bytes));
        let rel = format!("{IMAGES_DIR}/{digest}.{}", format.extension());
        let path = self.root.join(&rel);
        if !path.exists() {
            write_atomic(&path, bytes)?;
        }
        Ok(rel)
    }

    pub fn capture(&self, capture_id: &str) -> Result<CaptureRecord> {
        self.lock()
            .state
            .captures
            .get(capture_id)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("capture {capture_id}")))
    }

    pub fn load_capture_image(&self, record: &CaptureRecord) -> Result<RasterImage> {
        imaging::load(self.root.join(&record.image))
    }

    pub fn start_timer(&self, user_id: &str) -> Result<WearSession> {
        let mut inner = self.lock();
        inner.state.user(user_id)?;
        if inner.state.open_sessions.contains_key(user_id) {
            return Err(Error::SessionAlreadyOpen(user_id.to_string()));
        }
        let session_id = inner.state.next_id(2, "sess");
        let at = self.clock.now();
        Self::commit(
            &mut inner,
            Event::SessionStarted {
                session_id: session_id.clone(),
                user_id: user_id.to_string(),
                at,
            },
        )?;
        Ok(inner.state.sessions[&session_id].clone())
    }

    pub fn stop_timer(&self, user_id: &str) -> Result<WearSession> {
        let mut inner = self.lock();
        inner.state.user(user_id)?;
        let session_id = inner
            .state
            .open_sessions
            .get(user_id)
            .cloned()
            .ok_or_else(|| Error::NoOpenSession(user_id.to_string()))?;
        let start = inner.state.sessions[&session_id].start.unwrap_or_default();
        let at = self.clock.now().max(start);
        Self::commit(
            &mut inner,
            Event::SessionStopped {
                session_id: session_id.clone(),
                at,
            },
        )?;
        Ok(inner.state.sessions[&session_id].clone())
    }

    pub fn set_manual_duration(&self, user_id: &str, minutes: f64) -> Result<WearSession> {
        if !(minutes.is_finite() && minutes > 0.0) {
            return Err(Error::invalid(format!(
                "wearing time must be positive minutes, got {minutes}"
            )));
        }
        let mut inner = self.lock();
        inner.state.user(user_id)?;
        let session_id = inner.state.next_id(2, "sess");
        let at = self.clock.now();
        Self::commit(
            &mut inner,
            Event::ManualSession {
                session_id: session_id.clone(),
                user_id: user_id.to_string(),
                minutes,
                at,
            },
        )?;
        Ok(inner.state.sessions[&session_id].clone())
    }

    pub fn open_session(&self, user_id: &str) -> Result<Option<WearSession>> {
        let inner = self.lock();
        inner.state.user(user_id)?;
        Ok(inner
            .state
            .open_sessions
            .get(user_id)
            .map(|id| inner.state.sessions[id].clone()))
    }

    /// Up to the last five completed sessions, oldest first.
    pub fn trend(&self, user_id: &str) -> Result<TrendSeries> {
        let inner = self.lock();
        inner.state.user(user_id)?;
        let sessions = inner.state.completed_sessions(user_id);
        let skip = sessions.len().saturating_sub(TREND_LEN);
        Ok(TrendSeries {
            points: sessions[skip..]
                .iter()
                .map(|s| TrendPoint {
                    session_id: s.session_id.clone(),
                    minutes: s.duration_minutes().unwrap_or_default(),
                    started_at: s.started_at(),
                })
                .collect(),
        })
    }

    /// Completed sessions, newest first.
    pub fn list_sessions(&self, user_id: &str) -> Result<Vec<WearSession>> {
        let inner = self.lock();
        inner.state.user(user_id)?;
        Ok(inner
            .state
            .completed_sessions(user_id)
            .into_iter()
            .rev()
            .cloned()
            .collect())
    }

    pub fn get_session(&self, session_id: &str) -> Result<SessionDetail> {
        let inner = self.lock();
        let session = inner
            .state
            .sessions
            .get(session_id)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("session {session_id}")))?;
        let captures = session
            .capture_ids
            .iter()
            .filter_map(|c| inner.state.captures.get(c).cloned())
            .collect();
        let checks = inner
            .state
            .checks
            .iter()
            .filter(|c| c.session_id.as_deref() == Some(session_id))
            .cloned()
            .collect();
        Ok(SessionDetail {
            session,
            captures,
            checks,
        })
    }

    /// Writes a generated file under `artifacts/` and returns its path
    /// relative to the data directory.
    pub fn write_artifact(&self, rel: &str, bytes: &[u8]) -> Result<String> {
        let rel_path = Path::new(rel);
        if rel_path
            .components()
            .any(|c| !matches!(c, Component::Normal(_)))
        {
            return Err(Error::invalid(format!("artifact path '{rel}' must be relative")));
        }
        let path = self.root.join(ARTIFACTS_DIR).join(rel_path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        write_atomic(&path, bytes)?;
        Ok(format!("{ARTIFACTS_DIR}/{rel}"))
    }

    pub fn record_removal_check(&self, check: NewRemovalCheck) -> Result<RemovalCheckRecord> {
        let mut inner = self.lock();
        let capture = inner
            .state
            .captures
            .get(&check.capture_id)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("capture {}", check.capture_id)))?;
        let record = RemovalCheckRecord {
            check_id: inner.state.next_id(3, "check"),
            capture_id: check.capture_id,
            user_id: capture.user_id,
            session_id: capture.session_id,
            baseline_capture_id: check.baseline_capture_id,
            matched: check.matched,
            openness: check.openness,
            grid: check.grid,
            ratios: check.ratios,
            baseline_ratios: check.baseline_ratios,
            at: self.clock.now(),
        };
        Self::commit(&mut inner, Event::RemovalCheckRecorded(record.clone()))?;
        Ok(record)
    }

    pub fn checks_for_user(&self, user_id: &str) -> Result<Vec<RemovalCheckRecord>> {
        let inner = self.lock();
        inner.state.user(user_id)?;
        Ok(inner
            .state
            .checks
            .iter()
            .filter(|c| c.user_id == user_id)
            .cloned()
            .collect())
    }
}

/// Rebuilds state from log bytes. Returns the state and the length of the
/// prefix made of complete, well-formed records.
fn replay(bytes: &[u8]) -> Result<(State, usize)> {
    let mut state = State::default();
    let mut offset = 0;
    let mut line_no = 0;
    while offset < bytes.len() {
        line_no += 1;
        let Some(nl) = bytes[offset..].iter().position(|&b| b == b'\n') else {
            // torn tail
            break;
        };
        let line = &bytes[offset..offset + nl];
        let next = offset + nl + 1;
        let is_last = next >= bytes.len();
        if line.iter().all(u8::is_ascii_whitespace) {
            offset = next;
            continue;
        }
        match serde_json::from_slice::<Event>(line) {
            Ok(event) => state.apply(event)?,
            Err(_) if is_last => break,
            Err(e) => {
                return Err(Error::Format(format!(
                    "{EVENTS_FILE} line {line_no} is corrupt: {e}"
                )))
            }
        }
        offset = next;
    }
    Ok((state, offset))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_data()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
