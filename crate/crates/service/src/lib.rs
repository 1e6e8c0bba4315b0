//! HTTP service behind the interactive annotator.
//!
//! All routes live under `/v1`; see `docs/api.md` for payloads. `/v1/fit` is
//! stateless. Sessions hold the landmark state of one sample with a bounded
//! undo history and use revision numbers for optimistic concurrency.

pub mod error;
pub mod session;
pub mod wire;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use faceparse_core::dataset::{self, write_atomic, DatasetManifest, MaskSource};
use faceparse_core::geometry::Point;
use faceparse_core::metrics::merged_scores;
use faceparse_core::rle::RleLabelMap;
use faceparse_core::{Annotator, Category, ExternalLayers, LandmarkSet};
use serde::Serialize;

pub use error::ApiError;
pub use session::{Session, DEFAULT_UNDO_DEPTH};
use wire::*;

/// Largest accepted image side for `/v1/fit`.
pub const MAX_DIMENSION: u32 = 16_384;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Annotators by schema id. `"default"` is used by sessions.
    pub schemas: BTreeMap<String, Annotator>,
    pub dataset: Option<DatasetManifest>,
    pub masks: MaskSource,
    pub undo_depth: usize,
}

impl ServiceConfig {
    /// Registers `annotator` as `"default"` and under its schema name.
    pub fn new(annotator: Annotator) -> ServiceConfig {
        let mut schemas = BTreeMap::new();
        schemas.insert(annotator.schema().name().to_string(), annotator.clone());
        schemas.insert("default".to_string(), annotator);
        ServiceConfig { schemas, dataset: None, masks: MaskSource::None, undo_depth: DEFAULT_UNDO_DEPTH }
    }

    pub fn with_dataset(mut self, manifest: DatasetManifest) -> ServiceConfig {
        self.dataset = Some(manifest);
        self
    }

    pub fn with_masks(mut self, masks: MaskSource) -> ServiceConfig {
        self.masks = masks;
        self
    }

    fn default_annotator(&self) -> &Annotator {
        &self.schemas["default"]
    }
}

struct AppState {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>,
    next_session: AtomicU64,
}

type Shared = Arc<AppState>;

pub fn router(config: ServiceConfig) -> Router {
    let state = Arc::new(AppState { config, sessions: Mutex::new(HashMap::new()), next_session: AtomicU64::new(1) });
    Router::new()
        .route("/v1/health", get(|| async { Json(serde_json::json!({"status": "ok"})) }))
        .route("/v1/categories", get(categories))
        .route("/v1/fit", post(fit))
        .route("/v1/eval", post(eval))
        .route("/v1/samples", get(samples))
        .route("/v1/sessions", post(open_session))
        .route("/v1/sessions/{id}", get(get_session))
        .route("/v1/sessions/{id}/image", get(session_image))
        .route("/v1/sessions/{id}/points", patch(move_points))
        .route("/v1/sessions/{id}/undo", post(undo))
        .route("/v1/sessions/{id}/save", post(save))
        .route("/v1/sessions/{id}/next", post(next))
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(config)).await
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(e.to_string()))?
}

#[derive(Serialize)]
struct CategoryInfo {
    id: u8,
    name: &'static str,
}

async fn categories() -> Json<Vec<CategoryInfo>> {
    Json(Category::ALL.iter().map(|c| CategoryInfo { id: c.id(), name: c.name() }).collect())
}

fn landmarks_from_wire(points: &[[f64; 2]], visible: Option<Vec<bool>>) -> Result<LandmarkSet, ApiError> {
    let pts: Vec<Point> = points.iter().map(|&[x, y]| Point::new(x, y)).collect();
    let visible = visible.unwrap_or_else(|| vec![true; pts.len()]);
    Ok(LandmarkSet::with_visibility(pts, visible)?)
}

async fn fit(State(state): State<Shared>, body: Bytes) -> Result<Json<FitResponse>, ApiError> {
    let req: FitRequest = error::parse_json(&body)?;
    let annotator = state
        .config
        .schemas
        .get(&req.schema)
        .cloned()
        .ok_or_else(|| ApiError::unprocessable("unknown_schema", format!("no schema named {:?}", req.schema)))?;
    let (w, h) = (req.width, req.height);
    if w == 0 || h == 0 || w > MAX_DIMENSION || h > MAX_DIMENSION {
        return Err(ApiError::unprocessable("invalid_dimensions", format!("{w}x{h} outside 1..={MAX_DIMENSION}")));
    }
    let landmarks = landmarks_from_wire(&req.landmarks, req.visible)?.in_frame(w, h);
    let ann = blocking(move || Ok(annotator.annotate(&landmarks, w, h, &ExternalLayers::default())?)).await?;
    Ok(Json(FitResponse {
        schema: req.schema,
        width: w,
        height: h,
        labels: RleLabelMap::encode(&ann.labels),
        parts: ann.parts,
    }))
}

async fn eval(body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let req: EvalRequest = error::parse_json(&body)?;
    let decode = |r: &RleLabelMap| r.decode().map_err(|e| ApiError::unprocessable("invalid_rle", e.to_string()));
    let mut maps = Vec::with_capacity(req.pairs.len());
    for p in &req.pairs {
        maps.push((decode(&p.pred)?, decode(&p.gt)?));
    }
    let scores = blocking(move || {
        merged_scores(maps.iter().map(|(a, b)| (a, b)), req.overall)
            .map_err(|e| ApiError::unprocessable("dimension_mismatch", e.to_string()))
    })
    .await?;
    Ok(Json(scores))
}

fn manifest(state: &AppState) -> Result<&DatasetManifest, ApiError> {
    state.config.dataset.as_ref().ok_or_else(|| {
        ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no_dataset", "service started without a dataset root")
    })
}

async fn samples(State(state): State<Shared>) -> Result<Json<SampleList>, ApiError> {
    let m = manifest(&state)?;
    Ok(Json(SampleList { train: m.train.clone(), val: m.val.clone(), test: m.test.clone() }))
}

/// Loads landmarks and image size of `id` off the async runtime.
async fn load_sample(state: &Shared, id: String) -> Result<(LandmarkSet, u32, u32), ApiError> {
    let st = state.clone();
    blocking(move || {
        let m = manifest(&st)?;
        if m.files(&id).is_none() {
            return Err(ApiError::not_found(format!("unknown sample {id:?}")));
        }
        let lm = dataset::load_landmarks(m, &id).map_err(|e| ApiError::unprocessable("invalid_sample", e))?;
        let (w, h) = dataset::image_dimensions(m, &id).map_err(|e| ApiError::unprocessable("invalid_sample", e))?;
        Ok((lm.in_frame(w, h), w, h))
    })
    .await
}

async fn open_session(State(state): State<Shared>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let req: OpenSession = error::parse_json(&body)?;
    let (lm, w, h) = load_sample(&state, req.sample_id.clone()).await?;
    let id = format!("s{}", state.next_session.fetch_add(1, Ordering::Relaxed));
    let session = Session::open(id.clone(), req.sample_id, lm, w, h, state.config.undo_depth);
    let view = session.view(false);
    state.sessions.lock().expect("session table poisoned").insert(id, Arc::new(tokio::sync::Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
    state
        .sessions
        .lock()
        .expect("session table poisoned")
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("unknown session {id:?}")))
}

fn guard(body: &[u8]) -> Result<RevisionGuard, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(RevisionGuard::default());
    }
    Ok(error::parse_json::<Option<RevisionGuard>>(body)?.unwrap_or_default())
}

async fn get_session(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let s = lookup(&state, &id)?;
    let s = s.lock().await;
    Ok(Json(s.view(false)))
}

async fn session_image(State(state): State<Shared>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let sample = lookup(&state, &id)?.lock().await.sample_id.clone();
    let path = manifest(&state)?
        .image_path(&sample)
        .ok_or_else(|| ApiError::not_found(format!("sample {sample:?} has no image")))?;
    let bytes = tokio::task::spawn_blocking({
        let path = path.clone();
        move || std::fs::read(path)
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
    .map_err(|e| ApiError::internal(format!("{}: {e}", path.display())))?;
    let mime = match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        _ => "application/octet-stream",
    };
    Ok(([(header::CONTENT_TYPE, mime)], bytes))
}

async fn move_points(
    State(state): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionView>, ApiError> {
    let s = lookup(&state, &id)?;
    let req: MovePoints = error::parse_json(&body)?;
    let mut s = s.lock().await;
    s.check_revision(Some(req.revision))?;
    s.apply(&req.moves)?;
    Ok(Json(s.view(false)))
}

async fn undo(State(state): State<Shared>, Path(id): Path<String>, body: Bytes) -> Result<Json<SessionView>, ApiError> {
    let s = lookup(&state, &id)?;
    let g = guard(&body)?;
    let mut s = s.lock().await;
    s.check_revision(g.revision)?;
    let undone = s.undo();
    Ok(Json(s.view(!undone)))
}

/// Writes the label map, then the landmark file, both atomically.
async fn write_session(state: &Shared, session: &Session) -> Result<(), ApiError> {
    let st = state.clone();
    let (id, lm, w, h) = (session.sample_id.clone(), session.landmarks().clone(), session.width, session.height);
    blocking(move || {
        let m = manifest(&st)?;
        let layers = st.config.masks.load(&id, w, h).map_err(|e| ApiError::unprocessable("mask_unavailable", e))?;
        let ann = st.config.default_annotator().annotate(&lm, w, h, &layers)?;
        let png = ann.labels.encode_png().map_err(|e| ApiError::internal(e.to_string()))?;
        let label_path = m.label_path(&id).ok_or_else(|| ApiError::not_found(format!("unknown sample {id:?}")))?;
        let lm_path = m.landmark_path(&id).ok_or_else(|| ApiError::not_found(format!("unknown sample {id:?}")))?;
        write_atomic(&label_path, &png).map_err(|e| ApiError::internal(e.to_string()))?;
        write_atomic(&lm_path, lm.to_text().as_bytes()).map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(())
    })
    .await
}

async fn save(
    State(state): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SaveResponse>, ApiError> {
    let s = lookup(&state, &id)?;
    let g = guard(&body)?;
    let mut s = s.lock().await;
    s.check_revision(g.revision)?;
    let written = s.dirty();
    if written {
        write_session(&state, &s).await?;
        s.mark_saved();
    }
    Ok(Json(SaveResponse { session: s.view(false), written }))
}

async fn next(
    State(state): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<NextResponse>, ApiError> {
    let s = lookup(&state, &id)?;
    let g = guard(&body)?;
    let mut s = s.lock().await;
    s.check_revision(g.revision)?;
    let saved = s.dirty();
    if saved {
        write_session(&state, &s).await?;
        s.mark_saved();
    }
    let following = manifest(&state)?.next_id(&s.sample_id).map(str::to_string);
    let Some(next_id) = following else {
        return Ok(Json(NextResponse { session: s.view(false), saved, end_of_manifest: true }));
    };
    let (lm, w, h) = load_sample(&state, next_id.clone()).await?;
    s.reopen(next_id, lm, w, h);
    Ok(Json(NextResponse { session: s.view(false), saved, end_of_manifest: false }))
}
