//! HTTP front end for the detection and ranking pipeline.
//!
//! Every `POST /query` produces (or reuses) an immutable [`Snapshot`]. The
//! most recent one backs the `/communities/{id}` and `/authors/{id}`
//! drill-down routes.

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use infcom_core::dataset::SummaryStats;
use infcom_core::{dataset_summary, AuthorId, Dataset, QueryError, QueryRequest, Snapshot};
use lru::LruCache;
use serde::Serialize;
use tokio::net::TcpListener;

pub const CACHE_CAPACITY: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorBody { code: code.to_string(), message: message.into() } }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::BAD_REQUEST);
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

pub struct AppState {
    dataset: Arc<Dataset>,
    summary: SummaryStats,
    cache: Mutex<LruCache<QueryRequest, Arc<Snapshot>>>,
    latest: RwLock<Option<Arc<Snapshot>>>,
}

impl AppState {
    pub fn new(dataset: Arc<Dataset>) -> Self {
        let summary = dataset_summary(&dataset);
        AppState {
            dataset,
            summary,
            cache: Mutex::new(LruCache::new(NonZeroUsize::new(CACHE_CAPACITY).unwrap())),
            latest: RwLock::new(None),
        }
    }

    /// Returns the cached snapshot for `request` or builds one. Building
    /// happens outside the lock; if two callers race, the first insert wins
    /// and both get equivalent payloads.
    pub async fn snapshot(&self, request: &QueryRequest) -> Result<Arc<Snapshot>, QueryError> {
        let key = request.normalized()?;
        let cached = self.cache.lock().unwrap().get(&key).cloned();
        let snapshot = match cached {
            Some(s) => s,
            None => {
                let dataset = Arc::clone(&self.dataset);
                let req = key.clone();
                let built = tokio::task::spawn_blocking(move || Snapshot::build(dataset, &req))
                    .await
                    .expect("snapshot build panicked")?;
                let built = Arc::new(built);
                let mut cache = self.cache.lock().unwrap();
                match cache.get(&key) {
                    Some(existing) => Arc::clone(existing),
                    None => {
                        cache.put(key, Arc::clone(&built));
                        built
                    }
                }
            }
        };
        *self.latest.write().unwrap() = Some(Arc::clone(&snapshot));
        Ok(snapshot)
    }

    pub fn latest(&self) -> Result<Arc<Snapshot>, QueryError> {
        self.latest.read().unwrap().clone().ok_or(QueryError::NoSnapshot)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}

pub fn router(dataset: Arc<Dataset>) -> Router {
    router_with_state(Arc::new(AppState::new(dataset)))
}

pub fn router_with_state(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/topics", get(topics))
        .route("/query", post(query))
        .route("/communities/{id}", get(community))
        .route("/authors/{id}", get(author))
        .with_state(state)
}

pub async fn serve(dataset: Arc<Dataset>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(dataset)).await
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    paper_count: usize,
    author_count: usize,
}

async fn health(State(state): State<Arc<AppState>>) -> Json<Health> {
    Json(Health {
        status: "ok",
        paper_count: state.dataset.papers().len(),
        author_count: state.dataset.authors().len(),
    })
}

async fn topics(State(state): State<Arc<AppState>>) -> Json<SummaryStats> {
    Json(state.summary.clone())
}

async fn query(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let request: QueryRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()))?;
    let snapshot = state.snapshot(&request).await?;
    tracing::debug!(communities = snapshot.result().communities.len(), "query served");
    Ok(Json(snapshot.result()).into_response())
}

async fn community(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let parsed: usize = id
        .parse()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "invalid_id", format!("not a community id: {id}")))?;
    let detail = state.latest()?.community(parsed)?;
    Ok(Json(detail).into_response())
}

async fn author(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let detail = state.latest()?.author(&AuthorId(id))?;
    Ok(Json(detail).into_response())
}
