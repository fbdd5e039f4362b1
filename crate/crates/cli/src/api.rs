//! HTTP/JSON front for elicitation sessions.
//!
//! ```text
//! POST /sessions                  config          -> {id}
//! GET  /sessions/{id}/query                       -> {price, framing}
//! POST /sessions/{id}/answer      {response}      -> report
//! POST /sessions/{id}/preference  {left,right,rel}-> {new_violations, report}
//! GET  /sessions/{id}/report                      -> report
//! GET  /sessions/{id}/snapshot                    -> snapshot
//! POST /sessions/{id}/abandon                     -> report
//! ```

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use surething::session::{ChoiceInput, Response as Answer, SessionConfig, SessionStore};
use surething::Error;

pub type Store = Arc<SessionStore>;

pub struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            Error::UnknownSession(_) => StatusCode::NOT_FOUND,
            Error::SessionNotActive | Error::NoPendingQuery => StatusCode::CONFLICT,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        (status, Json(json!({ "error": self.0.to_string() }))).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/query", get(query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/preference", post(preference))
        .route("/sessions/{id}/report", get(report))
        .route("/sessions/{id}/snapshot", get(snapshot))
        .route("/sessions/{id}/abandon", post(abandon))
        .with_state(store)
}

async fn create(State(store): State<Store>, Json(config): Json<SessionConfig>) -> ApiResult {
    let id = store.create(config)?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))).into_response())
}

async fn query(State(store): State<Store>, Path(id): Path<String>) -> ApiResult {
    let q = store.with(&id, |s| s.next_query())?;
    Ok(Json(q).into_response())
}

#[derive(Deserialize)]
struct AnswerBody {
    response: String,
}

async fn answer(State(store): State<Store>, Path(id): Path<String>, Json(body): Json<AnswerBody>) -> ApiResult {
    let response: Answer = body.response.parse()?;
    let r = store.with(&id, |s| {
        s.submit_answer(response)?;
        Ok(s.report())
    })?;
    Ok(Json(r).into_response())
}

async fn preference(State(store): State<Store>, Path(id): Path<String>, Json(choice): Json<ChoiceInput>) -> ApiResult {
    let session = store.get(&id)?;
    // The checks can take a moment on larger problems.
    let (fresh, report) = tokio::task::spawn_blocking(move || {
        let mut s = session.lock();
        let fresh = s.record_preference(&choice)?;
        Ok::<_, Error>((fresh, s.report()))
    })
    .await
    .map_err(|e| Error::invalid(format!("preference check failed: {e}")))??;
    Ok(Json(json!({ "new_violations": fresh, "report": report })).into_response())
}

async fn report(State(store): State<Store>, Path(id): Path<String>) -> ApiResult {
    let r = store.with(&id, |s| Ok(s.report()))?;
    Ok(Json(r).into_response())
}

async fn snapshot(State(store): State<Store>, Path(id): Path<String>) -> ApiResult {
    let r = store.with(&id, |s| Ok(s.snapshot()))?;
    Ok(Json(r).into_response())
}

async fn abandon(State(store): State<Store>, Path(id): Path<String>) -> ApiResult {
    let r = store.with(&id, |s| {
        s.abandon();
        Ok(s.report())
    })?;
    Ok(Json(r).into_response())
}

pub async fn serve(host: &str, port: u16) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(SessionStore::new()))).await?;
    Ok(())
}
