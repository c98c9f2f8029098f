use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use defii_core::mapping::ModelDocument;
use defii_core::sparql::to_json_results;
use defii_core::specified_model::{concretize_csv, concretize_json};
use defii_core::Engine;
use serde_json::{json, Map, Value};

use crate::error::ApiError;

type Shared = State<Arc<Engine>>;

/// Runs engine work off the async workers; the engine takes blocking locks.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())))
}

fn json_text(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/api/models/{model}", post(post_model))
        .route("/api/models/{model}/{id}", get(get_model).put(put_model))
        .route("/api/sparql", post(post_sparql))
        .route("/api/stats", get(get_stats))
        .route("/api/ingest", post(post_ingest))
        .route("/api/map", post(post_map))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such route") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method-not-allowed", "method not allowed on this route")
        })
        .with_state(engine)
}

async fn post_model(State(engine): Shared, Path(model): Path<String>) -> Result<Response, ApiError> {
    let iri = blocking(move || Ok(engine.instantiate(&model)?)).await?;
    Ok((StatusCode::CREATED, Json(json!({ "individual": iri.as_str() }))).into_response())
}

enum Format {
    Json,
    Csv,
}

fn format(params: &HashMap<String, String>) -> Result<Format, ApiError> {
    match params.get("format").map(String::as_str) {
        None | Some("json") => Ok(Format::Json),
        Some("csv") => Ok(Format::Csv),
        Some(other) => Err(ApiError::bad_request("unknown-format", format!("unknown format '{other}' (expected json or csv)"))),
    }
}

async fn get_model(
    State(engine): Shared,
    Path((model, id)): Path<(String, String)>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let format = format(&params)?;
    let view = blocking(move || Ok(engine.resolve(&model, &id)?)).await?;
    Ok(match format {
        Format::Json => json_text(concretize_json(&view)),
        Format::Csv => ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], concretize_csv(&view)).into_response(),
    })
}

async fn put_model(
    State(engine): Shared,
    Path((model, id)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let updates: Map<String, Value> = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request("invalid-body", format!("expected a JSON object of port values: {e}")))?;
    let view = blocking(move || Ok(engine.write_back(&model, &id, &updates)?)).await?;
    Ok(json_text(concretize_json(&view)))
}

async fn post_sparql(State(engine): Shared, body: Bytes) -> Result<Response, ApiError> {
    let text = String::from_utf8(body.to_vec())
        .map_err(|_| ApiError::bad_request("invalid-body", "query text must be UTF-8"))?;
    let table = blocking(move || Ok(engine.query(&text)?)).await?;
    Ok((
        [(header::CONTENT_TYPE, "application/sparql-results+json")],
        Json(to_json_results(&table)),
    )
        .into_response())
}

async fn get_stats(State(engine): Shared) -> Result<Response, ApiError> {
    let stats = blocking(move || Ok(engine.stats())).await?;
    Ok(Json(json!({
        "explicit": stats.explicit,
        "inferred": stats.inferred,
        "total": stats.total,
        "expansionRatio": stats.rounded_ratio(),
    }))
    .into_response())
}

async fn post_ingest(State(engine): Shared, body: Bytes) -> Result<Response, ApiError> {
    let text = String::from_utf8(body.to_vec())
        .map_err(|_| ApiError::bad_request("invalid-body", "document must be UTF-8"))?;
    let (written, source) = blocking(move || {
        let doc = ModelDocument::from_json(&text).map_err(defii_core::EngineError::from)?;
        let written = engine.ingest(&doc)?;
        Ok((written, engine.source_len()))
    })
    .await?;
    Ok(Json(json!({ "written": written, "sourceTriples": source })).into_response())
}

async fn post_map(State(engine): Shared) -> Result<Response, ApiError> {
    let report = blocking(move || Ok(engine.map())).await?;
    Ok(Json(report).into_response())
}
