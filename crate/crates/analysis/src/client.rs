//! The analysis tool as a plain HTTP client of the service.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cvss::CvssResult;
use crate::rollup::{roll_up, MetricArrays, RollUpError, Strategy};

pub const SEEDED_QUERY: &str = include_str!("../../../fixtures/seeded_vulnerability.rq");

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("cannot reach {url}: {message}")]
    Transport { url: String, message: String },
    #[error("{url} answered {status} {code}: {message}")]
    Status { url: String, status: u16, code: String, message: String },
    #[error("unexpected response from {url}: {message}")]
    Response { url: String, message: String },
    #[error(transparent)]
    RollUp(#[from] RollUpError),
    #[error("seed value '{0}' is not an integer")]
    InvalidSeed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOutcome {
    pub result: CvssResult,
    /// Exactly what was PUT.
    pub payload: Value,
    /// Body of the GET issued after the PUT.
    pub final_view: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededMatch {
    pub browser: String,
    pub version: i64,
    pub patch: i64,
}

fn client() -> Result<reqwest::blocking::Client, ClientError> {
    reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(30))
        .build()
        .map_err(|e| ClientError::Transport { url: String::new(), message: e.to_string() })
}

fn read_body(url: &str, request: reqwest::blocking::RequestBuilder) -> Result<String, ClientError> {
    let transport = |e: reqwest::Error| ClientError::Transport { url: url.to_string(), message: e.to_string() };
    let resp = request.send().map_err(transport)?;
    let status = resp.status();
    let text = resp.text().map_err(|e| ClientError::Response { url: url.to_string(), message: e.to_string() })?;
    if status.is_success() {
        return Ok(text);
    }
    let body: Value = serde_json::from_str(&text).unwrap_or(Value::Null);
    let field = |k: &str| body.get(k).and_then(Value::as_str).unwrap_or_default().to_string();
    Err(ClientError::Status { url: url.to_string(), status: status.as_u16(), code: field("code"), message: field("message") })
}

fn parse_json(url: &str, text: &str) -> Result<Value, ClientError> {
    serde_json::from_str(text).map_err(|e| ClientError::Response { url: url.to_string(), message: e.to_string() })
}

/// Accepts the opaque id or the full individual IRI.
pub fn individual_id(individual: &str) -> &str {
    individual.rsplit('/').next().unwrap_or(individual)
}

pub fn model_url(endpoint: &str, model: &str, individual: &str) -> String {
    format!("{}/api/models/{model}/{}", endpoint.trim_end_matches('/'), individual_id(individual))
}

pub fn get_view(endpoint: &str, model: &str, individual: &str) -> Result<String, ClientError> {
    let url = model_url(endpoint, model, individual);
    read_body(&url, client()?.get(&url))
}

/// The RFC 4180 concretization of the same view.
pub fn get_view_csv(endpoint: &str, model: &str, individual: &str) -> Result<String, ClientError> {
    let url = format!("{}?format=csv", model_url(endpoint, model, individual));
    read_body(&url, client()?.get(&url))
}

/// POSTs a new model individual and returns its IRI.
pub fn create_individual(endpoint: &str, model: &str) -> Result<String, ClientError> {
    let url = format!("{}/api/models/{model}", endpoint.trim_end_matches('/'));
    let body = parse_json(&url, &read_body(&url, client()?.post(&url))?)?;
    body.get("individual")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| ClientError::Response { url, message: "no 'individual' in the response".into() })
}

/// GET the view, roll up the in-ports, PUT `score` and `vs`, then GET again.
/// Nothing is written if the view lacks an in-port or holds a bad value.
pub fn run_analysis_client(
    endpoint: &str,
    model: &str,
    individual: &str,
    strategy: Strategy,
) -> Result<AnalysisOutcome, ClientError> {
    let url = model_url(endpoint, model, individual);
    let view = parse_json(&url, &get_view(endpoint, model, individual)?)?;
    let ports = view.get(model).and_then(Value::as_object).ok_or_else(|| ClientError::Response {
        url: url.clone(),
        message: format!("no '{model}' object in the view"),
    })?;
    let arrays = MetricArrays::from_ports(ports)?;
    let result = roll_up(&arrays, strategy)?;
    let payload = json!({ "score": result.base_score, "vs": result.vector_string });
    read_body(&url, client()?.put(&url).json(&payload))?;
    let final_view = get_view(endpoint, model, individual)?;
    Ok(AnalysisOutcome { result, payload, final_view })
}

pub fn parse_seed(text: &str) -> Result<i64, ClientError> {
    text.trim().parse().map_err(|_| ClientError::InvalidSeed(text.to_string()))
}

pub fn seeded_query(version: i64, patch: i64) -> String {
    SEEDED_QUERY
        .replace("BIND(100 AS ?cyberVersion)", &format!("BIND({version} AS ?cyberVersion)"))
        .replace("BIND(104 AS ?cyberPatch)", &format!("BIND({patch} AS ?cyberPatch)"))
}

pub fn post_query(endpoint: &str, query: &str) -> Result<Value, ClientError> {
    let url = format!("{}/api/sparql", endpoint.trim_end_matches('/'));
    let body = read_body(
        &url,
        client()?.post(&url).header("Content-Type", "application/sparql-query").body(query.to_string()),
    )?;
    parse_json(&url, &body)
}

/// Runs the seeded-vulnerability query with the given constants.
pub fn find_seeded_vulnerability(endpoint: &str, version: i64, patch: i64) -> Result<Vec<SeededMatch>, ClientError> {
    let results = post_query(endpoint, &seeded_query(version, patch))?;
    let bad = |message: &str| ClientError::Response { url: format!("{endpoint}/api/sparql"), message: message.into() };
    let rows = results
        .pointer("/results/bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing results.bindings"))?;
    rows.iter()
        .map(|row| {
            let text = |var: &str| {
                row.pointer(&format!("/{var}/value"))
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad(&format!("row without ?{var}")))
            };
            let int = |var: &str| text(var)?.parse::<i64>().map_err(|_| bad(&format!("?{var} is not an integer")));
            Ok(SeededMatch { browser: text("browser")?.to_string(), version: int("versionValue")?, patch: int("patchValue")? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert_eq!(parse_seed(" 100").unwrap(), 100);
        assert!(matches!(parse_seed("10O"), Err(ClientError::InvalidSeed(_))));
        assert_eq!(seeded_query(100, 104), SEEDED_QUERY);
        assert!(seeded_query(99, 7).contains("BIND(99 AS ?cyberVersion)"));
        assert!(seeded_query(99, 7).contains("BIND(7 AS ?cyberPatch)"));
    }

    #[test]
    fn urls() {
        assert_eq!(
            model_url("http://h:1/", "CVSS_Model", "http://defii.org/data/models/CVSS_Model/abc_entity"),
            "http://h:1/api/models/CVSS_Model/abc_entity"
        );
    }

    #[test]
    fn unreachable_service() {
        let err = run_analysis_client("http://127.0.0.1:9", "CVSS_Model", "x", Strategy::WorstCase).unwrap_err();
        assert!(matches!(err, ClientError::Transport { .. }), "{err}");
    }
}
