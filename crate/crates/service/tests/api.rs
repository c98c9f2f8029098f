use std::sync::Arc;

use defii_core::engine::parse_ontologies;
use defii_core::fixtures;
use defii_core::{Engine, EngineSettings};
use defii_service::{spawn, ApiError, ServerHandle};
use reqwest::blocking::{Client, Response};
use serde_json::{json, Value};

fn engine() -> Arc<Engine> {
    Arc::new(Engine::new(parse_ontologies(fixtures::ONTOLOGIES.iter().copied()).unwrap(), EngineSettings::default()).unwrap())
}

fn start(engine: Arc<Engine>) -> ServerHandle {
    spawn(engine, "127.0.0.1:0".parse().unwrap()).unwrap()
}

/// A server with the cyber fixture ingested and mapped.
fn loaded() -> (ServerHandle, Client) {
    let server = start(engine());
    let c = Client::new();
    let r = c.post(format!("{}/api/ingest", server.url())).body(fixtures::CYBER_SYSTEM_JSON).send().unwrap();
    assert_eq!(r.status(), 200);
    let r = c.post(format!("{}/api/map", server.url())).send().unwrap();
    assert_eq!(r.status(), 200);
    (server, c)
}

fn api_error(r: Response, status: u16) -> ApiError {
    assert_eq!(r.status().as_u16(), status);
    let err: ApiError = r.json().expect("error body is an ApiError");
    assert_eq!(err.status, status);
    err
}

fn new_individual(server: &ServerHandle, c: &Client) -> String {
    let r = c.post(format!("{}/api/models/CVSS_Model", server.url())).send().unwrap();
    assert_eq!(r.status(), 201);
    let body: Value = r.json().unwrap();
    body["individual"].as_str().unwrap().to_string()
}

fn id_of(iri: &str) -> &str {
    iri.rsplit('/').next().unwrap()
}

#[test]
fn ingest_and_map_report() {
    let server = start(engine());
    let c = Client::new();
    let r = c.post(format!("{}/api/ingest", server.url())).body(fixtures::CYBER_SYSTEM_JSON).send().unwrap();
    let body: Value = r.json().unwrap();
    assert!(body["sourceTriples"].as_u64().unwrap() > 0);
    let report: Value = c.post(format!("{}/api/map", server.url())).send().unwrap().json().unwrap();
    assert_eq!(report["discarded"], json!([]));
    assert!(report["mapped_elements"].as_u64().unwrap() > 0);
    let stats: Value = c.get(format!("{}/api/stats", server.url())).send().unwrap().json().unwrap();
    assert!(stats["explicit"].as_u64().unwrap() > 0);
    assert!(stats["inferred"].as_u64().unwrap() > 0);
    let ratio = stats["expansionRatio"].as_f64().unwrap();
    assert_eq!((ratio * 100.0).round() / 100.0, ratio);
}

#[test]
fn ingest_rejects_duplicate_ids() {
    let server = start(engine());
    let mut doc: Value = serde_json::from_str(fixtures::CYBER_SYSTEM_JSON).unwrap();
    let first = doc["elements"][0].clone();
    doc["elements"].as_array_mut().unwrap().push(first);
    let r = Client::new().post(format!("{}/api/ingest", server.url())).body(doc.to_string()).send().unwrap();
    assert_eq!(api_error(r, 400).code, "invalid-document");
}

#[test]
fn empty_engine_stats() {
    let server = start(Arc::new(Engine::new(vec![], EngineSettings::default()).unwrap()));
    let stats: Value = Client::new().get(format!("{}/api/stats", server.url())).send().unwrap().json().unwrap();
    assert_eq!(stats, json!({"explicit": 0, "inferred": 0, "total": 0, "expansionRatio": null}));
}

#[test]
fn instantiate_models() {
    let (server, c) = loaded();
    let a = new_individual(&server, &c);
    let b = new_individual(&server, &c);
    assert_ne!(a, b);
    let r = c.post(format!("{}/api/models/Nope", server.url())).send().unwrap();
    assert_eq!(api_error(r, 404).code, "unknown-model");
}

#[test]
fn view_shape_and_formats() {
    let (server, c) = loaded();
    let iri = new_individual(&server, &c);
    let url = format!("{}/api/models/CVSS_Model/{}", server.url(), id_of(&iri));
    let r = c.get(&url).send().unwrap();
    assert_eq!(r.status(), 200);
    let view: Value = r.json().unwrap();
    let keys: Vec<&String> = view.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["individual", "CVSS_Model"]);
    assert_eq!(view["individual"], json!(iri));
    assert_eq!(view["CVSS_Model"]["pr_inherited"], json!(["High"]));
    assert_eq!(view["CVSS_Model"]["av_inherited"].as_array().unwrap().len(), 6);

    let r = c.get(format!("{url}?format=csv")).send().unwrap();
    assert_eq!(r.status(), 200);
    assert!(r.headers()["content-type"].to_str().unwrap().starts_with("text/csv"));
    let csv = r.text().unwrap();
    assert!(csv.ends_with("\r\n"));
    assert_eq!(csv.matches("\r\n").count(), 2);

    let r = c.get(format!("{url}?format=xml")).send().unwrap();
    assert_eq!(api_error(r, 400).code, "unknown-format");
    let r = c.get(format!("{}/api/models/CVSS_Model/nobody", server.url())).send().unwrap();
    assert_eq!(api_error(r, 404).code, "unknown-individual");
}

#[test]
fn put_round_trip_and_errors() {
    let (server, c) = loaded();
    let iri = new_individual(&server, &c);
    let url = format!("{}/api/models/CVSS_Model/{}", server.url(), id_of(&iri));
    let vs = "CVSS:3.1/AV:P/AC:H/PR:H/UI:R/S:U/C:N/I:N/A:L";
    let r = c.put(&url).json(&json!({"score": 1.6, "vs": vs})).send().unwrap();
    assert_eq!(r.status(), 200);
    let echoed: Value = r.json().unwrap();
    assert_eq!(echoed["CVSS_Model"]["score"], json!(1.6));
    assert_eq!(echoed["CVSS_Model"]["vs"], json!(vs));

    // A second client sees the write as soon as the PUT has answered.
    let other = Client::new();
    let seen: Value = other.get(&url).send().unwrap().json().unwrap();
    assert_eq!(seen, echoed);

    let r = c.put(&url).json(&json!({"pr_inherited": ["Low"]})).send().unwrap();
    assert_eq!(api_error(r, 400).code, "read-only-port");
    let r = c.put(&url).json(&json!({"score": "high"})).send().unwrap();
    assert_eq!(api_error(r, 400).code, "type-mismatch");
    let r = c.put(&url).body("[1,2]").send().unwrap();
    assert_eq!(api_error(r, 400).code, "invalid-body");
    let r = c.put(format!("{}/api/models/CVSS_Model/nobody", server.url())).json(&json!({"score": 2.0})).send().unwrap();
    assert_eq!(api_error(r, 404).code, "unknown-individual");
}

#[test]
fn sparql_endpoint() {
    let (server, c) = loaded();
    let url = format!("{}/api/sparql", server.url());
    let r = c.post(&url).body(fixtures::SEEDED_QUERY_TEXT).send().unwrap();
    assert_eq!(r.status(), 200);
    let body: Value = r.json().unwrap();
    assert_eq!(body["head"]["vars"], json!(["browser", "versionValue", "patchValue"]));
    let rows = body["results"]["bindings"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["versionValue"]["value"], json!("100"));
    assert_eq!(rows[0]["patchValue"]["value"], json!("104"));

    let r = c.post(&url).body(fixtures::seeded_query_with(99, 104)).send().unwrap();
    let body: Value = r.json().unwrap();
    assert_eq!(body["results"]["bindings"], json!([]));

    let err = api_error(c.post(&url).body("SELEKT").send().unwrap(), 400);
    assert_eq!(err.code, "parse-error");
    assert!(err.message.starts_with("line 1, column 1"), "{}", err.message);
}

#[test]
fn every_error_is_an_api_error() {
    let (server, c) = loaded();
    let base = server.url();
    let cases: Vec<(reqwest::Method, String, u16)> = vec![
        (reqwest::Method::GET, format!("{base}/nowhere"), 404),
        (reqwest::Method::GET, format!("{base}/api"), 404),
        (reqwest::Method::DELETE, format!("{base}/api/stats"), 405),
        (reqwest::Method::GET, format!("{base}/api/sparql"), 405),
        (reqwest::Method::POST, format!("{base}/api/models/Nope"), 404),
        (reqwest::Method::GET, format!("{base}/api/models/Nope/x"), 404),
        (reqwest::Method::POST, format!("{base}/api/ingest"), 400),
    ];
    for (method, url, status) in cases {
        let r = c.request(method.clone(), &url).send().unwrap();
        let err = api_error(r, status);
        assert!(!err.code.is_empty() && !err.message.is_empty(), "{method} {url}");
    }
}

#[test]
fn identical_state_gives_identical_bodies() {
    let (server, c) = loaded();
    let iri = new_individual(&server, &c);
    let url = format!("{}/api/models/CVSS_Model/{}", server.url(), id_of(&iri));
    let a = c.get(&url).send().unwrap().text().unwrap();
    let b = c.get(&url).send().unwrap().text().unwrap();
    assert_eq!(a, b);
}
