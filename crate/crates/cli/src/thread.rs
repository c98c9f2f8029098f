//! The five-step digital thread: map, query, pull, analyze and write back,
//! then a second consumer reads the same endpoint.

use std::collections::BTreeMap;
use std::fmt;
use std::net::SocketAddr;
use std::sync::Arc;

use defii_analysis::client::{self, ClientError};
use defii_analysis::Strategy;
use defii_core::engine::parse_ontologies;
use defii_core::mapping::{ElementKind, ModelDocument, SlotValue};
use defii_core::{Engine, EngineError, EngineSettings};
use serde::Serialize;
use serde_json::Value;

pub const STEPS: u8 = 5;

#[derive(Debug, Clone)]
pub struct ThreadOptions {
    pub settings: EngineSettings,
    /// `(name, turtle text)` pairs.
    pub ontologies: Vec<(String, String)>,
    pub fixture: ModelDocument,
    pub model: String,
    pub seed_version: i64,
    pub seed_patch: i64,
    pub strategy: Strategy,
    /// Port 0 picks an ephemeral port.
    pub bind: SocketAddr,
}

impl ThreadOptions {
    pub fn bundled() -> Self {
        ThreadOptions {
            settings: EngineSettings::default(),
            ontologies: defii_core::fixtures::ONTOLOGIES
                .iter()
                .map(|(n, t)| (n.to_string(), t.to_string()))
                .collect(),
            fixture: defii_core::fixtures::cyber_system(),
            model: "CVSS_Model".to_string(),
            seed_version: 100,
            seed_patch: 104,
            strategy: Strategy::WorstCase,
            bind: SocketAddr::from(([127, 0, 0, 1], 0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub number: u8,
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

impl fmt::Display for StepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.ok { "ok" } else { "FAILED" };
        write!(f, "[{}/{STEPS}] {:<9} {status}: {}", self.number, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ThreadReport {
    pub steps: Vec<StepReport>,
    pub individual: Option<String>,
    pub score: Option<f64>,
    pub vector: Option<String>,
}

impl ThreadReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        match self.steps.iter().find(|s| !s.ok) {
            Some(s) => out.push_str(&format!("thread aborted at step {}\n", s.number)),
            None => out.push_str("thread complete\n"),
        }
        out
    }

    /// The rendered report with the minted individual id masked.
    pub fn normalized(&self) -> String {
        let text = self.render();
        match &self.individual {
            Some(iri) => text.replace(client::individual_id(iri), "<individual>"),
            None => text,
        }
    }

    fn pass(&mut self, number: u8, name: &'static str, detail: String) {
        self.steps.push(StepReport { number, name, ok: true, detail });
    }
}

#[derive(Debug)]
pub struct ThreadError {
    pub step: u8,
    pub message: String,
    /// True when the failure is environmental (I/O, sockets) rather than a
    /// failed check.
    pub internal: bool,
    pub report: ThreadReport,
}

impl fmt::Display for ThreadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.message)
    }
}

impl std::error::Error for ThreadError {}

pub struct ThreadOutcome {
    pub report: ThreadReport,
    pub engine: Arc<Engine>,
    /// Body of the analysis client's GET after its PUT.
    pub analysis_view: String,
    pub dashboard_view: String,
    pub dashboard_csv: String,
}

const NAMES: [&str; 5] = ["map", "query", "pull", "analyze", "dashboard"];

struct Run {
    report: ThreadReport,
}

impl Run {
    fn fail(&mut self, step: u8, message: String, internal: bool) -> ThreadError {
        self.report.steps.push(StepReport { number: step, name: NAMES[usize::from(step) - 1], ok: false, detail: message.clone() });
        ThreadError { step, message, internal, report: self.report.clone() }
    }

    fn engine_err(&mut self, step: u8, e: EngineError) -> ThreadError {
        let internal = !e.is_validation();
        self.fail(step, e.to_string(), internal)
    }

    fn client_err(&mut self, step: u8, e: ClientError) -> ThreadError {
        let internal = matches!(e, ClientError::Transport { .. }) || matches!(e, ClientError::Status { status: 500.., .. });
        self.fail(step, e.to_string(), internal)
    }
}

/// Per-port value lists from a JSON view; scalars become one-element lists
/// and nulls become empty strings.
pub fn json_view_values(view: &str, model: &str) -> Result<BTreeMap<String, Vec<String>>, String> {
    let doc: Value = serde_json::from_str(view).map_err(|e| e.to_string())?;
    let ports = doc.get(model).and_then(Value::as_object).ok_or("view has no model object")?;
    let text = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    Ok(ports
        .iter()
        .map(|(k, v)| {
            let values = match v {
                Value::Array(items) => items.iter().map(text).collect(),
                other => vec![text(other)],
            };
            (k.clone(), values)
        })
        .collect())
}

/// Per-port value lists from a CSV view. `many` names the ports whose cells
/// hold `|`-joined lists.
pub fn csv_view_values(csv_text: &str, many: &[&str]) -> Result<BTreeMap<String, Vec<String>>, String> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_text.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let mut records = reader.records();
    let row = records.next().ok_or("CSV has no data row")?.map_err(|e| e.to_string())?;
    if records.next().is_some() {
        return Err("CSV has more than one data row".into());
    }
    Ok(headers
        .iter()
        .zip(row.iter())
        .filter(|(h, _)| *h != "individual")
        .map(|(h, cell)| {
            let values = if many.contains(&h) {
                if cell.is_empty() { Vec::new() } else { cell.split('|').map(str::to_string).collect() }
            } else {
                vec![cell.to_string()]
            };
            (h.to_string(), values)
        })
        .collect())
}

/// The source-document value currently held at `instance.property`.
fn source_slot(doc: &ModelDocument, instance: &str, property: &str) -> Option<String> {
    doc.elements
        .iter()
        .filter(|e| e.kind == ElementKind::InstanceSpecification && e.name == instance)
        .flat_map(|e| &e.slots)
        .find(|s| s.property == property)
        .map(|s| match &s.value {
            SlotValue::Number(n) => n.to_string(),
            SlotValue::Text(t) => t.clone(),
        })
}

pub fn run_thread(opts: &ThreadOptions) -> Result<ThreadOutcome, ThreadError> {
    let mut run = Run { report: ThreadReport::default() };

    // 1. Map the tool export into the repository and materialize.
    let ontologies = parse_ontologies(opts.ontologies.iter().map(|(n, t)| (n.as_str(), t.as_str())))
        .map_err(|e| run.engine_err(1, e))?;
    let engine = Arc::new(Engine::new(ontologies, opts.settings.clone()).map_err(|e| run.engine_err(1, e))?);
    let written = engine.ingest(&opts.fixture).map_err(|e| run.engine_err(1, e))?;
    let mapping = engine.map();
    let stats = engine.stats();
    run.report.pass(
        1,
        NAMES[0],
        format!(
            "{}: {written} source statements, {} elements mapped, {} stereotypes discarded; explicit={} inferred={} ratio={}",
            opts.fixture.model,
            mapping.mapped_elements,
            mapping.discarded.len(),
            stats.explicit,
            stats.inferred,
            stats.rounded_ratio().map_or("n/a".to_string(), |r| format!("{r:.2}")),
        ),
    );

    let server = defii_service::spawn(engine.clone(), opts.bind).map_err(|e| run.fail(2, format!("cannot start service: {e}"), true))?;
    let endpoint = server.url();

    // 2. Direct interface: the seeded-vulnerability query.
    let matches = client::find_seeded_vulnerability(&endpoint, opts.seed_version, opts.seed_patch)
        .map_err(|e| run.client_err(2, e))?;
    if matches.len() != 1 {
        return Err(run.fail(
            2,
            format!(
                "expected exactly 1 match for version {} patch {}, found {}",
                opts.seed_version,
                opts.seed_patch,
                matches.len()
            ),
            false,
        ));
    }
    let hit = &matches[0];
    run.report.pass(2, NAMES[1], format!("found <{}> version {} patch {}", hit.browser, hit.version, hit.patch));

    // 3. The analysis tool instantiates the model and pulls its view.
    let individual = client::create_individual(&endpoint, &opts.model).map_err(|e| run.client_err(3, e))?;
    run.report.individual = Some(individual.clone());
    let pulled = client::get_view(&endpoint, &opts.model, &individual).map_err(|e| run.client_err(3, e))?;
    let before = json_view_values(&pulled, &opts.model).map_err(|e| run.fail(3, e, false))?;
    run.report.pass(
        3,
        NAMES[2],
        format!(
            "POST {} -> {}; GET returned {} ports, {} values",
            opts.model,
            client::individual_id(&individual),
            before.len(),
            before.values().map(Vec::len).sum::<usize>()
        ),
    );

    // 4. Analyze, PUT the results, and confirm they reached the source data.
    let outcome = client::run_analysis_client(&endpoint, &opts.model, &individual, opts.strategy)
        .map_err(|e| run.client_err(4, e))?;
    let score = outcome.result.base_score;
    run.report.score = Some(score);
    run.report.vector = Some(outcome.result.vector_string.clone());
    let target = engine
        .read()
        .registry
        .get(&opts.model)
        .and_then(|spec| spec.port("score"))
        .and_then(|p| p.bindings.first().cloned());
    let pushed = match &target {
        Some(b) => {
            let doc = engine.export_document(&opts.fixture.model).map_err(|e| run.engine_err(4, e))?;
            let found = source_slot(&doc, &b.instance, &b.property);
            if found.as_deref().and_then(|v| v.parse::<f64>().ok()) != Some(score) {
                return Err(run.fail(
                    4,
                    format!("source slot {}.{} holds {found:?}, expected {score}", b.instance, b.property),
                    false,
                ));
            }
            format!("source slot '{}.{}' = {score}", b.instance, b.property)
        }
        None => "score port has no source binding".to_string(),
    };
    run.report.pass(
        4,
        NAMES[3],
        format!("{} score {score} vector {}; PUT accepted; {pushed}", opts.strategy, outcome.result.vector_string),
    );

    // 5. A second consumer reads the same endpoint from its own thread.
    let (ep, model, ind) = (endpoint.clone(), opts.model.clone(), individual.clone());
    let dashboard = std::thread::spawn(move || -> Result<(String, String), ClientError> {
        Ok((client::get_view(&ep, &model, &ind)?, client::get_view_csv(&ep, &model, &ind)?))
    })
    .join()
    .map_err(|_| run.fail(5, "dashboard thread panicked".into(), true))?;
    let (dashboard_view, dashboard_csv) = dashboard.map_err(|e| run.client_err(5, e))?;
    if dashboard_view != outcome.final_view {
        return Err(run.fail(5, "dashboard JSON differs from the analysis client's view".into(), false));
    }
    let json_values = json_view_values(&dashboard_view, &opts.model).map_err(|e| run.fail(5, e, false))?;
    let doc: Value = serde_json::from_str(&dashboard_view).unwrap_or(Value::Null);
    let many: Vec<&str> = doc
        .get(&opts.model)
        .and_then(Value::as_object)
        .map(|m| m.iter().filter(|(_, v)| v.is_array()).map(|(k, _)| k.as_str()).collect())
        .unwrap_or_default();
    let csv_values = csv_view_values(&dashboard_csv, &many).map_err(|e| run.fail(5, e, false))?;
    let multiset = |m: &BTreeMap<String, Vec<String>>| {
        let mut all: Vec<String> = m.values().flatten().cloned().collect();
        all.sort();
        all
    };
    if json_values != csv_values || multiset(&json_values) != multiset(&csv_values) {
        return Err(run.fail(5, "CSV export disagrees with the JSON view".into(), false));
    }
    run.report.pass(
        5,
        NAMES[4],
        format!(
            "dashboard JSON identical to analysis view ({} bytes); CSV export carries the same {} values",
            dashboard_view.len(),
            multiset(&csv_values).len()
        ),
    );

    server.stop().map_err(|e| run.fail(5, format!("service shutdown: {e}"), true))?;
    Ok(ThreadOutcome { report: run.report, engine, analysis_view: outcome.final_view, dashboard_view, dashboard_csv })
}
