//! Argument parsing and command dispatch.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use defii_analysis::client::{self, ClientError};
use defii_analysis::Strategy;
use defii_core::engine::parse_ontologies;
use defii_core::mapping::ModelDocument;
use defii_core::sparql::to_json_results;
use defii_core::specified_model::{concretize_csv, concretize_json};
use defii_core::{Engine, EngineError};
use thiserror::Error;

use crate::config::{parse_reasoning, ConfigError, EngineConfig};
use crate::thread::{run_thread, ThreadOptions};

#[derive(Debug, Parser)]
#[command(name = "defii", version, about = "Ontology-aligned model integration and digital-thread driver")]
pub struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory holding the repository snapshot between commands.
    #[arg(long, global = true, value_name = "DIR", default_value = ".defii")]
    pub state: PathBuf,
    #[arg(long, global = true, value_name = "IRI")]
    pub base_iri: Option<String>,
    /// rdfs-plus or off.
    #[arg(long, global = true, value_name = "MODE")]
    pub reasoning: Option<String>,
    /// Ontology file (Turtle); repeatable. Replaces configured ontologies.
    #[arg(long = "ontology", global = true, value_name = "FILE")]
    pub ontology: Vec<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    WorstCase,
    MaxScore,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::WorstCase => Strategy::WorstCase,
            StrategyArg::MaxScore => Strategy::MaxScore,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a model document and load it into the source graph.
    Ingest { path: PathBuf },
    /// Apply the mapping rules and materialize.
    Map,
    /// Run a SPARQL query file over the mapped graph.
    Query { path: PathBuf },
    /// Explicit, inferred and total statement counts of the mapped graph.
    Stats,
    /// Concretize a model view, or with --document regenerate a model document.
    Export {
        #[arg(long)]
        model: String,
        #[arg(long)]
        individual: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        /// Write the regenerated tool document for --model instead of a view.
        #[arg(long, conflicts_with = "individual")]
        document: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Serve the REST API until interrupted.
    Serve {
        #[arg(long)]
        bind: Option<String>,
        #[arg(long)]
        port: Option<u16>,
    },
    /// Run the CVSS analysis client against a running service.
    Analyze {
        #[arg(long)]
        endpoint: String,
        #[arg(long, default_value = "CVSS_Model")]
        model: String,
        #[arg(long)]
        individual: String,
        #[arg(long, value_enum, default_value = "worst-case")]
        strategy: StrategyArg,
    },
    /// Digital-thread demonstration.
    Thread {
        #[command(subcommand)]
        action: ThreadCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ThreadCommand {
    /// Run all five steps against a freshly built repository.
    Run {
        #[arg(long, default_value = "100")]
        seed_version: String,
        #[arg(long, default_value = "104")]
        seed_patch: String,
        /// Model document to map (defaults to the bundled cyber system).
        #[arg(long, value_name = "FILE")]
        fixture: Option<PathBuf>,
        #[arg(long, default_value = "CVSS_Model")]
        model: String,
        #[arg(long, value_enum, default_value = "worst-case")]
        strategy: StrategyArg,
        /// Also write the report as JSON.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        match e {
            ClientError::Transport { .. } | ClientError::Status { status: 500.., .. } => CliError::Internal(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn io_err(what: &Path, e: std::io::Error) -> CliError {
    CliError::Internal(format!("{}: {e}", what.display()))
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

/// File configuration overlaid with command-line flags.
pub fn resolve_config(cli: &Cli) -> Result<EngineConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => EngineConfig::from_file(path)?,
        None => EngineConfig::default(),
    };
    if !cli.ontology.is_empty() {
        config.ontology = cli.ontology.clone();
    }
    if let Some(b) = &cli.base_iri {
        config.base_iri = b.clone();
    }
    if let Some(r) = &cli.reasoning {
        config.reasoning = parse_reasoning(r)?;
    }
    if let Command::Serve { bind, port } = &cli.command {
        if let Some(b) = bind {
            config.set("bind", b, Path::new("."))?;
        }
        if let Some(p) = port {
            config.port = *p;
        }
    }
    if let Command::Thread { action: ThreadCommand::Run { fixture: Some(f), .. } } = &cli.command {
        config.fixture = Some(f.clone());
    }
    config.validate()?;
    Ok(config)
}

fn ontology_texts(config: &EngineConfig) -> Result<Vec<(String, String)>, CliError> {
    if config.ontology.is_empty() {
        return Ok(defii_core::fixtures::ONTOLOGIES.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect());
    }
    config
        .ontology
        .iter()
        .map(|p| Ok((p.display().to_string(), read_input(p)?)))
        .collect()
}

fn has_snapshot(dir: &Path) -> bool {
    fs::read_dir(dir)
        .map(|entries| entries.filter_map(Result::ok).any(|e| e.path().extension().is_some_and(|x| x == "nt")))
        .unwrap_or(false)
}

pub fn open_engine(config: &EngineConfig, state: &Path) -> Result<Engine, CliError> {
    let texts = ontology_texts(config)?;
    let ontologies = parse_ontologies(texts.iter().map(|(n, t)| (n.as_str(), t.as_str())))?;
    let engine = if has_snapshot(state) {
        Engine::load(state, ontologies, config.settings())?
    } else {
        Engine::new(ontologies, config.settings())?
    };
    Ok(engine)
}

fn emit(text: &str, out: Option<&Path>) -> Result<String, CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| io_err(path, e))?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text.to_string()),
    }
}

/// Runs one command; returns the text for stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let config = resolve_config(cli)?;
    match &cli.command {
        Command::Ingest { path } => {
            let doc = ModelDocument::from_json(&read_input(path)?).map_err(EngineError::from)?;
            let engine = open_engine(&config, &cli.state)?;
            let written = engine.ingest(&doc)?;
            engine.save(&cli.state)?;
            Ok(format!("ingested {}: {written} source statements\n", doc.model))
        }
        Command::Map => {
            let engine = open_engine(&config, &cli.state)?;
            let report = engine.map();
            engine.save(&cli.state)?;
            let mut out = format!(
                "mapped {} elements, {} statements added, {} back-links\n",
                report.mapped_elements, report.triples_added, report.back_links
            );
            for (element, stereotype) in &report.discarded {
                out.push_str(&format!("discarded stereotype {stereotype} on {element}\n"));
            }
            for (element, slot) in &report.discarded_slots {
                out.push_str(&format!("discarded slot {slot} on {element}\n"));
            }
            Ok(out)
        }
        Command::Query { path } => {
            let text = read_input(path)?;
            let engine = open_engine(&config, &cli.state)?;
            let table = engine.query(&text)?;
            let mut out = serde_json::to_string_pretty(&to_json_results(&table)).expect("results serialize");
            out.push('\n');
            Ok(out)
        }
        Command::Stats => {
            let s = open_engine(&config, &cli.state)?.stats();
            let ratio = s.rounded_ratio().map_or("null".to_string(), |r| format!("{r:.2}"));
            Ok(format!("explicit={} inferred={} total={} expansionRatio={ratio}\n", s.explicit, s.inferred, s.total))
        }
        Command::Export { model, individual, format, document, out } => {
            let engine = open_engine(&config, &cli.state)?;
            let text = match (individual, document) {
                (Some(id), _) => {
                    let view = engine.resolve(model, client::individual_id(id))?;
                    match format {
                        ExportFormat::Json => concretize_json(&view),
                        ExportFormat::Csv => concretize_csv(&view),
                    }
                }
                (None, true) => {
                    if *format == ExportFormat::Csv {
                        return Err(CliError::Validation("model documents export as JSON only".into()));
                    }
                    let mut t = engine.export_document(model)?.to_json_pretty();
                    t.push('\n');
                    t
                }
                (None, false) => return Err(CliError::Validation("export needs --individual or --document".into())),
            };
            emit(&text, out.as_deref())
        }
        Command::Serve { .. } => {
            let engine = Arc::new(open_engine(&config, &cli.state)?);
            defii_service::serve_until_ctrl_c(engine.clone(), config.socket_addr(), |addr| {
                println!("listening on http://{addr}");
            })
            .map_err(|e| CliError::Internal(format!("serve {}: {e}", config.socket_addr())))?;
            engine.save(&cli.state)?;
            Ok("service stopped\n".into())
        }
        Command::Analyze { endpoint, model, individual, strategy } => {
            let outcome = client::run_analysis_client(endpoint, model, individual, (*strategy).into())?;
            Ok(format!("score={} vector={}\n", outcome.result.base_score, outcome.result.vector_string))
        }
        Command::Thread { action: ThreadCommand::Run { seed_version, seed_patch, model, strategy, report, .. } } => {
            let fixture = match &config.fixture {
                Some(p) => ModelDocument::from_json(&read_input(p)?).map_err(EngineError::from)?,
                None => defii_core::fixtures::cyber_system(),
            };
            let opts = ThreadOptions {
                settings: config.settings(),
                ontologies: ontology_texts(&config)?,
                fixture,
                model: model.clone(),
                seed_version: client::parse_seed(seed_version)?,
                seed_patch: client::parse_seed(seed_patch)?,
                strategy: (*strategy).into(),
                bind: std::net::SocketAddr::new(config.bind, 0),
            };
            let (result, rendered) = match run_thread(&opts) {
                Ok(outcome) => {
                    let text = outcome.report.render();
                    (Ok(outcome.report), text)
                }
                Err(e) => {
                    let text = e.report.render();
                    (Err(e), text)
                }
            };
            if let Some(path) = report {
                let r = match &result {
                    Ok(r) => r,
                    Err(e) => &e.report,
                };
                let json = serde_json::to_string_pretty(r).expect("reports serialize");
                fs::write(path, json + "\n").map_err(|e| io_err(path, e))?;
            }
            match result {
                Ok(_) => Ok(rendered),
                Err(e) if e.internal => Err(CliError::Internal(format!("{rendered}{e}"))),
                Err(e) => Err(CliError::Validation(format!("{rendered}{e}"))),
            }
        }
    }
}
