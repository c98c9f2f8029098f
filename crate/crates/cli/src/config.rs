//! Flat `key = value` configuration.

use std::collections::BTreeMap;
use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use defii_core::engine::DEFAULT_BASE_IRI;
use defii_core::{EngineSettings, Iri};
use thiserror::Error;

pub const KEYS: &[&str] = &["ontology", "base_iri", "reasoning", "bind", "port", "fixture"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{file}:{line}: expected key = value")]
    Syntax { file: String, line: usize },
    #[error("{file}:{line}: unknown key '{key}' (expected one of {keys})", keys = KEYS.join(", "))]
    UnknownKey { file: String, line: usize, key: String },
    #[error("invalid value for {key}: '{value}' ({reason})")]
    Value { key: &'static str, value: String, reason: &'static str },
    #[error("{key} file not found: {path}")]
    Missing { key: &'static str, path: String },
    #[error("cannot read config {file}: {message}")]
    Read { file: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Empty means the bundled ontologies.
    pub ontology: Vec<PathBuf>,
    pub base_iri: String,
    pub reasoning: bool,
    pub bind: IpAddr,
    pub port: u16,
    /// `None` means the bundled cyber-system model.
    pub fixture: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            ontology: Vec::new(),
            base_iri: DEFAULT_BASE_IRI.to_string(),
            reasoning: true,
            bind: IpAddr::from([127, 0, 0, 1]),
            port: 8642,
            fixture: None,
        }
    }
}

/// Raw key/value pairs; later lines win, except `ontology`, which accumulates.
pub fn parse_pairs(text: &str, file: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { file: file.to_string(), line: i + 1 })?;
        let key = k.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { file: file.to_string(), line: i + 1, key: key.to_string() });
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_reasoning(value: &str) -> Result<bool, ConfigError> {
    match value {
        "rdfs-plus" | "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(ConfigError::Value { key: "reasoning", value: value.to_string(), reason: "expected rdfs-plus or off" }),
    }
}

impl EngineConfig {
    /// Applies one setting. Relative paths resolve against `dir`.
    pub fn set(&mut self, key: &str, value: &str, dir: &Path) -> Result<(), ConfigError> {
        match key {
            "ontology" => self.ontology.extend(
                value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|p| dir.join(p)),
            ),
            "base_iri" => self.base_iri = value.to_string(),
            "reasoning" => self.reasoning = parse_reasoning(value)?,
            "bind" => {
                self.bind = value.parse().map_err(|_| ConfigError::Value {
                    key: "bind",
                    value: value.to_string(),
                    reason: "expected an IP address",
                })?
            }
            "port" => {
                self.port = value.parse().map_err(|_| ConfigError::Value {
                    key: "port",
                    value: value.to_string(),
                    reason: "expected 0-65535",
                })?
            }
            "fixture" => self.fixture = Some(dir.join(value)),
            _ => unreachable!("keys are checked while parsing"),
        }
        Ok(())
    }

    pub fn from_text(text: &str, file: &str, dir: &Path) -> Result<Self, ConfigError> {
        let mut config = EngineConfig::default();
        for (k, v) in parse_pairs(text, file)? {
            config.set(&k, &v, dir)?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let file = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read { file: file.clone(), message: e.to_string() })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::from_text(&text, &file, dir)
    }

    /// Referenced files exist and the base IRI is absolute.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for p in &self.ontology {
            if !p.is_file() {
                return Err(ConfigError::Missing { key: "ontology", path: p.display().to_string() });
            }
        }
        if let Some(p) = &self.fixture {
            if !p.is_file() {
                return Err(ConfigError::Missing { key: "fixture", path: p.display().to_string() });
            }
        }
        if Iri::new(self.base_iri.clone()).is_err() || !self.base_iri.contains("://") {
            return Err(ConfigError::Value { key: "base_iri", value: self.base_iri.clone(), reason: "expected an absolute IRI" });
        }
        Ok(())
    }

    pub fn settings(&self) -> EngineSettings {
        EngineSettings { base_iri: self.base_iri.clone(), reasoning: self.reasoning }
    }

    pub fn socket_addr(&self) -> SocketAddr {
        SocketAddr::new(self.bind, self.port)
    }

    pub fn as_pairs(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("base_iri", self.base_iri.clone());
        m.insert("reasoning", if self.reasoning { "rdfs-plus" } else { "off" }.to_string());
        m.insert("bind", self.bind.to_string());
        m.insert("port", self.port.to_string());
        m
    }
}
