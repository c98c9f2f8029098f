//! Shared engine state: one repository, one ontology catalog, one MISD
//! registry. Every write re-materializes before the lock is released.

use std::path::Path;
use std::sync::{RwLock, RwLockReadGuard};

use serde_json::{Map, Value};
use thiserror::Error;

use crate::graph::{GraphError, Repository, RepositoryStats};
use crate::mapping::{self, mapped_graph, MappingError, MappingReport, ModelDocument};
use crate::ontology::{OntologyCatalog, OntologyError};
use crate::rdf_io::{parse_turtle, ParseDiagnostic};
use crate::reasoner;
use crate::sparql::{self, EvalError, SolutionTable};
use crate::specified_model::{MisdRegistry, MisdSpec, ModelView, SpecError};
use crate::term::{Iri, Triple};
use crate::graph::Provenance;

pub const DEFAULT_BASE_IRI: &str = "http://defii.org/data";

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("ontology {name}: {diagnostic}")]
    OntologySyntax { name: String, diagnostic: ParseDiagnostic },
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error("query parse error at {0}")]
    Query(ParseDiagnostic),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("base IRI '{0}' is not absolute")]
    BaseIri(String),
}

impl EngineError {
    /// Errors caused by bad input rather than by the engine itself.
    pub fn is_validation(&self) -> bool {
        !matches!(self, EngineError::Graph(GraphError::Io(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineSettings {
    pub base_iri: String,
    pub reasoning: bool,
}

impl Default for EngineSettings {
    fn default() -> Self {
        EngineSettings { base_iri: DEFAULT_BASE_IRI.to_string(), reasoning: true }
    }
}

#[derive(Debug)]
pub struct State {
    pub repo: Repository,
    pub registry: MisdRegistry,
}

#[derive(Debug)]
pub struct Engine {
    settings: EngineSettings,
    catalog: OntologyCatalog,
    ontology: Vec<Triple>,
    state: RwLock<State>,
}

/// Parses named Turtle documents for [`Engine::new`].
pub fn parse_ontologies<'a>(
    documents: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<Vec<Vec<Triple>>, EngineError> {
    documents
        .into_iter()
        .map(|(name, text)| {
            parse_turtle(text)
                .map(|(triples, _)| triples)
                .map_err(|diagnostic| EngineError::OntologySyntax { name: name.to_string(), diagnostic })
        })
        .collect()
}

impl Engine {
    /// Loads the ontology documents into the catalog and, as explicit
    /// statements, into the mapped graph.
    pub fn new(ontologies: Vec<Vec<Triple>>, settings: EngineSettings) -> Result<Self, EngineError> {
        Self::with_repository(ontologies, settings, Repository::new())
    }

    fn with_repository(
        ontologies: Vec<Vec<Triple>>,
        settings: EngineSettings,
        mut repo: Repository,
    ) -> Result<Self, EngineError> {
        if Iri::new(settings.base_iri.clone()).is_err() || settings.base_iri.ends_with('/') {
            return Err(EngineError::BaseIri(settings.base_iri));
        }
        let catalog = OntologyCatalog::load(ontologies.iter().map(Vec::as_slice))?;
        let ontology: Vec<Triple> = ontologies.into_iter().flatten().collect();
        let g = mapped_graph();
        repo.ensure_graph(&g);
        for t in &ontology {
            repo.insert(&g, t.clone(), Provenance::Explicit);
        }
        let mut registry = MisdRegistry::new();
        for model in mapping::source_models(&repo) {
            let doc = mapping::export_document(&repo, &settings.base_iri, &model)?;
            register_all(&mut registry, &mut repo, &settings.base_iri, &doc)?;
        }
        let engine = Engine { settings, catalog, ontology, state: RwLock::new(State { repo, registry }) };
        {
            let mut state = engine.write();
            engine.reason(&mut state.repo);
        }
        Ok(engine)
    }

    /// Restores a snapshot written by [`Engine::save`].
    pub fn load(dir: &Path, ontologies: Vec<Vec<Triple>>, settings: EngineSettings) -> Result<Self, EngineError> {
        let repo = Repository::load_snapshot(dir)?;
        Self::with_repository(ontologies, settings, repo)
    }

    pub fn save(&self, dir: &Path) -> Result<(), EngineError> {
        self.read().repo.save_snapshot(dir)?;
        Ok(())
    }

    pub fn settings(&self) -> &EngineSettings {
        &self.settings
    }

    pub fn base(&self) -> &str {
        &self.settings.base_iri
    }

    pub fn catalog(&self) -> &OntologyCatalog {
        &self.catalog
    }

    pub fn ontology_triples(&self) -> &[Triple] {
        &self.ontology
    }

    pub fn read(&self) -> RwLockReadGuard<'_, State> {
        self.state.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, State> {
        self.state.write().unwrap_or_else(|e| e.into_inner())
    }

    fn reason(&self, repo: &mut Repository) {
        let g = mapped_graph();
        if self.settings.reasoning {
            reasoner::rematerialize(repo, &g, &self.catalog);
        } else {
            repo.clear_inferred(&g);
        }
    }

    /// Validates the document and its MISDs, then replaces the model's source
    /// statements. Returns the number of source statements written.
    pub fn ingest(&self, doc: &ModelDocument) -> Result<usize, EngineError> {
        let specs = doc
            .misds
            .iter()
            .map(MisdSpec::from_value)
            .collect::<Result<Vec<_>, _>>()?;
        let mut state = self.write();
        for spec in &specs {
            spec.validate()?;
            if state.registry.get(&spec.model_name).is_some_and(|s| s != spec) {
                return Err(SpecError::DuplicateModel(spec.model_name.clone()).into());
            }
        }
        let State { repo, registry } = &mut *state;
        let added = mapping::ingest(repo, self.base(), doc)?;
        register_all(registry, repo, self.base(), doc)?;
        self.reason(repo);
        Ok(added)
    }

    pub fn map(&self) -> MappingReport {
        let mut state = self.write();
        let report = mapping::run_mapping(&mut state.repo, self.base(), &self.catalog);
        self.reason(&mut state.repo);
        report
    }

    pub fn query(&self, text: &str) -> Result<SolutionTable, EngineError> {
        let ast = sparql::parse_query(text).map_err(EngineError::Query)?;
        Ok(sparql::evaluate(&self.read().repo, &mapped_graph(), &ast)?)
    }

    pub fn stats(&self) -> RepositoryStats {
        self.read().repo.stats(&mapped_graph())
    }

    pub fn source_len(&self) -> usize {
        self.read().repo.len(&mapping::source_graph())
    }

    pub fn instantiate(&self, model: &str) -> Result<Iri, EngineError> {
        let mut state = self.write();
        let State { repo, registry } = &mut *state;
        let individual = registry.instantiate(repo, self.base(), model)?;
        self.reason(repo);
        Ok(individual)
    }

    pub fn resolve(&self, model: &str, id: &str) -> Result<ModelView, EngineError> {
        let state = self.read();
        let individual = state.registry.find_individual(&state.repo, self.base(), model, id)?;
        Ok(state.registry.resolve(&state.repo, &self.catalog, self.base(), model, &individual)?)
    }

    /// Applies out-port updates, pushes bound ports back to the source graph,
    /// re-materializes and returns the refreshed view, all under one lock.
    pub fn write_back(&self, model: &str, id: &str, updates: &Map<String, Value>) -> Result<ModelView, EngineError> {
        let mut state = self.write();
        let State { repo, registry } = &mut *state;
        let individual = registry.find_individual(repo, self.base(), model, id)?;
        registry.write_back(repo, &self.catalog, self.base(), model, &individual, updates)?;
        self.reason(repo);
        Ok(registry.resolve(repo, &self.catalog, self.base(), model, &individual)?)
    }

    pub fn export_document(&self, model: &str) -> Result<ModelDocument, EngineError> {
        Ok(mapping::export_document(&self.read().repo, self.base(), model)?)
    }

    pub fn model_names(&self) -> Vec<String> {
        mapping::source_models(&self.read().repo)
    }
}

fn register_all(
    registry: &mut MisdRegistry,
    repo: &mut Repository,
    base: &str,
    doc: &ModelDocument,
) -> Result<(), EngineError> {
    for value in &doc.misds {
        let spec = MisdSpec::from_value(value)?;
        if registry.get(&spec.model_name) == Some(&spec) {
            continue;
        }
        registry.register(repo, base, spec)?;
    }
    Ok(())
}
