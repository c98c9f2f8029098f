pub mod graph;
pub mod rdf_io;
pub mod term;
pub mod vocab;

pub use graph::{GraphError, IndexKind, Provenance, Repository, RepositoryStats, StatementRecord};
pub use rdf_io::{parse_ntriples, parse_turtle, serialize_ntriples, ParseDiagnostic, PrefixMap};
pub use term::{Iri, Literal, Term, TermError, Triple};
pub mod ontology;
pub mod reasoner;
pub mod sparql;
pub mod mapping;
pub mod specified_model;
pub mod engine;
pub mod fixtures;

pub use engine::{Engine, EngineError, EngineSettings};
