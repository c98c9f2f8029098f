//! Model Interface Specification Documents (MISDs): typed ports bound to
//! mapped individuals, resolved into tool-agnostic model views.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::graph::{Provenance, Repository};
use crate::mapping::{self, mapped_graph, MappingError};
use crate::ontology::OntologyCatalog;
use crate::term::{Iri, Literal, Term, Triple};
use crate::vocab::{defii, rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct MisdSpec {
    pub model_name: String,
    pub ports: Vec<Port>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Port {
    pub name: String,
    pub direction: Direction,
    pub datatype: Datatype,
    pub multiplicity: Multiplicity,
    #[serde(default)]
    pub bindings: Vec<BindingPath>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Decimal,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    One,
    Many,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingPath {
    pub instance: String,
    pub property: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PortValue {
    One(Term),
    Many(Vec<Term>),
}

impl PortValue {
    pub fn terms(&self) -> &[Term] {
        match self {
            PortValue::One(t) => std::slice::from_ref(t),
            PortValue::Many(ts) => ts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelView {
    pub individual: Iri,
    pub model_name: String,
    /// Present ports in declaration order. Out ports without a value are absent.
    pub values: Vec<(String, PortValue)>,
    /// Every declared port name, in declaration order.
    pub port_names: Vec<String>,
}

impl ModelView {
    pub fn get(&self, port: &str) -> Option<&PortValue> {
        self.values.iter().find(|(n, _)| n == port).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("invalid MISD document: {0}")]
    Json(String),
    #[error("invalid MISD '{model}': port '{port}': {message}")]
    InvalidPort { model: String, port: String, message: String },
    #[error("invalid MISD: {0}")]
    Invalid(String),
    #[error("model '{0}' is already registered")]
    DuplicateModel(String),
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("unknown individual '{0}'")]
    UnknownIndividual(String),
    #[error("unknown port '{0}'")]
    UnknownPort(String),
    #[error("read-only port '{0}'")]
    ReadOnlyPort(String),
    #[error("type mismatch for port '{port}': expected {expected}, found {found}")]
    TypeMismatch { port: String, expected: String, found: String },
    #[error("unresolvable binding for port '{port}': instance '{instance}', property '{property}'")]
    Unresolvable { port: String, instance: String, property: String },
    #[error("no value for port '{port}': instance '{instance}', property '{property}'")]
    MissingValue { port: String, instance: String, property: String },
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

impl MisdSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))
    }

    pub fn from_value(value: &Value) -> Result<Self, SpecError> {
        Self::deserialize(value).map_err(|e| SpecError::Json(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.model_name.is_empty()
            || !self.model_name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(SpecError::Invalid(format!("model name '{}' is not a valid identifier", self.model_name)));
        }
        let mut names = HashSet::new();
        for port in &self.ports {
            let bad = |message: &str| SpecError::InvalidPort {
                model: self.model_name.clone(),
                port: port.name.clone(),
                message: message.to_string(),
            };
            if port.name.is_empty() || port.name.contains(|c: char| c.is_whitespace() || c == '#' || c == '/') {
                return Err(bad("port names must be non-empty and free of whitespace, '#' and '/'"));
            }
            if !names.insert(port.name.as_str()) {
                return Err(bad("duplicate port name"));
            }
            let n = port.bindings.len();
            match port.direction {
                Direction::In if n == 0 => return Err(bad("an in port needs at least one binding")),
                Direction::In if port.multiplicity == Multiplicity::One && n != 1 => {
                    return Err(bad("multiplicity one requires exactly one binding"))
                }
                Direction::Out if n > 1 => return Err(bad("an out port has at most one binding")),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }
}

pub fn spec_individual(base: &str, model: &str) -> Iri {
    Iri::new_unchecked(format!("{base}/models/{model}"))
}

/// Predicate under which an out-port value is stored on a model individual.
pub fn port_iri(base: &str, model: &str, port: &str) -> Iri {
    Iri::new_unchecked(format!("{base}/models/{model}#{port}"))
}

pub fn individual_iri(base: &str, model: &str, id: &str) -> Iri {
    Iri::new_unchecked(format!("{base}/models/{model}/{id}"))
}

/// Opaque id of a model individual: the last IRI segment.
pub fn individual_id(individual: &Iri) -> &str {
    individual.as_str().rsplit('/').next().unwrap_or_default()
}

#[derive(Debug, Clone, Default)]
pub struct MisdRegistry {
    specs: BTreeMap<String, MisdSpec>,
}

impl MisdRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, model: &str) -> Option<&MisdSpec> {
        self.specs.get(model)
    }

    pub fn model_names(&self) -> impl Iterator<Item = &str> {
        self.specs.keys().map(String::as_str)
    }

    /// Stores the spec and writes its model-definition individual to the
    /// mapped graph.
    pub fn register(&mut self, repo: &mut Repository, base: &str, spec: MisdSpec) -> Result<String, SpecError> {
        spec.validate()?;
        if self.specs.contains_key(&spec.model_name) {
            return Err(SpecError::DuplicateModel(spec.model_name));
        }
        let g = mapped_graph();
        let model = spec_individual(base, &spec.model_name);
        let iri = |s: &str| Iri::new_unchecked(s);
        repo.insert(
            &g,
            Triple::from_iris(&model, &iri(rdf::TYPE), Term::iri_unchecked(defii::MODEL_SPECIFICATION)),
            Provenance::Explicit,
        );
        for port in &spec.ports {
            let p = port_iri(base, &spec.model_name, &port.name);
            let direction = match port.direction {
                Direction::In => "in",
                Direction::Out => "out",
            };
            repo.insert(&g, Triple::from_iris(&model, &iri(defii::HAS_PORT), Term::Iri(p.clone())), Provenance::Explicit);
            repo.insert(&g, Triple::from_iris(&p, &iri(defii::PORT_NAME), Term::string(port.name.clone())), Provenance::Explicit);
            repo.insert(&g, Triple::from_iris(&p, &iri(defii::PORT_DIRECTION), Term::string(direction)), Provenance::Explicit);
        }
        let name = spec.model_name.clone();
        self.specs.insert(name.clone(), spec);
        Ok(name)
    }

    pub fn instantiate(&self, repo: &mut Repository, base: &str, model: &str) -> Result<Iri, SpecError> {
        if !self.specs.contains_key(model) {
            return Err(SpecError::UnknownModel(model.to_string()));
        }
        let individual = individual_iri(base, model, &format!("{}_entity", uuid::Uuid::new_v4()));
        let g = mapped_graph();
        repo.insert(
            &g,
            Triple::from_iris(&individual, &Iri::new_unchecked(rdf::TYPE), Term::iri_unchecked(defii::MODEL_INSTANCE)),
            Provenance::Explicit,
        );
        repo.insert(
            &g,
            Triple::from_iris(
                &individual,
                &Iri::new_unchecked(defii::INSTANCE_OF),
                Term::Iri(spec_individual(base, model)),
            ),
            Provenance::Explicit,
        );
        Ok(individual)
    }

    /// Looks up an individual of `model` by its opaque id.
    pub fn find_individual(&self, repo: &Repository, base: &str, model: &str, id: &str) -> Result<Iri, SpecError> {
        if !self.specs.contains_key(model) {
            return Err(SpecError::UnknownModel(model.to_string()));
        }
        let individual = individual_iri(base, model, id);
        let link = Triple::from_iris(
            &individual,
            &Iri::new_unchecked(defii::INSTANCE_OF),
            Term::Iri(spec_individual(base, model)),
        );
        if id.contains('/') || !repo.contains(&mapped_graph(), &link) {
            return Err(SpecError::UnknownIndividual(id.to_string()));
        }
        Ok(individual)
    }

    pub fn resolve(
        &self,
        repo: &Repository,
        catalog: &OntologyCatalog,
        base: &str,
        model: &str,
        individual: &Iri,
    ) -> Result<ModelView, SpecError> {
        let spec = self.get(model).ok_or_else(|| SpecError::UnknownModel(model.to_string()))?;
        self.find_individual(repo, base, model, individual_id(individual))?;
        let g = mapped_graph();
        let mut values = Vec::new();
        for port in &spec.ports {
            let value = match port.direction {
                Direction::In => {
                    let mut terms = Vec::with_capacity(port.bindings.len());
                    for binding in &port.bindings {
                        let (target, property) = resolve_binding(repo, catalog, port, binding)?;
                        let (target, property) = (Term::Iri(target), Term::Iri(property));
                        let found = repo.objects(&g, &target, &property);
                        let term = found.into_iter().min().ok_or_else(|| SpecError::MissingValue {
                            port: port.name.clone(),
                            instance: binding.instance.clone(),
                            property: binding.property.clone(),
                        })?;
                        terms.push(term.clone());
                    }
                    Some(terms)
                }
                Direction::Out => {
                    let p = Term::Iri(port_iri(base, model, &port.name));
                    let mut found: Vec<Term> =
                        repo.objects(&g, &Term::Iri(individual.clone()), &p).into_iter().cloned().collect();
                    found.sort();
                    (!found.is_empty()).then_some(found)
                }
            };
            if let Some(mut terms) = value {
                let v = match port.multiplicity {
                    Multiplicity::Many => PortValue::Many(terms),
                    Multiplicity::One => PortValue::One(terms.swap_remove(0)),
                };
                values.push((port.name.clone(), v));
            }
        }
        Ok(ModelView {
            individual: individual.clone(),
            model_name: model.to_string(),
            values,
            port_names: spec.ports.iter().map(|p| p.name.clone()).collect(),
        })
    }

    /// Replaces out-port values on the individual and pushes bound ports back
    /// to the source graph. All updates are checked before anything is
    /// written. Returns the number of source slots changed.
    pub fn write_back(
        &self,
        repo: &mut Repository,
        catalog: &OntologyCatalog,
        base: &str,
        model: &str,
        individual: &Iri,
        updates: &Map<String, Value>,
    ) -> Result<usize, SpecError> {
        let spec = self.get(model).ok_or_else(|| SpecError::UnknownModel(model.to_string()))?;
        self.find_individual(repo, base, model, individual_id(individual))?;
        // (port, new values, source target and property when bound)
        type Planned<'a> = (&'a Port, Vec<Term>, Option<(Iri, Iri)>);
        let mut planned: Vec<Planned> = Vec::new();
        for port in &spec.ports {
            let Some(raw) = updates.get(&port.name) else { continue };
            if port.direction == Direction::In {
                return Err(SpecError::ReadOnlyPort(port.name.clone()));
            }
            let terms = match (port.multiplicity, raw) {
                (Multiplicity::Many, Value::Array(items)) => {
                    items.iter().map(|v| json_to_term(port, v)).collect::<Result<Vec<_>, _>>()?
                }
                (Multiplicity::Many, other) => return Err(mismatch(port, "an array", other)),
                (Multiplicity::One, v) => vec![json_to_term(port, v)?],
            };
            let target = match port.bindings.first() {
                Some(b) => Some(resolve_binding(repo, catalog, port, b)?),
                None => None,
            };
            if target.is_some() && terms.len() != 1 {
                return Err(mismatch(port, "a single value for a bound port", raw));
            }
            planned.push((port, terms, target));
        }
        if let Some(unknown) = updates.keys().find(|k| spec.port(k).is_none()) {
            return Err(SpecError::UnknownPort(unknown.clone()));
        }

        let g = mapped_graph();
        let subject = Term::Iri(individual.clone());
        let mut changed = 0;
        for (port, terms, target) in planned {
            let p = port_iri(base, model, &port.name);
            let pt = Term::Iri(p.clone());
            repo.remove_where(&g, |t, _| t.subject() == &subject && t.predicate() == &pt);
            for term in &terms {
                repo.insert(&g, Triple::from_iris(individual, &p, term.clone()), Provenance::Explicit);
            }
            if let Some((instance, property)) = target {
                changed += mapping::push_back(repo, &instance, &property, terms[0].clone())?;
            }
        }
        Ok(changed)
    }
}

fn resolve_binding(
    repo: &Repository,
    catalog: &OntologyCatalog,
    port: &Port,
    binding: &BindingPath,
) -> Result<(Iri, Iri), SpecError> {
    let unresolvable = || SpecError::Unresolvable {
        port: port.name.clone(),
        instance: binding.instance.clone(),
        property: binding.property.clone(),
    };
    let target = mapping::individual_for_name(repo, &binding.instance).ok_or_else(unresolvable)?;
    let property = catalog.property_for_name(&binding.property).ok_or_else(unresolvable)?;
    Ok((target, property.clone()))
}

fn mismatch(port: &Port, expected: &str, found: &Value) -> SpecError {
    SpecError::TypeMismatch {
        port: port.name.clone(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn json_to_term(port: &Port, value: &Value) -> Result<Term, SpecError> {
    match (port.datatype, value) {
        (Datatype::String, Value::String(s)) => Ok(Term::string(s.clone())),
        (Datatype::Integer, Value::Number(n)) if n.is_i64() => Ok(Term::integer(n.as_i64().unwrap_or_default())),
        (Datatype::Decimal, Value::Number(n)) => match n.as_f64() {
            Some(f) if f.is_finite() => Ok(Term::decimal(f)),
            _ => Err(mismatch(port, "a finite decimal", value)),
        },
        (Datatype::String, v) => Err(mismatch(port, "a string", v)),
        (Datatype::Integer, v) => Err(mismatch(port, "an integer", v)),
        (Datatype::Decimal, v) => Err(mismatch(port, "a decimal", v)),
    }
}

/// JSON rendering of a single term: numbers stay numbers, everything else is
/// its lexical form or IRI.
pub fn term_to_json(term: &Term) -> Value {
    match term {
        Term::Literal(lit) => literal_to_json(lit),
        Term::Iri(iri) => Value::String(iri.as_str().to_string()),
        Term::Blank(b) => Value::String(format!("_:{b}")),
    }
}

fn literal_to_json(lit: &Literal) -> Value {
    let dt = lit.datatype().as_str();
    if xsd::is_integer(dt) {
        if let Ok(n) = lit.lexical().parse::<i64>() {
            return Value::from(n);
        }
    } else if lit.is_numeric() {
        if let Some(n) = lit.lexical().parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
            return Value::Number(n);
        }
    } else if dt == xsd::BOOLEAN {
        return Value::Bool(lit.lexical() == "true" || lit.lexical() == "1");
    }
    Value::String(lit.lexical().to_string())
}

fn term_text(term: &Term) -> String {
    match term {
        Term::Literal(lit) => match literal_to_json(lit) {
            Value::String(s) => s,
            other => other.to_string(),
        },
        Term::Iri(iri) => iri.as_str().to_string(),
        Term::Blank(b) => format!("_:{b}"),
    }
}

pub fn view_to_json(view: &ModelView) -> Value {
    let mut ports = Map::new();
    for (name, value) in &view.values {
        let v = match value {
            PortValue::One(t) => term_to_json(t),
            PortValue::Many(ts) => Value::Array(ts.iter().map(term_to_json).collect()),
        };
        ports.insert(name.clone(), v);
    }
    let mut doc = Map::new();
    doc.insert("individual".into(), Value::String(view.individual.as_str().to_string()));
    doc.insert(view.model_name.clone(), Value::Object(ports));
    Value::Object(doc)
}

pub fn concretize_json(view: &ModelView) -> String {
    let mut text = serde_json::to_string_pretty(&view_to_json(view)).expect("views always serialize");
    text.push('\n');
    text
}

fn csv_field(text: &str, force_quotes: bool) -> String {
    if force_quotes || text.contains([',', '"', '\r', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// RFC 4180 text: a header row and one data row, CRLF line endings.
/// Many-valued cells are joined with `|` and always quoted.
pub fn concretize_csv(view: &ModelView) -> String {
    let mut header = vec![csv_field("individual", false)];
    let mut row = vec![csv_field(view.individual.as_str(), false)];
    for name in &view.port_names {
        header.push(csv_field(name, false));
        row.push(match view.get(name) {
            None => String::new(),
            Some(PortValue::One(t)) => csv_field(&term_text(t), false),
            Some(PortValue::Many(ts)) => {
                let joined: Vec<String> = ts.iter().map(term_text).collect();
                csv_field(&joined.join("|"), true)
            }
        });
    }
    format!("{}\r\n{}\r\n", header.join(","), row.join(","))
}

/// The flat list of scalar values carried by a view, as text, in port order.
pub fn view_values(view: &ModelView) -> Vec<String> {
    view.values.iter().flat_map(|(_, v)| v.terms().iter().map(term_text)).collect()
}
