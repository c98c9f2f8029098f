//! Model-exchange ingestion (`source` graph) and stereotype-driven mapping
//! into ontology-aligned statements (`mapped` graph).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Provenance, Repository};
use crate::ontology::OntologyCatalog;
use crate::sparql::{evaluate, parse_query};
use crate::term::{local_name, Iri, Literal, Term, Triple};
use crate::vocab::{cco, defii, graph, rdf, test, tool, xsd};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub tool: String,
    pub model: String,
    #[serde(default)]
    pub elements: Vec<ModelElement>,
    /// Specified-model interface documents carried along with the model.
    #[serde(default)]
    pub misds: Vec<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Block,
    InstanceSpecification,
    Enumeration,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Block => "Block",
            ElementKind::InstanceSpecification => "InstanceSpecification",
            ElementKind::Enumeration => "Enumeration",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Block, Self::InstanceSpecification, Self::Enumeration]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelElement {
    pub id: String,
    pub kind: ElementKind,
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stereotypes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub value_properties: Vec<ValueProperty>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slots: Vec<Slot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifier: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueProperty {
    pub name: String,
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slot {
    pub property: String,
    pub value: SlotValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SlotValue {
    Number(serde_json::Number),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MappingReport {
    pub mapped_elements: usize,
    /// `(element name, stereotype)` pairs with no matching ontology class.
    pub discarded: Vec<(String, String)>,
    /// `(element name, slot property)` pairs with no matching ontology term.
    pub discarded_slots: Vec<(String, String)>,
    pub triples_added: usize,
    pub back_links: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("invalid model document: {0}")]
    Json(String),
    #[error("invalid model document: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unmapped individual <{0}>")]
    UnmappedIndividual(String),
    #[error("no source slot for property <{property}> on <{individual}>")]
    NoSourceSlot { individual: String, property: String },
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("malformed source data: {0}")]
    Source(String),
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self, MappingError> {
        serde_json::from_str(text).map_err(|e| MappingError::Json(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }

    /// Every invariant violation in the document, in document order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !is_iri_segment(&self.model) {
            out.push(format!("model name '{}' must be a non-empty [A-Za-z0-9_.-] identifier", self.model));
        }
        let mut by_id: HashMap<&str, &ModelElement> = HashMap::new();
        for el in &self.elements {
            if !is_iri_segment(&el.id) {
                out.push(format!("element id '{}' must be a non-empty [A-Za-z0-9_.-] identifier", el.id));
            }
            if by_id.insert(el.id.as_str(), el).is_some() {
                out.push(format!("duplicate element id '{}'", el.id));
            }
        }
        let enums: HashSet<&str> = self
            .elements
            .iter()
            .filter(|e| e.kind == ElementKind::Enumeration)
            .map(|e| e.name.as_str())
            .collect();
        for el in &self.elements {
            let mut seen = HashSet::new();
            for vp in &el.value_properties {
                if !is_iri_segment(&vp.name) {
                    out.push(format!("value property '{}' on '{}' is not a valid identifier", vp.name, el.id));
                }
                if !seen.insert(vp.name.as_str()) {
                    out.push(format!("duplicate value property '{}' on '{}'", vp.name, el.id));
                }
                if !matches!(vp.type_name.as_str(), "Integer" | "Real" | "String") && !enums.contains(vp.type_name.as_str()) {
                    out.push(format!("value property '{}' on '{}' has unknown type '{}'", vp.name, el.id, vp.type_name));
                }
            }
            for part in &el.parts {
                match by_id.get(part.as_str()) {
                    None => out.push(format!("element '{}' has dangling part reference '{part}'", el.id)),
                    Some(p) if p.kind != ElementKind::Block => {
                        out.push(format!("part '{part}' of '{}' is not a Block", el.id))
                    }
                    _ => {}
                }
            }
            if el.kind != ElementKind::Block && (!el.parts.is_empty() || !el.value_properties.is_empty()) {
                out.push(format!("only Blocks may declare parts or value properties ('{}')", el.id));
            }
            if el.kind != ElementKind::InstanceSpecification && (el.classifier.is_some() || !el.slots.is_empty()) {
                out.push(format!("only instances may have a classifier or slots ('{}')", el.id));
            }
            if el.kind != ElementKind::InstanceSpecification {
                continue;
            }
            let Some(classifier_id) = &el.classifier else {
                out.push(format!("instance '{}' has no classifier", el.id));
                continue;
            };
            let Some(classifier) = by_id.get(classifier_id.as_str()).filter(|c| c.kind == ElementKind::Block) else {
                out.push(format!("instance '{}' has dangling classifier reference '{classifier_id}'", el.id));
                continue;
            };
            let declared = declared_properties(classifier, &by_id);
            let mut seen = HashSet::new();
            for slot in &el.slots {
                if !seen.insert(slot.property.as_str()) {
                    out.push(format!("duplicate slot '{}' on '{}'", slot.property, el.id));
                }
                match declared.get(slot.property.as_str()) {
                    None => out.push(format!(
                        "slot '{}' on '{}' references a property not declared on '{}'",
                        slot.property, el.id, classifier_id
                    )),
                    Some(type_name) => {
                        if let Err(e) = slot_literal(&slot.value, type_name) {
                            out.push(format!("slot '{}' on '{}': {e}", slot.property, el.id));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Value properties of a block and of every block reachable through its parts.
fn declared_properties<'a>(
    block: &'a ModelElement,
    by_id: &HashMap<&str, &'a ModelElement>,
) -> HashMap<&'a str, &'a str> {
    let mut out = HashMap::new();
    let mut stack = vec![block];
    let mut visited = HashSet::new();
    while let Some(b) = stack.pop() {
        if !visited.insert(b.id.as_str()) {
            continue;
        }
        for vp in &b.value_properties {
            out.entry(vp.name.as_str()).or_insert(vp.type_name.as_str());
        }
        stack.extend(b.parts.iter().filter_map(|p| by_id.get(p.as_str()).copied()));
    }
    out
}

fn is_iri_segment(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn slot_literal(value: &SlotValue, type_name: &str) -> Result<Literal, String> {
    match (type_name, value) {
        ("Integer", SlotValue::Number(n)) => n
            .as_i64()
            .map(Literal::integer)
            .ok_or_else(|| format!("{n} is not an Integer")),
        ("Real", SlotValue::Number(n)) => Ok(Literal::decimal(n.as_f64().unwrap_or(f64::NAN))),
        ("Integer" | "Real", SlotValue::Text(t)) => Err(format!("\"{t}\" is not a {type_name}")),
        (_, SlotValue::Text(t)) => Ok(Literal::string(t.clone())),
        (_, SlotValue::Number(n)) => Err(format!("{n} is not a {type_name}")),
    }
}

fn literal_slot_value(lit: &Literal) -> SlotValue {
    let dt = lit.datatype().as_str();
    if xsd::is_integer(dt) {
        if let Ok(n) = lit.lexical().parse::<i64>() {
            return SlotValue::Number(n.into());
        }
    } else if lit.is_numeric() {
        if let Some(n) = lit.lexical().parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
            return SlotValue::Number(n);
        }
    }
    SlotValue::Text(lit.lexical().to_string())
}

pub fn source_graph() -> Iri {
    Iri::new_unchecked(graph::SOURCE)
}

pub fn mapped_graph() -> Iri {
    Iri::new_unchecked(graph::MAPPED)
}

pub fn model_iri(base: &str, model: &str) -> Iri {
    Iri::new_unchecked(format!("{base}/source/{model}"))
}

pub fn element_iri(base: &str, model: &str, id: &str) -> Iri {
    Iri::new_unchecked(format!("{base}/source/{model}/{id}"))
}

pub fn entity_iri(element: &Iri) -> Iri {
    Iri::new_unchecked(format!("{}_entity", element.as_str()))
}

pub fn spec_iri(element: &Iri) -> Iri {
    Iri::new_unchecked(format!("{}_spec", element.as_str()))
}

fn iri(s: &str) -> Iri {
    Iri::new_unchecked(s)
}

fn under(subject: &Term, prefix: &str) -> bool {
    subject.as_iri().is_some_and(|s| {
        s.as_str() == prefix || s.as_str().strip_prefix(prefix).is_some_and(|rest| rest.starts_with('/'))
    })
}

/// Replaces the model's previous source statements with the document's.
/// Returns the number of source statements written.
pub fn ingest(repo: &mut Repository, base: &str, doc: &ModelDocument) -> Result<usize, MappingError> {
    let violations = doc.violations();
    if !violations.is_empty() {
        return Err(MappingError::Invalid(violations));
    }
    let src = source_graph();
    let model = model_iri(base, &doc.model);
    repo.remove_where(&src, |t, _| under(t.subject(), model.as_str()));
    if doc.elements.is_empty() && doc.misds.is_empty() {
        return Ok(0);
    }

    let mut out: Vec<Triple> = Vec::new();
    let mut add = |s: &Iri, p: &str, o: Term| out.push(Triple::from_iris(s, &iri(p), o));
    add(&model, rdf::TYPE, Term::iri_unchecked(tool::MODEL));
    add(&model, tool::HAS_NAME, Term::string(doc.model.clone()));
    add(&model, tool::HAS_TOOL, Term::string(doc.tool.clone()));
    for misd in &doc.misds {
        add(&model, tool::MISD_DOCUMENT, Term::string(misd.to_string()));
    }
    let types: HashMap<&str, HashMap<&str, &str>> = {
        let by_id: HashMap<&str, &ModelElement> = doc.elements.iter().map(|e| (e.id.as_str(), e)).collect();
        doc.elements
            .iter()
            .filter(|e| e.kind == ElementKind::Block)
            .map(|e| (e.id.as_str(), declared_properties(e, &by_id)))
            .collect()
    };
    for (ordinal, el) in doc.elements.iter().enumerate() {
        let e = element_iri(base, &doc.model, &el.id);
        add(&model, tool::HAS_ELEMENT, Term::Iri(e.clone()));
        add(&e, tool::ELEMENT_ID, Term::string(el.id.clone()));
        add(&e, tool::HAS_NAME, Term::string(el.name.clone()));
        add(&e, tool::HAS_KIND, Term::string(el.kind.as_str()));
        add(&e, tool::ORDINAL, Term::integer(ordinal as i64));
        for st in &el.stereotypes {
            add(&e, tool::APPLIED_STEREOTYPE, Term::string(st.clone()));
        }
        for (i, vp) in el.value_properties.iter().enumerate() {
            let node = Iri::new_unchecked(format!("{}/vp/{}", e.as_str(), vp.name));
            add(&e, tool::HAS_VALUE_PROPERTY, Term::Iri(node.clone()));
            add(&node, tool::HAS_NAME, Term::string(vp.name.clone()));
            add(&node, tool::VALUE_TYPE, Term::string(vp.type_name.clone()));
            add(&node, tool::ORDINAL, Term::integer(i as i64));
        }
        for part in &el.parts {
            add(&e, tool::HAS_PART, Term::Iri(element_iri(base, &doc.model, part)));
        }
        if let Some(c) = &el.classifier {
            add(&e, tool::CLASSIFIED_BY, Term::Iri(element_iri(base, &doc.model, c)));
            let declared = &types[c.as_str()];
            for (i, slot) in el.slots.iter().enumerate() {
                let node = Iri::new_unchecked(format!("{}/slot/{}", e.as_str(), slot.property));
                let lit = slot_literal(&slot.value, declared[slot.property.as_str()]).expect("validated above");
                add(&e, tool::HAS_SLOT, Term::Iri(node.clone()));
                add(&node, tool::SLOT_PROPERTY, Term::string(slot.property.clone()));
                add(&node, tool::SLOT_VALUE, Term::Literal(lit));
                add(&node, tool::ORDINAL, Term::integer(i as i64));
            }
        }
    }
    Ok(out.into_iter().filter(|t| repo.insert(&src, t.clone(), Provenance::Explicit)).count())
}

/// Query used to discover stereotype applications in the source graph.
pub const STEREOTYPE_QUERY: &str = "PREFIX tool: <http://defii.org/tool#>
SELECT ?element ?name ?stereotype
WHERE {
  ?element tool:appliedStereotype ?stereotype ;
           tool:hasName ?name .
}";

/// Regenerates every explicit mapped statement derived from source data.
/// Ontology statements and specified-model individuals are left alone.
pub fn run_mapping(repo: &mut Repository, base: &str, catalog: &OntologyCatalog) -> MappingReport {
    let src = source_graph();
    let mapped = mapped_graph();
    let source_prefix = format!("{base}/source");
    repo.remove_where(&mapped, |t, p| p == Provenance::Explicit && under(t.subject(), &source_prefix));

    let mut report = MappingReport::default();
    let mut out: BTreeSet<Triple> = BTreeSet::new();
    let rdf_type = iri(rdf::TYPE);
    let mapped_from = iri(defii::MAPPED_FROM);

    // Step 1: stereotyped elements.
    let query = parse_query(STEREOTYPE_QUERY).expect("built-in query parses");
    let rows = evaluate(repo, &src, &query).unwrap_or_default();
    let mut entities: BTreeMap<Iri, Iri> = BTreeMap::new();
    for r in 0..rows.len() {
        let (Some(Term::Iri(element)), Some(name), Some(stereotype)) =
            (rows.get(r, "element"), rows.get(r, "name"), rows.get(r, "stereotype"))
        else {
            continue;
        };
        let name = literal_text(name);
        let stereotype = literal_text(stereotype);
        // Step 2: does the stereotype name a class of the loaded ontologies?
        let Some(class) = catalog.class_for_name(&stereotype) else {
            report.discarded.push((name, stereotype));
            continue;
        };
        report.mapped_elements += 1;
        let entity = entity_iri(element);
        let spec = spec_iri(element);
        // Steps 3a-3c and the step 5 back-link.
        out.insert(Triple::from_iris(&entity, &rdf_type, Term::Iri(class.clone())));
        out.insert(Triple::from_iris(&spec, &rdf_type, Term::iri_unchecked(cco::DIRECTIVE_ICE)));
        out.insert(Triple::from_iris(&spec, &iri(cco::PRESCRIBES), Term::Iri(entity.clone())));
        out.insert(Triple::from_iris(&entity, &mapped_from, Term::Iri(element.clone())));
        entities.insert(element.clone(), entity);
    }

    let classifier_of: Vec<(Iri, Iri)> = repo
        .triples_matching(&src, None, Some(&Term::iri_unchecked(tool::CLASSIFIED_BY)), None)
        .filter_map(|(t, _)| Some((t.subject().as_iri()?.clone(), t.object().as_iri()?.clone())))
        .collect();
    for (instance, classifier) in classifier_of {
        if !entities.contains_key(&classifier) {
            continue;
        }
        let entity = entity_iri(&instance);
        for class in stereotype_classes(repo, &classifier, catalog) {
            out.insert(Triple::from_iris(&entity, &rdf_type, Term::Iri(class)));
        }
        out.insert(Triple::from_iris(&entity, &mapped_from, Term::Iri(instance.clone())));
        entities.insert(instance.clone(), entity.clone());
        let name = element_name(repo, &instance);
        for (property, value) in slots(repo, &instance) {
            if let Some(p) = catalog.property_for_name(&property) {
                out.insert(Triple::from_iris(&entity, p, value));
            } else if let Some(class) = catalog.class_for_name(&property) {
                let designator = Iri::new_unchecked(format!("{}_{property}", instance.as_str()));
                out.insert(Triple::from_iris(&entity, &iri(cco::DESIGNATED_BY), Term::Iri(designator.clone())));
                out.insert(Triple::from_iris(&designator, &rdf_type, Term::Iri(class.clone())));
                out.insert(Triple::from_iris(&designator, &iri(test::HAS_VALUE), value));
            } else {
                report.discarded_slots.push((name.clone(), property));
            }
        }
    }

    let part_of = iri(test::PART_OF);
    let has_part = Term::iri_unchecked(tool::HAS_PART);
    for (whole, whole_entity) in &entities {
        for part in repo.objects(&src, &Term::Iri(whole.clone()), &has_part) {
            if let Some(part_entity) = part.as_iri().and_then(|p| entities.get(p)) {
                out.insert(Triple::from_iris(part_entity, &part_of, Term::Iri(whole_entity.clone())));
            }
        }
    }

    report.back_links = out.iter().filter(|t| t.predicate_iri() == &mapped_from).count();
    report.triples_added = out
        .into_iter()
        .filter(|t| repo.insert(&mapped, t.clone(), Provenance::Explicit))
        .count();
    report
}

fn literal_text(term: &Term) -> String {
    match term {
        Term::Literal(l) => l.lexical().to_string(),
        other => other.to_ntriples(),
    }
}

fn stereotype_classes(repo: &Repository, element: &Iri, catalog: &OntologyCatalog) -> Vec<Iri> {
    let p = Term::iri_unchecked(tool::APPLIED_STEREOTYPE);
    repo.objects(&source_graph(), &Term::Iri(element.clone()), &p)
        .into_iter()
        .filter_map(|st| catalog.class_for_name(&literal_text(st)).cloned())
        .collect()
}

fn element_name(repo: &Repository, element: &Iri) -> String {
    let p = Term::iri_unchecked(tool::HAS_NAME);
    repo.objects(&source_graph(), &Term::Iri(element.clone()), &p)
        .first()
        .map(|t| literal_text(t))
        .unwrap_or_default()
}

fn single_integer(repo: &Repository, subject: &Iri, predicate: &str) -> i64 {
    let p = Term::iri_unchecked(predicate);
    repo.objects(&source_graph(), &Term::Iri(subject.clone()), &p)
        .first()
        .and_then(|t| t.as_literal())
        .and_then(|l| l.lexical().parse().ok())
        .unwrap_or(i64::MAX)
}

/// `(property name, value)` for every slot of an instance, in slot order.
fn slots(repo: &Repository, instance: &Iri) -> Vec<(String, Term)> {
    let src = source_graph();
    let has_slot = Term::iri_unchecked(tool::HAS_SLOT);
    let prop = Term::iri_unchecked(tool::SLOT_PROPERTY);
    let val = Term::iri_unchecked(tool::SLOT_VALUE);
    let mut out: Vec<(i64, String, Term)> = Vec::new();
    for node in repo.objects(&src, &Term::Iri(instance.clone()), &has_slot) {
        let Some(node_iri) = node.as_iri() else { continue };
        let name = repo.objects(&src, node, &prop).first().map(|t| literal_text(t));
        let value = repo.objects(&src, node, &val).first().map(|t| (*t).clone());
        if let (Some(name), Some(value)) = (name, value) {
            out.push((single_integer(repo, node_iri, tool::ORDINAL), name, value));
        }
    }
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    out.into_iter().map(|(_, n, v)| (n, v)).collect()
}

/// Follows the individual's back-link and rewrites the matching source slot.
/// The individual's own mapped value for `property` is replaced as well so
/// the mapped graph stays current without a full re-map. Returns the number
/// of source slots changed.
pub fn push_back(repo: &mut Repository, individual: &Iri, property: &Iri, value: Term) -> Result<usize, MappingError> {
    let src = source_graph();
    let mapped = mapped_graph();
    let ind = Term::Iri(individual.clone());
    let source = repo
        .objects(&mapped, &ind, &Term::iri_unchecked(defii::MAPPED_FROM))
        .first()
        .and_then(|t| t.as_iri())
        .cloned()
        .ok_or_else(|| MappingError::UnmappedIndividual(individual.as_str().to_string()))?;
    let name = local_name(property.as_str());
    let node = repo
        .objects(&src, &Term::Iri(source.clone()), &Term::iri_unchecked(tool::HAS_SLOT))
        .into_iter()
        .find(|n| {
            repo.objects(&src, n, &Term::iri_unchecked(tool::SLOT_PROPERTY))
                .iter()
                .any(|p| literal_text(p) == name)
        })
        .cloned()
        .ok_or_else(|| MappingError::NoSourceSlot {
            individual: individual.as_str().to_string(),
            property: property.as_str().to_string(),
        })?;
    let node = node.as_iri().expect("slot nodes are IRIs").clone();

    let prop_term = Term::Iri(property.clone());
    repo.remove_where(&mapped, |t, p| {
        p == Provenance::Explicit && t.subject() == &ind && t.predicate() == &prop_term && t.object() != &value
    });
    repo.insert(&mapped, Triple::from_iris(individual, property, value.clone()), Provenance::Explicit);

    let slot_value = Term::iri_unchecked(tool::SLOT_VALUE);
    let node_term = Term::Iri(node.clone());
    let current: Vec<Term> = repo.objects(&src, &node_term, &slot_value).into_iter().cloned().collect();
    if current == [value.clone()] {
        return Ok(0);
    }
    repo.remove_where(&src, |t, _| t.subject() == &node_term && t.predicate() == &slot_value);
    repo.insert(&src, Triple::from_iris(&node, &iri(tool::SLOT_VALUE), value), Provenance::Explicit);
    Ok(1)
}

/// Rebuilds the model document from the source graph, reflecting any
/// pushed-back slot values.
pub fn export_document(repo: &Repository, base: &str, model: &str) -> Result<ModelDocument, MappingError> {
    let src = source_graph();
    let model_node = Term::Iri(model_iri(base, model));
    let text = |s: &Term, p: &str| -> Option<String> {
        repo.objects(&src, s, &Term::iri_unchecked(p)).first().map(|t| literal_text(t))
    };
    let tool_name = text(&model_node, tool::HAS_TOOL).ok_or_else(|| MappingError::UnknownModel(model.to_string()))?;
    let mut misds: Vec<serde_json::Value> = repo
        .objects(&src, &model_node, &Term::iri_unchecked(tool::MISD_DOCUMENT))
        .into_iter()
        .map(|t| serde_json::from_str(&literal_text(t)).map_err(|e| MappingError::Source(e.to_string())))
        .collect::<Result<_, _>>()?;
    misds.sort_by_key(|m| m.get("modelName").and_then(|n| n.as_str()).unwrap_or_default().to_string());

    let mut elements: Vec<(i64, ModelElement)> = Vec::new();
    let element_nodes: Vec<Iri> = repo
        .objects(&src, &model_node, &Term::iri_unchecked(tool::HAS_ELEMENT))
        .into_iter()
        .filter_map(|t| t.as_iri().cloned())
        .collect();
    let id_of = |e: &Term| text(e, tool::ELEMENT_ID).ok_or_else(|| MappingError::Source(format!("{} has no id", e.to_ntriples())));
    for e in &element_nodes {
        let et = Term::Iri(e.clone());
        let kind_text = text(&et, tool::HAS_KIND).unwrap_or_default();
        let kind = ElementKind::parse(&kind_text)
            .ok_or_else(|| MappingError::Source(format!("unknown element kind '{kind_text}'")))?;
        let mut stereotypes: Vec<String> = repo
            .objects(&src, &et, &Term::iri_unchecked(tool::APPLIED_STEREOTYPE))
            .into_iter()
            .map(literal_text)
            .collect();
        stereotypes.sort();
        let mut value_properties: Vec<(i64, ValueProperty)> = Vec::new();
        for vp in repo.objects(&src, &et, &Term::iri_unchecked(tool::HAS_VALUE_PROPERTY)) {
            value_properties.push((
                single_integer(repo, vp.as_iri().expect("value property nodes are IRIs"), tool::ORDINAL),
                ValueProperty {
                    name: text(vp, tool::HAS_NAME).unwrap_or_default(),
                    type_name: text(vp, tool::VALUE_TYPE).unwrap_or_default(),
                },
            ));
        }
        value_properties.sort_by(|a, b| (a.0, &a.1.name).cmp(&(b.0, &b.1.name)));
        let mut parts: Vec<(i64, String)> = Vec::new();
        for p in repo.objects(&src, &et, &Term::iri_unchecked(tool::HAS_PART)) {
            parts.push((single_integer(repo, p.as_iri().expect("parts are IRIs"), tool::ORDINAL), id_of(p)?));
        }
        parts.sort();
        let classifier = match repo.objects(&src, &et, &Term::iri_unchecked(tool::CLASSIFIED_BY)).first() {
            Some(c) => Some(id_of(c)?),
            None => None,
        };
        let slots = slots(repo, e)
            .into_iter()
            .map(|(property, value)| {
                let value = match value {
                    Term::Literal(l) => literal_slot_value(&l),
                    other => SlotValue::Text(other.to_ntriples()),
                };
                Slot { property, value }
            })
            .collect();
        elements.push((
            single_integer(repo, e, tool::ORDINAL),
            ModelElement {
                id: id_of(&et)?,
                kind,
                name: text(&et, tool::HAS_NAME).unwrap_or_default(),
                stereotypes,
                value_properties: value_properties.into_iter().map(|(_, v)| v).collect(),
                slots,
                classifier,
                parts: parts.into_iter().map(|(_, p)| p).collect(),
            },
        ));
    }
    elements.sort_by(|a, b| (a.0, &a.1.id).cmp(&(b.0, &b.1.id)));
    Ok(ModelDocument {
        tool: tool_name,
        model: model.to_string(),
        elements: elements.into_iter().map(|(_, e)| e).collect(),
        misds,
    })
}

/// Names of every model present in the source graph.
pub fn source_models(repo: &Repository) -> Vec<String> {
    let src = source_graph();
    let mut out: Vec<String> = repo
        .subjects(&src, &Term::iri_unchecked(rdf::TYPE), &Term::iri_unchecked(tool::MODEL))
        .into_iter()
        .filter_map(|m| repo.objects(&src, m, &Term::iri_unchecked(tool::HAS_NAME)).first().map(|t| literal_text(t)))
        .collect();
    out.sort();
    out
}

/// Mapped individual for the source element carrying `name`, if one exists.
pub fn individual_for_name(repo: &Repository, name: &str) -> Option<Iri> {
    let src = source_graph();
    let mapped = mapped_graph();
    let mut candidates: Vec<Iri> = repo
        .subjects(&src, &Term::iri_unchecked(tool::HAS_NAME), &Term::string(name))
        .into_iter()
        .filter_map(|e| e.as_iri())
        .filter_map(|e| {
            let entity = entity_iri(e);
            let linked = repo.contains(
                &mapped,
                &Triple::from_iris(&entity, &iri(defii::MAPPED_FROM), Term::Iri(e.clone())),
            );
            linked.then_some(entity)
        })
        .collect();
    candidates.sort();
    candidates.dedup();
    candidates.into_iter().next()
}
