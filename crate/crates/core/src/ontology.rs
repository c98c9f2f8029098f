//! Controlled vocabulary and RDFS-Plus axioms extracted from ontology documents.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::{Iri, Term, Triple};
use crate::vocab::{owl, rdf, rdfs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("duplicate class local names: {}", format_collisions(.0))]
    ClassNameCollision(Vec<(String, Vec<Iri>)>),
    #[error("duplicate property local names: {}", format_collisions(.0))]
    PropertyNameCollision(Vec<(String, Vec<Iri>)>),
}

fn format_collisions(collisions: &[(String, Vec<Iri>)]) -> String {
    collisions
        .iter()
        .map(|(name, iris)| {
            let iris: Vec<&str> = iris.iter().map(Iri::as_str).collect();
            format!("{name} ({})", iris.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Immutable after [`OntologyCatalog::load`]; share behind an `Arc`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OntologyCatalog {
    pub classes: BTreeSet<Iri>,
    pub properties: BTreeSet<Iri>,
    pub object_properties: BTreeSet<Iri>,
    pub datatype_properties: BTreeSet<Iri>,
    pub subclass_axioms: BTreeSet<(Iri, Iri)>,
    pub subproperty_axioms: BTreeSet<(Iri, Iri)>,
    pub domain_axioms: BTreeSet<(Iri, Iri)>,
    pub range_axioms: BTreeSet<(Iri, Iri)>,
    pub inverse_axioms: BTreeSet<(Iri, Iri)>,
    pub transitive_properties: BTreeSet<Iri>,
    pub symmetric_properties: BTreeSet<Iri>,
    pub functional_properties: BTreeSet<Iri>,
    pub inverse_functional_properties: BTreeSet<Iri>,
    label_index: BTreeMap<String, Iri>,
    property_index: BTreeMap<String, Iri>,
}

impl OntologyCatalog {
    pub fn load<'a>(documents: impl IntoIterator<Item = &'a [Triple]>) -> Result<Self, OntologyError> {
        let mut cat = OntologyCatalog::default();
        for doc in documents {
            for triple in doc {
                cat.absorb(triple);
            }
        }
        cat.label_index = build_index(&cat.classes).map_err(OntologyError::ClassNameCollision)?;
        cat.property_index = build_index(&cat.properties).map_err(OntologyError::PropertyNameCollision)?;
        Ok(cat)
    }

    fn absorb(&mut self, triple: &Triple) {
        let Some(subject) = triple.subject().as_iri() else {
            return;
        };
        let predicate = triple.predicate_iri().as_str();
        let object = triple.object().as_iri();
        if predicate == rdf::TYPE {
            let Some(kind) = object else { return };
            match kind.as_str() {
                owl::CLASS | rdfs::CLASS => {
                    self.classes.insert(subject.clone());
                }
                owl::OBJECT_PROPERTY => {
                    self.object_properties.insert(subject.clone());
                    self.properties.insert(subject.clone());
                }
                owl::DATATYPE_PROPERTY => {
                    self.datatype_properties.insert(subject.clone());
                    self.properties.insert(subject.clone());
                }
                owl::TRANSITIVE_PROPERTY => self.characteristic(subject, |c| &mut c.transitive_properties),
                owl::SYMMETRIC_PROPERTY => self.characteristic(subject, |c| &mut c.symmetric_properties),
                owl::FUNCTIONAL_PROPERTY => self.characteristic(subject, |c| &mut c.functional_properties),
                owl::INVERSE_FUNCTIONAL_PROPERTY => {
                    self.characteristic(subject, |c| &mut c.inverse_functional_properties)
                }
                _ => {}
            }
            return;
        }
        let Some(object) = object else { return };
        let pair = (subject.clone(), object.clone());
        match predicate {
            rdfs::SUB_CLASS_OF => {
                self.classes.insert(pair.0.clone());
                self.classes.insert(pair.1.clone());
                self.subclass_axioms.insert(pair);
            }
            rdfs::SUB_PROPERTY_OF => {
                self.properties.insert(pair.0.clone());
                self.properties.insert(pair.1.clone());
                self.subproperty_axioms.insert(pair);
            }
            rdfs::DOMAIN => {
                self.properties.insert(pair.0.clone());
                self.classes.insert(pair.1.clone());
                self.domain_axioms.insert(pair);
            }
            rdfs::RANGE => {
                self.properties.insert(pair.0.clone());
                // Datatype ranges (xsd:*) are not classes of individuals.
                if !pair.1.as_str().starts_with(crate::vocab::xsd::NS) {
                    self.classes.insert(pair.1.clone());
                    self.range_axioms.insert(pair);
                }
            }
            owl::INVERSE_OF => {
                self.properties.insert(pair.0.clone());
                self.properties.insert(pair.1.clone());
                self.inverse_axioms.insert(pair);
            }
            _ => {}
        }
    }

    fn characteristic(&mut self, property: &Iri, set: impl FnOnce(&mut Self) -> &mut BTreeSet<Iri>) {
        self.properties.insert(property.clone());
        set(self).insert(property.clone());
    }

    /// Exact, case-sensitive lookup of a class by local name.
    pub fn class_for_name(&self, name: &str) -> Option<&Iri> {
        self.label_index.get(name)
    }

    /// Exact, case-sensitive lookup of a property by local name.
    pub fn property_for_name(&self, name: &str) -> Option<&Iri> {
        self.property_index.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty() && self.properties.is_empty()
    }

    /// Every axiom and property characteristic as an RDF statement. The
    /// reasoner treats these as background premises.
    pub fn axiom_triples(&self) -> Vec<Triple> {
        let iri = |s: &str| Iri::new_unchecked(s);
        let mut out = Vec::new();
        let pairs = [
            (&self.subclass_axioms, rdfs::SUB_CLASS_OF),
            (&self.subproperty_axioms, rdfs::SUB_PROPERTY_OF),
            (&self.domain_axioms, rdfs::DOMAIN),
            (&self.range_axioms, rdfs::RANGE),
            (&self.inverse_axioms, owl::INVERSE_OF),
        ];
        for (set, predicate) in pairs {
            let predicate = iri(predicate);
            out.extend(set.iter().map(|(a, b)| Triple::from_iris(a, &predicate, Term::Iri(b.clone()))));
        }
        let characteristics = [
            (&self.transitive_properties, owl::TRANSITIVE_PROPERTY),
            (&self.symmetric_properties, owl::SYMMETRIC_PROPERTY),
            (&self.functional_properties, owl::FUNCTIONAL_PROPERTY),
            (&self.inverse_functional_properties, owl::INVERSE_FUNCTIONAL_PROPERTY),
        ];
        let rdf_type = iri(rdf::TYPE);
        for (set, class) in characteristics {
            out.extend(set.iter().map(|p| Triple::from_iris(p, &rdf_type, Term::Iri(iri(class)))));
        }
        out
    }
}

/// Local names claimed by more than one IRI.
type Collisions = Vec<(String, Vec<Iri>)>;

fn build_index(iris: &BTreeSet<Iri>) -> Result<BTreeMap<String, Iri>, Collisions> {
    let mut grouped: BTreeMap<String, Vec<Iri>> = BTreeMap::new();
    for iri in iris {
        grouped.entry(iri.local_name().to_string()).or_default().push(iri.clone());
    }
    let collisions: Vec<(String, Vec<Iri>)> = grouped
        .iter()
        .filter(|(_, v)| v.len() > 1)
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if !collisions.is_empty() {
        return Err(collisions);
    }
    Ok(grouped.into_iter().map(|(k, mut v)| (k, v.remove(0))).collect())
}
