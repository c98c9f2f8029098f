//! RDFS-Plus forward-chaining materialization.
//!
//! The rule set is evaluated semi-naively: each round joins only the
//! statements derived in the previous round against everything known.
//! Premises are the graph's statements plus the catalog's axioms; the axioms
//! are read but never copied into the graph, while every conclusion not
//! already present is inserted with [`Provenance::Inferred`].

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::graph::{Provenance, Repository, RepositoryStats};
use crate::ontology::OntologyCatalog;
use crate::term::{Iri, Term, Triple};
use crate::vocab::{owl, rdf, rdfs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    /// R1
    SubClassTransitivity,
    /// R2
    TypeInheritance,
    /// R3
    SubPropertyTransitivity,
    /// R4
    PropertyInheritance,
    /// R5
    DomainTyping,
    /// R6
    RangeTyping,
    /// R7
    InverseOf,
    /// R8
    Symmetric,
    /// R9
    Transitive,
    /// R10
    Functional,
    /// R11
    InverseFunctional,
    /// R12, symmetry
    SameAsSymmetry,
    /// R12, transitivity
    SameAsTransitivity,
    /// R12, subject/object substitution
    SameAsSubstitution,
}

impl RuleId {
    pub const ALL: [RuleId; 14] = [
        RuleId::SubClassTransitivity,
        RuleId::TypeInheritance,
        RuleId::SubPropertyTransitivity,
        RuleId::PropertyInheritance,
        RuleId::DomainTyping,
        RuleId::RangeTyping,
        RuleId::InverseOf,
        RuleId::Symmetric,
        RuleId::Transitive,
        RuleId::Functional,
        RuleId::InverseFunctional,
        RuleId::SameAsSymmetry,
        RuleId::SameAsTransitivity,
        RuleId::SameAsSubstitution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::SubClassTransitivity => "subclass-transitivity",
            RuleId::TypeInheritance => "type-inheritance",
            RuleId::SubPropertyTransitivity => "subproperty-transitivity",
            RuleId::PropertyInheritance => "property-inheritance",
            RuleId::DomainTyping => "domain-typing",
            RuleId::RangeTyping => "range-typing",
            RuleId::InverseOf => "inverse-of",
            RuleId::Symmetric => "symmetric",
            RuleId::Transitive => "transitive",
            RuleId::Functional => "functional",
            RuleId::InverseFunctional => "inverse-functional",
            RuleId::SameAsSymmetry => "same-as-symmetry",
            RuleId::SameAsTransitivity => "same-as-transitivity",
            RuleId::SameAsSubstitution => "same-as-substitution",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How one inferred statement was first derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTrace {
    pub rule: RuleId,
    pub premises: Vec<Triple>,
    pub conclusion: Triple,
}

impl RuleTrace {
    /// Re-applies the named rule to the recorded premises alone and checks
    /// that it yields the conclusion again.
    pub fn is_reproducible(&self) -> bool {
        let mut closure = Closure::default();
        for p in &self.premises {
            closure.add(p.clone());
        }
        let mut out = Vec::new();
        for p in &self.premises {
            closure.fire(p, &mut |rule, premises, conclusion| {
                if rule == self.rule {
                    out.push((premises, conclusion));
                }
            });
        }
        out.iter().any(|(_, c)| *c == self.conclusion)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Materialization {
    /// Statements newly inserted into the graph.
    pub added: usize,
    /// One trace per inserted statement, in insertion order.
    pub traces: Vec<RuleTrace>,
    pub rounds: usize,
}

/// Runs the rule set to fixpoint over `graph`; returns the count of newly
/// inserted statements.
pub fn materialize(repo: &mut Repository, graph: &Iri, catalog: &OntologyCatalog) -> usize {
    materialize_traced(repo, graph, catalog).added
}

pub fn materialize_traced(repo: &mut Repository, graph: &Iri, catalog: &OntologyCatalog) -> Materialization {
    let mut closure = Closure::default();
    for (t, _) in repo.triples_matching(graph, None, None, None) {
        closure.add(t.clone());
    }
    for t in catalog.axiom_triples() {
        closure.add(t);
    }
    let (traces, rounds) = closure.saturate();
    let mut added = 0;
    let mut kept = Vec::new();
    for trace in traces {
        if repo.insert(graph, trace.conclusion.clone(), Provenance::Inferred) {
            added += 1;
            kept.push(trace);
        }
    }
    Materialization {
        added,
        traces: kept,
        rounds,
    }
}

/// Drops every inferred statement, re-runs materialization and reports the
/// resulting counts. Callers hold the repository exclusively, so readers
/// never observe the intermediate state.
pub fn rematerialize(repo: &mut Repository, graph: &Iri, catalog: &OntologyCatalog) -> RepositoryStats {
    repo.clear_inferred(graph);
    materialize(repo, graph, catalog);
    repo.stats(graph)
}

#[derive(Default)]
struct Closure {
    triples: Vec<Triple>,
    known: HashSet<Triple>,
    by_s: HashMap<Term, Vec<usize>>,
    by_p: HashMap<Term, Vec<usize>>,
    by_o: HashMap<Term, Vec<usize>>,
    by_sp: HashMap<(Term, Term), Vec<usize>>,
    by_po: HashMap<(Term, Term), Vec<usize>>,
}

struct Vocab {
    rdf_type: Term,
    sub_class_of: Term,
    sub_property_of: Term,
    domain: Term,
    range: Term,
    inverse_of: Term,
    same_as: Term,
    transitive: Term,
    symmetric: Term,
    functional: Term,
    inverse_functional: Term,
}

thread_local! {
    static VOCAB: Vocab = Vocab {
        rdf_type: Term::iri_unchecked(rdf::TYPE),
        sub_class_of: Term::iri_unchecked(rdfs::SUB_CLASS_OF),
        sub_property_of: Term::iri_unchecked(rdfs::SUB_PROPERTY_OF),
        domain: Term::iri_unchecked(rdfs::DOMAIN),
        range: Term::iri_unchecked(rdfs::RANGE),
        inverse_of: Term::iri_unchecked(owl::INVERSE_OF),
        same_as: Term::iri_unchecked(owl::SAME_AS),
        transitive: Term::iri_unchecked(owl::TRANSITIVE_PROPERTY),
        symmetric: Term::iri_unchecked(owl::SYMMETRIC_PROPERTY),
        functional: Term::iri_unchecked(owl::FUNCTIONAL_PROPERTY),
        inverse_functional: Term::iri_unchecked(owl::INVERSE_FUNCTIONAL_PROPERTY),
    };
}

type Emit<'e> = dyn FnMut(RuleId, Vec<Triple>, Triple) + 'e;

impl Closure {
    fn add(&mut self, t: Triple) -> bool {
        if self.known.contains(&t) {
            return false;
        }
        let id = self.triples.len();
        let (s, p, o) = (t.subject().clone(), t.predicate().clone(), t.object().clone());
        self.by_s.entry(s.clone()).or_default().push(id);
        self.by_p.entry(p.clone()).or_default().push(id);
        self.by_o.entry(o.clone()).or_default().push(id);
        self.by_sp.entry((s, p.clone())).or_default().push(id);
        self.by_po.entry((p, o)).or_default().push(id);
        self.known.insert(t.clone());
        self.triples.push(t);
        true
    }

    fn contains(&self, s: &Term, p: &Term, o: &Term) -> bool {
        match Triple::new(s.clone(), p.clone(), o.clone()) {
            Ok(t) => self.known.contains(&t),
            Err(_) => false,
        }
    }

    fn ids<'a>(&'a self, index: &'a HashMap<Term, Vec<usize>>, key: &Term) -> impl Iterator<Item = &'a Triple> + 'a {
        index.get(key).into_iter().flatten().map(|&i| &self.triples[i])
    }

    fn with_sp(&self, s: &Term, p: &Term) -> Vec<Triple> {
        self.by_sp
            .get(&(s.clone(), p.clone()))
            .into_iter()
            .flatten()
            .map(|&i| self.triples[i].clone())
            .collect()
    }

    fn with_po(&self, p: &Term, o: &Term) -> Vec<Triple> {
        self.by_po
            .get(&(p.clone(), o.clone()))
            .into_iter()
            .flatten()
            .map(|&i| self.triples[i].clone())
            .collect()
    }

    fn with_p(&self, p: &Term) -> Vec<Triple> {
        self.ids(&self.by_p, p).cloned().collect()
    }

    fn has_type(&self, p: &Term, class: &Term) -> bool {
        VOCAB.with(|v| self.contains(p, &v.rdf_type, class))
    }

    /// Semi-naive saturation. Returns a trace for every derived statement
    /// not among the initial premises, plus the number of rounds.
    fn saturate(&mut self) -> (Vec<RuleTrace>, usize) {
        let mut delta: Vec<Triple> = self.triples.clone();
        let mut traces = Vec::new();
        let mut rounds = 0;
        while !delta.is_empty() {
            rounds += 1;
            let mut derived: Vec<RuleTrace> = Vec::new();
            let mut seen: HashSet<Triple> = HashSet::new();
            for d in &delta {
                self.fire(d, &mut |rule, premises, conclusion| {
                    if seen.insert(conclusion.clone()) {
                        derived.push(RuleTrace { rule, premises, conclusion });
                    }
                });
            }
            delta.clear();
            for trace in derived {
                if self.add(trace.conclusion.clone()) {
                    delta.push(trace.conclusion.clone());
                    traces.push(trace);
                }
            }
        }
        (traces, rounds)
    }

    /// Every conclusion in which `d` participates as a premise, with the
    /// remaining premises drawn from the closure.
    fn fire(&self, d: &Triple, emit: &mut Emit<'_>) {
        VOCAB.with(|v| self.fire_with(v, d, emit));
    }

    fn fire_with(&self, v: &Vocab, d: &Triple, emit: &mut Emit<'_>) {
        let (s, p, o) = (d.subject(), d.predicate(), d.object());
        let mut out = |rule: RuleId, premises: Vec<Triple>, cs: &Term, cp: &Term, co: &Term| {
            if let Ok(c) = Triple::new(cs.clone(), cp.clone(), co.clone()) {
                if !self.known.contains(&c) {
                    emit(rule, premises, c);
                }
            }
        };

        if *p == v.sub_class_of {
            // R1 both directions, R2 with d as the axiom.
            for t in self.with_sp(o, &v.sub_class_of) {
                out(RuleId::SubClassTransitivity, vec![d.clone(), t.clone()], s, p, t.object());
            }
            for t in self.with_po(&v.sub_class_of, s) {
                out(RuleId::SubClassTransitivity, vec![t.clone(), d.clone()], t.subject(), p, o);
            }
            for t in self.with_po(&v.rdf_type, s) {
                out(RuleId::TypeInheritance, vec![t.clone(), d.clone()], t.subject(), &v.rdf_type, o);
            }
        }
        if *p == v.rdf_type {
            for t in self.with_sp(o, &v.sub_class_of) {
                out(RuleId::TypeInheritance, vec![d.clone(), t.clone()], s, p, t.object());
            }
            // Property characteristic declared: fire over all uses of the property.
            if *o == v.transitive {
                let uses = self.with_p(s);
                for a in &uses {
                    for b in self.with_sp(a.object(), s) {
                        out(RuleId::Transitive, vec![a.clone(), b.clone(), d.clone()], a.subject(), s, b.object());
                    }
                }
            }
            if *o == v.symmetric {
                for a in self.with_p(s) {
                    out(RuleId::Symmetric, vec![a.clone(), d.clone()], a.object(), s, a.subject());
                }
            }
            if *o == v.functional {
                for a in self.with_p(s) {
                    for b in self.with_sp(a.subject(), s) {
                        if a.object() != b.object() && !a.object().is_literal() && !b.object().is_literal() {
                            out(RuleId::Functional, vec![a.clone(), b.clone(), d.clone()], a.object(), &v.same_as, b.object());
                        }
                    }
                }
            }
            if *o == v.inverse_functional {
                for a in self.with_p(s) {
                    for b in self.with_po(s, a.object()) {
                        if a.subject() != b.subject() {
                            out(RuleId::InverseFunctional, vec![a.clone(), b.clone(), d.clone()], a.subject(), &v.same_as, b.subject());
                        }
                    }
                }
            }
        }
        if *p == v.sub_property_of {
            for t in self.with_sp(o, &v.sub_property_of) {
                out(RuleId::SubPropertyTransitivity, vec![d.clone(), t.clone()], s, p, t.object());
            }
            for t in self.with_po(&v.sub_property_of, s) {
                out(RuleId::SubPropertyTransitivity, vec![t.clone(), d.clone()], t.subject(), p, o);
            }
            for t in self.with_p(s) {
                out(RuleId::PropertyInheritance, vec![t.clone(), d.clone()], t.subject(), o, t.object());
            }
        }
        if *p == v.domain {
            for t in self.with_p(s) {
                out(RuleId::DomainTyping, vec![t.clone(), d.clone()], t.subject(), &v.rdf_type, o);
            }
        }
        if *p == v.range {
            for t in self.with_p(s) {
                out(RuleId::RangeTyping, vec![t.clone(), d.clone()], t.object(), &v.rdf_type, o);
            }
        }
        if *p == v.inverse_of {
            for t in self.with_p(s) {
                out(RuleId::InverseOf, vec![t.clone(), d.clone()], t.object(), o, t.subject());
            }
            for t in self.with_p(o) {
                out(RuleId::InverseOf, vec![t.clone(), d.clone()], t.object(), s, t.subject());
            }
        }
        if *p == v.same_as {
            out(RuleId::SameAsSymmetry, vec![d.clone()], o, p, s);
            for t in self.with_sp(o, &v.same_as) {
                out(RuleId::SameAsTransitivity, vec![d.clone(), t.clone()], s, p, t.object());
            }
            for t in self.with_po(&v.same_as, s) {
                out(RuleId::SameAsTransitivity, vec![t.clone(), d.clone()], t.subject(), p, o);
            }
            for t in self.ids(&self.by_s, s).cloned().collect::<Vec<_>>() {
                if *t.predicate() != v.same_as {
                    out(RuleId::SameAsSubstitution, vec![d.clone(), t.clone()], o, t.predicate(), t.object());
                }
            }
            for t in self.ids(&self.by_o, s).cloned().collect::<Vec<_>>() {
                if *t.predicate() != v.same_as {
                    out(RuleId::SameAsSubstitution, vec![d.clone(), t.clone()], t.subject(), t.predicate(), o);
                }
            }
        }

        // d as an instance of its predicate, joined against schema and sameAs.
        for t in self.with_sp(p, &v.sub_property_of) {
            out(RuleId::PropertyInheritance, vec![d.clone(), t.clone()], s, t.object(), o);
        }
        for t in self.with_sp(p, &v.domain) {
            out(RuleId::DomainTyping, vec![d.clone(), t.clone()], s, &v.rdf_type, t.object());
        }
        for t in self.with_sp(p, &v.range) {
            out(RuleId::RangeTyping, vec![d.clone(), t.clone()], o, &v.rdf_type, t.object());
        }
        for t in self.with_sp(p, &v.inverse_of) {
            out(RuleId::InverseOf, vec![d.clone(), t.clone()], o, t.object(), s);
        }
        for t in self.with_po(&v.inverse_of, p) {
            out(RuleId::InverseOf, vec![d.clone(), t.clone()], o, t.subject(), s);
        }
        if self.has_type(p, &v.symmetric) {
            let decl = Triple::new(p.clone(), v.rdf_type.clone(), v.symmetric.clone()).expect("iri triple");
            out(RuleId::Symmetric, vec![d.clone(), decl], o, p, s);
        }
        if self.has_type(p, &v.transitive) {
            let decl = Triple::new(p.clone(), v.rdf_type.clone(), v.transitive.clone()).expect("iri triple");
            for t in self.with_sp(o, p) {
                out(RuleId::Transitive, vec![d.clone(), t.clone(), decl.clone()], s, p, t.object());
            }
            for t in self.with_po(p, s) {
                out(RuleId::Transitive, vec![t.clone(), d.clone(), decl.clone()], t.subject(), p, o);
            }
        }
        if self.has_type(p, &v.functional) && !o.is_literal() {
            let decl = Triple::new(p.clone(), v.rdf_type.clone(), v.functional.clone()).expect("iri triple");
            for t in self.with_sp(s, p) {
                if t.object() != o && !t.object().is_literal() {
                    out(RuleId::Functional, vec![d.clone(), t.clone(), decl.clone()], o, &v.same_as, t.object());
                    out(RuleId::Functional, vec![t.clone(), d.clone(), decl.clone()], t.object(), &v.same_as, o);
                }
            }
        }
        if self.has_type(p, &v.inverse_functional) {
            let decl = Triple::new(p.clone(), v.rdf_type.clone(), v.inverse_functional.clone()).expect("iri triple");
            for t in self.with_po(p, o) {
                if t.subject() != s {
                    out(RuleId::InverseFunctional, vec![d.clone(), t.clone(), decl.clone()], s, &v.same_as, t.subject());
                    out(RuleId::InverseFunctional, vec![t.clone(), d.clone(), decl.clone()], t.subject(), &v.same_as, s);
                }
            }
        }
        if *p == v.same_as {
            return;
        }
        for t in self.with_sp(s, &v.same_as) {
            out(RuleId::SameAsSubstitution, vec![t.clone(), d.clone()], t.object(), p, o);
        }
        if !o.is_literal() {
            for t in self.with_sp(o, &v.same_as) {
                out(RuleId::SameAsSubstitution, vec![t.clone(), d.clone()], s, p, t.object());
            }
        }
    }
}
