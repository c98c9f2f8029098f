//! Naive RDFS-Plus fixpoint: apply every rule to the whole statement set
//! until nothing changes. Written against the rule definitions only.

use std::collections::{BTreeSet, HashSet};

use defii_core::term::{Term, Triple};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const SUB_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
const SUB_PROP: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
const DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
const RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
const INVERSE: &str = "http://www.w3.org/2002/07/owl#inverseOf";
const SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
const TRANSITIVE: &str = "http://www.w3.org/2002/07/owl#TransitiveProperty";
const SYMMETRIC: &str = "http://www.w3.org/2002/07/owl#SymmetricProperty";
const FUNCTIONAL: &str = "http://www.w3.org/2002/07/owl#FunctionalProperty";
const INV_FUNCTIONAL: &str = "http://www.w3.org/2002/07/owl#InverseFunctionalProperty";

type Tuple = (Term, Term, Term);

fn is(t: &Term, iri: &str) -> bool {
    t.as_iri().is_some_and(|i| i.as_str() == iri)
}

fn one_round(all: &HashSet<Tuple>) -> Vec<Tuple> {
    let rdf_type = Term::iri_unchecked(RDF_TYPE);
    let same_as = Term::iri_unchecked(SAME_AS);
    let typed = |p: &Term, class: &str| all.contains(&(p.clone(), rdf_type.clone(), Term::iri_unchecked(class)));
    let mut out = Vec::new();
    for (s1, p1, o1) in all {
        // Single-premise rules.
        if is(p1, SAME_AS) {
            out.push((o1.clone(), p1.clone(), s1.clone()));
        }
        if typed(p1, SYMMETRIC) {
            out.push((o1.clone(), p1.clone(), s1.clone()));
        }
        for (s2, p2, o2) in all {
            // R1, R3
            if is(p1, SUB_CLASS) && is(p2, SUB_CLASS) && o1 == s2 {
                out.push((s1.clone(), p1.clone(), o2.clone()));
            }
            if is(p1, SUB_PROP) && is(p2, SUB_PROP) && o1 == s2 {
                out.push((s1.clone(), p1.clone(), o2.clone()));
            }
            // R2
            if is(p1, RDF_TYPE) && is(p2, SUB_CLASS) && o1 == s2 {
                out.push((s1.clone(), p1.clone(), o2.clone()));
            }
            // R4, R5, R6, R7 with the second statement as the schema axiom.
            if is(p2, SUB_PROP) && p1 == s2 {
                out.push((s1.clone(), o2.clone(), o1.clone()));
            }
            if is(p2, DOMAIN) && p1 == s2 {
                out.push((s1.clone(), rdf_type.clone(), o2.clone()));
            }
            if is(p2, RANGE) && p1 == s2 {
                out.push((o1.clone(), rdf_type.clone(), o2.clone()));
            }
            if is(p2, INVERSE) && p1 == s2 {
                out.push((o1.clone(), o2.clone(), s1.clone()));
            }
            if is(p2, INVERSE) && p1 == o2 {
                out.push((o1.clone(), s2.clone(), s1.clone()));
            }
            // R9
            if p1 == p2 && o1 == s2 && typed(p1, TRANSITIVE) {
                out.push((s1.clone(), p1.clone(), o2.clone()));
            }
            // R10: literal objects never become sameAs members.
            if p1 == p2 && s1 == s2 && o1 != o2 && !o1.is_literal() && !o2.is_literal() && typed(p1, FUNCTIONAL) {
                out.push((o1.clone(), same_as.clone(), o2.clone()));
            }
            // R11
            if p1 == p2 && o1 == o2 && s1 != s2 && typed(p1, INV_FUNCTIONAL) {
                out.push((s1.clone(), same_as.clone(), s2.clone()));
            }
            // R12
            if is(p1, SAME_AS) && is(p2, SAME_AS) && o1 == s2 {
                out.push((s1.clone(), same_as.clone(), o2.clone()));
            }
            if is(p1, SAME_AS) && !is(p2, SAME_AS) && s2 == s1 {
                out.push((o1.clone(), p2.clone(), o2.clone()));
            }
            if is(p1, SAME_AS) && !is(p2, SAME_AS) && o2 == s1 {
                out.push((s2.clone(), p2.clone(), o1.clone()));
            }
        }
    }
    out
}

/// Statements entailed by `graph` together with `axioms` that are in
/// neither input, i.e. what a materializer should insert.
pub fn naive_inferred(graph: &[Triple], axioms: &[Triple]) -> BTreeSet<Triple> {
    let to_tuple = |t: &Triple| (t.subject().clone(), t.predicate().clone(), t.object().clone());
    let base: HashSet<Tuple> = graph.iter().chain(axioms).map(to_tuple).collect();
    let mut all = base.clone();
    loop {
        let before = all.len();
        for (s, p, o) in one_round(&all) {
            // Conclusions that are not well-formed statements are dropped.
            if Triple::new(s.clone(), p.clone(), o.clone()).is_ok() {
                all.insert((s, p, o));
            }
        }
        if all.len() == before {
            break;
        }
    }
    all.difference(&base)
        .map(|(s, p, o)| Triple::new(s.clone(), p.clone(), o.clone()).expect("filtered above"))
        .collect()
}
