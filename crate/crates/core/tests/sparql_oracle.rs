#[path = "oracles/brute_force_sparql.rs"]
mod brute_force_sparql;

use brute_force_sparql::{brute_force, random_graph, random_query};
use defii_core::graph::{Provenance, Repository};
use defii_core::ontology::OntologyCatalog;
use defii_core::rdf_io::parse_turtle;
use defii_core::reasoner::materialize;
use defii_core::sparql::{evaluate, parse_query};
use defii_core::term::{Iri, Term, Triple};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn catalog() -> OntologyCatalog {
    let ttl = r#"
        @prefix owl: <http://www.w3.org/2002/07/owl#> .
        @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
        @prefix ex: <http://ex.org/> .
        ex:C0 rdfs:subClassOf ex:C1 .
        ex:p0 rdfs:subPropertyOf ex:p1 ; rdfs:domain ex:C0 .
        ex:p2 a owl:TransitiveProperty .
        ex:p1 owl:inverseOf ex:p2 .
    "#;
    let triples = parse_turtle(ttl).unwrap().0;
    OntologyCatalog::load([triples.as_slice()]).unwrap()
}

fn run(seed: u64, reason: bool) {
    let mut rng = StdRng::seed_from_u64(seed);
    let g = Iri::new_unchecked("urn:defii:graph:test");
    let catalog = catalog();
    let mut non_empty = 0;
    for case in 0..120 {
        let graph = random_graph(&mut rng, 100);
        let mut repo = Repository::new();
        for t in &graph {
            repo.insert(&g, t.clone(), Provenance::Explicit);
        }
        if reason {
            materialize(&mut repo, &g, &catalog);
        }
        let visible: Vec<Triple> = repo.match_pattern(Some(&g), None, None, None).into_iter().map(|r| r.triple).collect();
        let mut universe: Vec<Term> = visible.iter().flat_map(|t| [t.subject().clone(), t.object().clone()]).collect();
        universe.push(Term::integer(2));
        universe.push(Term::iri_unchecked("http://ex.org/absent"));
        universe.sort();
        universe.dedup();
        for _ in 0..3 {
            let q = random_query(&mut rng, &visible, &universe);
            let text = q.to_sparql();
            let ast = parse_query(&text).unwrap_or_else(|e| panic!("case {case}: {e}\n{text}"));
            let table = evaluate(&repo, &g, &ast).unwrap_or_else(|e| panic!("case {case}: {e}\n{text}"));
            let expected = brute_force(&visible, &q);
            non_empty += usize::from(!expected.is_empty());
            assert_eq!(table.rows, expected, "case {case}, reasoning {reason}\n{text}");
        }
    }
    // Guard against a generator that only produces empty answers.
    assert!(non_empty >= 60, "only {non_empty} of 360 queries had solutions");
}

#[test]
fn agrees_with_brute_force_explicit() {
    run(7, false);
}

#[test]
fn agrees_with_brute_force_materialized() {
    run(11, true);
}

#[test]
fn pattern_order_independence_and_distinct_idempotence() {
    use rand::seq::SliceRandom;
    let mut rng = StdRng::seed_from_u64(3);
    let g = Iri::new_unchecked("urn:defii:graph:test");
    for _ in 0..100 {
        let graph = random_graph(&mut rng, 60);
        let mut repo = Repository::new();
        for t in &graph {
            repo.insert(&g, t.clone(), Provenance::Explicit);
        }
        let mut universe: Vec<Term> = graph.iter().map(|t| t.subject().clone()).collect();
        universe.dedup();
        let mut q = random_query(&mut rng, &graph, &universe);
        q.bind = None;
        q.filter = None;
        q.projection.retain(|&v| v != 2 || q.patterns.iter().flatten().any(|s| matches!(s, brute_force_sparql::Slot::Var(2))));
        if q.projection.is_empty() {
            continue;
        }
        let eval = |q: &brute_force_sparql::RandomQuery| evaluate(&repo, &g, &parse_query(&q.to_sparql()).unwrap()).unwrap();
        let base = eval(&q);
        for _ in 0..3 {
            let mut permuted = q.clone();
            permuted.patterns.shuffle(&mut rng);
            assert_eq!(eval(&permuted).rows, base.rows, "{}", permuted.to_sparql());
        }
        q.distinct = true;
        let once = eval(&q).rows;
        let mut twice = once.clone();
        twice.dedup();
        assert_eq!(once, twice);
    }
}
