use std::collections::BTreeSet;

use defii_core::graph::{IndexKind, Provenance, Repository};
use defii_core::rdf_io::{parse_ntriples, parse_turtle, serialize_ntriples};
use defii_core::term::{Iri, Literal, Term, Triple};
use proptest::prelude::*;

fn iri_term() -> impl Strategy<Value = Term> {
    (0..6usize).prop_map(|i| Term::iri_unchecked(format!("http://ex.org/r{i}")))
}

fn object() -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => iri_term(),
        1 => "[a-z0-9]{0,6}".prop_map(|s| Term::blank(format!("b{s}"))),
        1 => any::<i32>().prop_map(|n| Term::integer(n.into())),
        1 => "\\PC{0,8}".prop_map(Term::string),
        1 => ("[ -~]{0,6}", "[a-z]{2}").prop_map(|(s, l)| Term::Literal(Literal::lang(s, l))),
        1 => "[\"\\\\\n\r\t a]{0,6}".prop_map(Term::string),
    ]
}

fn triple() -> impl Strategy<Value = Triple> {
    (iri_term(), iri_term(), object()).prop_map(|(s, p, o)| Triple::new(s, p, o).unwrap())
}

fn graphs() -> [Iri; 2] {
    [Iri::new_unchecked("urn:defii:graph:a"), Iri::new_unchecked("urn:defii:graph:b")]
}

proptest! {
    #[test]
    fn every_index_agrees_with_scan(
        triples in prop::collection::vec((triple(), any::<bool>(), any::<bool>()), 0..80),
        s in prop::option::of(iri_term()),
        p in prop::option::of(iri_term()),
        o in prop::option::of(object()),
    ) {
        let gs = graphs();
        let mut repo = Repository::new();
        for (t, second, inferred) in &triples {
            let prov = if *inferred { Provenance::Inferred } else { Provenance::Explicit };
            repo.insert(&gs[usize::from(*second)], t.clone(), prov);
        }
        for g in [None, Some(&gs[0]), Some(&gs[1])] {
            let scan = repo.match_via(IndexKind::Scan, g, s.as_ref(), p.as_ref(), o.as_ref());
            for kind in [IndexKind::Subject, IndexKind::Predicate, IndexKind::Object] {
                prop_assert_eq!(&repo.match_via(kind, g, s.as_ref(), p.as_ref(), o.as_ref()), &scan);
            }
            prop_assert_eq!(&repo.match_pattern(g, s.as_ref(), p.as_ref(), o.as_ref()), &scan);
            for r in &scan {
                prop_assert!(s.as_ref().is_none_or(|s| r.triple.subject() == s));
                prop_assert!(p.as_ref().is_none_or(|p| r.triple.predicate() == p));
                prop_assert!(o.as_ref().is_none_or(|o| r.triple.object() == o));
            }
        }
    }

    #[test]
    fn set_semantics_and_provenance_upgrade(triples in prop::collection::vec(triple(), 1..40)) {
        let g = &graphs()[0];
        let mut repo = Repository::new();
        for t in &triples {
            repo.insert(g, t.clone(), Provenance::Inferred);
        }
        let distinct: BTreeSet<&Triple> = triples.iter().collect();
        prop_assert_eq!(repo.len(g), distinct.len());
        for t in &triples {
            prop_assert!(!repo.insert(g, t.clone(), Provenance::Inferred));
        }
        prop_assert_eq!(repo.len(g), distinct.len());
        // Explicit assertion upgrades; a later inferred insert does not downgrade.
        let first = triples[0].clone();
        repo.insert(g, first.clone(), Provenance::Explicit);
        repo.insert(g, first.clone(), Provenance::Inferred);
        prop_assert_eq!(repo.provenance(g, &first), Some(Provenance::Explicit));
        let stats = repo.stats(g);
        prop_assert_eq!(stats.explicit + stats.inferred, stats.total);
        prop_assert_eq!(stats.total, distinct.len());
    }

    #[test]
    fn ntriples_round_trip(triples in prop::collection::vec(triple(), 0..40)) {
        let text = serialize_ntriples(&triples);
        let parsed: BTreeSet<Triple> = parse_ntriples(&text).unwrap().into_iter().collect();
        let expected: BTreeSet<Triple> = triples.iter().cloned().collect();
        prop_assert_eq!(&parsed, &expected);
        // N-Triples output is also valid Turtle.
        let via_turtle: BTreeSet<Triple> = parse_turtle(&text).unwrap().0.into_iter().collect();
        prop_assert_eq!(&via_turtle, &expected);
        prop_assert_eq!(serialize_ntriples(parsed.iter()), text);
    }

    #[test]
    fn snapshot_round_trip(triples in prop::collection::vec((triple(), any::<bool>(), any::<bool>()), 0..40)) {
        let gs = graphs();
        let mut repo = Repository::new();
        for (t, second, inferred) in &triples {
            let prov = if *inferred { Provenance::Inferred } else { Provenance::Explicit };
            repo.insert(&gs[usize::from(*second)], t.clone(), prov);
        }
        let dir = std::env::temp_dir().join(format!("defii-snap-{}", uuid::Uuid::new_v4()));
        repo.save_snapshot(&dir).unwrap();
        let loaded = Repository::load_snapshot(&dir).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        prop_assert_eq!(
            loaded.match_pattern(None, None, None, None),
            repo.match_pattern(None, None, None, None)
        );
    }
}
