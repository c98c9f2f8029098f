//! Named-graph triple store with per-statement provenance.
//!
//! Each graph keeps its statements in a sorted map plus three secondary
//! indexes (by subject, by predicate, by object). Every indexed entry
//! corresponds to exactly one stored record.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::rdf_io::{self, ParseDiagnostic};
use crate::term::{Iri, Term, TermError, Triple};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Explicit,
    Inferred,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatementRecord {
    pub triple: Triple,
    pub graph: Iri,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepositoryStats {
    pub explicit: usize,
    pub inferred: usize,
    pub total: usize,
    /// `total / explicit`; `None` on an empty explicit set.
    #[serde(rename = "expansionRatio")]
    pub expansion_ratio: Option<f64>,
}

impl RepositoryStats {
    pub fn from_counts(explicit: usize, inferred: usize) -> Self {
        let total = explicit + inferred;
        let expansion_ratio = (explicit > 0).then(|| total as f64 / explicit as f64);
        RepositoryStats {
            explicit,
            inferred,
            total,
            expansion_ratio,
        }
    }

    /// Ratio rounded to two decimal places for display.
    pub fn rounded_ratio(&self) -> Option<f64> {
        self.expansion_ratio.map(|r| (r * 100.0).round() / 100.0)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("graph <{0}> cannot be persisted: snapshot graphs must live under {ns}", ns = vocab::graph::NS)]
    UnsupportedGraphName(String),
    #[error("snapshot {file}: {diagnostic}")]
    Parse {
        file: String,
        diagnostic: ParseDiagnostic,
    },
    #[error("snapshot {file}: bad provenance ordinal {line:?}")]
    BadOrdinal { file: String, line: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Which index answers a lookup. Exposed so callers can check that every
/// index path produces the same answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    Subject,
    Predicate,
    Object,
    Scan,
}

#[derive(Debug, Default, Clone)]
struct GraphStore {
    records: BTreeMap<Triple, Provenance>,
    by_subject: HashMap<Term, BTreeSet<Triple>>,
    by_predicate: HashMap<Term, BTreeSet<Triple>>,
    by_object: HashMap<Term, BTreeSet<Triple>>,
    inferred: usize,
}

impl GraphStore {
    fn insert(&mut self, triple: Triple, provenance: Provenance) -> bool {
        match self.records.get_mut(&triple) {
            Some(existing) => {
                if *existing == Provenance::Inferred && provenance == Provenance::Explicit {
                    *existing = Provenance::Explicit;
                    self.inferred -= 1;
                }
                false
            }
            None => {
                for (index, key) in [
                    (&mut self.by_subject, triple.subject()),
                    (&mut self.by_predicate, triple.predicate()),
                    (&mut self.by_object, triple.object()),
                ] {
                    index.entry(key.clone()).or_default().insert(triple.clone());
                }
                if provenance == Provenance::Inferred {
                    self.inferred += 1;
                }
                self.records.insert(triple, provenance);
                true
            }
        }
    }

    fn remove(&mut self, triple: &Triple) -> Option<Provenance> {
        let provenance = self.records.remove(triple)?;
        for (index, key) in [
            (&mut self.by_subject, triple.subject()),
            (&mut self.by_predicate, triple.predicate()),
            (&mut self.by_object, triple.object()),
        ] {
            if let Some(bucket) = index.get_mut(key) {
                bucket.remove(triple);
                if bucket.is_empty() {
                    index.remove(key);
                }
            }
        }
        if provenance == Provenance::Inferred {
            self.inferred -= 1;
        }
        Some(provenance)
    }

    fn bucket(&self, kind: IndexKind, key: &Term) -> Option<&BTreeSet<Triple>> {
        match kind {
            IndexKind::Subject => self.by_subject.get(key),
            IndexKind::Predicate => self.by_predicate.get(key),
            IndexKind::Object => self.by_object.get(key),
            IndexKind::Scan => None,
        }
    }

    fn choose_index(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> IndexKind {
        let mut best = (IndexKind::Scan, usize::MAX);
        for (kind, key) in [
            (IndexKind::Subject, s),
            (IndexKind::Object, o),
            (IndexKind::Predicate, p),
        ] {
            if let Some(key) = key {
                let size = self.bucket(kind, key).map_or(0, BTreeSet::len);
                if size < best.1 {
                    best = (kind, size);
                }
            }
        }
        best.0
    }

    fn matching<'a>(
        &'a self,
        kind: IndexKind,
        s: Option<&'a Term>,
        p: Option<&'a Term>,
        o: Option<&'a Term>,
    ) -> Box<dyn Iterator<Item = (&'a Triple, Provenance)> + 'a> {
        let unifies = move |t: &Triple| {
            s.is_none_or(|s| t.subject() == s)
                && p.is_none_or(|p| t.predicate() == p)
                && o.is_none_or(|o| t.object() == o)
        };
        let key = match kind {
            IndexKind::Subject => s,
            IndexKind::Predicate => p,
            IndexKind::Object => o,
            IndexKind::Scan => None,
        };
        match (kind, key) {
            (IndexKind::Scan, _) | (_, None) => Box::new(
                self.records
                    .iter()
                    .filter(move |(t, _)| unifies(t))
                    .map(|(t, prov)| (t, *prov)),
            ),
            (_, Some(key)) => match self.bucket(kind, key) {
                Some(bucket) => Box::new(
                    bucket
                        .iter()
                        .filter(move |t| unifies(t))
                        .map(move |t| (t, self.records[t])),
                ),
                None => Box::new(std::iter::empty()),
            },
        }
    }
}

/// In-memory store of named graphs.
#[derive(Debug, Default, Clone)]
pub struct Repository {
    graphs: BTreeMap<Iri, GraphStore>,
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates `graph` empty if it does not exist yet.
    pub fn ensure_graph(&mut self, graph: &Iri) {
        self.graphs.entry(graph.clone()).or_default();
    }

    /// Inserts a statement. Returns `false` when `(triple, graph)` is already
    /// present; an explicit insert over an inferred record upgrades it.
    pub fn insert(&mut self, graph: &Iri, triple: Triple, provenance: Provenance) -> bool {
        self.graphs
            .entry(graph.clone())
            .or_default()
            .insert(triple, provenance)
    }

    /// Validating variant of [`Repository::insert`] for raw terms.
    pub fn try_insert(
        &mut self,
        graph: &Iri,
        subject: Term,
        predicate: Term,
        object: Term,
        provenance: Provenance,
    ) -> Result<bool, GraphError> {
        let triple = Triple::new(subject, predicate, object)?;
        Ok(self.insert(graph, triple, provenance))
    }

    pub fn remove(&mut self, graph: &Iri, triple: &Triple) -> Option<Provenance> {
        self.graphs.get_mut(graph)?.remove(triple)
    }

    pub fn contains(&self, graph: &Iri, triple: &Triple) -> bool {
        self.provenance(graph, triple).is_some()
    }

    pub fn provenance(&self, graph: &Iri, triple: &Triple) -> Option<Provenance> {
        self.graphs.get(graph)?.records.get(triple).copied()
    }

    pub fn graph_names(&self) -> impl Iterator<Item = &Iri> {
        self.graphs.keys()
    }

    pub fn len(&self, graph: &Iri) -> usize {
        self.graphs.get(graph).map_or(0, |g| g.records.len())
    }

    pub fn is_empty(&self, graph: &Iri) -> bool {
        self.len(graph) == 0
    }

    /// All statements unifying with the pattern, ordered by graph then triple.
    /// `None` in any position is a wildcard.
    pub fn match_pattern(
        &self,
        graph: Option<&Iri>,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Vec<StatementRecord> {
        self.collect(graph, s, p, o, None)
    }

    /// Same as [`Repository::match_pattern`] but forces a specific index.
    /// An index whose position is a wildcard degrades to a scan.
    pub fn match_via(
        &self,
        index: IndexKind,
        graph: Option<&Iri>,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Vec<StatementRecord> {
        self.collect(graph, s, p, o, Some(index))
    }

    fn collect(
        &self,
        graph: Option<&Iri>,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
        forced: Option<IndexKind>,
    ) -> Vec<StatementRecord> {
        let mut out = Vec::new();
        for (name, store) in self.selected(graph) {
            let kind = forced.unwrap_or_else(|| store.choose_index(s, p, o));
            out.extend(store.matching(kind, s, p, o).map(|(t, provenance)| StatementRecord {
                triple: t.clone(),
                graph: name.clone(),
                provenance,
            }));
        }
        out
    }

    /// Borrowing iterator over one graph's matching triples, in triple order.
    pub fn triples_matching<'a>(
        &'a self,
        graph: &Iri,
        s: Option<&'a Term>,
        p: Option<&'a Term>,
        o: Option<&'a Term>,
    ) -> Box<dyn Iterator<Item = (&'a Triple, Provenance)> + 'a> {
        match self.graphs.get(graph) {
            Some(store) => store.matching(store.choose_index(s, p, o), s, p, o),
            None => Box::new(std::iter::empty()),
        }
    }

    /// Objects of `(subject, predicate, ?)` in one graph.
    pub fn objects<'a>(&'a self, graph: &Iri, subject: &'a Term, predicate: &'a Term) -> Vec<&'a Term> {
        self.triples_matching(graph, Some(subject), Some(predicate), None)
            .map(|(t, _)| t.object())
            .collect()
    }

    /// Subjects of `(?, predicate, object)` in one graph.
    pub fn subjects<'a>(&'a self, graph: &Iri, predicate: &'a Term, object: &'a Term) -> Vec<&'a Term> {
        self.triples_matching(graph, None, Some(predicate), Some(object))
            .map(|(t, _)| t.subject())
            .collect()
    }

    fn selected<'a>(&'a self, graph: Option<&Iri>) -> Vec<(&'a Iri, &'a GraphStore)> {
        match graph {
            Some(name) => self.graphs.get_key_value(name).into_iter().collect(),
            None => self.graphs.iter().collect(),
        }
    }

    pub fn stats(&self, graph: &Iri) -> RepositoryStats {
        match self.graphs.get(graph) {
            Some(store) => {
                RepositoryStats::from_counts(store.records.len() - store.inferred, store.inferred)
            }
            None => RepositoryStats::from_counts(0, 0),
        }
    }

    /// Removes every inferred statement from `graph`; returns how many.
    pub fn clear_inferred(&mut self, graph: &Iri) -> usize {
        let Some(store) = self.graphs.get_mut(graph) else {
            return 0;
        };
        let doomed: Vec<Triple> = store
            .records
            .iter()
            .filter(|(_, p)| **p == Provenance::Inferred)
            .map(|(t, _)| t.clone())
            .collect();
        for triple in &doomed {
            store.remove(triple);
        }
        doomed.len()
    }

    /// Removes every statement whose subject satisfies `pred`; returns how many.
    pub fn remove_where(&mut self, graph: &Iri, mut pred: impl FnMut(&Triple, Provenance) -> bool) -> usize {
        let Some(store) = self.graphs.get_mut(graph) else {
            return 0;
        };
        let doomed: Vec<Triple> = store
            .records
            .iter()
            .filter(|(t, p)| pred(t, **p))
            .map(|(t, _)| t.clone())
            .collect();
        for triple in &doomed {
            store.remove(triple);
        }
        doomed.len()
    }

    /// Writes `<name>.nt` plus `<name>.inferred` for every graph into `dir`.
    /// Graph IRIs must be of the form `urn:defii:graph:<name>`.
    pub fn save_snapshot(&self, dir: &Path) -> Result<(), GraphError> {
        fs::create_dir_all(dir)?;
        for (name, store) in &self.graphs {
            let stem = snapshot_stem(name)?;
            let mut body = String::new();
            let mut ordinals = String::new();
            // Term order is not text order; ordinals index the sorted lines.
            let mut lines: Vec<(String, Provenance)> = store
                .records
                .iter()
                .map(|(t, p)| (t.to_ntriples(), *p))
                .collect();
            lines.sort();
            for (ordinal, (line, provenance)) in lines.iter().enumerate() {
                body.push_str(line);
                body.push('\n');
                if *provenance == Provenance::Inferred {
                    ordinals.push_str(&ordinal.to_string());
                    ordinals.push('\n');
                }
            }
            fs::write(dir.join(format!("{stem}.nt")), body)?;
            fs::write(dir.join(format!("{stem}.inferred")), ordinals)?;
        }
        Ok(())
    }

    /// Loads every `*.nt` file in `dir` with its provenance sidecar.
    pub fn load_snapshot(dir: &Path) -> Result<Self, GraphError> {
        let mut repo = Repository::new();
        let mut entries: Vec<_> = fs::read_dir(dir)?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|ext| ext == "nt"))
            .collect();
        entries.sort();
        for path in entries {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            let graph = Iri::new_unchecked(format!("{}{stem}", vocab::graph::NS));
            let file = path.display().to_string();
            let text = fs::read_to_string(&path)?;
            let triples = rdf_io::parse_ntriples(&text).map_err(|diagnostic| GraphError::Parse {
                file: file.clone(),
                diagnostic,
            })?;
            let sidecar = path.with_extension("inferred");
            let mut inferred = BTreeSet::new();
            if sidecar.exists() {
                for line in fs::read_to_string(&sidecar)?.lines() {
                    let line = line.trim();
                    if line.is_empty() {
                        continue;
                    }
                    let ordinal: usize = line.parse().map_err(|_| GraphError::BadOrdinal {
                        file: sidecar.display().to_string(),
                        line: line.to_string(),
                    })?;
                    inferred.insert(ordinal);
                }
            }
            repo.graphs.entry(graph.clone()).or_default();
            for (ordinal, triple) in triples.into_iter().enumerate() {
                let provenance = if inferred.contains(&ordinal) {
                    Provenance::Inferred
                } else {
                    Provenance::Explicit
                };
                repo.insert(&graph, triple, provenance);
            }
        }
        Ok(repo)
    }
}

fn snapshot_stem(graph: &Iri) -> Result<&str, GraphError> {
    graph
        .as_str()
        .strip_prefix(vocab::graph::NS)
        .filter(|stem| !stem.is_empty() && stem.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
        .ok_or_else(|| GraphError::UnsupportedGraphName(graph.as_str().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Term {
        Term::iri_unchecked(format!("http://ex.org/{s}"))
    }

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(iri(s), iri(p), iri(o)).unwrap()
    }

    fn mapped() -> Iri {
        Iri::new_unchecked(vocab::graph::MAPPED)
    }

    #[test]
    fn duplicate_insert_is_noop() {
        let mut repo = Repository::new();
        assert!(repo.insert(&mapped(), t("a", "p", "b"), Provenance::Explicit));
        assert!(!repo.insert(&mapped(), t("a", "p", "b"), Provenance::Explicit));
        assert_eq!(repo.len(&mapped()), 1);
    }

    #[test]
    fn explicit_upgrades_inferred() {
        let mut repo = Repository::new();
        repo.insert(&mapped(), t("a", "p", "b"), Provenance::Inferred);
        repo.insert(&mapped(), t("a", "p", "b"), Provenance::Explicit);
        assert_eq!(repo.len(&mapped()), 1);
        assert_eq!(repo.provenance(&mapped(), &t("a", "p", "b")), Some(Provenance::Explicit));
        assert_eq!(repo.stats(&mapped()).inferred, 0);
    }

    #[test]
    fn inferred_never_downgrades_explicit() {
        let mut repo = Repository::new();
        repo.insert(&mapped(), t("a", "p", "b"), Provenance::Explicit);
        assert!(!repo.insert(&mapped(), t("a", "p", "b"), Provenance::Inferred));
        assert_eq!(repo.provenance(&mapped(), &t("a", "p", "b")), Some(Provenance::Explicit));
    }

    #[test]
    fn literal_subject_is_rejected() {
        let mut repo = Repository::new();
        let err = repo
            .try_insert(&mapped(), Term::string("5"), iri("p"), iri("b"), Provenance::Explicit)
            .unwrap_err();
        assert_eq!(err.to_string(), "literal in subject position");
    }

    #[test]
    fn empty_repo_matches_nothing() {
        let repo = Repository::new();
        assert!(repo.match_pattern(None, None, None, None).is_empty());
    }

    #[test]
    fn ground_pattern_matches_one() {
        let mut repo = Repository::new();
        repo.insert(&mapped(), t("a", "p", "b"), Provenance::Explicit);
        repo.insert(&mapped(), t("a", "p", "c"), Provenance::Explicit);
        let hits = repo.match_pattern(Some(&mapped()), Some(&iri("a")), Some(&iri("p")), Some(&iri("b")));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].triple, t("a", "p", "b"));
    }

    #[test]
    fn stats_examples() {
        let s = RepositoryStats::from_counts(19_720, 36_674);
        assert_eq!(s.total, 56_394);
        assert_eq!(s.rounded_ratio(), Some(2.86));
        assert_eq!(RepositoryStats::from_counts(0, 0).expansion_ratio, None);
        assert_eq!(RepositoryStats::from_counts(10, 0).expansion_ratio, Some(1.0));
    }

    #[test]
    fn clear_inferred_counts() {
        let mut repo = Repository::new();
        for i in 0..3 {
            repo.insert(&mapped(), t(&format!("e{i}"), "p", "x"), Provenance::Explicit);
        }
        for i in 0..5 {
            repo.insert(&mapped(), t(&format!("i{i}"), "p", "x"), Provenance::Inferred);
        }
        assert_eq!(repo.clear_inferred(&mapped()), 5);
        let stats = repo.stats(&mapped());
        assert_eq!((stats.explicit, stats.inferred), (3, 0));
        assert_eq!(repo.clear_inferred(&mapped()), 0);
        assert_eq!(Repository::new().clear_inferred(&mapped()), 0);
    }

    #[test]
    fn snapshot_round_trip() {
        let dir = std::env::temp_dir().join(format!("defii-snap-{}", uuid::Uuid::new_v4()));
        let mut repo = Repository::new();
        repo.insert(&mapped(), t("a", "p", "b"), Provenance::Explicit);
        repo.insert(&mapped(), t("b", "p", "c"), Provenance::Inferred);
        repo.insert(
            &mapped(),
            Triple::new(iri("a"), iri("q"), Term::string("x \"y\"")).unwrap(),
            Provenance::Inferred,
        );
        repo.save_snapshot(&dir).unwrap();
        let loaded = Repository::load_snapshot(&dir).unwrap();
        assert_eq!(
            loaded.match_pattern(None, None, None, None),
            repo.match_pattern(None, None, None, None)
        );
        let sidecar = fs::read_to_string(dir.join("mapped.inferred")).unwrap();
        assert_eq!(sidecar.lines().count(), 2);
        fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn foreign_graph_names_cannot_be_saved() {
        let mut repo = Repository::new();
        repo.insert(&Iri::new_unchecked("http://ex.org/g"), t("a", "p", "b"), Provenance::Explicit);
        let dir = std::env::temp_dir().join(format!("defii-snap-{}", uuid::Uuid::new_v4()));
        assert!(matches!(repo.save_snapshot(&dir), Err(GraphError::UnsupportedGraphName(_))));
        fs::remove_dir_all(dir).ok();
    }
}
